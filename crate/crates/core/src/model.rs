//! Model coefficients, the social response function, fundamental-price
//! schedules, and pointwise drift evaluation.
//!
//! The equation under study, for the log-price `P`, is
//!
//! ```text
//! dP(t) = -mu (1 - e^{P0 - P(t)}) dt + sigma dB_t + nu S(P(t) - P(t-1)) dt
//! ```
//!
//! with a unit delay and `S(x) = arctan(d x^{2n+1})`, odd, increasing and
//! saturating. All functions here are pure and thread-safe.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// Exponent cutoff for the mean-reversion term. `e^700` is near the top of
/// the f64 range; beyond it the term is reported as saturated instead of
/// producing inf.
pub const EXP_SATURATION_CUTOFF: f64 = 700.0;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("mu must be positive, got {0}")]
    NonPositiveMu(f64),
    #[error("sigma must be non-negative, got {0}")]
    NegativeSigma(f64),
    #[error("nu must be non-negative, got {0}")]
    NegativeNu(f64),
    #[error("the delay is fixed to 1 by time rescaling, got {0}")]
    UnsupportedDelay(f64),
    #[error("response steepness d must be positive, got {0}")]
    NonPositiveSteepness(f64),
    #[error("random-walk schedule volatility must be non-negative, got {0}")]
    NegativeScheduleVol(f64),
    #[error("jump time {t_jump} outside the simulation horizon {horizon}")]
    JumpOutsideHorizon { t_jump: f64, horizon: f64 },
}

/// Coefficients of the bubble equation: mean-reversion strength `mu`
/// (1/time), noise amplitude `sigma` (1/sqrt(time)), speculative strength
/// `nu` (1/time). The delay is fixed to one time unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mu: f64,
    pub sigma: f64,
    pub nu: f64,
    #[serde(default = "unit_delay")]
    pub delay: f64,
}

fn unit_delay() -> f64 {
    1.0
}

impl ModelParams {
    pub fn new(mu: f64, sigma: f64, nu: f64) -> Result<Self, ModelError> {
        let p = ModelParams {
            mu,
            sigma,
            nu,
            delay: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.mu > 0.0) {
            return Err(ModelError::NonPositiveMu(self.mu));
        }
        if !(self.sigma >= 0.0) {
            return Err(ModelError::NegativeSigma(self.sigma));
        }
        if !(self.nu >= 0.0) {
            return Err(ModelError::NegativeNu(self.nu));
        }
        if self.delay != 1.0 {
            return Err(ModelError::UnsupportedDelay(self.delay));
        }
        Ok(())
    }

    /// Same parameters with the speculative term switched off (the
    /// Ornstein-Uhlenbeck reference).
    #[must_use]
    pub fn without_speculation(&self) -> Self {
        ModelParams { nu: 0.0, ..*self }
    }

    /// Same parameters with a different noise amplitude.
    #[must_use]
    pub fn with_sigma(&self, sigma: f64) -> Self {
        ModelParams { sigma, ..*self }
    }
}

/// The social response family `S(x) = arctan(d x^{2n+1})`, optionally
/// normalized by `2/pi` so that `S -> 1` instead of `pi/2`.
///
/// `n = 0` is accepted (the response is then linear at the origin with
/// `S'(0) = d`), but the mean-reversion assumption check downstream will
/// flag it when `nu d` is not small against `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseSpec {
    /// Steepness coefficient, dimensionless, > 0.
    pub d: f64,
    /// Polynomial index; the exponent is `2n + 1`.
    pub n: u32,
    /// Multiply by 2/pi so the saturation level is 1 rather than pi/2.
    #[serde(default)]
    pub normalized: bool,
}

impl ResponseSpec {
    pub fn new(d: f64, n: u32, normalized: bool) -> Result<Self, ModelError> {
        if !(d > 0.0) {
            return Err(ModelError::NonPositiveSteepness(d));
        }
        Ok(ResponseSpec { d, n, normalized })
    }

    /// Cubic response, the paper's most common choice.
    pub fn cubic(d: f64) -> Result<Self, ModelError> {
        Self::new(d, 1, false)
    }

    /// Quintic response.
    pub fn quintic(d: f64) -> Result<Self, ModelError> {
        Self::new(d, 2, false)
    }

    #[inline]
    fn scale(&self) -> f64 {
        if self.normalized {
            2.0 / std::f64::consts::PI
        } else {
            1.0
        }
    }

    /// The limit of `S(x)` as `x -> +inf`: 1 if normalized, pi/2 raw.
    pub fn saturation(&self) -> f64 {
        self.scale() * FRAC_PI_2
    }

    /// S(x). Total, odd, increasing, bounded by `saturation()`.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let m = 2 * self.n + 1;
        self.scale() * (self.d * x.powi(m as i32)).atan()
    }

    /// Exact analytic derivative S'(x); non-negative everywhere.
    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        let m = (2 * self.n + 1) as i32;
        let u = self.d * x.powi(m);
        self.scale() * self.d * m as f64 * x.powi(m - 1) / (1.0 + u * u)
    }

    /// S'(0): zero for n >= 1, `d` (times the normalization) for n = 0.
    pub fn derivative_at_origin(&self) -> f64 {
        if self.n == 0 {
            self.scale() * self.d
        } else {
            0.0
        }
    }

    /// Diagnostic: the inflection point `b > 0` where `S''` changes sign
    /// (positive on `[0, b)`, negative beyond). `None` for `n = 0`, where
    /// `S''` is negative on all of `(0, inf)`.
    pub fn inflection_point(&self) -> Option<f64> {
        if self.n == 0 {
            return None;
        }
        let m = (2 * self.n + 1) as f64;
        // S'' = 0  <=>  (m-1)(1 + d^2 x^{2m}) = 2m d^2 x^{2m}
        Some(((m - 1.0) / ((m + 1.0) * self.d * self.d)).powf(1.0 / (2.0 * m)))
    }
}

/// The fundamental log-price path P0(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FundamentalSchedule {
    /// P0 constant in time.
    Constant { p0: f64 },
    /// P0 = `p_minus` before `t_jump`, `p_plus` from the first grid point
    /// at or after `t_jump`.
    Jump {
        p_minus: f64,
        p_plus: f64,
        t_jump: f64,
    },
    /// Random walk with drift: increments `drift*dt + vol*sqrt(dt)*xi`,
    /// driven by its own seed, independent of the trajectory noise.
    RandomWalk {
        p_start: f64,
        drift: f64,
        vol: f64,
        seed: u64,
    },
}

impl FundamentalSchedule {
    pub fn validate(&self, horizon: f64) -> Result<(), ModelError> {
        match *self {
            FundamentalSchedule::Constant { .. } => Ok(()),
            FundamentalSchedule::Jump { t_jump, .. } => {
                if t_jump < 0.0 || t_jump > horizon {
                    Err(ModelError::JumpOutsideHorizon {
                        t_jump,
                        horizon,
                    })
                } else {
                    Ok(())
                }
            }
            FundamentalSchedule::RandomWalk { vol, .. } => {
                if vol < 0.0 {
                    Err(ModelError::NegativeScheduleVol(vol))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Non-fatal diagnostics. The fundamental path is meant to move much
    /// more slowly than the price, so a random-walk volatility at or above
    /// the price volatility is worth a warning but not a rejection.
    pub fn warnings(&self, params: &ModelParams) -> Vec<String> {
        let mut out = Vec::new();
        if let FundamentalSchedule::RandomWalk { vol, .. } = *self {
            if vol >= params.sigma && params.sigma > 0.0 {
                out.push(format!(
                    "fundamental volatility {vol} is not small against price volatility {}",
                    params.sigma
                ));
            }
        }
        out
    }

    /// P0 at t = 0 (used to anchor default initial conditions).
    pub fn initial_value(&self) -> f64 {
        match *self {
            FundamentalSchedule::Constant { p0 } => p0,
            FundamentalSchedule::Jump {
                p_minus,
                p_plus,
                t_jump,
            } => {
                if t_jump <= 0.0 {
                    p_plus
                } else {
                    p_minus
                }
            }
            FundamentalSchedule::RandomWalk { p_start, .. } => p_start,
        }
    }
}

/// A drift evaluation, with a flag marking that the mean-reversion
/// exponential hit the saturation guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftValue {
    pub value: f64,
    pub saturated: bool,
}

/// The fundamentalist term `f(P, P0) = -mu (1 - e^{P0 - P})`.
///
/// Zero at `P = P0`, tends to `-mu` as `P -> +inf`, and explodes upward as
/// `P` falls far below `P0`; the exponent is clamped at
/// [`EXP_SATURATION_CUTOFF`] so deep undershoots report saturation instead
/// of overflowing.
#[inline]
pub fn fundamental_term(params: &ModelParams, p: f64, p0: f64) -> DriftValue {
    let e = p0 - p;
    if e > EXP_SATURATION_CUTOFF {
        DriftValue {
            value: -params.mu * (1.0 - EXP_SATURATION_CUTOFF.exp()),
            saturated: true,
        }
    } else {
        DriftValue {
            value: -params.mu * (1.0 - e.exp()),
            saturated: false,
        }
    }
}

/// Full drift of the bubble equation at one point:
/// `f(P, P0) + nu S(lag_diff)` where `lag_diff = P(t) - P(t-1)`.
#[inline]
pub fn total_drift(
    params: &ModelParams,
    spec: &ResponseSpec,
    p: f64,
    p0: f64,
    lag_diff: f64,
) -> DriftValue {
    let f = fundamental_term(params, p, p0);
    DriftValue {
        value: f.value + params.nu * spec.value(lag_diff),
        saturated: f.saturated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cubic04() -> ResponseSpec {
        ResponseSpec::cubic(0.4).unwrap()
    }

    #[test]
    fn params_invariants() {
        assert!(ModelParams::new(4.0, 3.0, 5.0).is_ok());
        assert_eq!(
            ModelParams::new(0.0, 3.0, 5.0),
            Err(ModelError::NonPositiveMu(0.0))
        );
        assert_eq!(
            ModelParams::new(4.0, -1.0, 5.0),
            Err(ModelError::NegativeSigma(-1.0))
        );
        assert_eq!(
            ModelParams::new(4.0, 3.0, -5.0),
            Err(ModelError::NegativeNu(-5.0))
        );
        let mut p = ModelParams::new(4.0, 3.0, 5.0).unwrap();
        p.delay = 2.0;
        assert_eq!(p.validate(), Err(ModelError::UnsupportedDelay(2.0)));
    }

    #[test]
    fn response_values() {
        let s = cubic04();
        assert_eq!(s.value(0.0), 0.0);
        // arctan(10.8) frozen from a 25-digit oracle
        assert!((s.value(3.0) - 1.478_466_992_063_297_6).abs() < 1e-14);
        assert!((s.value(-3.0) + 1.478_466_992_063_297_6).abs() < 1e-14);
        // normalized variant saturates at 1
        let sn = ResponseSpec::new(0.4, 1, true).unwrap();
        assert!((sn.value(1e12) - 1.0).abs() < 1e-9);
        assert!(s.value(1e12) <= FRAC_PI_2);
    }

    #[test]
    fn response_derivative_values() {
        let s = cubic04();
        assert_eq!(s.derivative(0.0), 0.0);
        // 3*0.4/(1+0.16), frozen analytic value
        assert!((s.derivative(1.0) - 1.034_482_758_620_689_7).abs() < 1e-14);
        // n = 0 is allowed and has S'(0) = d
        let lin = ResponseSpec::new(0.9, 0, false).unwrap();
        assert_eq!(lin.derivative_at_origin(), 0.9);
        assert_eq!(cubic04().derivative_at_origin(), 0.0);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // central differences with h = 1e-6, relative tolerance 1e-6; the
        // steep quintic is compared only where the difference quotient is
        // itself well conditioned (cancellation in S(x+h) - S(x-h) swamps
        // the quotient once S' falls below ~1e-6)
        let h = 1e-6;
        let cases: [(ResponseSpec, f64); 2] = [
            (cubic04(), 10.0),
            (ResponseSpec::quintic(90.0).unwrap(), 1.5),
        ];
        for (spec, xmax) in cases {
            let steps = (xmax / 0.05) as i32;
            for i in -steps..=steps {
                let x = i as f64 * 0.05;
                let fd = (spec.value(x + h) - spec.value(x - h)) / (2.0 * h);
                let an = spec.derivative(x);
                let denom = an.abs().max(1e-6);
                assert!(
                    (fd - an).abs() / denom < 1e-6,
                    "x={x}: fd={fd} analytic={an}"
                );
            }
        }
    }

    #[test]
    fn inflection_diagnostic() {
        let s = cubic04();
        let b = s.inflection_point().unwrap();
        // second differences change sign across b
        let h = 1e-4;
        let dd = |x: f64| s.value(x + h) - 2.0 * s.value(x) + s.value(x - h);
        assert!(dd(b * 0.8) > 0.0);
        assert!(dd(b * 1.2) < 0.0);
        assert_eq!(ResponseSpec::new(1.0, 0, false).unwrap().inflection_point(), None);
    }

    #[test]
    fn fundamental_term_values() {
        let p = ModelParams::new(4.0, 0.0, 0.0).unwrap();
        assert_eq!(fundamental_term(&p, 1.0, 1.0).value, 0.0);
        let two = std::f64::consts::LN_2;
        assert!((fundamental_term(&p, two, 0.0).value + 2.0).abs() < 1e-12);
        assert!((fundamental_term(&p, -two, 0.0).value - 4.0).abs() < 1e-12);
        // saturation guard
        let sat = fundamental_term(&p, -800.0, 0.0);
        assert!(sat.saturated);
        assert!(sat.value.is_finite() && sat.value > 0.0);
        let ok = fundamental_term(&p, -600.0, 0.0);
        assert!(!ok.saturated && ok.value.is_finite());
    }

    #[test]
    fn total_drift_composition() {
        let p = ModelParams::new(4.0, 0.0, 5.0).unwrap();
        let s = cubic04();
        assert_eq!(total_drift(&p, &s, 0.0, 0.0, 0.0).value, 0.0);
        // 5 * arctan(10.8) frozen
        let d = total_drift(&p, &s, 0.0, 0.0, 3.0);
        assert!((d.value - 7.392_334_960_316_488).abs() < 1e-12);
    }

    #[test]
    fn schedule_validation() {
        let j = FundamentalSchedule::Jump {
            p_minus: 0.0,
            p_plus: 1.0,
            t_jump: 10.0,
        };
        assert!(j.validate(20.0).is_ok());
        assert!(matches!(
            j.validate(5.0),
            Err(ModelError::JumpOutsideHorizon { .. })
        ));
        let params = ModelParams::new(4.0, 3.0, 5.0).unwrap();
        let rw = FundamentalSchedule::RandomWalk {
            p_start: 0.0,
            drift: 0.02,
            vol: 5.0,
            seed: 1,
        };
        assert_eq!(rw.warnings(&params).len(), 1);
        let rw_ok = FundamentalSchedule::RandomWalk {
            p_start: 0.0,
            drift: 0.02,
            vol: 0.1,
            seed: 1,
        };
        assert!(rw_ok.warnings(&params).is_empty());
    }

    proptest! {
        #[test]
        fn response_is_odd(x in -50.0f64..50.0) {
            let s = cubic04();
            prop_assert_eq!(s.value(-x), -s.value(x));
        }

        #[test]
        fn response_is_monotone(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            let s = ResponseSpec::quintic(90.0).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(s.value(lo) <= s.value(hi));
        }

        #[test]
        fn response_is_bounded(x in proptest::num::f64::NORMAL) {
            let raw = cubic04();
            prop_assert!(raw.value(x).abs() <= FRAC_PI_2);
            let norm = ResponseSpec::new(0.4, 1, true).unwrap();
            prop_assert!(norm.value(x).abs() <= 1.0);
        }

        #[test]
        fn fundamental_strictly_decreasing_in_p(p1 in -20.0f64..20.0, p2 in -20.0f64..20.0) {
            let params = ModelParams::new(4.0, 0.0, 0.0).unwrap();
            prop_assume!((p1 - p2).abs() > 1e-9);
            let (lo, hi) = if p1 < p2 { (p1, p2) } else { (p2, p1) };
            let flo = fundamental_term(&params, lo, 0.0).value;
            let fhi = fundamental_term(&params, hi, 0.0).value;
            prop_assert!(flo > fhi);
        }
    }
}
