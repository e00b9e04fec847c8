//! Euler-Maruyama integration of the bubble equation with its unit delay.
//!
//! The delay imposes a hard grid rule: `1/dt` must be an integer so that
//! `P(t - 1)` is always an exact grid point and the lag lookup never
//! interpolates. The scheme is the plain explicit one,
//!
//! ```text
//! P_{k+1} = P_k + [f(P_k, P0_k) + nu S(P_k - P_{k-n})] dt + sigma dB_k
//! ```
//!
//! with `n = 1/dt`. The noise is additive, so this converges at first order
//! pathwise for smooth drifts; no higher-order scheme is warranted.
//!
//! Noise increments come from a counter-based stream keyed by
//! `(seed, step)`, which makes every trajectory a pure function of its
//! inputs - bit-reproducible regardless of thread count or replicate
//! execution order.

use crate::model::{total_drift, FundamentalSchedule, ModelError, ModelParams, ResponseSpec};
use crate::rng::CounterRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("numerical overflow at t = {0}")]
    NumericalOverflow(f64),
}

/// Distribution family of the driving increments. Both are scaled to
/// variance `sigma^2 dt` per step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFamily {
    #[default]
    Gaussian,
    /// Uniform on `[-sqrt(3 dt) sigma, +sqrt(3 dt) sigma]`.
    UniformCentered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub family: NoiseFamily,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn gaussian(seed: u64) -> Self {
        NoiseSpec {
            family: NoiseFamily::Gaussian,
            seed,
        }
    }
}

/// The price path on `[t0 - 1, t0]` that seeds the delay buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialHistory {
    /// Flat history at `p_init`.
    Constant { p_init: f64 },
    /// Explicit samples, `1/dt + 1` values covering `[t0 - 1, t0]`.
    Sampled { values: Vec<f64> },
}

impl InitialHistory {
    /// Linear history ending at `p_at_t0` with the given slope, sampled on
    /// the grid for `dt`. The regime theorems quantify over exactly such
    /// ramps.
    pub fn ramp(p_at_t0: f64, slope: f64, dt: f64) -> Self {
        let n = (1.0 / dt).round() as usize;
        let values = (0..=n)
            .map(|i| p_at_t0 + slope * (i as f64 / n as f64 - 1.0))
            .collect();
        InitialHistory::Sampled { values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Time step; `1/dt` must be an integer.
    pub dt: f64,
    /// Total simulated time from `t0 = 0`; must be >= 1 and land on the grid.
    pub horizon: f64,
    pub initial_history: InitialHistory,
    pub noise: NoiseSpec,
    /// Keep every `record_stride`-th grid point; must divide `1/dt` so the
    /// recorded arrays preserve exact delay alignment.
    #[serde(default = "default_stride")]
    pub record_stride: usize,
}

fn default_stride() -> usize {
    1
}

/// Default step: 256 steps per delay unit, fine enough to resolve the
/// smallest preset root scales.
pub const DEFAULT_DT: f64 = 1.0 / 256.0;

impl SimConfig {
    pub fn new(dt: f64, horizon: f64, initial_history: InitialHistory, noise: NoiseSpec) -> Self {
        SimConfig {
            dt,
            horizon,
            initial_history,
            noise,
            record_stride: 1,
        }
    }

    /// Steps per delay unit, after validation.
    pub fn steps_per_unit(&self) -> Result<usize, SimError> {
        if !(self.dt > 0.0 && self.dt <= 1.0) {
            return Err(SimError::ConfigInvalid(format!(
                "dt must lie in (0, 1], got {}",
                self.dt
            )));
        }
        let inv = 1.0 / self.dt;
        let n = inv.round();
        if (inv - n).abs() > 1e-9 || n < 1.0 {
            return Err(SimError::ConfigInvalid(format!(
                "1/dt must be an integer so the delay lands on the grid, got 1/dt = {inv}"
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<(usize, usize), SimError> {
        let n = self.steps_per_unit()?;
        if self.horizon < 1.0 {
            return Err(SimError::ConfigInvalid(format!(
                "horizon must be at least one delay unit, got {}",
                self.horizon
            )));
        }
        let m = (self.horizon / self.dt).round();
        if (self.horizon / self.dt - m).abs() > 1e-6 {
            return Err(SimError::ConfigInvalid(format!(
                "horizon {} does not land on the dt = {} grid",
                self.horizon, self.dt
            )));
        }
        if self.record_stride == 0 || n % self.record_stride != 0 {
            return Err(SimError::ConfigInvalid(format!(
                "record_stride {} must divide steps-per-unit {n}",
                self.record_stride
            )));
        }
        if let InitialHistory::Sampled { values } = &self.initial_history {
            if values.len() != n + 1 {
                return Err(SimError::ConfigInvalid(format!(
                    "sampled history must have 1/dt + 1 = {} values, got {}",
                    n + 1,
                    values.len()
                )));
            }
        }
        Ok((n, m as usize))
    }
}

/// A simulated path with everything needed to classify it and reproduce it.
///
/// All arrays have equal length and share indexing: entry `j` is the grid
/// point `t = j * record_stride * dt`. `lag_diff[j] = P(t) - P(t - 1)`
/// exactly, with the early values reaching into the initial history.
/// `noise_increments[j]` is the accumulated `sigma dB` over the recorded
/// interval ending at `j` (zero at `j = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub p: Vec<f64>,
    pub p0: Vec<f64>,
    pub lag_diff: Vec<f64>,
    pub noise_increments: Vec<f64>,
    pub saturation_flag: bool,
    pub seed_used: u64,
    /// Recorded points per delay unit.
    pub points_per_unit: usize,
    /// Recorded sampling interval.
    pub dt_recorded: f64,
}

impl Trajectory {
    /// Number of whole unit windows `[k, k+1]` in the recorded span.
    pub fn whole_windows(&self) -> usize {
        (self.times.len() - 1) / self.points_per_unit
    }

    /// Recorded index range (inclusive) of window `[k, k+1]`.
    pub fn window_range(&self, k: usize) -> std::ops::RangeInclusive<usize> {
        let w = self.points_per_unit;
        (k * w)..=((k + 1) * w)
    }
}

fn noise_increment(rng: &CounterRng, family: NoiseFamily, step: u64, scale_gauss: f64, scale_unif: f64) -> f64 {
    match family {
        NoiseFamily::Gaussian => scale_gauss * rng.standard_normal(step),
        NoiseFamily::UniformCentered => scale_unif * rng.uniform_symmetric(step),
    }
}

/// I.i.d. noise increments with mean 0 and variance `sigma^2 dt`,
/// reproducible by seed. The same stream drives [`simulate`], so the
/// corridor estimators downstream share this noise source.
pub fn brownian_path(noise: &NoiseSpec, sigma: f64, dt: f64, n_steps: usize) -> Vec<f64> {
    let rng = CounterRng::new(noise.seed);
    let scale_gauss = sigma * dt.sqrt();
    let scale_unif = sigma * (3.0 * dt).sqrt();
    (0..n_steps)
        .map(|k| noise_increment(&rng, noise.family, k as u64, scale_gauss, scale_unif))
        .collect()
}

/// Integrate the bubble equation. Deterministic function of its inputs.
#[allow(clippy::needless_range_loop)] // the loop is index-driven via the delay buffer
pub fn simulate(
    params: &ModelParams,
    spec: &ResponseSpec,
    schedule: &FundamentalSchedule,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    params.validate()?;
    let (n, m) = cfg.validate()?;
    schedule.validate(cfg.horizon)?;

    // delay buffer: history [t0-1, t0] then the simulated span
    let mut buf = Vec::with_capacity(n + 1 + m);
    match &cfg.initial_history {
        InitialHistory::Constant { p_init } => buf.resize(n + 1, *p_init),
        InitialHistory::Sampled { values } => buf.extend_from_slice(values),
    }

    // fundamental path on the full simulation grid [0, horizon]
    let p0_grid = sample_schedule(schedule, cfg.dt, m);

    let rng = CounterRng::new(cfg.noise.seed);
    let scale_gauss = params.sigma * cfg.dt.sqrt();
    let scale_unif = params.sigma * (3.0 * cfg.dt).sqrt();

    let mut saturated = false;
    let mut noise_full = Vec::with_capacity(m);
    for k in 0..m {
        let idx = n + k;
        let p = buf[idx];
        let lag = p - buf[idx - n];
        let drift = total_drift(params, spec, p, p0_grid[k], lag);
        saturated |= drift.saturated;
        let dw = noise_increment(&rng, cfg.noise.family, k as u64, scale_gauss, scale_unif);
        let next = p + drift.value * cfg.dt + dw;
        if !next.is_finite() {
            return Err(SimError::NumericalOverflow(k as f64 * cfg.dt));
        }
        noise_full.push(dw);
        buf.push(next);
    }

    // record every stride-th point of the simulated span [0, horizon]
    let s = cfg.record_stride;
    let recorded = m / s + 1;
    let mut times = Vec::with_capacity(recorded);
    let mut p_rec = Vec::with_capacity(recorded);
    let mut p0_rec = Vec::with_capacity(recorded);
    let mut lag_rec = Vec::with_capacity(recorded);
    let mut noise_rec = Vec::with_capacity(recorded);
    for j in 0..recorded {
        let k = j * s;
        times.push(k as f64 * cfg.dt);
        p_rec.push(buf[n + k]);
        p0_rec.push(p0_grid[k]);
        lag_rec.push(buf[n + k] - buf[k]);
        noise_rec.push(if j == 0 {
            0.0
        } else {
            noise_full[k - s..k].iter().sum()
        });
    }

    Ok(Trajectory {
        times,
        p: p_rec,
        p0: p0_rec,
        lag_diff: lag_rec,
        noise_increments: noise_rec,
        saturation_flag: saturated,
        seed_used: cfg.noise.seed,
        points_per_unit: n / s,
        dt_recorded: cfg.dt * s as f64,
    })
}

/// The fundamental path at every grid point `t = k dt`, `k = 0..=m`.
fn sample_schedule(schedule: &FundamentalSchedule, dt: f64, m: usize) -> Vec<f64> {
    match *schedule {
        FundamentalSchedule::Constant { p0 } => vec![p0; m + 1],
        FundamentalSchedule::Jump {
            p_minus,
            p_plus,
            t_jump,
        } => {
            // the jump lands on the first grid point at or after t_jump
            let k_jump = ((t_jump / dt) - 1e-9).ceil().max(0.0) as usize;
            (0..=m)
                .map(|k| if k >= k_jump { p_plus } else { p_minus })
                .collect()
        }
        FundamentalSchedule::RandomWalk {
            p_start,
            drift,
            vol,
            seed,
        } => {
            let rng = CounterRng::new(seed);
            let step_vol = vol * dt.sqrt();
            let mut out = Vec::with_capacity(m + 1);
            let mut v = p_start;
            out.push(v);
            for k in 0..m {
                v += drift * dt + step_vol * rng.standard_normal(k as u64);
                out.push(v);
            }
            out
        }
    }
}

/// Simulate the bubble equation and its `nu = 0` reference on the
/// *identical* noise-increment stream.
pub fn simulate_paired_ou(
    params: &ModelParams,
    spec: &ResponseSpec,
    schedule: &FundamentalSchedule,
    cfg: &SimConfig,
) -> Result<(Trajectory, Trajectory), SimError> {
    let bubble = simulate(params, spec, schedule, cfg)?;
    let ou = simulate(&params.without_speculation(), spec, schedule, cfg)?;
    Ok((bubble, ou))
}
