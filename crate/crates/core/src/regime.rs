//! Window labeling, ignition/collapse event detection, and the
//! deterministic regime theorems as executable predicates.
//!
//! Labels follow the defining inequalities, applied per unit window
//! `[k, k+1]` aligned with the delay (every regime statement quantifies
//! over such intervals):
//!
//! * mean reversion: `sup |P - P0| < delta_m` on the window;
//! * bubble: `inf (P(t) - P(t-1)) > x5`;
//! * collapse: `sup (P(t) - P(t-1)) < x3` and `inf (P - P0) > 0`;
//! * transitory: anything else.
//!
//! Checks run in that order with strict inequalities, so a path exactly on
//! a threshold falls through to the less extreme label.

use crate::analysis::{RootSet, Scales};
use crate::integrator::{simulate, InitialHistory, NoiseSpec, SimConfig, Trajectory, DEFAULT_DT};
use crate::model::{FundamentalSchedule, ModelParams, ResponseSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegimeError {
    #[error("trajectory shorter than one delay unit")]
    TrajectoryTooShort,
    #[error("scales inconsistent with roots: {0}")]
    MismatchedScales(String),
    #[error("tail fraction must lie in (0, 1) and contain at least two points")]
    InsufficientTail,
    #[error("jump verification requires sigma = 0, got {0}")]
    RequiresDeterministic(f64),
    #[error("jump outcome inconclusive: neither the corridor nor the ignition predicate holds")]
    InconclusiveRegime,
    #[error(transparent)]
    Sim(#[from] crate::integrator::SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    MeanReversion,
    Bubble,
    Collapse,
    Transitory,
}

/// A maximal run of consecutive windows with one label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub label: RegimeLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationReport {
    pub segments: Vec<Segment>,
    /// Per-window labels, one per unit window starting at t = 0.
    pub window_labels: Vec<RegimeLabel>,
    /// Window start times where a non-bubble window turned into a bubble.
    pub ignition_events: Vec<f64>,
    /// Window start times of collapse windows reached from a bubble with at
    /// most two transitory windows in between.
    pub collapse_events: Vec<f64>,
    /// Least-squares slope over the trailing 20% when enough windows exist.
    pub asymptotic_slope_estimate: Option<f64>,
}

/// One-pass extremes of a unit window, the shared vocabulary of the
/// classifier and every Monte Carlo event predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    /// sup |P - P0|
    pub max_abs_dev: f64,
    /// inf (P - P0)
    pub min_dev: f64,
    /// inf lag_diff
    pub min_lag: f64,
    /// sup lag_diff
    pub max_lag: f64,
}

/// Extremes over window `[k, k+1]` of a recorded trajectory.
pub fn window_stats(traj: &Trajectory, k: usize) -> WindowStats {
    let mut s = WindowStats {
        max_abs_dev: f64::NEG_INFINITY,
        min_dev: f64::INFINITY,
        min_lag: f64::INFINITY,
        max_lag: f64::NEG_INFINITY,
    };
    for j in traj.window_range(k) {
        let dev = traj.p[j] - traj.p0[j];
        s.max_abs_dev = s.max_abs_dev.max(dev.abs());
        s.min_dev = s.min_dev.min(dev);
        s.min_lag = s.min_lag.min(traj.lag_diff[j]);
        s.max_lag = s.max_lag.max(traj.lag_diff[j]);
    }
    s
}

fn label_window(stats: &WindowStats, roots: &RootSet, scales: &Scales) -> RegimeLabel {
    if stats.max_abs_dev < scales.delta_m {
        RegimeLabel::MeanReversion
    } else if stats.min_lag > roots.x5 {
        RegimeLabel::Bubble
    } else if stats.max_lag < roots.x3 && stats.min_dev > 0.0 {
        RegimeLabel::Collapse
    } else {
        RegimeLabel::Transitory
    }
}

fn check_consistency(roots: &RootSet, scales: &Scales) -> Result<(), RegimeError> {
    if !(roots.x3 < 0.0 && roots.x5 > 0.0) {
        return Err(RegimeError::MismatchedScales(format!(
            "need x3 < 0 < x5, got x3 = {}, x5 = {}",
            roots.x3, roots.x5
        )));
    }
    if !(scales.delta_m > 0.0 && scales.delta_b > 0.0 && scales.delta_c > 0.0) {
        return Err(RegimeError::MismatchedScales(
            "stability scales must be positive".into(),
        ));
    }
    if scales.delta_m >= roots.x5 {
        return Err(RegimeError::MismatchedScales(format!(
            "delta_m = {} must stay below x5 = {}",
            scales.delta_m, roots.x5
        )));
    }
    Ok(())
}

/// Label every whole unit window of the trajectory and extract
/// ignition/collapse transitions.
pub fn classify_segments(
    traj: &Trajectory,
    roots: &RootSet,
    scales: &Scales,
) -> Result<SegmentationReport, RegimeError> {
    check_consistency(roots, scales)?;
    let windows = traj.whole_windows();
    if windows == 0 {
        return Err(RegimeError::TrajectoryTooShort);
    }

    let labels: Vec<RegimeLabel> = (0..windows)
        .map(|k| label_window(&window_stats(traj, k), roots, scales))
        .collect();

    let mut segments: Vec<Segment> = Vec::new();
    for (k, &label) in labels.iter().enumerate() {
        match segments.last_mut() {
            Some(seg) if seg.label == label => seg.t_end = (k + 1) as f64,
            _ => segments.push(Segment {
                t_start: k as f64,
                t_end: (k + 1) as f64,
                label,
            }),
        }
    }

    let mut ignition_events = Vec::new();
    let mut collapse_events = Vec::new();
    for k in 1..windows {
        if labels[k] == RegimeLabel::Bubble && labels[k - 1] != RegimeLabel::Bubble {
            ignition_events.push(k as f64);
        }
        if labels[k] == RegimeLabel::Collapse {
            // walk back over at most two transitory windows to find a bubble
            let mut j = k;
            let mut gap = 0;
            while j > 0 && gap <= 2 && labels[j - 1] == RegimeLabel::Transitory {
                j -= 1;
                gap += 1;
            }
            if j > 0 && gap <= 2 && labels[j - 1] == RegimeLabel::Bubble {
                collapse_events.push(k as f64);
            }
        }
    }

    let asymptotic_slope_estimate = if windows >= 5 {
        asymptotic_slope(traj, 0.2).ok()
    } else {
        None
    };

    Ok(SegmentationReport {
        segments,
        window_labels: labels,
        ignition_events,
        collapse_events,
        asymptotic_slope_estimate,
    })
}

/// Earliest recorded time `t` with `lag_diff > a_b` on the whole window
/// `[t, t + 1]`, or `None`. Sliding-window minimum by monotonic deque.
pub fn detect_ignition(traj: &Trajectory, a_b: f64) -> Option<f64> {
    let w = traj.points_per_unit;
    let lag = &traj.lag_diff;
    if lag.len() <= w {
        return None;
    }
    let mut deque: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    for j in 0..lag.len() {
        while let Some(&b) = deque.back() {
            if lag[b] >= lag[j] {
                deque.pop_back();
            } else {
                break;
            }
        }
        deque.push_back(j);
        // window [j - w, j] complete once j >= w
        if j >= w {
            while let Some(&f) = deque.front() {
                if f + w < j {
                    deque.pop_front();
                } else {
                    break;
                }
            }
            let min = lag[*deque.front().unwrap()];
            if min > a_b {
                return Some(traj.times[j - w]);
            }
        }
    }
    None
}

/// Least-squares slope of `P` over the trailing fraction of the horizon.
/// Meaningful for deterministic runs, where it estimates the asymptotic
/// growth or decay rate.
pub fn asymptotic_slope(traj: &Trajectory, tail_fraction: f64) -> Result<f64, RegimeError> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(RegimeError::InsufficientTail);
    }
    let horizon = *traj.times.last().unwrap();
    let t_from = horizon * (1.0 - tail_fraction);
    let start = traj.times.partition_point(|&t| t < t_from);
    let m = traj.times.len() - start;
    if m < 2 {
        return Err(RegimeError::InsufficientTail);
    }
    let ts = &traj.times[start..];
    let ps = &traj.p[start..];
    let mf = m as f64;
    let tbar = ts.iter().sum::<f64>() / mf;
    let pbar = ps.iter().sum::<f64>() / mf;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&t, &p) in ts.iter().zip(ps.iter()) {
        num += (t - tbar) * (p - pbar);
        den += (t - tbar) * (t - tbar);
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JumpDirection {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JumpOutcome {
    /// The path stays in the (shifted) mean-reversion corridor for a unit.
    NoIgnition,
    /// Sustained departure during `[t0+1, t0+2]`: unit-lag growth above `x5`
    /// for an up jump, unit-lag decay below `x3` for a down jump.
    Ignition,
}

/// Deterministic jump experiment: start in the mean-reversion corridor,
/// jump the fundamental by `jump` at t = 0, and test which theorem
/// conclusion the path realizes.
///
/// Small jumps (< delta_m/2) must keep the corridor; jumps of at least
/// `x5 + x5/mu + delta_m` must ignite. Sizes between the two thresholds may
/// land in neither conclusion, reported as `InconclusiveRegime`.
pub fn verify_deterministic_jump(
    params: &ModelParams,
    spec: &ResponseSpec,
    roots: &RootSet,
    scales: &Scales,
    jump: f64,
    direction: JumpDirection,
) -> Result<JumpOutcome, RegimeError> {
    if params.sigma != 0.0 {
        return Err(RegimeError::RequiresDeterministic(params.sigma));
    }
    check_consistency(roots, scales)?;
    let p_minus = 0.0;
    let p_plus = match direction {
        JumpDirection::Up => p_minus + jump,
        JumpDirection::Down => p_minus - jump,
    };
    let schedule = FundamentalSchedule::Jump {
        p_minus,
        p_plus,
        t_jump: 0.0,
    };
    let cfg = SimConfig::new(
        DEFAULT_DT,
        2.0,
        InitialHistory::Constant { p_init: p_minus },
        NoiseSpec::gaussian(0),
    );
    let traj = simulate(params, spec, &schedule, &cfg)?;

    // corridor conclusion on [0, 1], with the relaxed bound on the side the
    // jump pulls away from
    let w0 = window_stats(&traj, 0);
    let dm = scales.delta_m;
    let corridor_holds = match direction {
        JumpDirection::Up => {
            let max_dev = traj.window_range(0).map(|j| traj.p[j] - p_plus).fold(
                f64::NEG_INFINITY,
                f64::max,
            );
            max_dev < dm / 2.0 && w0.min_dev > -dm
        }
        JumpDirection::Down => {
            let max_dev = traj.window_range(0).map(|j| traj.p[j] - p_plus).fold(
                f64::NEG_INFINITY,
                f64::max,
            );
            max_dev < dm && w0.min_dev > -dm / 2.0
        }
    };
    if corridor_holds {
        return Ok(JumpOutcome::NoIgnition);
    }

    // ignition conclusion on [1, 2]
    let w1 = window_stats(&traj, 1);
    let ignited = match direction {
        JumpDirection::Up => w1.min_lag > roots.x5,
        JumpDirection::Down => w1.max_lag < roots.x3,
    };
    if ignited {
        Ok(JumpOutcome::Ignition)
    } else {
        Err(RegimeError::InconclusiveRegime)
    }
}
