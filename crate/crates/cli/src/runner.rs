//! Scenario execution: analysis, simulation, classification, emission.

use crate::config::{ConfigError, ResolvedScenario};
use crate::csv_out::trajectory_csv;
use crate::presets::PresetName;
use crate::report::{
    DeterministicCheck, OuComparison, OutputPaths, RunReport, SegmentationSummary,
};
use crate::svg::{emit_svg, Series};
use bubble_core::regime::window_stats;
use bubble_core::{
    analyze, classify_segments, heuristic_transition_rates, simulate, simulate_paired_ou,
    verify_deterministic_jump, AnalysisError, InitialHistory, JumpDirection, JumpOutcome,
    McError, NoiseSpec, RegimeError, SegmentationReport, SimConfig, SimError, Trajectory,
};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("assumption violation: {0}")]
    Assumption(#[from] AnalysisError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Regime(#[from] RegimeError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl RunError {
    /// Process exit code: 2 config, 3 assumption violation, 4 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Sim(_) | RunError::Regime(_) | RunError::Mc(_) => 2,
            RunError::Assumption(AnalysisError::AssumptionIiViolated(_)) => 3,
            RunError::Assumption(_) => 3,
            RunError::Io { .. } => 4,
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, RunError> {
    let path = dir.join(name);
    std::fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    std::fs::write(&path, contents).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

/// Unit-lag returns at integer times and their sample standard deviation.
pub fn unit_return_std(traj: &Trajectory) -> f64 {
    let w = traj.points_per_unit;
    let prices: Vec<f64> = traj.p.iter().step_by(w).copied().collect();
    let returns: Vec<f64> = prices.windows(2).map(|x| x[1] - x[0]).collect();
    let n = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / n;
    (returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// First collapse -> recovery-past-P0 -> ignition-within-3-windows chain.
///
/// Returns the recovery time of the first such chain: after a collapse
/// event, find where the price first dips below the fundamental and then
/// crosses back above it; a new bubble must ignite within three unit
/// windows of that crossing.
pub fn detect_serial_bubble(traj: &Trajectory, rep: &SegmentationReport) -> Option<f64> {
    for &ce in &rep.collapse_events {
        let start = (ce as usize) * traj.points_per_unit;
        let below = (start..traj.p.len()).find(|&j| traj.p[j] < traj.p0[j])?;
        let recover = ((below..traj.p.len()).find(|&j| traj.p[j] > traj.p0[j]))?;
        let t_rec = traj.times[recover];
        if rep
            .ignition_events
            .iter()
            .any(|&ig| ig >= t_rec.floor() && ig <= t_rec + 3.0)
        {
            return Some(t_rec);
        }
    }
    None
}

/// The five deterministic theorem checks (sigma = 0, regime-1 parameters).
pub fn deterministic_suite(resolved: &ResolvedScenario) -> Result<Vec<DeterministicCheck>, RunError> {
    let preset = &resolved.preset;
    let params = preset.params.with_sigma(0.0);
    let spec = preset.response;
    let a = analyze(&params, &spec, resolved.c_m, resolved.assumption_i_threshold)?;
    let (roots, scales) = (a.roots, a.scales);
    let dt = preset.dt;
    let sched = bubble_core::FundamentalSchedule::Constant { p0: 0.0 };
    let mut checks = Vec::new();

    // (a) corridor persistence to horizon 50 from histories inside it
    {
        let dm = scales.delta_m;
        let mut worst: f64 = 0.0;
        for history in [
            InitialHistory::Constant { p_init: 0.45 * dm },
            InitialHistory::Constant { p_init: -0.45 * dm },
            InitialHistory::ramp(0.4 * dm, 0.8 * dm, dt),
        ] {
            let cfg = SimConfig::new(dt, 50.0, history, NoiseSpec::gaussian(0));
            let traj = simulate(&params, &spec, &sched, &cfg)?;
            let sup = traj
                .p
                .iter()
                .zip(traj.p0.iter())
                .map(|(p, p0)| (p - p0).abs())
                .fold(0.0f64, f64::max);
            worst = worst.max(sup);
        }
        checks.push(DeterministicCheck {
            name: "mean-reversion corridor persistence (horizon 50)".into(),
            passed: worst < scales.delta_m,
            detail: format!("sup |P - P0| = {worst:.6} vs delta_m = {:.6}", scales.delta_m),
        });
    }

    // (b) bubble persistence and convergence of the growth rate to x6
    {
        let cfg = SimConfig::new(dt, 30.0, InitialHistory::ramp(0.0, 2.5, dt), NoiseSpec::gaussian(0));
        let traj = simulate(&params, &spec, &sched, &cfg)?;
        let min_lag = traj.lag_diff.iter().copied().fold(f64::INFINITY, f64::min);
        let slope = bubble_core::asymptotic_slope(&traj, 0.2)?;
        checks.push(DeterministicCheck {
            name: "bubble persistence and slope -> x6 (horizon 30)".into(),
            passed: min_lag > roots.x5 && (slope - roots.x6).abs() < 1e-3,
            detail: format!(
                "inf lag = {min_lag:.6} vs x5 = {:.6}; tail slope = {slope:.6} vs x6 = {:.6}",
                roots.x5, roots.x6
            ),
        });
    }

    // (c) collapse persistence and windowed deceleration
    {
        let d0 = 0.5 * (roots.x2 + roots.x3);
        let cfg = SimConfig::new(dt, 8.0, InitialHistory::ramp(100.0, d0, dt), NoiseSpec::gaussian(0));
        let traj = simulate(&params, &spec, &sched, &cfg)?;
        let above = traj.p.iter().zip(traj.p0.iter()).all(|(p, p0)| p > p0);
        let max_lag = traj.lag_diff.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let d1 = window_stats(&traj, 0).max_lag;
        let d2 = window_stats(&traj, 1).max_lag;
        checks.push(DeterministicCheck {
            name: "collapse persistence and deceleration".into(),
            passed: above && max_lag < roots.x3 && d1 < d0 && d2 < d1,
            detail: format!(
                "P > P0 throughout: {above}; sup lag = {max_lag:.6} vs x3 = {:.6}; d0 = {d0:.6} > d1 = {d1:.6} > d2 = {d2:.6}",
                roots.x3
            ),
        });
    }

    // (d) small fundamental jump keeps the corridor
    {
        let out = verify_deterministic_jump(
            &params,
            &spec,
            &roots,
            &scales,
            scales.delta_m / 4.0,
            JumpDirection::Up,
        );
        checks.push(DeterministicCheck {
            name: "small jump (delta_m / 4) -> no ignition".into(),
            passed: matches!(out, Ok(JumpOutcome::NoIgnition)),
            detail: format!("{out:?}"),
        });
    }

    // (e) jump at the guaranteed threshold ignites
    {
        let jump = roots.x5 + roots.x5 / params.mu + scales.delta_m;
        let out =
            verify_deterministic_jump(&params, &spec, &roots, &scales, jump, JumpDirection::Up);
        checks.push(DeterministicCheck {
            name: "large jump (x5 + x5/mu + delta_m) -> ignition".into(),
            passed: matches!(out, Ok(JumpOutcome::Ignition)),
            detail: format!("jump = {jump:.6}: {out:?}"),
        });
    }

    Ok(checks)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub svg: bool,
    /// Classify windows and fill the CSV regime column (`experiment`);
    /// when off the dump is raw (`simulate`).
    pub classify: bool,
}

/// Run one scenario end to end: analysis, simulation (paired with the OU
/// reference where the preset calls for it), classification, file
/// emission.
pub fn run_scenario(
    resolved: &ResolvedScenario,
    out_dir: Option<&Path>,
    opts: RunOptions,
) -> Result<RunReport, RunError> {
    let preset = &resolved.preset;
    let analysis = analyze(
        &preset.params,
        &preset.response,
        resolved.c_m,
        resolved.assumption_i_threshold,
    )?;
    let rates = heuristic_transition_rates(&preset.params, &analysis.scales);

    let mut report = RunReport {
        preset: preset.name.to_string(),
        seed: preset.seed,
        scenario: resolved.clone(),
        schedule: preset.resolve_schedule(&analysis.scales, analysis.scales.a_b, preset.seed),
        analysis: analysis.clone(),
        heuristic_rates: rates,
        segmentation: None,
        ou_comparison: None,
        bounds: Vec::new(),
        deterministic_checks: Vec::new(),
        saturation_flag: false,
        outputs: OutputPaths::default(),
        warnings: Vec::new(),
    };

    if preset.name == PresetName::DeterministicSuite {
        report.deterministic_checks = deterministic_suite(resolved)?;
        if let Some(dir) = out_dir {
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            let path = write_file(dir, "report.json", &json)?;
            report.outputs.report = Some(path.display().to_string());
        }
        return Ok(report);
    }

    report.warnings = report.schedule.warnings(&preset.params);
    let mut cfg = SimConfig::new(
        preset.dt,
        preset.horizon,
        InitialHistory::Constant {
            p_init: report.schedule.initial_value(),
        },
        NoiseSpec {
            family: preset.noise_family,
            seed: preset.seed,
        },
    );
    cfg.record_stride = preset.record_stride;

    let (traj, ou) = if preset.paired_ou {
        let (b, o) = simulate_paired_ou(&preset.params, &preset.response, &report.schedule, &cfg)?;
        (b, Some(o))
    } else {
        (
            simulate(&preset.params, &preset.response, &report.schedule, &cfg)?,
            None,
        )
    };
    report.saturation_flag = traj.saturation_flag;

    let segmentation = if opts.classify {
        let seg = classify_segments(&traj, &analysis.roots, &analysis.scales)?;
        let serial = detect_serial_bubble(&traj, &seg);
        report.segmentation = Some(SegmentationSummary::from_report(&seg, serial));
        Some(seg)
    } else {
        None
    };
    if let Some(ou_traj) = &ou {
        report.ou_comparison = Some(OuComparison {
            bubble_return_std: unit_return_std(&traj),
            ou_return_std: unit_return_std(ou_traj),
        });
    }

    if let Some(dir) = out_dir {
        let csv = trajectory_csv(&traj, segmentation.as_ref());
        let path = write_file(dir, "trajectory.csv", &csv)?;
        report.outputs.csv = Some(path.display().to_string());
        if let Some(seg) = &segmentation {
            let json = serde_json::to_string_pretty(seg).expect("segmentation serializes");
            write_file(dir, "segmentation.json", &json)?;
        }
        if let Some(ou_traj) = &ou {
            let ou_csv = trajectory_csv(ou_traj, None);
            let path = write_file(dir, "ou.csv", &ou_csv)?;
            report.outputs.ou_csv = Some(path.display().to_string());
        }
        if opts.svg {
            let mut series = vec![Series {
                name: "P",
                times: &traj.times,
                values: &traj.p,
            }];
            series.push(Series {
                name: "P0",
                times: &traj.times,
                values: &traj.p0,
            });
            if let Some(ou_traj) = &ou {
                series.push(Series {
                    name: "OU",
                    times: &ou_traj.times,
                    values: &ou_traj.p,
                });
            }
            let svg = emit_svg(&format!("{} (seed {})", preset.name, preset.seed), &series);
            let path = write_file(dir, "trajectory.svg", &svg)?;
            report.outputs.svg = Some(path.display().to_string());
        }
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        let path = write_file(dir, "report.json", &json)?;
        report.outputs.report = Some(path.display().to_string());
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_suite_all_pass() {
        let resolved = ResolvedScenario::new(PresetName::DeterministicSuite);
        let checks = deterministic_suite(&resolved).unwrap();
        assert_eq!(checks.len(), 5);
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn regime3b_run_produces_report() {
        let mut resolved = ResolvedScenario::new(PresetName::Regime3B);
        resolved.preset.horizon = 20.0;
        let report = run_scenario(&resolved, None, RunOptions { svg: false, classify: true }).unwrap();
        let seg = report.segmentation.unwrap();
        assert_eq!(seg.windows_total, 20);
        assert!(report.ou_comparison.is_some());
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn varying_p0_warns_when_fundamental_vol_is_large() {
        let mut resolved = ResolvedScenario::new(PresetName::VaryingP0);
        resolved.preset.horizon = 5.0;
        resolved.preset.params = resolved.preset.params.with_sigma(0.05);
        let report = run_scenario(&resolved, None, RunOptions::default()).unwrap();
        assert_eq!(report.warnings.len(), 1, "{:?}", report.warnings);
    }
}
