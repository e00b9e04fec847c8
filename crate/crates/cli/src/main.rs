use bubble_cli::config::{ResolvedScenario, RunConfig};
use bubble_cli::presets::PresetName;
use bubble_cli::runner::{run_scenario, RunError, RunOptions};
use bubble_core::{
    analyze, corridor_bound_report, estimate_collapse_probability, estimate_ignition_probability,
    estimate_regime_stability, BoundReport, McConfig, RegimeLabel,
};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bubble-sdde",
    about = "Simulate the asset-price bubble SDDE, compute its regime structure, and verify the probability bounds by Monte Carlo",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// JSON config with overrides (unknown keys rejected)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Noise seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for CSV/SVG/JSON artifacts
    #[arg(long)]
    out: Option<PathBuf>,
    /// Time step (1/dt must be an integer)
    #[arg(long)]
    dt: Option<f64>,
    /// Simulation horizon in delay units
    #[arg(long)]
    horizon: Option<f64>,
    /// Also emit an SVG chart
    #[arg(long)]
    svg: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print roots, stability scales, and the assumption report as JSON
    Roots {
        #[arg(value_enum)]
        preset: PresetName,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Integrate one path and dump the trajectory CSV (regime column empty)
    Simulate {
        #[arg(value_enum)]
        preset: PresetName,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Monte Carlo bound verification at the preset's parameters
    Mc {
        #[arg(value_enum)]
        preset: PresetName,
        #[command(flatten)]
        common: CommonOpts,
        /// Replicates per estimate
        #[arg(long)]
        replicates: Option<usize>,
        /// Comma-separated sigma values to sweep (writes sweep.csv with --out)
        #[arg(long)]
        sigma_sweep: Option<String>,
        /// Also run the drifted-corridor grid against the Girsanov-style bound
        #[arg(long)]
        girsanov: bool,
        /// Corridor paths per grid cell
        #[arg(long, default_value_t = 20_000)]
        corridor_paths: usize,
    },
    /// Full pipeline: analysis, simulation, classification, CSV/SVG/JSON
    Experiment {
        #[arg(value_enum)]
        preset: PresetName,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn resolve(preset: PresetName, common: &CommonOpts) -> Result<ResolvedScenario, RunError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.sim.seed = Some(seed);
    }
    if let Some(dt) = common.dt {
        cfg.sim.dt = Some(dt);
    }
    if let Some(h) = common.horizon {
        cfg.sim.horizon = Some(h);
    }
    let name = cfg.preset.unwrap_or(preset);
    Ok(ResolvedScenario::new(name).apply(&cfg)?)
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON serialization"));
}

fn write_out(dir: &PathBuf, name: &str, contents: &str) -> Result<(), RunError> {
    std::fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn cmd_mc(
    preset: PresetName,
    common: &CommonOpts,
    replicates: Option<usize>,
    sigma_sweep: Option<&str>,
    girsanov: bool,
    corridor_paths: usize,
) -> Result<(), RunError> {
    let resolved = resolve(preset, common)?;
    let p = &resolved.preset;
    let reps = replicates.unwrap_or(resolved.mc_replicates);
    let mut mc_cfg = McConfig::new(reps, resolved.mc_base_seed);
    mc_cfg.dt = p.dt;
    mc_cfg.noise_family = p.noise_family;
    mc_cfg.k_constant = resolved.k_constant;

    let sigmas: Vec<f64> = match sigma_sweep {
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|e| {
                    RunError::Config(bubble_cli::ConfigError::Parse(
                        <serde_json::Error as serde::de::Error>::custom(format!(
                            "bad sigma value '{s}': {e}"
                        )),
                    ))
                })
            })
            .collect::<Result<_, _>>()?,
        None => vec![p.params.sigma],
    };

    let mut reports: Vec<BoundReport> = Vec::new();
    for &sigma in &sigmas {
        let params = p.params.with_sigma(sigma);
        let a = analyze(&params, &p.response, resolved.c_m, resolved.assumption_i_threshold)?;
        for regime in [
            RegimeLabel::MeanReversion,
            RegimeLabel::Bubble,
            RegimeLabel::Collapse,
        ] {
            reports.push(estimate_regime_stability(
                regime, &params, &p.response, &a.scales, &a.roots, &mc_cfg,
            )?);
        }
        reports.push(estimate_ignition_probability(
            &params, &p.response, &a.scales, &a.roots, &mc_cfg,
        )?);
        reports.push(estimate_collapse_probability(
            &params, &p.response, &a.scales, &a.roots, &mc_cfg,
        )?);
    }

    if girsanov {
        for c in [0.0, 0.5, 1.0, 2.0] {
            for b in [0.5, 1.0, 2.0] {
                reports.push(corridor_bound_report(
                    c,
                    b,
                    1.0,
                    corridor_paths,
                    1e-4,
                    resolved.mc_base_seed,
                ));
            }
        }
    }

    if let Some(dir) = &common.out {
        let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
        write_out(dir, "mc.json", &json)?;
        if sigmas.len() > 1 {
            // the per-sigma section only; corridor reports are sigma-free
            const REPORTS_PER_SIGMA: usize = 5;
            let mut csv = String::from("sigma,scenario,p_hat,ci_halfwidth,analytic_bound,dominates\n");
            for (i, rep) in reports.iter().take(REPORTS_PER_SIGMA * sigmas.len()).enumerate() {
                csv.push_str(&format!(
                    "{},{},{:.6e},{:.6e},{:.6e},{}\n",
                    sigmas[i / REPORTS_PER_SIGMA],
                    rep.empirical.scenario,
                    rep.empirical.p_hat,
                    rep.empirical.ci_halfwidth,
                    rep.analytic_bound,
                    rep.dominates
                ));
            }
            write_out(dir, "sweep.csv", &csv)?;
        }
    }
    print_json(&reports);
    Ok(())
}

fn run() -> Result<(), RunError> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Roots { preset, common } => {
            let resolved = resolve(*preset, common)?;
            let a = analyze(
                &resolved.preset.params,
                &resolved.preset.response,
                resolved.c_m,
                resolved.assumption_i_threshold,
            )?;
            print_json(&a);
            if let Some(dir) = &common.out {
                let json = serde_json::to_string_pretty(&a).expect("analysis serializes");
                write_out(dir, "roots.json", &json)?;
            }
            Ok(())
        }
        Cmd::Simulate { preset, common } => {
            let resolved = resolve(*preset, common)?;
            let opts = RunOptions { svg: common.svg, classify: false };
            let report = run_scenario(&resolved, common.out.as_deref(), opts)?;
            print_json(&report);
            Ok(())
        }
        Cmd::Mc {
            preset,
            common,
            replicates,
            sigma_sweep,
            girsanov,
            corridor_paths,
        } => cmd_mc(
            *preset,
            common,
            *replicates,
            sigma_sweep.as_deref(),
            *girsanov,
            *corridor_paths,
        ),
        Cmd::Experiment { preset, common } => {
            let resolved = resolve(*preset, common)?;
            let opts = RunOptions { svg: common.svg, classify: true };
            let report = run_scenario(&resolved, common.out.as_deref(), opts)?;
            print_json(&report);
            let all_passed = report.deterministic_checks.iter().all(|c| c.passed);
            if !all_passed {
                eprintln!("deterministic checks failed");
                std::process::exit(1);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
