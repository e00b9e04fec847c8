//! Phenomenology survey across the presets: regime-label census, serial
//! bubbles, volatility ordering, transition-probability sweeps, and the
//! Gaussian-vs-uniform noise comparison. Handy for eyeballing how the
//! phases shift when parameters move.
//!
//! Run with: cargo run --release -p bubble-cli --example survey

use bubble_cli::config::ResolvedScenario;
use bubble_cli::presets::PresetName;
use bubble_cli::runner::{detect_serial_bubble, unit_return_std};
use bubble_core::*;
use rayon::prelude::*;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();

    // regime2: sustained bubble runs (>= 4 consecutive windows)
    {
        let r = ResolvedScenario::new(PresetName::Regime2);
        let p = r.preset;
        let a = analyze(&p.params, &p.response, r.c_m, r.assumption_i_threshold).unwrap();
        let t = Instant::now();
        let counts: Vec<(usize, usize)> = (0..100u64)
            .into_par_iter()
            .map(|seed| {
                let cfg = SimConfig::new(
                    p.dt,
                    200.0,
                    InitialHistory::Constant { p_init: 0.0 },
                    NoiseSpec::gaussian(seed + 1),
                );
                let traj =
                    simulate(&p.params, &p.response, &FundamentalSchedule::Constant { p0: 0.0 }, &cfg)
                        .unwrap();
                let rep = classify_segments(&traj, &a.roots, &a.scales).unwrap();
                let mut max_run = 0;
                let mut run = 0;
                let mut nb = 0;
                for &l in &rep.window_labels {
                    if l == RegimeLabel::Bubble {
                        nb += 1;
                        run += 1;
                        max_run = max_run.max(run);
                    } else {
                        run = 0;
                    }
                }
                (nb, max_run)
            })
            .collect();
        let with_any = counts.iter().filter(|c| c.0 > 0).count();
        let with_run4 = counts.iter().filter(|c| c.1 >= 4).count();
        let with_run3 = counts.iter().filter(|c| c.1 >= 3).count();
        println!(
            "regime2 100 seeds: any-bubble {with_any}, run>=3 {with_run3}, run>=4 {with_run4}  [{:?}]",
            t.elapsed()
        );
    }

    // regime3 vol ordering
    for name in [PresetName::Regime3A, PresetName::Regime3B] {
        let r = ResolvedScenario::new(name);
        let p = r.preset;
        let t = Instant::now();
        let wins: usize = (0..100u64)
            .into_par_iter()
            .map(|seed| {
                let cfg = SimConfig::new(
                    p.dt,
                    200.0,
                    InitialHistory::Constant { p_init: 0.0 },
                    NoiseSpec::gaussian(seed + 1),
                );
                let (b, o) = simulate_paired_ou(
                    &p.params,
                    &p.response,
                    &FundamentalSchedule::Constant { p0: 0.0 },
                    &cfg,
                )
                .unwrap();
                (unit_return_std(&b) > unit_return_std(&o)) as usize
            })
            .sum();
        println!("{name:?} vol ordering: {wins}/100  [{:?}]", t.elapsed());
    }

    // regime1-serial: 40 seeds, horizon 2000
    {
        let r = ResolvedScenario::new(PresetName::Regime1Serial);
        let p = r.preset;
        let a = analyze(&p.params, &p.response, r.c_m, r.assumption_i_threshold).unwrap();
        let t = Instant::now();
        let stats: Vec<(usize, usize, usize, bool)> = (0..40u64)
            .into_par_iter()
            .map(|seed| {
                let cfg = SimConfig::new(
                    p.dt,
                    2000.0,
                    InitialHistory::Constant { p_init: 0.0 },
                    NoiseSpec::gaussian(seed + 1),
                );
                let traj =
                    simulate(&p.params, &p.response, &FundamentalSchedule::Constant { p0: 0.0 }, &cfg)
                        .unwrap();
                let rep = classify_segments(&traj, &a.roots, &a.scales).unwrap();
                use RegimeLabel::*;
                let c = |l| rep.window_labels.iter().filter(|&&x| x == l).count();
                let serial = detect_serial_bubble(&traj, &rep).is_some();
                (c(MeanReversion), c(Bubble), c(Collapse), serial)
            })
            .collect();
        let mr: usize = stats.iter().map(|s| s.0).sum();
        let b: usize = stats.iter().map(|s| s.1).sum();
        let c: usize = stats.iter().map(|s| s.2).sum();
        let serial = stats.iter().filter(|s| s.3).count();
        println!(
            "regime1-serial 40 seeds x 2000: MR windows {mr}, B {b}, C {c}, serial seeds {serial}/40  [{:?}]",
            t.elapsed()
        );
    }

    // ignition/collapse monotonicity sweeps
    {
        let params = ModelParams::new(4.0, 3.0, 5.0).unwrap();
        let spec = ResponseSpec::cubic(0.4).unwrap();
        let t = Instant::now();
        for sigma in [2.0, 3.0, 4.0] {
            let ps = params.with_sigma(sigma);
            let a = analyze(&ps, &spec, 0.1, 0.1).unwrap();
            let cfg = McConfig::new(10_000, 42);
            let ig = estimate_ignition_probability(&ps, &spec, &a.scales, &a.roots, &cfg).unwrap();
            let co = estimate_collapse_probability(&ps, &spec, &a.scales, &a.roots, &cfg).unwrap();
            println!(
                "sigma={sigma}: ignition {:.5} collapse {:.5}",
                ig.empirical.p_hat, co.empirical.p_hat
            );
        }
        println!("  sweep [{:?}]", t.elapsed());
    }

    // stability sweeps incl limit points
    {
        let params = ModelParams::new(4.0, 3.0, 5.0).unwrap();
        let spec = ResponseSpec::cubic(0.4).unwrap();
        let t = Instant::now();
        for regime in [RegimeLabel::MeanReversion, RegimeLabel::Bubble, RegimeLabel::Collapse] {
            let mut line = format!("{regime:?}: ");
            for sigma in [0.1, 0.25, 0.5, 1.0, 2.0, 3.0] {
                let ps = params.with_sigma(sigma);
                let a = analyze(&ps, &spec, 0.1, 0.1).unwrap();
                let cfg = McConfig::new(10_000, 7);
                let st = estimate_regime_stability(regime, &ps, &spec, &a.scales, &a.roots, &cfg).unwrap();
                line.push_str(&format!("{sigma}:{:.4} ", st.empirical.p_hat));
            }
            println!("{line}");
        }
        println!("  stability sweeps [{:?}]", t.elapsed());
    }

    // noise-family robustness on regime3-a
    {
        let r = ResolvedScenario::new(PresetName::Regime3A);
        let p = r.preset;
        let a = analyze(&p.params, &p.response, r.c_m, r.assumption_i_threshold).unwrap();
        let t = Instant::now();
        for family in [NoiseFamily::Gaussian, NoiseFamily::UniformCentered] {
            // per-replicate: horizon-10 run, fraction of windows per label
            let stats: Vec<[f64; 4]> = (0..10_000u64)
                .into_par_iter()
                .map(|rep| {
                    let cfg = SimConfig::new(
                        p.dt,
                        10.0,
                        InitialHistory::Constant { p_init: 0.0 },
                        NoiseSpec { family, seed: rng::CounterRng::new(99).split(rep).bits(0) },
                    );
                    let traj = simulate(
                        &p.params,
                        &p.response,
                        &FundamentalSchedule::Constant { p0: 0.0 },
                        &cfg,
                    )
                    .unwrap();
                    let rep = classify_segments(&traj, &a.roots, &a.scales).unwrap();
                    let mut f = [0.0f64; 4];
                    for &l in &rep.window_labels {
                        f[l as usize] += 1.0;
                    }
                    let n = rep.window_labels.len() as f64;
                    f.map(|x| x / n)
                })
                .collect();
            let n = stats.len() as f64;
            let mean: Vec<f64> = (0..4).map(|i| stats.iter().map(|s| s[i]).sum::<f64>() / n).collect();
            let se: Vec<f64> = (0..4)
                .map(|i| {
                    let m = mean[i];
                    (stats.iter().map(|s| (s[i] - m) * (s[i] - m)).sum::<f64>() / (n - 1.0) / n).sqrt()
                })
                .collect();
            println!("{family:?}: freqs {mean:?} se {se:?}");
        }
        println!("  noise families [{:?}]", t.elapsed());
    }

    println!("total {:?}", t0.elapsed());
}
