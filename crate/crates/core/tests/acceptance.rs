//! The ten acceptance criteria, one line of output each.
//!
//! Runs without the libtest harness so the summary is always printed:
//! `cargo test --test acceptance`.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gerbelab::carfock::{
    cocycle_loop, cocycle_trace_loops, jacobi_check, random_loop, LoopElement,
};
use gerbelab::dirac::{lattice_eigenvalues_near, LatticeOptions};
use gerbelab::experiments::{
    run, BocksteinConfig, Check, ExperimentConfig, GammaAssocConfig, GerbeCocycleConfig,
    HsCriterionConfig, ImplementerConfig, MfIdentityConfig, MonopoleConfig, Report,
    SpectralFlowConfig, WindingConfig, WindingGroup, WzwMod1Config,
};
use gerbelab::lie::{c, random_su, random_su2, CMat, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Verdict = Result<(bool, String), gerbelab::Error>;
type Criterion = (&'static str, u64, fn() -> Verdict);

const SEED: u64 = 2024;

fn report(config: ExperimentConfig) -> Result<Report, gerbelab::Error> {
    Ok(run(&config, SEED)?.report)
}

fn summarize(reports: &[Report]) -> (bool, String) {
    let checks: Vec<&Check> = reports.iter().flat_map(|r| &r.checks).collect();
    let failing: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.clone())
        .collect();
    let text = if failing.is_empty() {
        format!("{} checks", checks.len())
    } else {
        format!("failing: {}", failing.join(", "))
    };
    (failing.is_empty(), text)
}

fn check_value(r: &Report, name: &str) -> f64 {
    r.checks
        .iter()
        .find(|c| c.name == name)
        .map_or(f64::NAN, |c| c.value)
}

/// SU(2) eigenphases from the trace alone: `e^{±iα}`, `cos α = Re tr g / 2`.
fn su2_fractional(g: &CMat) -> [f64; 2] {
    let alpha = (g.trace().re / 2.0).clamp(-1.0, 1.0).acos();
    [alpha / TAU, -alpha / TAU]
}

/// The `count` points of `Z + fractional` nearest to 0, sorted.
fn nearest_lattice_points(fractional: &[f64], count: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = fractional
        .iter()
        .flat_map(|s| (-4..=4).map(move |n| n as f64 + s))
        .collect();
    pts.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    pts.truncate(count);
    pts.sort_by(f64::total_cmp);
    pts
}

fn spectrum_law() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let g = random_su2(&mut rng);
        let expected = nearest_lattice_points(&su2_fractional(g.matrix()), 6);
        let opts = LatticeOptions {
            grid: 2000,
            seed: k,
            ..LatticeOptions::default()
        };
        let mut got = lattice_eigenvalues_near(&g, 0.0, 6, opts)?;
        got.sort_by(f64::total_cmp);
        if got.len() != 6 {
            return Ok((false, format!("{} eigenvalues returned", got.len())));
        }
        worst = expected
            .iter()
            .zip(&got)
            .map(|(a, b)| (a - b).abs())
            .fold(worst, f64::max);
    }
    Ok((worst < 1e-4, format!("max deviation {worst:.2e}")))
}

fn winding_integrality() -> Verdict {
    let mut reports = Vec::new();
    for group in [WindingGroup::Su2, WindingGroup::Su2Inverse] {
        reports.push(report(ExperimentConfig::Winding(WindingConfig {
            group,
            ..Default::default()
        }))?);
    }
    let values: Vec<f64> = reports.iter().map(|r| check_value(r, "winding")).collect();
    let (pass, text) = summarize(&reports);
    let pass = pass && values.iter().all(|v| (v.abs() - 1.0).abs() < 1e-3);
    Ok((
        pass,
        format!("{text}; values {:.6} {:.6}", values[0], values[1]),
    ))
}

fn gerbe_cocycle() -> Verdict {
    let reports = [
        report(ExperimentConfig::GerbeCocycle(GerbeCocycleConfig::default()))?,
        report(ExperimentConfig::Bockstein(BocksteinConfig::default()))?,
    ];
    Ok(summarize(&reports))
}

/// `n δ_{m+n,0} tr(AB)`.
fn loop_cocycle_oracle(a: &CMat, b: &CMat, m: i64, n: i64) -> C64 {
    if m + n != 0 {
        return c(0.0, 0.0);
    }
    let mut t = c(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t * n as f64
}

fn cocycle_equality() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut trace_err, mut loop_err): (f64, f64) = (0.0, 0.0);
    for m in -3..=3 {
        for n in -3..=3 {
            for _ in 0..5 {
                let a = random_su(2, &mut rng).into_matrix();
                let b = random_su(2, &mut rng).into_matrix();
                let oracle = loop_cocycle_oracle(&a, &b, m, n);
                let trace = cocycle_trace_loops(
                    &LoopElement::mode(m, a.clone()),
                    &LoopElement::mode(n, b.clone()),
                    8,
                )?;
                trace_err = trace_err.max((trace - oracle).norm());
                loop_err = loop_err.max((cocycle_loop(&a, &b, m, n)? - oracle).norm());
            }
        }
    }
    let mut jacobi: f64 = 0.0;
    for _ in 0..5 {
        let (x, y, z) = (
            random_loop(2, 1, &mut rng),
            random_loop(2, 1, &mut rng),
            random_loop(2, 1, &mut rng),
        );
        jacobi = jacobi.max(jacobi_check(&x, &y, &z, 8)?);
    }
    let pass = trace_err < 1e-12 && loop_err < 1e-12 && jacobi < 1e-10;
    Ok((
        pass,
        format!("trace {trace_err:.1e}, loop {loop_err:.1e}, jacobi {jacobi:.1e}"),
    ))
}

fn projectivity() -> Verdict {
    Ok(summarize(&[report(ExperimentConfig::Implementer(
        ImplementerConfig::default(),
    ))?]))
}

fn shale_stinespring() -> Verdict {
    let r = report(ExperimentConfig::HsCriterion(HsCriterionConfig::default()))?;
    let (pass, text) = summarize(std::slice::from_ref(&r));
    Ok((
        pass,
        format!(
            "{text}; rough slope {:.3}",
            check_value(&r, "rough_log_slope")
        ),
    ))
}

fn extension_consistency() -> Verdict {
    let reports = [
        report(ExperimentConfig::GammaAssoc(GammaAssocConfig::default()))?,
        report(ExperimentConfig::GammaAssoc(GammaAssocConfig {
            winding: 3,
            ..Default::default()
        }))?,
        report(ExperimentConfig::WzwMod1(WzwMod1Config::default()))?,
    ];
    Ok(summarize(&reports))
}

fn mickelsson_faddeev() -> Verdict {
    let r = report(ExperimentConfig::MfIdentity(MfIdentityConfig::default()))?;
    let (pass, text) = summarize(std::slice::from_ref(&r));
    Ok((
        pass,
        format!(
            "{text}; su(3) relative {:.1e}",
            check_value(&r, "relative_residual_n3")
        ),
    ))
}

fn monopole() -> Verdict {
    Ok(summarize(&[report(ExperimentConfig::Monopole(
        MonopoleConfig::default(),
    ))?]))
}

fn spectral_flow() -> Verdict {
    let r = report(ExperimentConfig::SpectralFlow(SpectralFlowConfig::default()))?;
    let (pass, text) = summarize(std::slice::from_ref(&r));
    Ok((
        pass,
        format!(
            "{text}; charge-loop flow {}",
            check_value(&r, "charge_loop_flow")
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("spectrum law", 10, spectrum_law),
        ("winding integrality", 60, winding_integrality),
        ("gerbe cocycle and Bockstein", 60, gerbe_cocycle),
        ("trace cocycle equals loop cocycle", 5, cocycle_equality),
        ("projective implementers", 30, projectivity),
        ("Hilbert-Schmidt criterion", 10, shale_stinespring),
        ("extension consistency", 300, extension_consistency),
        ("Mickelsson-Faddeev identity", 300, mickelsson_faddeev),
        ("monopole Deligne data", 5, monopole),
        ("spectral flow", 5, spectral_flow),
    ];
    let mut all = true;
    for (i, (title, budget, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (pass, detail) = match outcome {
            Ok((pass, detail)) => (pass && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        println!(
            "criterion {:>2} {}: {} ({detail}; {:.2}s of {budget}s)",
            i + 1,
            title,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
