//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use kicked_rotor::analytic::{antiresonance_sigma, primary_sigma};
use kicked_rotor::classical::{ensemble_evolve, ClassicalEnsemble};
use kicked_rotor::obs::{fit_exponent, fit_power_law, log_spaced_steps, DEFAULT_POINTS_PER_DECADE};
use kicked_rotor::qkr::{evolve, evolve_from, Method, Propagator, PropagatorConfig, ResonanceParams, RotorState};
use kicked_rotor::runner::{commutator_on_delta, RunConfig};
use kicked_rotor::seqgen::{KickSequence, Letter, DEFAULT_SEED};
use kicked_rotor::specfun::series::bessel_j_series;
use kicked_rotor::specfun::{bessel_row, kick_kernel, DEFAULT_KERNEL_TOL};
use kicked_rotor::{ExponentFit, MomentSeries};

type Outcome = (bool, String);

fn resonance(p: i64, q: i64) -> ResonanceParams {
    ResonanceParams::new(p, q).unwrap()
}

fn all_steps(n: usize) -> Vec<u64> {
    (1..=n as u64).collect()
}

fn run(p: i64, q: i64, sequence: KickSequence, record: &[u64]) -> MomentSeries {
    let config = PropagatorConfig::new(resonance(p, q), sequence);
    evolve(&config, record).unwrap().0
}

/// Fit on the production schedule: log-spaced recording, last decade.
fn fitted(p: i64, q: i64, sequence: KickSequence) -> (MomentSeries, ExponentFit) {
    let record = log_spaced_steps(sequence.len() as u64, DEFAULT_POINTS_PER_DECADE);
    let series = run(p, q, sequence, &record);
    let fit = fit_exponent(&series, None).unwrap();
    (series, fit)
}

fn states(p: i64, q: i64, sequence: KickSequence, method: Method) -> Vec<RotorState> {
    let config = PropagatorConfig::new(resonance(p, q), sequence).with_method(method);
    let initial = RotorState::new_delta(config.initial_half_width().unwrap());
    let mut out = Vec::new();
    evolve_from(&config, initial, &[], |s| out.push(s.clone())).unwrap();
    out
}

fn ballistic_oracle() -> Outcome {
    let n = 987;
    let seq = KickSequence::fibonacci(5.0, 10.0, n);
    let oracle = primary_sigma(&seq.letters, 5.0, 10.0);
    let series = run(1, 1, seq.clone(), &all_steps(n));
    let worst = series
        .steps
        .iter()
        .zip(&series.sigma)
        .filter(|(&s, _)| s >= 10)
        .map(|(&s, &v)| (v - oracle[s as usize]).abs() / oracle[s as usize])
        .fold(0.0, f64::max);
    let (_, fit) = fitted(1, 1, seq);
    (
        worst < 5e-3 && (fit.c - 1.0).abs() <= 0.01,
        format!("max rel err {worst:.2e} (< 5e-3), c = {:.4} (1.00 +/- 0.01)", fit.c),
    )
}

fn antiresonance_revival() -> Outcome {
    let n = 2000;
    let constant = states(1, 2, KickSequence::periodic(&[Letter::A], 5.0, 5.0, n).unwrap(), Method::SplitSpectral);
    let revival = constant
        .iter()
        .filter(|s| s.step % 2 == 0)
        .map(|s| (s.amplitude(0).norm() - 1.0).abs())
        .fold(0.0, f64::max);

    let alternating = KickSequence::periodic(&[Letter::A, Letter::B], 5.0, 10.0, n).unwrap();
    let oracle = antiresonance_sigma(&alternating.letters, 5.0, 10.0);
    let series = run(1, 2, alternating, &all_steps(n));
    let signed = series
        .steps
        .iter()
        .zip(&series.sigma)
        .map(|(&s, &v)| (v - oracle[s as usize]).abs())
        .fold(0.0, f64::max);
    // linear growth: sigma(2k) = 5k / sqrt 2
    let last = series.sigma[n - 1];
    let linear = (last - 5.0 * (n / 2) as f64 / 2f64.sqrt()).abs() < 1e-8;
    (
        revival < 1e-10 && signed < 1e-8 && linear,
        format!("max ||<0|psi(2k)>| - 1| = {revival:.2e} (< 1e-10), signed-sum error {signed:.2e} (< 1e-8)"),
    )
}

fn random_secondary() -> Outcome {
    let cs: Vec<f64> = (0..3)
        .map(|i| {
            let seq = KickSequence::random(0.5, DEFAULT_SEED + i, 5.0, 10.0, 4181).unwrap();
            fitted(1, 3, seq).1.c
        })
        .collect();
    (
        cs.iter().all(|c| (0.4..=0.6).contains(c)),
        format!("c = {cs:.4?} (each in [0.4, 0.6])"),
    )
}

fn fibonacci_secondary() -> Outcome {
    let (_, fit) = fitted(1, 3, KickSequence::fibonacci(5.0, 10.0, 4181));
    (
        fit.c > 0.5 && fit.c < 1.0 && fit.residual_rms < 0.05,
        format!("c = {:.4} (in (0.5, 1)), residual_rms = {:.2e} (< 0.05)", fit.c, fit.residual_rms),
    )
}

fn mirror_symmetry() -> Outcome {
    let n = 4181;
    let record = all_steps(n);
    let mut worst = 0.0f64;
    let mut worst_c = 0.0f64;
    for (p, q) in [(1, 5), (2, 5)] {
        let seq = KickSequence::fibonacci(5.0, 10.0, n);
        let a = run(p, q, seq.clone(), &record);
        let b = run(q - p, q, seq, &record);
        for (x, y) in a.sigma.iter().zip(&b.sigma) {
            worst = worst.max((x - y).abs());
        }
        let ca = fit_exponent(&a, None).unwrap().c;
        let cb = fit_exponent(&b, None).unwrap().c;
        worst_c = worst_c.max((ca - cb).abs());
    }
    (
        worst < 1e-10 && worst_c < 1e-9,
        format!("max |sigma difference| {worst:.2e} (< 1e-10), |c difference| {worst_c:.2e}"),
    )
}

fn sign_symmetry() -> Outcome {
    let seq = KickSequence::fibonacci(5.0, 10.0, 200);
    let a = states(1, 3, seq.clone(), Method::SplitSpectral);
    let b = states(1, 3, seq.negated(), Method::SplitSpectral);
    let worst = a
        .iter()
        .zip(&b)
        .map(|(x, y)| x.max_probability_diff(y))
        .fold(0.0, f64::max);
    (worst < 1e-10, format!("max ||a_l|^2 difference| {worst:.2e} (< 1e-10) over 200 steps"))
}

fn propagator_cross_check() -> Outcome {
    let seq = KickSequence::fibonacci(5.0, 10.0, 100);
    let a = states(1, 3, seq.clone(), Method::SplitSpectral);
    let b = states(1, 3, seq, Method::DirectConvolution);
    let agreement = a
        .iter()
        .zip(&b)
        .map(|(x, y)| x.max_amplitude_diff(y))
        .fold(0.0, f64::max);

    let config = PropagatorConfig::new(resonance(1, 3), KickSequence::fibonacci(5.0, 10.0, 10_000));
    let initial = RotorState::new_delta(config.initial_half_width().unwrap());
    let (series, _) = evolve_from(&config, initial, &[], |_| {}).unwrap();
    let drift = series.final_norm_drift;
    (
        agreement < 1e-10 && drift < 1e-10,
        format!("split vs direct {agreement:.2e} (< 1e-10), norm drift over 1e4 steps {drift:.2e} (< 1e-10)"),
    )
}

fn commutator_dichotomy() -> Outcome {
    let config = RunConfig::default();
    let primary = commutator_on_delta(&config, &resonance(1, 1), 5.0, 10.0).unwrap();
    let secondary = commutator_on_delta(&config, &resonance(1, 3), 5.0, 10.0).unwrap();

    // the same with a fresh propagator per product, as a cross-check of the helper
    let product = |first: f64, second: f64| {
        let mut prop = Propagator::with_method(Method::DirectConvolution);
        let mut s = RotorState::new_delta(64);
        prop.step(&mut s, first, &resonance(1, 3)).unwrap();
        prop.step(&mut s, second, &resonance(1, 3)).unwrap();
        s
    };
    let direct = product(10.0, 5.0).max_amplitude_diff(&product(5.0, 10.0));
    (
        primary < 1e-12 && secondary > 1e-3 && (direct - secondary).abs() < 1e-10,
        format!("q = 1: {primary:.2e} (< 1e-12), q = 3: {secondary:.3e} (> 1e-3)"),
    )
}

fn bessel_layer() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..=200 {
        let x = 0.1 * f64::from(i);
        let row = bessel_row(x, 60).unwrap();
        for m in 0..=60 {
            worst = worst.max((row.values[m] - bessel_j_series(m as u32, x)).abs());
        }
    }
    let mut unitarity = 0.0f64;
    for kappa in [0.5, 1.0, 2.0, 5.0, 10.0, 15.0] {
        let kernel = kick_kernel(kappa, DEFAULT_KERNEL_TOL).unwrap();
        let total: f64 = kernel.stencil().iter().map(|k| k.norm_sqr()).sum();
        unitarity = unitarity.max((total - 1.0).abs());
    }
    (
        worst < 1e-12 && unitarity < 1e-12,
        format!("recurrence vs series {worst:.2e} (< 1e-12), max |sum |K_m|^2 - 1| {unitarity:.2e} (< 1e-12)"),
    )
}

fn classical_contrast() -> Outcome {
    let n = 10_000;
    let record = log_spaced_steps(n as u64, DEFAULT_POINTS_PER_DECADE);
    let at = |steps: &[u64], values: &[f64], step: u64| values[steps.iter().position(|&s| s == step).unwrap()];

    let periodic = KickSequence::periodic(&[Letter::A], 0.5, 0.5, n).unwrap();
    let mut ens = ClassicalEnsemble::new(10_000, DEFAULT_SEED, periodic);
    let confined = ensemble_evolve(&mut ens, n, &record).unwrap();
    let p100 = at(&confined.steps, &confined.mean_p2, 100);
    let max = confined.mean_p2.iter().copied().fold(0.0, f64::max);
    let periodic_final = *confined.mean_p2.last().unwrap();

    let mut ens = ClassicalEnsemble::new(10_000, DEFAULT_SEED, KickSequence::fibonacci(0.5, 0.8, n));
    let growing = ensemble_evolve(&mut ens, n, &record).unwrap();
    let fib_final = *growing.mean_p2.last().unwrap();
    let slope = fit_power_law(&growing.steps, &growing.mean_p2, None).unwrap().c;

    let ratio = fib_final / periodic_final;
    (
        max < 10.0 * p100 && ratio > 100.0 && (0.7..=1.3).contains(&slope),
        format!(
            "periodic max/<P^2>(100) = {:.2} (< 10), Fibonacci/periodic at 1e4 = {ratio:.1} (> 100), slope {slope:.3} (in [0.7, 1.3])",
            max / p100
        ),
    )
}

fn higher_moments() -> Outcome {
    let (fib, _) = fitted(1, 3, KickSequence::fibonacci(5.0, 10.0, 4181));
    let (per, _) = fitted(1, 3, KickSequence::periodic(&[Letter::A, Letter::B], 5.0, 10.0, 4181).unwrap());
    let c = |s: &MomentSeries, values: Vec<f64>| fit_power_law(&s.steps, &values, None).unwrap().c;
    let (f4, f6) = (c(&fib, fib.m4_scale()), c(&fib, fib.m6_scale()));
    let (p4, p6) = (c(&per, per.m4_scale()), c(&per, per.m6_scale()));
    (
        f4 < p4 && f6 < p6,
        format!("m4^(1/4): {f4:.4} < {p4:.4}, m6^(1/6): {f6:.4} < {p6:.4}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("ballistic oracle at q = 1", ballistic_oracle),
        ("antiresonance revival", antiresonance_revival),
        ("random schedule at p/q = 1/3", random_secondary),
        ("Fibonacci schedule at p/q = 1/3", fibonacci_secondary),
        ("p/q <-> (q-p)/q symmetry", mirror_symmetry),
        ("kappa sign symmetry", sign_symmetry),
        ("split vs direct propagators", propagator_cross_check),
        ("commutator dichotomy", commutator_dichotomy),
        ("Bessel layer", bessel_layer),
        ("classical contrast", classical_contrast),
        ("higher moments", higher_moments),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (passed, detail) = catch_unwind(AssertUnwindSafe(criterion))
            .unwrap_or_else(|_| (false, "panicked".to_string()));
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.1}s]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            started.elapsed().as_secs_f64()
        );
        if !passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
