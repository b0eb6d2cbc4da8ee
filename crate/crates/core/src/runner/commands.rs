use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{case_name, ExperimentKind, RunConfig, SequenceSpec};
use super::output::{
    series_rows, write_csv, write_manifest, ClassicalRow, KappaRow, NamedFit, ResonanceRow,
    RunManifest, RunRecord,
};
use crate::classical::{classical_exponent, ensemble_evolve, ClassicalEnsemble};
use crate::error::Result;
use crate::obs::{fit_exponent, fit_power_law, log_spaced_steps, ExponentFit, MomentSeries};
use crate::qkr::{evolve, PropagatorConfig, ResonanceParams};

/// Files written by a command together with its manifest.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub manifest: RunManifest,
    pub files: Vec<PathBuf>,
}

/// Result of one quantum run: the series plus fits of `sigma`,
/// `m4^(1/4)` and `m6^(1/6)`.
#[derive(Debug, Clone)]
pub struct QuantumRun {
    pub series: MomentSeries,
    pub sigma_fit: ExponentFit,
    pub m4_fit: ExponentFit,
    pub m6_fit: ExponentFit,
    pub wall_time_s: f64,
}

impl QuantumRun {
    fn record(&self, label: String) -> RunRecord {
        RunRecord {
            label,
            wall_time_s: self.wall_time_s,
            final_norm_drift: Some(self.series.final_norm_drift),
            fits: vec![
                NamedFit::new("sigma", &self.sigma_fit),
                NamedFit::new("m4^(1/4)", &self.m4_fit),
                NamedFit::new("m6^(1/6)", &self.m6_fit),
            ],
        }
    }
}

/// Evolves one `(p, q, kappa1, kappa2, schedule)` with the config's numerics
/// and fits the default (or configured) window.
pub fn run_quantum(
    config: &RunConfig,
    resonance: ResonanceParams,
    spec: &SequenceSpec,
    kappa1: f64,
    kappa2: f64,
    steps: usize,
) -> Result<QuantumRun> {
    let started = Instant::now();
    let sequence = spec.build(kappa1, kappa2, steps, config.seed, config.reverse_blocks)?;
    let propagator = PropagatorConfig {
        resonance,
        sequence,
        method: config.method,
        kernel_tol: config.kernel_tol,
        grid: config.grid.clone(),
    };
    let record = log_spaced_steps(steps as u64, config.record.per_decade);
    let (series, _) = evolve(&propagator, &record)?;
    let window = config.record.window();
    let sigma_fit = fit_exponent(&series, window)?;
    let m4_fit = fit_power_law(&series.steps, &series.m4_scale(), window)?;
    let m6_fit = fit_power_law(&series.steps, &series.m6_scale(), window)?;
    Ok(QuantumRun {
        series,
        sigma_fit,
        m4_fit,
        m6_fit,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

fn manifest(kind: ExperimentKind, config: &RunConfig, started: Instant, runs: Vec<RunRecord>) -> RunManifest {
    RunManifest {
        command: kind.command_name().to_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        wall_time_s: started.elapsed().as_secs_f64(),
        runs,
    }
}

/// One `sigma` trace per configured case: `<out>/<case>/series.csv`, plus
/// `<out>/manifest.json`.
pub fn cmd_simulate(config: &RunConfig) -> Result<CommandOutcome> {
    let started = Instant::now();
    let results: Vec<(String, QuantumRun)> = config
        .cases
        .par_iter()
        .enumerate()
        .map(|(i, case)| {
            let resonance = config.resonance(case.p, case.q, &format!("cases[{i}]"))?;
            let steps = case.steps.unwrap_or_else(|| super::config::default_steps(case.q));
            let run = run_quantum(config, resonance, &case.sequence, case.kappa1, case.kappa2, steps)?;
            Ok((case_name(case, i), run))
        })
        .collect::<Result<_>>()?;

    let mut files = Vec::new();
    let mut records = Vec::new();
    for (name, run) in &results {
        let path = config.output_dir.join(name).join("series.csv");
        write_csv(&path, &series_rows(&run.series))?;
        files.push(path);
        records.push(run.record(name.clone()));
    }
    finish(ExperimentKind::Simulate, config, started, records, files)
}

/// Exponent `c` for each `p/q`: `<out>/c_vs_pq.csv`.
pub fn cmd_sweep_resonance(config: &RunConfig) -> Result<CommandOutcome> {
    let started = Instant::now();
    let spec = config
        .sweep_resonance
        .as_ref()
        .expect("validated config has a sweep_resonance section");
    let steps = spec.steps.unwrap_or(super::config::SECONDARY_STEPS);
    let mut results: Vec<((i64, i64), QuantumRun)> = spec
        .pairs()
        .par_iter()
        .enumerate()
        .map(|(i, &(p, q))| {
            let resonance = config.resonance(p, q, &format!("sweep_resonance.resonances[{i}]"))?;
            let run = run_quantum(config, resonance, &spec.sequence, spec.kappa1, spec.kappa2, steps)?;
            Ok(((p, q), run))
        })
        .collect::<Result<_>>()?;
    results.sort_by(|((p1, q1), _), ((p2, q2), _)| (p1 * q2).cmp(&(p2 * q1)).then(q1.cmp(q2)));

    let rows: Vec<ResonanceRow> = results
        .iter()
        .map(|((p, q), run)| ResonanceRow {
            p: *p,
            q: *q,
            c: run.sigma_fit.c,
            residual_rms: run.sigma_fit.residual_rms,
            n_lo: run.sigma_fit.window.0,
            n_hi: run.sigma_fit.window.1,
        })
        .collect();
    let path = config.output_dir.join("c_vs_pq.csv");
    write_csv(&path, &rows)?;
    let records = results
        .iter()
        .map(|((p, q), run)| {
            let label = if *q == 1 {
                format!("{p}/{q} (primary)")
            } else {
                format!("{p}/{q}")
            };
            run.record(label)
        })
        .collect();
    finish(ExperimentKind::SweepResonance, config, started, records, vec![path])
}

/// Exponent on the plane `kappa1 = -kappa2`: `<out>/c_vs_kappa.csv`.
///
/// `(kappa1, kappa2)` and `(-kappa1, -kappa2)` give identical probabilities,
/// so each pair is evolved once and written twice.
pub fn cmd_sweep_kappa(config: &RunConfig) -> Result<CommandOutcome> {
    let started = Instant::now();
    let spec = config
        .sweep_kappa
        .as_ref()
        .expect("validated config has a sweep_kappa section");
    let steps = spec.steps.unwrap_or_else(|| super::config::default_steps(spec.q));
    let resonance = config.resonance(spec.p, spec.q, "sweep_kappa")?;

    let mut magnitudes: Vec<f64> = spec.kappas.iter().map(|k| k.abs()).collect();
    magnitudes.sort_by(f64::total_cmp);
    magnitudes.dedup();
    let mut jobs: Vec<(f64, f64)> = magnitudes.iter().map(|&k| (k, -k)).collect();
    if spec.control {
        jobs.extend(magnitudes.iter().map(|&k| (k, k)));
    }

    let results: Vec<((f64, f64), QuantumRun)> = jobs
        .par_iter()
        .map(|&(k1, k2)| {
            let run = run_quantum(config, resonance.clone(), &spec.sequence, k1, k2, steps)?;
            Ok(((k1, k2), run))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut records = Vec::new();
    for ((k1, k2), run) in &results {
        for (a, b) in [(*k1, *k2), (-k1, -k2)] {
            rows.push(KappaRow {
                kappa1: a,
                kappa2: b,
                c: run.sigma_fit.c,
                residual_rms: run.sigma_fit.residual_rms,
            });
        }
        records.push(run.record(format!("kappa1={k1}, kappa2={k2}")));
    }
    rows.sort_by(|a, b| a.kappa1.total_cmp(&b.kappa1).then(a.kappa2.total_cmp(&b.kappa2)));
    let path = config.output_dir.join("c_vs_kappa.csv");
    write_csv(&path, &rows)?;
    finish(ExperimentKind::SweepKappa, config, started, records, vec![path])
}

/// Standard-map ensemble: `<out>/classical.csv` with `<P^2>` per recorded step.
pub fn cmd_classical(config: &RunConfig) -> Result<CommandOutcome> {
    let started = Instant::now();
    let spec = config
        .classical
        .as_ref()
        .expect("validated config has a classical section");
    let sequence = spec
        .sequence
        .build(spec.k1, spec.k2, spec.steps, config.seed, config.reverse_blocks)?;
    let mut ensemble = ClassicalEnsemble::new(spec.particles, config.seed, sequence);
    let record = log_spaced_steps(spec.steps as u64, config.record.per_decade);
    let series = ensemble_evolve(&mut ensemble, spec.steps, &record)?;

    let rows: Vec<ClassicalRow> = series
        .steps
        .iter()
        .zip(&series.mean_p2)
        .map(|(&step, &mean_p2)| ClassicalRow { step, mean_p2 })
        .collect();
    let path = config.output_dir.join("classical.csv");
    write_csv(&path, &rows)?;

    let rms_fit = classical_exponent(&series)?;
    let p2_fit = fit_power_law(&series.steps, &series.mean_p2, config.record.window())?;
    let records = vec![RunRecord {
        label: format!("K1={}, K2={}", spec.k1, spec.k2),
        wall_time_s: started.elapsed().as_secs_f64(),
        final_norm_drift: None,
        fits: vec![
            NamedFit::new("sqrt(<P^2>)", &rms_fit),
            NamedFit::new("<P^2>", &p2_fit),
        ],
    }];
    finish(ExperimentKind::Classical, config, started, records, vec![path])
}

fn finish(
    kind: ExperimentKind,
    config: &RunConfig,
    started: Instant,
    records: Vec<RunRecord>,
    mut files: Vec<PathBuf>,
) -> Result<CommandOutcome> {
    let manifest = manifest(kind, config, started, records);
    let path = config.output_dir.join("manifest.json");
    write_manifest(&path, &manifest)?;
    files.push(path);
    Ok(CommandOutcome { manifest, files })
}
