//! Experiment configuration, the CLI commands and their on-disk outputs.

mod commands;
mod config;
mod output;
mod verify;

pub use commands::{
    cmd_classical, cmd_simulate, cmd_sweep_kappa, cmd_sweep_resonance, run_quantum,
    CommandOutcome, QuantumRun,
};
pub use config::{
    default_steps, CaseSpec, ClassicalSpec, ExperimentKind, KappaSweepSpec, RecordSpec,
    ResonanceSweepSpec, RunConfig, SequenceSpec, PRIMARY_STEPS, SECONDARY_STEPS,
};
pub use output::{
    read_csv, series_rows, write_atomic, write_csv, write_manifest, ClassicalRow, KappaRow,
    NamedFit, ResonanceRow, RunManifest, RunRecord, SeriesRow,
};
pub use verify::{cmd_verify, commutator_on_delta, run_checks, CheckResult, VerifyReport};
