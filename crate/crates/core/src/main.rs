use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kicked_rotor::qkr::{Method, PhaseConvention};
use kicked_rotor::runner::{
    cmd_classical, cmd_simulate, cmd_sweep_kappa, cmd_sweep_resonance, cmd_verify,
    ExperimentKind, RunConfig,
};
use kicked_rotor::{Error, Result};

/// Resonant quantum kicked rotor under two-strength kick schedules.
#[derive(Debug, Parser)]
#[command(name = "qkr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve each configured case and write its sigma trace.
    Simulate(Options),
    /// Fit the spreading exponent across p/q.
    SweepResonance(Options),
    /// Fit the spreading exponent along kappa1 = -kappa2.
    SweepKappa(Options),
    /// Evolve a standard-map ensemble.
    Classical(Options),
    /// Run the self-checks and write a pass/fail report.
    Verify(Options),
}

#[derive(Debug, Args)]
struct Options {
    /// TOML config, or a manifest.json from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long, value_parser = parse_convention)]
    convention: Option<PhaseConvention>,
    #[arg(long)]
    reverse_blocks: bool,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    match s {
        "split" => Ok(Method::SplitSpectral),
        "direct" => Ok(Method::DirectConvolution),
        _ => Err(format!("unknown method `{s}` (expected split or direct)")),
    }
}

fn parse_convention(s: &str) -> std::result::Result<PhaseConvention, String> {
    match s {
        "standard" => Ok(PhaseConvention::Standard),
        "literal-eq3" | "literal_eq3" => Ok(PhaseConvention::LiteralEq3),
        _ => Err(format!("unknown convention `{s}` (expected standard or literal-eq3)")),
    }
}

fn load(kind: ExperimentKind, opts: &Options) -> Result<RunConfig> {
    let mut config = match &opts.config {
        Some(path) => RunConfig::load(path)?,
        None if kind == ExperimentKind::Verify => RunConfig::default(),
        None => return Err(Error::Config("--config is required".into())),
    };
    if let Some(out) = &opts.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    if let Some(method) = opts.method {
        config.method = method;
    }
    if let Some(convention) = opts.convention {
        config.convention = convention;
    }
    if opts.reverse_blocks {
        config.reverse_blocks = true;
    }
    config.validate(kind)?;
    config.resolve();
    Ok(config)
}

fn run(kind: ExperimentKind, opts: &Options) -> Result<()> {
    let config = load(kind, opts)?;
    let outcome = match kind {
        ExperimentKind::Simulate => cmd_simulate(&config)?,
        ExperimentKind::SweepResonance => cmd_sweep_resonance(&config)?,
        ExperimentKind::SweepKappa => cmd_sweep_kappa(&config)?,
        ExperimentKind::Classical => cmd_classical(&config)?,
        ExperimentKind::Verify => {
            let report = cmd_verify(&config)?;
            for check in &report.checks {
                println!(
                    "{} {}: {:.3e} (threshold {:.1e}) {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.value,
                    check.threshold,
                    check.detail
                );
            }
            if !report.passed {
                return Err(Error::Verification(report.failures().join(", ")));
            }
            return Ok(());
        }
    };
    for run in &outcome.manifest.runs {
        let fits: Vec<String> = run
            .fits
            .iter()
            .map(|f| format!("{} c={:.4} (rms {:.2e})", f.observable, f.c, f.residual_rms))
            .collect();
        println!("{}: {}", run.label, fits.join(", "));
    }
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, opts) = match &cli.command {
        Command::Simulate(o) => (ExperimentKind::Simulate, o),
        Command::SweepResonance(o) => (ExperimentKind::SweepResonance, o),
        Command::SweepKappa(o) => (ExperimentKind::SweepKappa, o),
        Command::Classical(o) => (ExperimentKind::Classical, o),
        Command::Verify(o) => (ExperimentKind::Verify, o),
    };
    match run(kind, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
