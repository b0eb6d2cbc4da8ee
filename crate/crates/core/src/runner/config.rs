use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::obs::DEFAULT_POINTS_PER_DECADE;
use crate::qkr::{GridPolicy, Method, PhaseConvention, ResonanceParams};
use crate::seqgen::{parse_letters, KickSequence, SequenceKind, DEFAULT_SEED};
use crate::specfun::DEFAULT_KERNEL_TOL;

/// Default run length at primary resonance.
pub const PRIMARY_STEPS: usize = 987;
/// Default run length at secondary resonance.
pub const SECONDARY_STEPS: usize = 4181;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Simulate,
    SweepResonance,
    SweepKappa,
    Classical,
    Verify,
}

impl ExperimentKind {
    pub fn command_name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::SweepResonance => "sweep-resonance",
            ExperimentKind::SweepKappa => "sweep-kappa",
            ExperimentKind::Classical => "classical",
            ExperimentKind::Verify => "verify",
        }
    }
}

/// Kick schedule as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpec {
    Periodic {
        pattern: String,
    },
    Random {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Fibonacci {},
}

impl Default for SequenceSpec {
    fn default() -> Self {
        SequenceSpec::Fibonacci {}
    }
}

impl SequenceSpec {
    pub fn build(
        &self,
        kappa1: f64,
        kappa2: f64,
        length: usize,
        seed: u64,
        reverse_blocks: bool,
    ) -> Result<KickSequence> {
        let kind = match self {
            SequenceSpec::Periodic { pattern } => SequenceKind::Periodic {
                pattern: parse_letters(pattern)?,
            },
            SequenceSpec::Random { alpha, seed: own } => SequenceKind::Random {
                alpha: *alpha,
                seed: own.unwrap_or(seed),
            },
            SequenceSpec::Fibonacci {} => SequenceKind::Fibonacci { reverse_blocks },
        };
        KickSequence::new(kind, kappa1, kappa2, length)
    }

    fn validate(&self, field: &str) -> Result<()> {
        match self {
            SequenceSpec::Periodic { pattern } => {
                let letters = parse_letters(pattern)
                    .map_err(|e| Error::Config(format!("{field}.pattern: {e}")))?;
                if letters.is_empty() {
                    return Err(Error::Config(format!("{field}.pattern: pattern is empty")));
                }
            }
            SequenceSpec::Random { alpha, .. } => {
                if !(0.0..=1.0).contains(alpha) {
                    return Err(Error::Config(format!(
                        "{field}.alpha: {alpha} is outside [0, 1]"
                    )));
                }
            }
            SequenceSpec::Fibonacci {} => {}
        }
        Ok(())
    }

    fn resolve_seed(&mut self, seed: u64) {
        if let SequenceSpec::Random { seed: own, .. } = self {
            own.get_or_insert(seed);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecordSpec {
    pub per_decade: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[u64; 2]>,
}

impl Default for RecordSpec {
    fn default() -> Self {
        Self {
            per_decade: DEFAULT_POINTS_PER_DECADE,
            fit_window: None,
        }
    }
}

impl RecordSpec {
    pub fn window(&self) -> Option<(u64, u64)> {
        self.fit_window.map(|[lo, hi]| (lo, hi))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p: i64,
    pub q: i64,
    pub kappa1: f64,
    pub kappa2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default)]
    pub sequence: SequenceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceSweepSpec {
    #[serde(default = "default_kappa1")]
    pub kappa1: f64,
    #[serde(default = "default_kappa2")]
    pub kappa2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Explicit `[p, q]` pairs; when absent, all coprime `p < q <= max_q`
    /// except `q = 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonances: Option<Vec<[i64; 2]>>,
    #[serde(default = "default_max_q")]
    pub max_q: i64,
    #[serde(default)]
    pub sequence: SequenceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaSweepSpec {
    #[serde(default = "one")]
    pub p: i64,
    #[serde(default = "three")]
    pub q: i64,
    /// Grid of `kappa`; each point runs `(kappa, -kappa)`.
    pub kappas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Also run `kappa1 = kappa2 = kappa` as a ballistic control.
    #[serde(default = "yes")]
    pub control: bool,
    #[serde(default)]
    pub sequence: SequenceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalSpec {
    pub k1: f64,
    pub k2: f64,
    #[serde(default = "default_particles")]
    pub particles: usize,
    #[serde(default = "default_classical_steps")]
    pub steps: usize,
    #[serde(default)]
    pub sequence: SequenceSpec,
}

fn default_kappa1() -> f64 {
    5.0
}
fn default_kappa2() -> f64 {
    10.0
}
fn default_max_q() -> i64 {
    7
}
fn one() -> i64 {
    1
}
fn three() -> i64 {
    3
}
fn yes() -> bool {
    true
}
fn default_particles() -> usize {
    crate::classical::DEFAULT_PARTICLES
}
fn default_classical_steps() -> usize {
    10_000
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_kernel_tol() -> f64 {
    DEFAULT_KERNEL_TOL
}

/// Everything needed to reproduce one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub convention: PhaseConvention,
    #[serde(default)]
    pub reverse_blocks: bool,
    #[serde(default = "default_kernel_tol")]
    pub kernel_tol: f64,
    #[serde(default)]
    pub record: RecordSpec,
    #[serde(default)]
    pub grid: GridPolicy,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cases: Vec<CaseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_resonance: Option<ResonanceSweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_kappa: Option<KappaSweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            seed: DEFAULT_SEED,
            output_dir: default_output_dir(),
            method: Method::default(),
            convention: PhaseConvention::default(),
            reverse_blocks: false,
            kernel_tol: DEFAULT_KERNEL_TOL,
            record: RecordSpec::default(),
            grid: GridPolicy::default(),
            cases: Vec::new(),
            sweep_resonance: None,
            sweep_kappa: None,
            classical: None,
        }
    }
}

/// Run length when a section leaves `steps` unset.
pub fn default_steps(q: i64) -> usize {
    if q == 1 {
        PRIMARY_STEPS
    } else {
        SECONDARY_STEPS
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a TOML config, or the resolved config inside a run manifest
    /// (`.json`).
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            let manifest: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let config = manifest
                .get("config")
                .ok_or_else(|| Error::Config(format!("{}: no `config` entry", path.display())))?;
            serde_json::from_value(config.clone())
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn resonance(&self, p: i64, q: i64, field: &str) -> Result<ResonanceParams> {
        ResonanceParams::with_convention(p, q, self.convention)
            .map_err(|e| Error::Config(format!("{field}: {e}")))
    }

    /// Checks every precondition a command would otherwise hit mid-run.
    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        if let Some(declared) = self.experiment {
            if declared != kind {
                return Err(Error::Config(format!(
                    "experiment: config declares `{}` but `{}` was requested",
                    declared.command_name(),
                    kind.command_name()
                )));
            }
        }
        if !(self.kernel_tol > 0.0 && self.kernel_tol <= 1e-2) {
            return Err(Error::Config(format!(
                "kernel_tol: {} is outside (0, 1e-2]",
                self.kernel_tol
            )));
        }
        if self.record.per_decade == 0 {
            return Err(Error::Config("record.per_decade: must be positive".into()));
        }
        if let Some([lo, hi]) = self.record.fit_window {
            if lo >= hi {
                return Err(Error::Config(format!("record.fit_window: [{lo}, {hi}] is empty")));
            }
        }
        if self.grid.growth_chunk == 0 || !(self.grid.edge_threshold > 0.0) {
            return Err(Error::Config(
                "grid: growth_chunk and edge_threshold must be positive".into(),
            ));
        }
        match kind {
            ExperimentKind::Simulate => {
                if self.cases.is_empty() {
                    return Err(Error::Config("cases: simulate needs at least one [[cases]] entry".into()));
                }
                let mut names = std::collections::HashSet::new();
                for (i, case) in self.cases.iter().enumerate() {
                    let field = format!("cases[{i}]");
                    self.resonance(case.p, case.q, &field)?;
                    check_kappa(case.kappa1, &format!("{field}.kappa1"))?;
                    check_kappa(case.kappa2, &format!("{field}.kappa2"))?;
                    case.sequence.validate(&format!("{field}.sequence"))?;
                    if !names.insert(case_name(case, i)) {
                        return Err(Error::Config(format!("{field}.name: duplicate case name")));
                    }
                }
            }
            ExperimentKind::SweepResonance => {
                let spec = self.sweep_resonance.as_ref().ok_or_else(|| {
                    Error::Config("sweep_resonance: section is required".into())
                })?;
                check_kappa(spec.kappa1, "sweep_resonance.kappa1")?;
                check_kappa(spec.kappa2, "sweep_resonance.kappa2")?;
                spec.sequence.validate("sweep_resonance.sequence")?;
                let pairs = spec.pairs();
                if pairs.is_empty() {
                    return Err(Error::Config("sweep_resonance: no resonances to run".into()));
                }
                for (i, &(p, q)) in pairs.iter().enumerate() {
                    let field = format!("sweep_resonance.resonances[{i}]");
                    let params = self.resonance(p, q, &field)?;
                    if params.is_antiresonance() {
                        return Err(Error::Config(format!(
                            "{field}: p/q = {p}/{q} corresponds to an antiresonance"
                        )));
                    }
                }
            }
            ExperimentKind::SweepKappa => {
                let spec = self
                    .sweep_kappa
                    .as_ref()
                    .ok_or_else(|| Error::Config("sweep_kappa: section is required".into()))?;
                self.resonance(spec.p, spec.q, "sweep_kappa")?;
                spec.sequence.validate("sweep_kappa.sequence")?;
                if spec.kappas.is_empty() {
                    return Err(Error::Config("sweep_kappa.kappas: grid is empty".into()));
                }
                for (i, &k) in spec.kappas.iter().enumerate() {
                    let field = format!("sweep_kappa.kappas[{i}]");
                    check_kappa(k, &field)?;
                    if k == 0.0 {
                        return Err(Error::Config(format!(
                            "{field}: kappa = 0 gives sigma = 0 and no exponent"
                        )));
                    }
                }
            }
            ExperimentKind::Classical => {
                let spec = self
                    .classical
                    .as_ref()
                    .ok_or_else(|| Error::Config("classical: section is required".into()))?;
                check_kappa(spec.k1, "classical.k1")?;
                check_kappa(spec.k2, "classical.k2")?;
                spec.sequence.validate("classical.sequence")?;
                if spec.particles == 0 {
                    return Err(Error::Config("classical.particles: must be positive".into()));
                }
            }
            ExperimentKind::Verify => {}
        }
        Ok(())
    }

    /// Fills every defaulted quantity so the config alone reproduces the run.
    pub fn resolve(&mut self) {
        let seed = self.seed;
        for case in &mut self.cases {
            case.steps.get_or_insert(default_steps(case.q));
            case.sequence.resolve_seed(seed);
        }
        if let Some(spec) = &mut self.sweep_resonance {
            spec.steps.get_or_insert(SECONDARY_STEPS);
            spec.sequence.resolve_seed(seed);
        }
        if let Some(spec) = &mut self.sweep_kappa {
            spec.steps.get_or_insert(default_steps(spec.q));
            spec.sequence.resolve_seed(seed);
        }
        if let Some(spec) = &mut self.classical {
            spec.sequence.resolve_seed(seed);
        }
    }
}

pub(crate) fn case_name(case: &CaseSpec, index: usize) -> String {
    case.name.clone().unwrap_or_else(|| format!("case{index}"))
}

fn check_kappa(k: f64, field: &str) -> Result<()> {
    if !k.is_finite() {
        return Err(Error::Config(format!("{field}: {k} is not finite")));
    }
    Ok(())
}

fn coprime(a: i64, b: i64) -> bool {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a == 1
}

impl ResonanceSweepSpec {
    pub fn pairs(&self) -> Vec<(i64, i64)> {
        match &self.resonances {
            Some(list) => list.iter().map(|&[p, q]| (p, q)).collect(),
            None => (3..=self.max_q)
                .flat_map(|q| (1..q).filter(move |&p| coprime(p, q)).map(move |p| (p, q)))
                .collect(),
        }
    }
}
