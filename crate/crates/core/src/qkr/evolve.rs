use super::grid::GridPolicy;
use super::propagator::{Method, Propagator};
use super::resonance::ResonanceParams;
use super::state::RotorState;
use crate::error::{Error, Result};
use crate::obs::MomentSeries;
use crate::seqgen::KickSequence;
use crate::specfun::{truncation_order, DEFAULT_KERNEL_TOL};

/// Cumulative `|norm - 1|` at which an evolution is abandoned.
pub const MAX_NORM_DRIFT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorConfig {
    pub resonance: ResonanceParams,
    pub sequence: KickSequence,
    pub method: Method,
    pub kernel_tol: f64,
    pub grid: GridPolicy,
}

impl PropagatorConfig {
    pub fn new(resonance: ResonanceParams, sequence: KickSequence) -> Self {
        Self {
            resonance,
            sequence,
            method: Method::default(),
            kernel_tol: DEFAULT_KERNEL_TOL,
            grid: GridPolicy::default(),
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn steps(&self) -> usize {
        self.sequence.len()
    }

    pub fn kappa1(&self) -> f64 {
        self.sequence.kappa1
    }

    pub fn kappa2(&self) -> f64 {
        self.sequence.kappa2
    }

    /// Initial lattice half-width: configured, or four kernel half-widths of
    /// the strongest kick.
    pub fn initial_half_width(&self) -> Result<usize> {
        if let Some(w) = self.grid.initial_half_width {
            return Ok(w);
        }
        let strongest = self.kappa1().abs().max(self.kappa2().abs());
        Ok((4 * truncation_order(strongest, self.kernel_tol)?).max(1))
    }
}

/// Evolves `delta_{l0}` through the configured schedule, recording moments
/// after each step listed in `record_steps`.
pub fn evolve(config: &PropagatorConfig, record_steps: &[u64]) -> Result<(MomentSeries, RotorState)> {
    let initial = RotorState::new_delta(config.initial_half_width()?);
    evolve_from(config, initial, record_steps, |_| {})
}

/// As [`evolve`], from an arbitrary initial state, calling `observe` after
/// every step.
pub fn evolve_from(
    config: &PropagatorConfig,
    mut state: RotorState,
    record_steps: &[u64],
    mut observe: impl FnMut(&RotorState),
) -> Result<(MomentSeries, RotorState)> {
    if config.kernel_tol <= 0.0 {
        return Err(Error::Config(format!(
            "kernel_tol must be positive, got {}",
            config.kernel_tol
        )));
    }
    let steps = config.steps() as u64;
    validate_record_steps(record_steps, steps)?;

    let mut propagator = Propagator::new(config.method, config.kernel_tol, config.grid.clone());
    let mut series = MomentSeries::default();
    let mut next_record = record_steps.iter().peekable();
    let start_norm = state.norm();
    for kappa in config.sequence.strengths() {
        propagator.step(&mut state, kappa, &config.resonance)?;
        let drift = (state.norm() - start_norm).abs();
        if drift > MAX_NORM_DRIFT {
            return Err(Error::NormDrift {
                step: state.step,
                drift,
                limit: MAX_NORM_DRIFT,
            });
        }
        observe(&state);
        if next_record.peek() == Some(&&state.step) {
            series.push_state(&state);
            next_record.next();
        }
    }
    series.final_norm_drift = (state.norm() - start_norm).abs();
    Ok((series, state))
}

fn validate_record_steps(record_steps: &[u64], steps: u64) -> Result<()> {
    if record_steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidRecordSteps(
            "record steps must be strictly increasing".into(),
        ));
    }
    if let (Some(&first), Some(&last)) = (record_steps.first(), record_steps.last()) {
        if first < 1 || last > steps {
            return Err(Error::InvalidRecordSteps(format!(
                "record steps must lie in [1, {steps}], got {first}..={last}"
            )));
        }
    }
    Ok(())
}
