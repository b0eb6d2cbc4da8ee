use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::grid::{edge_band, expand_with_band, grow, GridPolicy};
use super::resonance::ResonanceParams;
use super::state::RotorState;
use crate::error::Result;
use crate::specfun::{kick_kernel, KickKernel, DEFAULT_KERNEL_TOL};

/// Probability allowed to leave the lattice in one step before the step is
/// redone on a wider lattice.
pub const ESCAPE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Method {
    /// FFT to the angle grid, multiply by `exp(-i kappa cos theta)`, FFT back.
    #[default]
    #[serde(rename = "split")]
    SplitSpectral,
    /// Banded product with the truncated kick stencil.
    #[serde(rename = "direct")]
    DirectConvolution,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::SplitSpectral => f.write_str("split"),
            Method::DirectConvolution => f.write_str("direct"),
        }
    }
}

/// One-period propagator with its per-evolution caches.
///
/// Holds kernels, FFT plans and angle-grid kick tables keyed by strength, so
/// a run alternating between two strengths builds each only once. Not meant
/// to be shared between evolutions.
pub struct Propagator {
    method: Method,
    kernel_tol: f64,
    policy: GridPolicy,
    kernels: HashMap<u64, KickKernel>,
    planner: FftPlanner<f64>,
    plans: HashMap<usize, (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
    kick_tables: HashMap<(u64, usize), Vec<Complex64>>,
    buffer: Vec<Complex64>,
    scratch: Vec<Complex64>,
    output: Vec<Complex64>,
}

impl fmt::Debug for Propagator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Propagator")
            .field("method", &self.method)
            .field("kernel_tol", &self.kernel_tol)
            .field("policy", &self.policy)
            .finish_non_exhaustive()
    }
}

impl Propagator {
    pub fn new(method: Method, kernel_tol: f64, policy: GridPolicy) -> Self {
        Self {
            method,
            kernel_tol,
            policy,
            kernels: HashMap::new(),
            planner: FftPlanner::new(),
            plans: HashMap::new(),
            kick_tables: HashMap::new(),
            buffer: Vec::new(),
            scratch: Vec::new(),
            output: Vec::new(),
        }
    }

    pub fn with_method(method: Method) -> Self {
        Self::new(method, DEFAULT_KERNEL_TOL, GridPolicy::default())
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn policy(&self) -> &GridPolicy {
        &self.policy
    }

    pub fn kernel(&mut self, kappa: f64) -> Result<&KickKernel> {
        let tol = self.kernel_tol;
        let key = kappa.to_bits();
        if !self.kernels.contains_key(&key) {
            self.kernels.insert(key, kick_kernel(kappa, tol)?);
        }
        Ok(&self.kernels[&key])
    }

    /// Advances `state` by one kick of strength `kappa`.
    ///
    /// The lattice is first widened until its edge bands are empty; if the
    /// step then leaks more than [`ESCAPE_TOL`] off the lattice or leaves
    /// edge mass behind, it is redone on a wider lattice.
    pub fn step(&mut self, state: &mut RotorState, kappa: f64, params: &ResonanceParams) -> Result<()> {
        let half_width = self.kernel(kappa)?.half_width;
        let min_band = half_width + 1;
        expand_with_band(state, &self.policy, min_band)?;
        loop {
            let escaped = match self.method {
                Method::SplitSpectral => self.apply_split(state, kappa, params, half_width),
                Method::DirectConvolution => self.apply_direct(state, kappa, params),
            }?;
            let band = edge_band(self.output.len(), min_band);
            let edge = edge_mass_of(&self.output, band);
            if escaped <= ESCAPE_TOL && edge < self.policy.edge_threshold {
                break;
            }
            grow(state, &self.policy)?;
        }
        std::mem::swap(&mut state.amplitudes, &mut self.output);
        state.step += 1;
        state.norm_error = (state.norm() - 1.0).abs();
        Ok(())
    }

    /// Writes the stepped amplitudes into `self.output`; returns the
    /// probability that landed outside the lattice.
    fn apply_direct(&mut self, state: &RotorState, kappa: f64, params: &ResonanceParams) -> Result<f64> {
        let kernel = self.kernel(kappa)?.clone();
        let w = kernel.half_width;
        let len = state.len();
        let zero = Complex64::new(0.0, 0.0);

        // phased source, zero-padded by 2w on each side
        let padded = &mut self.buffer;
        padded.clear();
        padded.resize(len + 4 * w, zero);
        apply_phase(&state.amplitudes, state.l_min, params, &mut padded[2 * w..2 * w + len]);

        // extended output covers [l_min - w, l_max + w]
        let coeffs = &kernel.coefficients;
        let extended = &mut self.scratch;
        extended.clear();
        extended.extend((0..len + 2 * w).map(|i| {
            let centre = i + w;
            let mut acc = coeffs[0] * padded[centre];
            for (m, &k) in coeffs.iter().enumerate().skip(1) {
                acc += k * (padded[centre - m] + padded[centre + m]);
            }
            acc
        }));

        let escaped: f64 = extended[..w]
            .iter()
            .chain(&extended[w + len..])
            .map(|a| a.norm_sqr())
            .sum();
        self.output.clear();
        self.output.extend_from_slice(&extended[w..w + len]);
        Ok(escaped)
    }

    fn apply_split(
        &mut self,
        state: &RotorState,
        kappa: f64,
        params: &ResonanceParams,
        half_width: usize,
    ) -> Result<f64> {
        let len = state.len();
        let size = (len + 2 * half_width).next_power_of_two();
        let (forward, inverse) = self.plans_for(size);
        let key = (kappa.to_bits(), size);
        self.kick_tables
            .entry(key)
            .or_insert_with(|| kick_table(kappa, size));
        let table = &self.kick_tables[&key];

        let buffer = &mut self.buffer;
        buffer.clear();
        buffer.resize(size, Complex64::new(0.0, 0.0));
        apply_phase(&state.amplitudes, state.l_min, params, &mut buffer[..len]);

        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        self.scratch.resize(scratch_len, Complex64::new(0.0, 0.0));
        forward.process_with_scratch(buffer, &mut self.scratch);
        for (b, t) in buffer.iter_mut().zip(table) {
            *b *= t;
        }
        inverse.process_with_scratch(buffer, &mut self.scratch);

        let scale = 1.0 / size as f64;
        self.output.clear();
        self.output.extend(buffer[..len].iter().map(|b| b * scale));
        let escaped = buffer[len..].iter().map(|b| b.norm_sqr()).sum::<f64>() * scale * scale;
        Ok(escaped)
    }

    fn plans_for(&mut self, size: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
        let planner = &mut self.planner;
        self.plans
            .entry(size)
            .or_insert_with(|| (planner.plan_fft_forward(size), planner.plan_fft_inverse(size)))
            .clone()
    }
}

/// `exp(-i kappa cos(2 pi k / size))` for `k = 0..size`.
fn kick_table(kappa: f64, size: usize) -> Vec<Complex64> {
    (0..size)
        .map(|k| Complex64::from_polar(1.0, -kappa * (TAU * k as f64 / size as f64).cos()))
        .collect()
}

fn edge_mass_of(amplitudes: &[Complex64], band: usize) -> f64 {
    let n = amplitudes.len();
    amplitudes[..band]
        .iter()
        .chain(&amplitudes[n - band..])
        .map(|a| a.norm_sqr())
        .sum()
}

fn apply_phase(source: &[Complex64], l_min: i64, params: &ResonanceParams, dest: &mut [Complex64]) {
    let table = params.phase_table();
    let q = table.len();
    let mut r = l_min.rem_euclid(q as i64) as usize;
    for (d, a) in dest.iter_mut().zip(source) {
        *d = table[r] * a;
        r += 1;
        if r == q {
            r = 0;
        }
    }
}

fn step_with(method: Method, state: &RotorState, kappa: f64, params: &ResonanceParams) -> Result<RotorState> {
    let mut next = state.clone();
    Propagator::with_method(method).step(&mut next, kappa, params)?;
    Ok(next)
}

/// One period with the default method and tolerances.
pub fn step(state: &RotorState, kappa: f64, params: &ResonanceParams) -> Result<RotorState> {
    step_with(Method::default(), state, kappa, params)
}

pub fn step_split_spectral(state: &RotorState, kappa: f64, params: &ResonanceParams) -> Result<RotorState> {
    step_with(Method::SplitSpectral, state, kappa, params)
}

pub fn step_direct(state: &RotorState, kappa: f64, params: &ResonanceParams) -> Result<RotorState> {
    step_with(Method::DirectConvolution, state, kappa, params)
}
