//! Resonant quantum kicked rotor driven by two-strength kick sequences.
//!
//! The crate propagates a rotor wavefunction on the angular-momentum lattice
//! at a quantum resonance `tau = 4 pi p / q`, with each period's kick strength
//! drawn from `{kappa1, kappa2}` according to a periodic, random or Fibonacci
//! schedule. Spreading is measured by `sigma(n) = sqrt(sum l^2 |a_l|^2)` and
//! summarized by the exponent `c` of `sigma ~ n^c`.
//!
//! Layout:
//! - [`specfun`]: integer-order Bessel functions and the kick kernel.
//! - [`seqgen`]: kick-strength schedules.
//! - [`qkr`]: resonance parameters, rotor state and the one-period propagators.
//! - [`analytic`]: closed forms at primary resonance and antiresonance.
//! - [`obs`]: moments, `sigma`, and power-law fitting.
//! - [`classical`]: the standard map under the same schedules.
//! - [`runner`]: configuration, experiments and on-disk outputs.

pub mod analytic;
pub mod classical;
pub mod error;
pub mod obs;
pub mod qkr;
pub mod rng;
pub mod runner;
pub mod seqgen;
pub mod specfun;

pub use error::{Error, Result};
pub use obs::{ExponentFit, MomentSeries};
pub use qkr::{
    evolve, GridPolicy, Method, PhaseConvention, PropagatorConfig, Propagator, ResonanceParams,
    RotorState,
};
pub use seqgen::{KickSequence, Letter, SequenceKind};
pub use specfun::{bessel_row, kick_kernel, truncation_order, BesselRow, KickKernel};
