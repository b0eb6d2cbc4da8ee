//! The resonant kicked rotor on the angular-momentum lattice.
//!
//! Units: `hbar = 1`, `epsilon = 1`, `T = 1`; time is the kick count. One
//! period applies the free-rotation phase `phi_{l mod q}` to each site and then
//! convolves with the kick stencil `K_m = i^(-m) J_m(kappa)`:
//!
//! `a_l(n+1) = sum_j K_{j-l} phi_j a_j(n)`.
//!
//! Two interchangeable implementations exist: a banded convolution
//! ([`Method::DirectConvolution`]) and an FFT split-operator form that applies
//! the kick as `exp(-i kappa cos theta)` on the angle grid
//! ([`Method::SplitSpectral`]). Each checks the other.

mod evolve;
mod grid;
mod propagator;
mod resonance;
mod state;

pub use evolve::{evolve, evolve_from, PropagatorConfig, MAX_NORM_DRIFT};
pub use grid::{edge_band, maybe_expand_grid, GridPolicy};
pub use propagator::{step, step_direct, step_split_spectral, Method, Propagator, ESCAPE_TOL};
pub use resonance::{PhaseConvention, ResonanceParams};
pub use state::RotorState;
