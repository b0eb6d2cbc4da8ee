//! Integer-order cylindrical Bessel functions and the kick kernel built on them.
//!
//! Production values come from Miller's downward recurrence ([`bessel_row`]);
//! [`series`] holds an independent ascending-series evaluation in
//! double-double arithmetic that is used only to check the recurrence.

mod bessel;
mod kernel;
pub mod series;

pub use bessel::{bessel_row, BesselRow, MAX_ARGUMENT};
pub use kernel::{kick_kernel, truncation_order, KickKernel, DEFAULT_KERNEL_TOL};
