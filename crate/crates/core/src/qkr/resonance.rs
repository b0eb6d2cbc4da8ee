use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the free-rotation phase is derived from `tau = 4 pi p / q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `phi_j = exp(-i 2 pi p j^2 / q)`: trivial at integer `p/q`,
    /// `(-1)^j` at `p/q = 1/2`.
    #[default]
    Standard,
    /// `phi_j = exp(-i 2 tau j^2) = exp(-i 8 pi p j^2 / q)`, taking the printed
    /// matrix element at face value. Kept for comparison only.
    LiteralEq3,
}

impl fmt::Display for PhaseConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseConvention::Standard => f.write_str("standard"),
            PhaseConvention::LiteralEq3 => f.write_str("literal-eq3"),
        }
    }
}

/// Rational resonance `p/q` with its free-rotation phase table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceParams {
    pub p: i64,
    pub q: i64,
    pub convention: PhaseConvention,
    phase_table: Vec<Complex64>,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl ResonanceParams {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        Self::with_convention(p, q, PhaseConvention::Standard)
    }

    pub fn with_convention(p: i64, q: i64, convention: PhaseConvention) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidResonance {
            p,
            q,
            reason: reason.to_string(),
        };
        if q < 1 {
            return Err(invalid("q must be at least 1"));
        }
        if p < 1 {
            return Err(invalid("p must be at least 1"));
        }
        if gcd(p, q) != 1 {
            return Err(invalid("p and q must be coprime"));
        }
        let multiplier = match convention {
            PhaseConvention::Standard => p,
            PhaseConvention::LiteralEq3 => 4 * p,
        };
        // reduce the exponent exactly before converting to an angle
        let phase_table = (0..q)
            .map(|r| {
                let k = ((multiplier as i128 * (r as i128) * (r as i128)).rem_euclid(q as i128)) as f64;
                Complex64::from_polar(1.0, -TAU * k / q as f64)
            })
            .collect();
        Ok(Self {
            p,
            q,
            convention,
            phase_table,
        })
    }

    /// `phi_r` for `r = 0..q`.
    pub fn phase_table(&self) -> &[Complex64] {
        &self.phase_table
    }

    /// Free-rotation phase at lattice site `l`.
    pub fn phase_at(&self, l: i64) -> Complex64 {
        self.phase_table[l.rem_euclid(self.q) as usize]
    }

    /// `p/q` is an integer.
    pub fn is_primary(&self) -> bool {
        self.q == 1
    }

    /// `p/q` is a half-odd integer (`1/2` up to whole turns).
    pub fn is_antiresonance(&self) -> bool {
        self.q == 2
    }

    /// The resonance `(q - p)/q`.
    pub fn mirrored(&self) -> Result<Self> {
        Self::with_convention(self.q - self.p, self.q, self.convention)
    }

    pub fn ratio(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for ResonanceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}
