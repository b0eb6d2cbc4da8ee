//! Closed-form dynamics at primary resonance and at antiresonance.
//!
//! At integer `p/q` the one-period operators for different strengths commute,
//! so from `delta_{l0}` the state after `n` kicks depends only on the total
//! kick `S = m1 kappa1 + m2 kappa2`: `a_l = (-i)^l J_l(S)`, and with
//! `sum l^2 J_l(S)^2 = S^2 / 2` the spread is `sigma = |S| / sqrt 2`.
//!
//! At `p/q = 1/2` the free phase is `(-1)^l`, a half-turn in angle, so
//! consecutive kicks enter the total with alternating signs:
//! `S = sum_j (-1)^j kappa(j)`. Equal strengths cancel in pairs and the state
//! returns to `delta_{l0}` every two periods.

use num_complex::Complex64;

use crate::error::Result;
use crate::seqgen::{letter_counts, Letter};
use crate::specfun::bessel_row;

/// Spread predicted at primary resonance after `n = m1 + m2` kicks.
#[derive(Debug, Clone, PartialEq)]
pub struct BallisticPrediction {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub kappa1: f64,
    pub kappa2: f64,
    pub sigma: f64,
    /// `sigma / n = (alpha kappa1 + beta kappa2) / sqrt 2`.
    pub diffusion_coefficient: f64,
}

impl BallisticPrediction {
    pub fn new(m1: usize, m2: usize, kappa1: f64, kappa2: f64) -> Self {
        let n = m1 + m2;
        let sigma = (m1 as f64 * kappa1 + m2 as f64 * kappa2).abs() / std::f64::consts::SQRT_2;
        let diffusion_coefficient = if n == 0 { 0.0 } else { sigma / n as f64 };
        Self {
            n,
            m1,
            m2,
            kappa1,
            kappa2,
            sigma,
            diffusion_coefficient,
        }
    }

    pub fn from_letters(letters: &[Letter], kappa1: f64, kappa2: f64) -> Self {
        let (m1, m2) = letter_counts(letters);
        Self::new(m1, m2, kappa1, kappa2)
    }

    /// `alpha = m1 / n`.
    pub fn alpha(&self) -> f64 {
        self.m1 as f64 / self.n as f64
    }

    /// `beta = m2 / n`.
    pub fn beta(&self) -> f64 {
        self.m2 as f64 / self.n as f64
    }
}

fn minus_i_pow(l: i64) -> Complex64 {
    match l.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `(-i)^l J_l(kick_sum)`.
pub fn primary_amplitude(l: i64, kick_sum: f64) -> Result<Complex64> {
    let row = bessel_row(kick_sum, l.unsigned_abs() as usize)?;
    Ok(minus_i_pow(l) * row.signed(l).expect("row covers |l|"))
}

/// `(-i)^l J_l(kick_sum)` for `l = -half_width ..= half_width`.
pub fn primary_amplitudes(kick_sum: f64, half_width: usize) -> Result<Vec<Complex64>> {
    let row = bessel_row(kick_sum, half_width)?;
    let w = half_width as i64;
    Ok((-w..=w)
        .map(|l| minus_i_pow(l) * row.signed(l).expect("row covers |l|"))
        .collect())
}

/// `sigma(n)` at primary resonance for `n = 0..=len`, from cumulative counts.
pub fn primary_sigma(letters: &[Letter], kappa1: f64, kappa2: f64) -> Vec<f64> {
    let mut total = 0.0;
    std::iter::once(0.0)
        .chain(letters.iter().map(|&l| {
            total += match l {
                Letter::A => kappa1,
                Letter::B => kappa2,
            };
            total.abs() / std::f64::consts::SQRT_2
        }))
        .collect()
}

/// `sigma(n)` at `p/q = 1/2` for `n = 0..=len`: `|sum_{j<n} (-1)^j kappa(j)| / sqrt 2`.
pub fn antiresonance_sigma(letters: &[Letter], kappa1: f64, kappa2: f64) -> Vec<f64> {
    let mut total = 0.0;
    std::iter::once(0.0)
        .chain(letters.iter().enumerate().map(|(j, &l)| {
            let kappa = match l {
                Letter::A => kappa1,
                Letter::B => kappa2,
            };
            total += if j % 2 == 0 { kappa } else { -kappa };
            total.abs() / std::f64::consts::SQRT_2
        }))
        .collect()
}

/// Total kick with the literal `(-i)^j` weights, `sum_{j<n} (-i)^j kappa(j)`.
///
/// Complex in general, so it cannot be a spread by itself; kept to compare
/// against the real alternating-sign total.
pub fn antiresonance_total_minus_i(letters: &[Letter], kappa1: f64, kappa2: f64) -> Complex64 {
    letters
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let kappa = match l {
                Letter::A => kappa1,
                Letter::B => kappa2,
            };
            minus_i_pow(j as i64) * kappa
        })
        .sum()
}
