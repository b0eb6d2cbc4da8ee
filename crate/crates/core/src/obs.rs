//! Moments of the momentum distribution and power-law exponent fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qkr::RotorState;

/// Minimum points an exponent fit accepts.
pub const MIN_FIT_POINTS: usize = 10;
/// Default recording density.
pub const DEFAULT_POINTS_PER_DECADE: u32 = 64;

/// `sum l^k |a_l|^2`, accumulated from both lattice edges toward the centre.
pub fn moment(state: &RotorState, k: u32) -> Result<f64> {
    if !matches!(k, 2 | 4 | 6) {
        return Err(Error::InvalidMomentOrder(k));
    }
    let amps = &state.amplitudes;
    let term = |i: usize| (state.l_min + i as i64) as f64;
    let term = |i: usize| term(i).powi(k as i32) * amps[i].norm_sqr();
    let mut acc = 0.0;
    if amps.is_empty() {
        return Ok(acc);
    }
    let (mut lo, mut hi) = (0usize, amps.len() - 1);
    while lo < hi {
        acc += term(lo) + term(hi);
        lo += 1;
        hi -= 1;
    }
    if lo == hi {
        acc += term(lo);
    }
    Ok(acc)
}

/// `sqrt(sum l^2 |a_l|^2)`.
pub fn sigma(state: &RotorState) -> f64 {
    moment(state, 2).expect("order 2 is valid").sqrt()
}

/// Observables recorded along an evolution. Energy is in units of `epsilon`,
/// so it equals the second moment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentSeries {
    pub steps: Vec<u64>,
    pub sigma: Vec<f64>,
    pub energy: Vec<f64>,
    pub m4: Vec<f64>,
    pub m6: Vec<f64>,
    pub norm_error: Vec<f64>,
    /// `|norm - 1|` at the end of the run.
    pub final_norm_drift: f64,
}

impl MomentSeries {
    pub fn push_state(&mut self, state: &RotorState) {
        let m2 = moment(state, 2).expect("valid order");
        self.steps.push(state.step);
        self.sigma.push(m2.sqrt());
        self.energy.push(m2);
        self.m4.push(moment(state, 4).expect("valid order"));
        self.m6.push(moment(state, 6).expect("valid order"));
        self.norm_error.push(state.norm_error);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `m4^(1/4)`, the fourth-moment length scale.
    pub fn m4_scale(&self) -> Vec<f64> {
        self.m4.iter().map(|m| m.powf(0.25)).collect()
    }

    /// `m6^(1/6)`.
    pub fn m6_scale(&self) -> Vec<f64> {
        self.m6.iter().map(|m| m.powf(1.0 / 6.0)).collect()
    }
}

/// Least-squares fit of `log value = c log n + log_amplitude`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub c: f64,
    pub log_amplitude: f64,
    pub window: (u64, u64),
    pub residual_rms: f64,
    pub points_used: usize,
}

/// Log-spaced integer steps in `[1, max]`, about `per_decade` per decade,
/// always ending at `max`.
pub fn log_spaced_steps(max: u64, per_decade: u32) -> Vec<u64> {
    if max == 0 {
        return Vec::new();
    }
    let per_decade = f64::from(per_decade.max(1));
    let mut out: Vec<u64> = Vec::new();
    let mut k = 0u32;
    loop {
        let n = 10f64.powf(f64::from(k) / per_decade).round() as u64;
        if n >= max {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
        k += 1;
    }
    out.push(max);
    out
}

/// Fits the exponent of `sigma ~ n^c`. The default window is
/// `[max_step / 10, max_step]`.
pub fn fit_exponent(series: &MomentSeries, window: Option<(u64, u64)>) -> Result<ExponentFit> {
    fit_power_law(&series.steps, &series.sigma, window)
}

pub fn default_window(steps: &[u64]) -> Option<(u64, u64)> {
    let last = *steps.last()?;
    Some((last / 10, last))
}

pub fn fit_power_law(steps: &[u64], values: &[f64], window: Option<(u64, u64)>) -> Result<ExponentFit> {
    if steps.len() != values.len() {
        return Err(Error::FitRejected(format!(
            "{} steps but {} values",
            steps.len(),
            values.len()
        )));
    }
    let (lo, hi) = match window.or_else(|| default_window(steps)) {
        Some(w) => w,
        None => return Err(Error::FitRejected("empty series".into())),
    };
    if lo >= hi {
        return Err(Error::FitRejected(format!("window [{lo}, {hi}] is empty")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&n, &v) in steps.iter().zip(values) {
        if n < lo.max(1) || n > hi {
            continue;
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::FitRejected(format!("value {v} at step {n} is not positive")));
        }
        xs.push((n as f64).ln());
        ys.push(v.ln());
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::FitRejected(format!(
            "{} points in window [{lo}, {hi}], need at least {MIN_FIT_POINTS}",
            xs.len()
        )));
    }
    let count = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / count;
    let mean_y = ys.iter().sum::<f64>() / count;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let c = sxy / sxx;
    let log_amplitude = mean_y - c * mean_x;
    let residual_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - c * x - log_amplitude).powi(2))
        .sum::<f64>()
        / count)
        .sqrt();
    Ok(ExponentFit {
        c,
        log_amplitude,
        window: (lo, hi),
        residual_rms,
        points_used: xs.len(),
    })
}
