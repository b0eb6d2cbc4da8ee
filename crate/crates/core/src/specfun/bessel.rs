use crate::error::{Error, Result};

/// Largest accepted `|x|`.
pub const MAX_ARGUMENT: f64 = 1e6;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;
/// Below this the leading series term is exact to double precision.
const TINY_ARGUMENT: f64 = 1e-30;
/// Absolute agreement required between two start orders.
const START_AGREEMENT: f64 = 1e-15;
const MAX_START_RAISES: usize = 8;

/// `J_m(argument)` for `m = 0..=max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselRow {
    pub argument: f64,
    pub max_order: usize,
    pub values: Vec<f64>,
}

impl BesselRow {
    /// `J_m` for signed `m`, using `J_{-m} = (-1)^m J_m`. `None` past `max_order`.
    pub fn signed(&self, m: i64) -> Option<f64> {
        let v = *self.values.get(m.unsigned_abs() as usize)?;
        Some(if m < 0 && m % 2 != 0 { -v } else { v })
    }
}

/// Computes `J_0(x) .. J_max_order(x)` by Miller's downward recurrence,
/// normalized with `J_0 + 2 sum_k J_{2k} = 1`.
///
/// The start order is raised until two successive starts agree to 1e-15, so an
/// order range the heuristic underestimates is recomputed rather than
/// returned inaccurate.
pub fn bessel_row(x: f64, max_order: usize) -> Result<BesselRow> {
    if !x.is_finite() {
        return Err(Error::NonFiniteArgument(x));
    }
    if x.abs() >= MAX_ARGUMENT {
        return Err(Error::ArgumentOutOfRange(x));
    }
    let ax = x.abs();
    let mut values = if ax == 0.0 {
        let mut v = vec![0.0; max_order + 1];
        v[0] = 1.0;
        v
    } else if ax < TINY_ARGUMENT {
        leading_terms(ax, max_order)
    } else {
        let mut start = initial_start(ax, max_order);
        let mut current = miller(ax, max_order, start);
        let mut converged = false;
        for _ in 0..MAX_START_RAISES {
            start += 16 + start / 4;
            let raised = miller(ax, max_order, start);
            let diff = current
                .iter()
                .zip(&raised)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            current = raised;
            if diff < START_AGREEMENT {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::RecurrenceNotConverged { x, max_order });
        }
        current
    };
    if x < 0.0 {
        for v in values.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
    Ok(BesselRow {
        argument: x,
        max_order,
        values,
    })
}

fn initial_start(ax: f64, max_order: usize) -> usize {
    let base = (max_order as f64).max(ax.ceil());
    let start = base + 20.0 + (60.0 * base).sqrt().ceil();
    // even start keeps the normalization sum aligned with its even terms
    let start = start as usize;
    start + start % 2
}

/// One Miller pass from `start` down to 0 for `x > 0`.
fn miller(x: f64, max_order: usize, start: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    let two_over_x = 2.0 / x;
    let mut upper = 0.0_f64; // J_{k+1}
    let mut current = 1e-300_f64; // J_k
    let mut norm = 0.0_f64;
    for k in (1..=start).rev() {
        if k <= max_order {
            out[k] = current;
        }
        if k % 2 == 0 {
            norm += 2.0 * current;
        }
        let lower = k as f64 * two_over_x * current - upper;
        upper = current;
        current = lower;
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            upper *= RESCALE_BY;
            norm *= RESCALE_BY;
            if k <= max_order {
                for v in &mut out[k..] {
                    *v *= RESCALE_BY;
                }
            }
        }
    }
    out[0] = current;
    norm += current;
    let inv = 1.0 / norm;
    for v in &mut out {
        *v *= inv;
    }
    out
}

fn leading_terms(ax: f64, max_order: usize) -> Vec<f64> {
    let half = 0.5 * ax;
    let mut out = Vec::with_capacity(max_order + 1);
    let mut term = 1.0_f64;
    out.push(term);
    for m in 1..=max_order {
        term *= half / m as f64;
        out.push(term);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::series::bessel_j_series;

    #[test]
    fn zero_argument_is_delta() {
        let row = bessel_row(0.0, 4).unwrap();
        assert_eq!(row.values, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn j0_at_five() {
        let row = bessel_row(5.0, 0).unwrap();
        // ascending series summed to convergence in double-double
        assert!((row.values[0] - (-0.177_596_771_314_338_3)).abs() < 1e-13);
        assert!((row.values[0] - bessel_j_series(0, 5.0)).abs() < 1e-14);
    }

    #[test]
    fn known_values_at_two() {
        let row = bessel_row(2.0, 1).unwrap();
        assert!((row.values[0] - 0.223_890_779_141_235_7).abs() < 1e-14);
        assert!((row.values[1] - 0.576_724_807_756_873_4).abs() < 1e-14);
    }

    #[test]
    fn normalization_identity() {
        for &x in &[0.3, 1.0, 7.5, 33.0, 99.0, 512.0] {
            let row = bessel_row(x, 2 * (x as usize) + 60).unwrap();
            let s: f64 = row.values[0]
                + 2.0 * row.values.iter().skip(2).step_by(2).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-12, "x = {x}: {s}");
        }
    }

    #[test]
    fn negative_argument_reflection() {
        let pos = bessel_row(3.7, 12).unwrap();
        let neg = bessel_row(-3.7, 12).unwrap();
        for m in 0..=12 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(neg.values[m], sign * pos.values[m]);
        }
        assert_eq!(neg.signed(-3), Some(-neg.values[3]));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            bessel_row(f64::NAN, 3),
            Err(Error::NonFiniteArgument(_))
        ));
        assert!(matches!(
            bessel_row(f64::INFINITY, 3),
            Err(Error::NonFiniteArgument(_))
        ));
        assert!(matches!(
            bessel_row(2e6, 3),
            Err(Error::ArgumentOutOfRange(_))
        ));
    }

    #[test]
    fn high_orders_far_past_argument() {
        // orders well beyond the heuristic's base still match the series
        let row = bessel_row(1.5, 120).unwrap();
        for m in [0usize, 5, 30, 60] {
            let want = bessel_j_series(m as u32, 1.5);
            assert!((row.values[m] - want).abs() <= 1e-13 * want.abs(), "m = {m}");
        }
        assert!(row.values[120].abs() < 1e-200);
    }

    #[test]
    fn bounded_by_one() {
        let row = bessel_row(250.0, 400).unwrap();
        assert!(row.values.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn tiny_argument_uses_leading_term() {
        let row = bessel_row(1e-40, 3).unwrap();
        assert_eq!(row.values[0], 1.0);
        assert!((row.values[1] - 5e-41).abs() < 1e-55);
    }
}
