use num_complex::Complex64;

use super::bessel::bessel_row;
use crate::error::Result;

/// Kernel truncation tolerance used unless a run overrides it.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-14;

/// Width of the window past the cut that must stay below tolerance.
const SCAN_WINDOW: usize = 32;

/// Momentum-space stencil of one kick, `K_m = i^(-m) J_m(kappa)`.
///
/// Only `m >= 0` is stored; `K_{-m} = K_m` is applied by [`KickKernel::coefficient`].
#[derive(Debug, Clone, PartialEq)]
pub struct KickKernel {
    pub strength: f64,
    pub half_width: usize,
    /// `K_0 ..= K_half_width`.
    pub coefficients: Vec<Complex64>,
    pub tolerance: f64,
}

impl KickKernel {
    /// `K_m` for any signed `m`; zero outside the stored band.
    pub fn coefficient(&self, m: i64) -> Complex64 {
        self.coefficients
            .get(m.unsigned_abs() as usize)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// The stencil laid out for `m = -half_width ..= half_width`.
    pub fn stencil(&self) -> Vec<Complex64> {
        let w = self.half_width as i64;
        (-w..=w).map(|m| self.coefficient(m)).collect()
    }

    pub fn weight(&self) -> f64 {
        self.coefficients[0].norm_sqr()
            + 2.0 * self.coefficients[1..].iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

/// `(-i)^m` for `m >= 0`.
pub(crate) fn minus_i_pow(m: usize) -> Complex64 {
    match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Smallest `M >= ceil(|kappa|)` with `|J_m(kappa)| < tol` for every `m` in
/// `(M, M + 32]`.
pub fn truncation_order(kappa: f64, tol: f64) -> Result<usize> {
    debug_assert!(tol > 0.0 && tol <= 1e-2, "tolerance {tol} outside (0, 1e-2]");
    let floor = kappa.abs().ceil() as usize;
    let mut guess = (kappa.abs() + 10.0 + 8.0 * kappa.abs().cbrt()).ceil() as usize;
    loop {
        let row = bessel_row(kappa, guess + SCAN_WINDOW)?;
        let small: Vec<bool> = row.values.iter().map(|v| v.abs() < tol).collect();
        let found = (floor..=guess).find(|&cut| small[cut + 1..=cut + SCAN_WINDOW].iter().all(|&s| s));
        if let Some(cut) = found {
            return Ok(cut);
        }
        guess *= 2;
    }
}

pub fn kick_kernel(kappa: f64, tol: f64) -> Result<KickKernel> {
    let half_width = truncation_order(kappa, tol)?;
    let row = bessel_row(kappa, half_width)?;
    let coefficients = row
        .values
        .iter()
        .enumerate()
        .map(|(m, &j)| minus_i_pow(m) * j)
        .collect();
    Ok(KickKernel {
        strength: kappa,
        half_width,
        coefficients,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::series::bessel_j_series;

    #[test]
    fn zero_strength_is_identity() {
        assert_eq!(truncation_order(0.0, 1e-14).unwrap(), 0);
        let k = kick_kernel(0.0, 1e-14).unwrap();
        assert_eq!(k.half_width, 0);
        assert_eq!(k.coefficients, vec![Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn order_at_five_against_series_scan() {
        let tol = 1e-14;
        let m = truncation_order(5.0, tol).unwrap();
        assert!((15..=40).contains(&m), "{m}");
        // oracle: the cut is the last order whose series value reaches tol
        let last_big = (0..80u32)
            .filter(|&k| bessel_j_series(k, 5.0).abs() >= tol)
            .max()
            .unwrap() as usize;
        assert_eq!(m, last_big.max(5));
    }

    #[test]
    fn order_grows_with_strength() {
        for &t in &[1e-6, 1e-10, 1e-14] {
            assert!(truncation_order(10.0, t).unwrap() >= truncation_order(5.0, t).unwrap());
        }
    }

    #[test]
    fn kernel_values_at_two() {
        let k = kick_kernel(2.0, 1e-14).unwrap();
        assert!((k.coefficient(0) - Complex64::new(0.223_890_779_141_235_7, 0.0)).norm() < 1e-14);
        assert!((k.coefficient(1) - Complex64::new(0.0, -0.576_724_807_756_873_4)).norm() < 1e-14);
        assert_eq!(k.coefficient(-1), k.coefficient(1));
    }

    #[test]
    fn kernel_is_symmetric_and_unitary() {
        for &kappa in &[0.5, 1.0, 2.0, 5.0, 10.0, 15.0, -7.0] {
            let k = kick_kernel(kappa, 1e-14).unwrap();
            let w = k.half_width as i64;
            for m in 0..=w {
                assert_eq!(k.coefficient(m), k.coefficient(-m));
            }
            assert!((k.weight() - 1.0).abs() < 1e-12, "kappa = {kappa}");
            let stencil = k.stencil();
            assert_eq!(stencil.len(), 2 * k.half_width + 1);
            let beyond = bessel_row(kappa, k.half_width + 40).unwrap();
            assert!(beyond.values[k.half_width + 1..].iter().all(|v| v.abs() < k.tolerance));
        }
    }
}
