//! Ascending power series for `J_m(x)` evaluated in double-double arithmetic.
//!
//! `J_m(x) = sum_k (-1)^k (x/2)^(2k+m) / (k! (k+m)!)`. The alternating terms
//! reach about `e^|x|` before cancelling, so plain `f64` loses roughly
//! `|x| / ln 10` digits; carrying ~32 significant digits keeps the result
//! accurate to full double precision for `|x| <= 40`. Slow, and used only as
//! an oracle for the recurrence.

#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> DoubleDouble {
    let s = a + b;
    DoubleDouble {
        hi: s,
        lo: b - (s - a),
    }
}

impl DoubleDouble {
    fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        quick_two_sum(s, e + self.lo + other.lo)
    }

    fn mul(self, other: Self) -> Self {
        let p = self.hi * other.hi;
        let e = self.hi.mul_add(other.hi, -p) + self.hi * other.lo + self.lo * other.hi;
        quick_two_sum(p, e)
    }

    fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let p = q1 * d;
        let pe = q1.mul_add(d, -p);
        let (r, re) = two_sum(self.hi, -p);
        let rem = r + (re - pe + self.lo);
        quick_two_sum(q1, rem / d)
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

/// `J_m(x)` from the ascending series.
pub fn bessel_j_series(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let half = DoubleDouble::from_f64(0.5 * x);
    let mut term = DoubleDouble::from_f64(1.0);
    for k in 1..=m {
        term = term.mul(half).div_f64(f64::from(k));
    }
    let step = half.mul(half).neg();
    let mut sum = term;
    let mut k = 1u32;
    loop {
        term = step.mul(term).div_f64(f64::from(k) * f64::from(k + m));
        sum = sum.add(term);
        let past_peak = f64::from(k) > 0.5 * x.abs();
        if past_peak && term.hi.abs() <= 1e-34 * sum.hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if term.hi == 0.0 || k > 2000 {
            break;
        }
        k += 1;
    }
    sum.hi + sum.lo
}
