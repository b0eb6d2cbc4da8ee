use num_complex::Complex64;

/// Amplitudes `a_l` for `l in [l_min, l_min + len)` after `step` kicks.
#[derive(Debug, Clone, PartialEq)]
pub struct RotorState {
    pub amplitudes: Vec<Complex64>,
    pub l_min: i64,
    pub step: u64,
    /// `|sum |a_l|^2 - 1|` after the latest step.
    pub norm_error: f64,
}

impl RotorState {
    /// `a_0 = 1` on the lattice `[-half_width, half_width]`.
    pub fn new_delta(half_width: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 2 * half_width + 1];
        amplitudes[half_width] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes,
            l_min: -(half_width as i64),
            step: 0,
            norm_error: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn l_max(&self) -> i64 {
        self.l_min + self.amplitudes.len() as i64 - 1
    }

    /// `a_l`, zero off the lattice.
    pub fn amplitude(&self, l: i64) -> Complex64 {
        if l < self.l_min || l > self.l_max() {
            return Complex64::new(0.0, 0.0);
        }
        self.amplitudes[(l - self.l_min) as usize]
    }

    pub fn probability(&self, l: i64) -> f64 {
        self.amplitude(l).norm_sqr()
    }

    /// `(l, a_l)` over the lattice.
    pub fn sites(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(i, &a)| (self.l_min + i as i64, a))
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability in the outermost `band` sites on each side, summed.
    pub fn edge_mass(&self, band: usize) -> f64 {
        let band = band.min(self.len() / 2);
        let left: f64 = self.amplitudes[..band].iter().map(|a| a.norm_sqr()).sum();
        let right: f64 = self.amplitudes[self.len() - band..]
            .iter()
            .map(|a| a.norm_sqr())
            .sum();
        left + right
    }

    /// Extends the lattice by `extra` zero sites on each side.
    pub fn pad(&mut self, extra: usize) {
        let zero = Complex64::new(0.0, 0.0);
        let mut grown = Vec::with_capacity(self.len() + 2 * extra);
        grown.resize(extra, zero);
        grown.extend_from_slice(&self.amplitudes);
        grown.resize(self.len() + 2 * extra, zero);
        self.amplitudes = grown;
        self.l_min -= extra as i64;
    }

    /// Largest per-site `|a_l - b_l|` over the union of both lattices.
    pub fn max_amplitude_diff(&self, other: &RotorState) -> f64 {
        let lo = self.l_min.min(other.l_min);
        let hi = self.l_max().max(other.l_max());
        (lo..=hi)
            .map(|l| (self.amplitude(l) - other.amplitude(l)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest per-site `||a_l|^2 - |b_l|^2|` over the union of both lattices.
    pub fn max_probability_diff(&self, other: &RotorState) -> f64 {
        let lo = self.l_min.min(other.l_min);
        let hi = self.l_max().max(other.l_max());
        (lo..=hi)
            .map(|l| (self.probability(l) - other.probability(l)).abs())
            .fold(0.0, f64::max)
    }
}
