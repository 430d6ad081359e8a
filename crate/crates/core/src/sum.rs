//! Compensated (Neumaier) summation with a running error estimate.
//!
//! Accumulators are combined with [`CompensatedSum::merge`] in a fixed
//! order so that chunked parallel reductions give bit-identical results
//! regardless of how many workers produced the chunks.

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs_sum: f64,
    terms: u64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += x.abs();
        self.terms += 1;
    }

    /// Folds another accumulator into this one. Not commutative in the
    /// last bit; callers must merge in a deterministic order.
    pub fn merge(&mut self, other: &CompensatedSum) {
        let terms = self.terms + other.terms;
        let abs_sum = self.abs_sum + other.abs_sum;
        self.add(other.sum);
        self.add(other.comp);
        self.terms = terms;
        self.abs_sum = abs_sum;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Sum of the absolute values of the added terms.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// A bound on the accumulated rounding error of [`value`](Self::value):
    /// `2 eps |S| + n eps^2 sum |x_i|`, the standard estimate for
    /// Neumaier summation.
    pub fn error_estimate(&self) -> f64 {
        let eps = f64::EPSILON / 2.0;
        2.0 * eps * self.value().abs() + (self.terms as f64) * eps * eps * self.abs_sum
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
