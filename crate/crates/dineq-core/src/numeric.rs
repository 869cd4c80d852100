//! Shared numeric helpers.
//!
//! The decomposition identity and the oracle comparisons in this crate are
//! asserted to 1e-10 or tighter, so reductions must not drift: every sum over
//! survey records goes through a compensated accumulator.

/// Running compensated sum (Neumaier's variant of Kahan summation).
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    correction: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one term to the running sum.
    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.correction += (self.sum - t) + value;
        } else {
            self.correction += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// The corrected total.
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.correction
    }
}

/// Compensated sum of an iterator of terms.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Weighted mean `Σ wᵢ vᵢ / Σ wᵢ`.
///
/// Callers are responsible for validating lengths and for a positive total
/// weight; this is checked in debug builds only.
pub fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    debug_assert_eq!(values.len(), weights.len());
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for (v, w) in values.iter().zip(weights) {
        num.add(v * w);
        den.add(*w);
    }
    num.value() / den.value()
}
