//! Compensated accumulation for long, slowly decaying sums.
//!
//! The memory weights decay like `k^(q-1)`, so partial sums over 10^5..10^6
//! terms keep picking up contributions well above machine epsilon; a naive
//! accumulator loses digits linearly in the term count. Sums longer than
//! [`COMPENSATION_THRESHOLD`] terms use Kahan compensation, shorter ones
//! use a plain ascending accumulator. The policy depends only on the term
//! count, never on the data, so results are bitwise reproducible.

/// Term count above which accumulation switches to Kahan compensation.
pub const COMPENSATION_THRESHOLD: usize = 10_000;

/// Classic Kahan accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Sums `terms` in slice order, compensating when the slice is long.
pub fn stable_sum(terms: &[f64]) -> f64 {
    if terms.len() > COMPENSATION_THRESHOLD {
        let mut acc = KahanSum::new();
        for &t in terms {
            acc.add(t);
        }
        acc.value()
    } else {
        let mut acc = 0.0;
        for &t in terms {
            acc += t;
        }
        acc
    }
}

/// Memory-sum inner product `sum_k weights[k] * history[n-1-k]` for
/// `k = 0..n`, i.e. ascending weight index paired with the most recent
/// history first. Compensated past the same threshold.
#[inline]
pub fn stable_dot_rev(weights: &[f64], history: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), history.len());
    if weights.len() > COMPENSATION_THRESHOLD {
        let mut acc = KahanSum::new();
        for (w, f) in weights.iter().zip(history.iter().rev()) {
            acc.add(w * f);
        }
        acc.value()
    } else {
        let mut acc = 0.0;
        for (w, f) in weights.iter().zip(history.iter().rev()) {
            acc += w * f;
        }
        acc
    }
}
