//! Memory-kernel weights `c[k] = Gamma(k+q) / (Gamma(q) * Gamma(k+1))`.
//!
//! The fractional iteration multiplies every past map evaluation by a
//! Gamma-ratio coefficient that depends only on the lag `k = n - i`, so the
//! weights are precomputed once per order `q` and the orbit loop becomes a
//! pure inner product. Three interchangeable evaluation strategies are
//! provided:
//!
//! * [`weights_recurrence`] — the production path. `c[0] = 1` and
//!   `c[k] = c[k-1] * (k-1+q) / k` from the gamma functional equation;
//!   total, overflow-free, O(1) per entry.
//! * [`weights_loggamma`] — cross-validation path via
//!   `exp(lnGamma(k+q) - lnGamma(k+1)) / Gamma(q)`.
//! * [`weights_direct`] — the naive ratio `Gamma(k+q) / Gamma(k+1)`. Both
//!   gammas overflow double precision near `k ~ 170`; the path is kept
//!   exactly because it demonstrates that failure mode, and every entry
//!   carries a finite-flag.
//!
//! The leading `1/Gamma(q)` of the iteration is folded into the weights so
//! that `c[0] = 1` exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special;
use crate::summation;

/// Fractional order `q` of the difference operator, restricted to `(0, 1]`.
///
/// `q = 1` is admitted as the integer-order limit where every weight is 1
/// and the iteration collapses to the one-step difference form.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct FractionalOrder(f64);

/// Error for order values outside `(0, 1]` (or non-finite).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("fractional order must satisfy 0 < q <= 1, got {value}")]
pub struct InvalidOrder {
    pub value: f64,
}

impl FractionalOrder {
    /// The integer-order limit `q = 1`.
    pub const INTEGER: FractionalOrder = FractionalOrder(1.0);

    pub fn new(q: f64) -> Result<Self, InvalidOrder> {
        if q.is_finite() && q > 0.0 && q <= 1.0 {
            Ok(Self(q))
        } else {
            Err(InvalidOrder { value: q })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<'de> Deserialize<'de> for FractionalOrder {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let q = f64::deserialize(deserializer)?;
        FractionalOrder::new(q).map_err(serde::de::Error::custom)
    }
}

/// Normalized memory-kernel weights for a fixed fractional order.
///
/// `c[0] = 1`; for `q` in `(0,1)` the entries decrease strictly and decay
/// like `k^(q-1)`; for `q = 1` every entry is exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    q: FractionalOrder,
    c: Vec<f64>,
}

impl KernelWeights {
    #[inline]
    pub fn q(&self) -> FractionalOrder {
        self.q
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.c.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }
}

impl std::ops::Index<usize> for KernelWeights {
    type Output = f64;

    #[inline]
    fn index(&self, k: usize) -> &f64 {
        &self.c[k]
    }
}

/// Weights from the multiplicative gamma recurrence. The default
/// production path: total for valid inputs and free of overflow for any
/// horizon.
pub fn weights_recurrence(q: FractionalOrder, n_max: usize) -> KernelWeights {
    assert!(n_max >= 1, "kernel horizon must be at least 1");
    let qv = q.get();
    let mut c = Vec::with_capacity(n_max);
    c.push(1.0);
    for k in 1..n_max {
        let kf = k as f64;
        let prev = c[k - 1];
        c.push(prev * ((kf - 1.0 + qv) / kf));
    }
    KernelWeights { q, c }
}

/// Weights via the log-gamma identity
/// `Gamma(k+q)/Gamma(k+1) = exp(lnGamma(k+q) - lnGamma(k+1))`.
///
/// The difference of the two log-gammas is evaluated with
/// [`special::ln_gamma_diff`], which avoids the large-argument cancellation
/// that would otherwise cap the accuracy around `k ~ 10^3`; entries agree
/// with [`weights_recurrence`] to 1e-12 relative over the whole horizon.
pub fn weights_loggamma(q: FractionalOrder, n_max: usize) -> KernelWeights {
    assert!(n_max >= 1, "kernel horizon must be at least 1");
    let qv = q.get();
    let ln_gamma_q = special::ln_gamma(qv);
    let mut c = Vec::with_capacity(n_max);
    c.push(1.0); // Gamma(q) / (Gamma(q) * Gamma(1))
    for k in 1..n_max {
        let x = k as f64 + 1.0;
        let diff = special::ln_gamma_diff(x, qv - 1.0);
        c.push((diff - ln_gamma_q).exp());
    }
    KernelWeights { q, c }
}

/// Weights from the naive two-gamma ratio, with per-entry finite-flags.
///
/// Entries where either gamma evaluation overflows double precision are
/// flagged; the stored value is whatever IEEE division produced (infinity
/// over infinity gives NaN, finite over infinity gives zero). This is the
/// expected behavior being demonstrated, not a failure of the operation.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectWeights {
    q: FractionalOrder,
    values: Vec<f64>,
    finite: Vec<bool>,
}

impl DirectWeights {
    #[inline]
    pub fn q(&self) -> FractionalOrder {
        self.q
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raw ratio value at lag `k` (may be non-finite or spuriously zero
    /// once the gammas overflow).
    #[inline]
    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// True when both gamma evaluations at lag `k` stayed finite.
    #[inline]
    pub fn is_entry_finite(&self, k: usize) -> bool {
        self.finite[k]
    }

    /// Index of the first flagged entry, if any.
    pub fn first_overflow(&self) -> Option<usize> {
        self.finite.iter().position(|&ok| !ok)
    }
}

/// Naive evaluation `Gamma(k+q) / (Gamma(q) * Gamma(k+1))` kept to
/// reproduce the overflow of the direct ratio past `k ~ 170`.
pub fn weights_direct(q: FractionalOrder, n_max: usize) -> DirectWeights {
    assert!(n_max >= 1, "kernel horizon must be at least 1");
    let qv = q.get();
    let gamma_q = special::gamma(qv);
    let mut values = Vec::with_capacity(n_max);
    let mut finite = Vec::with_capacity(n_max);
    for k in 0..n_max {
        let kf = k as f64;
        let num = special::gamma(kf + qv);
        let den = special::gamma(kf + 1.0);
        values.push(num / den / gamma_q);
        finite.push(num.is_finite() && den.is_finite());
    }
    DirectWeights { q, values, finite }
}

/// Un-normalized partial kernel sum `S(n) = sum_{k=0..n-1} Gamma(k+q) / Gamma(k+1)`,
/// computed on the stable recurrence path in fixed ascending-k order
/// (compensated for long horizons).
///
/// Satisfies the closed form `S(n) = Gamma(n+q) / (q * Gamma(n))`; the test
/// suite verifies the identity by brute-force summation at small `n` before
/// relying on it at large `n`.
pub fn partial_kernel_sum(q: FractionalOrder, n: usize) -> f64 {
    assert!(n >= 1, "partial kernel sum needs at least one term");
    let weights = weights_recurrence(q, n);
    summation::stable_sum(weights.as_slice()) * special::gamma(q.get())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order(q: f64) -> FractionalOrder {
        FractionalOrder::new(q).unwrap()
    }

    #[test]
    fn order_validation() {
        assert!(FractionalOrder::new(0.5).is_ok());
        assert!(FractionalOrder::new(1.0).is_ok());
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(1.0000001).is_err());
        assert!(FractionalOrder::new(-0.3).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn recurrence_integer_order_is_all_ones() {
        let w = weights_recurrence(FractionalOrder::INTEGER, 4);
        assert_eq!(w.as_slice(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn recurrence_half_order_prefix() {
        let w = weights_recurrence(order(0.5), 4);
        assert_eq!(w.as_slice(), &[1.0, 0.5, 0.375, 0.3125]);
    }

    #[test]
    fn recurrence_q03_prefix() {
        let w = weights_recurrence(order(0.3), 3);
        assert_eq!(w[0], 1.0);
        assert_relative_eq!(w[1], 0.3, max_relative = 1e-15);
        assert_relative_eq!(w[2], 0.195, max_relative = 1e-15);
    }

    #[test]
    fn loggamma_half_order_first_lag() {
        let w = weights_loggamma(order(0.5), 2);
        assert_relative_eq!(w[1], 0.5, max_relative = 1e-13);
    }

    #[test]
    fn loggamma_matches_recurrence_entrywise() {
        for &q in &[0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
            let q = order(q);
            let lg = weights_loggamma(q, 5000);
            let rec = weights_recurrence(q, 5000);
            for k in 0..5000 {
                assert_relative_eq!(lg[k], rec[k], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn loggamma_finite_and_close_to_recurrence_at_extreme_horizons() {
        let q = order(0.5);
        let n = 1_000_001;
        let lg = weights_loggamma(q, n);
        let rec = weights_recurrence(q, n);
        for &k in &[10_000usize, 100_000, 500_000, 1_000_000] {
            assert!(lg[k].is_finite() && lg[k] > 0.0);
            assert_relative_eq!(lg[k], rec[k], max_relative = 1e-12);
        }
    }

    #[test]
    fn direct_flags_overflow_past_180() {
        let d = weights_direct(order(0.5), 250);
        assert!(d.is_entry_finite(10));
        assert!(!d.is_entry_finite(200));
        let first = d.first_overflow().unwrap();
        assert!(first <= 200, "overflow expected by k=200, got {first}");
        assert!(first > 150, "overflow should not appear before k~170, got {first}");
    }

    #[test]
    fn direct_matches_recurrence_where_finite() {
        let q = order(0.5);
        let d = weights_direct(q, 180);
        let rec = weights_recurrence(q, 180);
        for k in 0..180 {
            if d.is_entry_finite(k) {
                assert_relative_eq!(d.value(k), rec[k], max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn direct_integer_order_is_exactly_one_before_overflow() {
        let d = weights_direct(FractionalOrder::INTEGER, 51);
        assert_eq!(d.value(50), 1.0);
        assert!(d.is_entry_finite(50));
    }

    #[test]
    fn pairwise_identity_of_paths() {
        for &q in &[0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
            let q = order(q);
            let rec = weights_recurrence(q, 170);
            let lg = weights_loggamma(q, 170);
            let dir = weights_direct(q, 170);
            for k in 0..170 {
                assert!(dir.is_entry_finite(k), "direct path overflowed at k={k} q={q}");
                assert_relative_eq!(rec[k], lg[k], max_relative = 1e-10);
                assert_relative_eq!(rec[k], dir.value(k), max_relative = 1e-10);
                assert_relative_eq!(lg[k], dir.value(k), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn monotone_decay_for_fractional_orders() {
        for &q in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let w = weights_recurrence(order(q), 10_000);
            for k in 1..w.len() {
                assert!(w[k] < w[k - 1], "q={q} k={k}");
                assert!(w[k] > 0.0 && w[k] <= 1.0);
            }
        }
    }

    #[test]
    fn asymptotic_decay_exponent() {
        // c[k] ~ k^(q-1)/Gamma(q)  =>  c[2k]/c[k] -> 2^(q-1).
        let k = 10_000;
        for &q in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let w = weights_recurrence(order(q), 2 * k + 1);
            let ratio = w[2 * k] / w[k];
            assert!(
                (ratio - 2f64.powf(q - 1.0)).abs() < 0.01,
                "q={q} ratio={ratio}"
            );
        }
    }

    #[test]
    fn no_overflow_on_stable_paths_at_one_million() {
        for &q in &[0.1, 0.5, 1.0] {
            let w = weights_recurrence(order(q), 1_000_001);
            let last = w[1_000_000];
            assert!(last.is_finite() && last > 0.0);
        }
    }

    #[test]
    fn hockey_stick_closed_form() {
        // Brute-force check of the identity at small n first...
        for &q in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            for n in 1..=20usize {
                let brute: f64 = (0..n)
                    .map(|k| special::gamma(k as f64 + q) / special::gamma(k as f64 + 1.0))
                    .sum();
                let closed = special::gamma(n as f64 + q) / (q * special::gamma(n as f64));
                assert_relative_eq!(brute, closed, max_relative = 1e-12);
            }
        }
        // ...then trust it against the normalized weight sums at scale.
        for &q in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let qo = order(q);
            for &n in &[1usize, 2, 10, 100, 5000] {
                let w = weights_recurrence(qo, n);
                let sum: f64 = summation::stable_sum(w.as_slice());
                let closed = (special::ln_gamma_diff(n as f64, q).exp())
                    / (q * special::gamma(q));
                assert_relative_eq!(sum, closed, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn partial_sum_single_term_is_gamma_q() {
        let s = partial_kernel_sum(order(0.5), 1);
        assert_relative_eq!(s, 1.7724538509055160273, max_relative = 1e-12);
    }

    #[test]
    fn partial_sum_integer_order_counts_terms() {
        assert_relative_eq!(
            partial_kernel_sum(FractionalOrder::INTEGER, 100),
            100.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn partial_sum_matches_closed_form_at_1000() {
        let q = 0.3;
        let s = partial_kernel_sum(order(q), 1000);
        let closed = special::ln_gamma_diff(1000.0, q).exp() / q;
        assert_relative_eq!(s, closed, max_relative = 1e-10);
    }
}
