//! Gamma-function helpers used by the kernel and the reference solver.
//!
//! The gamma and log-gamma evaluations themselves come from `statrs`
//! (Lanczos, ~16 significant digits). What this module adds is
//! [`ln_gamma_diff`], an evaluation of `lnGamma(x + d) - lnGamma(x)` that
//! does not lose digits to cancellation when `x` is large: the two
//! log-gamma values grow like `x ln x` while their difference stays
//! `O(d ln x)`, so subtracting rounded `lnGamma` results caps the relative
//! accuracy of `exp(diff)` at roughly `x ln x * eps`. For `x = 10^6` that
//! is only ~1e-9, far worse than the weights recurrence it is meant to
//! cross-check.

use statrs::function::gamma as sf;

/// Gamma function.
///
/// `statrs::gamma` evaluates a `powf` whose intermediate overflows around
/// `x ~ 170`, before the true double-precision limit of the function
/// (`Gamma(171.62...) ~ f64::MAX`). Above 140 the value is therefore taken
/// as `exp(lnGamma(x))`, which overflows exactly where the function itself
/// does. Gamma is exactly 1 at 1 and 2; those points are pinned so integer
/// orders normalize exactly.
pub fn gamma(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 1.0;
    }
    if x > 140.0 {
        return ln_gamma(x).exp();
    }
    sf::gamma(x)
}

/// Natural log of the gamma function, exactly zero at 1 and 2.
pub fn ln_gamma(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    sf::ln_gamma(x)
}

/// Stirling tail `S(z)` of `lnGamma(z) = (z-1/2) ln z - z + ln(2 pi)/2 + S(z)`.
///
/// Four terms keep the truncation error below 1e-19 for `z >= 64`.
fn stirling_tail(z: f64) -> f64 {
    let w = 1.0 / z;
    let w2 = w * w;
    w * (1.0 / 12.0 + w2 * (-1.0 / 360.0 + w2 * (1.0 / 1260.0 + w2 * (-1.0 / 1680.0))))
}

/// Computes `lnGamma(x + d) - lnGamma(x)` for `x >= 1` and `|d| <= 1`.
///
/// For small `x` the plain difference is already accurate. For large `x`
/// the difference of the Stirling expansions is evaluated term by term:
///
/// ```text
/// (x+d-1/2) ln(x+d) - (x-1/2) ln x = (x-1/2) ln1p(d/x) + d ln(x+d)
/// ```
///
/// which never subtracts two large nearby quantities.
pub fn ln_gamma_diff(x: f64, d: f64) -> f64 {
    debug_assert!(x >= 1.0, "ln_gamma_diff requires x >= 1, got {x}");
    debug_assert!(d.abs() <= 1.0, "ln_gamma_diff requires |d| <= 1, got {d}");
    if d == 0.0 {
        return 0.0;
    }
    if x < 64.0 {
        return sf::ln_gamma(x + d) - sf::ln_gamma(x);
    }
    let y = x + d;
    (x - 0.5) * (d / x).ln_1p() + d * y.ln() - d + (stirling_tail(y) - stirling_tail(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_reference_points() {
        assert_relative_eq!(gamma(0.5), std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-13);
        assert_relative_eq!(ln_gamma(10.0), (362880.0f64).ln(), max_relative = 1e-14);
    }

    #[test]
    fn gamma_overflows_past_171() {
        assert!(gamma(171.0).is_finite());
        assert!(gamma(172.0).is_infinite());
    }

    #[test]
    fn diff_matches_plain_log_gamma_at_moderate_arguments() {
        for &x in &[1.0, 2.5, 10.0, 63.0, 64.0, 100.0, 500.0] {
            for &d in &[-1.0, -0.7, -0.3, -0.05, 0.05, 0.5, 1.0] {
                if x + d < 0.5 {
                    continue;
                }
                let plain = ln_gamma(x + d) - ln_gamma(x);
                let fused = ln_gamma_diff(x, d);
                assert_relative_eq!(fused, plain, max_relative = 1e-10, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn diff_via_functional_equation() {
        // lnGamma(x+1) - lnGamma(x) = ln x, exactly, at any scale.
        for &x in &[64.0, 1e3, 1e5, 1e6] {
            assert_relative_eq!(ln_gamma_diff(x, 1.0), x.ln(), max_relative = 1e-14);
        }
    }

    #[test]
    fn diff_is_exactly_zero_for_zero_offset() {
        assert_eq!(ln_gamma_diff(12345.0, 0.0), 0.0);
    }
}
