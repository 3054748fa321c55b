//! Orbit and diagram post-processing: numerically-periodic-orbit detection,
//! transient segmentation, and set distances between bifurcative sets.
//!
//! Fractional-order orbits are never exactly periodic; an orbit is called
//! numerically periodic (NPO) when the smallest lag `m` exists such that
//! `|x(n) - x(n-m)|` stays within a declared tolerance over the analyzed
//! window. The tolerance is a convention, not a paper-given constant, and
//! is carried in every verdict.

use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::solver::Orbit;
use crate::sweep::{BifurcativeSet, TailColumn};

/// Default periodicity tolerance on state values.
pub const DEFAULT_PERIOD_TOL: f64 = 1e-4;
/// Default sliding-window length for transient segmentation.
pub const DEFAULT_WINDOW: usize = 400;
/// Default stride between windows.
pub const DEFAULT_STRIDE: usize = 100;
/// Default largest period tested.
pub const DEFAULT_MAX_PERIOD: usize = 64;
/// Default tail-set diameter below which a column counts as
/// fixed-point-like (plot-resolution scale), used by
/// [`first_bifurcation_point`] and the BS similarity convention.
pub const DEFAULT_SIMILAR_TOL: f64 = 0.005;

/// Classification of a window of samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PeriodKind {
    /// Lag 1 qualifies: the window sits on a (drifting) constant.
    FixedPointLike,
    /// Smallest qualifying lag `period >= 2`; `residual` is the largest
    /// mismatch `|x(n) - x(n-period)|` seen across the window.
    Npo { period: usize, residual: f64 },
    /// No lag up to the tested maximum qualifies.
    ChaoticLike,
    /// The orbit diverged; nothing to classify.
    Diverged,
}

impl PeriodKind {
    /// Equality for run-merging: same discriminant, same period (residuals
    /// are not compared).
    fn same_regime(&self, other: &PeriodKind) -> bool {
        match (self, other) {
            (PeriodKind::Npo { period: a, .. }, PeriodKind::Npo { period: b, .. }) => a == b,
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }
}

/// Verdict for one analyzed window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodVerdict {
    #[serde(flatten)]
    pub kind: PeriodKind,
    /// Index range of the samples that were classified.
    pub window: Range<usize>,
}

/// A maximal run of windows sharing one regime.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub range: Range<usize>,
    #[serde(flatten)]
    pub kind: PeriodKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("window of {window} exceeds the {available} available samples")]
    WindowTooLarge { window: usize, available: usize },
    #[error("window must be non-empty and leave at least one sample of history")]
    DegenerateWindow,
    #[error("stride must be at least 1")]
    ZeroStride,
    #[error("max_period must be at least 1")]
    ZeroMaxPeriod,
    #[error("periodicity tolerance must be non-negative and finite, got {tol}")]
    InvalidTolerance { tol: f64 },
    #[error("orbit diverged at index {index}; transient segmentation needs a non-divergent span")]
    DivergedOrbit { index: usize },
    #[error("bifurcative sets were built over different grids")]
    GridMismatch,
}

fn check_common(max_period: usize, tol: f64) -> Result<(), AnalysisError> {
    if max_period == 0 {
        return Err(AnalysisError::ZeroMaxPeriod);
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(AnalysisError::InvalidTolerance { tol });
    }
    Ok(())
}

/// Smallest lag `m <= max_period` whose residual over `samples[range]`
/// stays within `tol`; lags are capped so that `x(n - m)` never reaches
/// before the slice start.
fn classify_window(samples: &[f64], range: Range<usize>, max_period: usize, tol: f64) -> PeriodKind {
    let hi = range.end;
    for m in 1..=max_period.min(hi.saturating_sub(1)) {
        let lo = range.start.max(m);
        let mut residual = 0.0f64;
        for n in lo..hi {
            let d = (samples[n] - samples[n - m]).abs();
            if d > residual {
                residual = d;
            }
        }
        if residual <= tol {
            return if m == 1 {
                PeriodKind::FixedPointLike
            } else {
                PeriodKind::Npo {
                    period: m,
                    residual,
                }
            };
        }
    }
    PeriodKind::ChaoticLike
}

/// Classifies the last `window` samples of an orbit.
///
/// Returns the smallest lag `m <= max_period` with
/// `max_n |x(n) - x(n-m)| <= tol` over the window: `FixedPointLike` for
/// `m = 1`, `Npo` for larger `m`, `ChaoticLike` when no lag qualifies, and
/// `Diverged` when the orbit diverged before completing its horizon.
pub fn detect_period(
    orbit: &Orbit,
    window: usize,
    max_period: usize,
    tol: f64,
) -> Result<PeriodVerdict, AnalysisError> {
    check_common(max_period, tol)?;
    let len = orbit.len();
    if window > len {
        return Err(AnalysisError::WindowTooLarge {
            window,
            available: len,
        });
    }
    if window == 0 || window == len {
        // m = 1 already needs one sample of history before the window.
        return Err(AnalysisError::DegenerateWindow);
    }
    let range = len - window..len;
    if orbit.diverged() {
        return Ok(PeriodVerdict {
            kind: PeriodKind::Diverged,
            window: range,
        });
    }
    Ok(PeriodVerdict {
        kind: classify_window(orbit.samples(), range.clone(), max_period, tol),
        window: range,
    })
}

/// Classifies a bare sample slice (e.g. a stored bifurcation tail) using
/// the whole slice beyond the first `max_period` samples as the window.
pub fn classify_samples(samples: &[f64], max_period: usize, tol: f64) -> PeriodKind {
    if samples.len() < 2 {
        return PeriodKind::FixedPointLike;
    }
    let start = max_period.min(samples.len() - 1);
    classify_window(samples, start..samples.len(), max_period, tol)
}

/// Sliding-window transient segmentation.
///
/// Windows of `window` samples advance by `stride`; each is classified as
/// in [`detect_period`] and maximal runs of the same regime are merged.
/// Segment boundaries land on window starts (multiples of `stride`), never
/// interpolated; together the segments cover the whole orbit.
pub fn segment_transients(
    orbit: &Orbit,
    window: usize,
    stride: usize,
    max_period: usize,
    tol: f64,
) -> Result<Vec<Segment>, AnalysisError> {
    check_common(max_period, tol)?;
    if stride == 0 {
        return Err(AnalysisError::ZeroStride);
    }
    if let Some(index) = orbit.divergence_index() {
        return Err(AnalysisError::DivergedOrbit { index });
    }
    let len = orbit.len();
    if window > len {
        return Err(AnalysisError::WindowTooLarge {
            window,
            available: len,
        });
    }
    if window == 0 {
        return Err(AnalysisError::DegenerateWindow);
    }
    let samples = orbit.samples();

    let mut segments: Vec<Segment> = Vec::new();
    let mut start = 0usize;
    while start + window <= len {
        let kind = classify_window(samples, start..start + window, max_period, tol);
        match segments.last_mut() {
            Some(last) if last.kind.same_regime(&kind) => {
                if let (
                    PeriodKind::Npo { residual: acc, .. },
                    PeriodKind::Npo { residual: new, .. },
                ) = (&mut last.kind, &kind)
                {
                    if *new > *acc {
                        *acc = *new;
                    }
                }
                last.range.end = len.min(start + window);
            }
            _ => {
                segments.push(Segment {
                    range: start..len.min(start + window),
                    kind,
                });
            }
        }
        start += stride;
    }
    // Boundaries between runs snap to the first window start of the next
    // run; the final run absorbs the remainder of the orbit.
    for i in 0..segments.len() {
        if i + 1 < segments.len() {
            let next_start = segments[i + 1].range.start;
            segments[i].range.end = next_start;
        } else {
            segments[i].range.end = len;
        }
    }
    Ok(segments)
}

/// Per-grid-value symmetric Hausdorff distances between two bifurcative
/// sets sharing one grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BsDistanceProfile {
    distances: Vec<f64>,
    mismatch: Vec<bool>,
}

impl BsDistanceProfile {
    /// Distance per grid value; entries flagged in [`Self::mismatch`] hold
    /// `f64::INFINITY` (exactly one side diverged there).
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn mismatch(&self) -> &[bool] {
        &self.mismatch
    }

    /// Largest finite distance, if any grid point has one.
    pub fn max_finite(&self) -> Option<f64> {
        self.distances
            .iter()
            .filter(|d| d.is_finite())
            .cloned()
            .fold(None, |acc, d| Some(acc.map_or(d, |m: f64| m.max(d))))
    }

    /// Mean of finite distances over the grid indices in `idx`.
    pub fn mean_finite_over(&self, idx: impl Iterator<Item = usize>) -> Option<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for i in idx {
            let d = self.distances[i];
            if d.is_finite() {
                sum += d;
                n += 1;
            }
        }
        (n > 0).then(|| sum / n as f64)
    }
}

fn directed_hausdorff_1d(from: &[f64], to: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for &a in from {
        let mut best = f64::INFINITY;
        for &b in to {
            let d = (a - b).abs();
            if d < best {
                best = d;
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

/// Symmetric Hausdorff distance between two 1-D sample sets.
pub fn hausdorff_1d(a: &[f64], b: &[f64]) -> f64 {
    directed_hausdorff_1d(a, b).max(directed_hausdorff_1d(b, a))
}

/// Per-grid-value Hausdorff distance between the tail sets of `a` and `b`.
///
/// Where both sides diverged the distance is 0 (nothing distinguishes
/// them); where exactly one side diverged the entry is infinite and
/// flagged as a divergence mismatch.
pub fn bs_distance(
    a: &BifurcativeSet,
    b: &BifurcativeSet,
) -> Result<BsDistanceProfile, AnalysisError> {
    if a.grid() != b.grid() {
        return Err(AnalysisError::GridMismatch);
    }
    let n = a.grid().len();
    let mut distances = Vec::with_capacity(n);
    let mut mismatch = vec![false; n];
    for i in 0..n {
        let d = match (a.column(i), b.column(i)) {
            (TailColumn::Tail(ta), TailColumn::Tail(tb)) => hausdorff_1d(ta, tb),
            (TailColumn::Diverged { .. }, TailColumn::Diverged { .. }) => 0.0,
            _ => {
                mismatch[i] = true;
                f64::INFINITY
            }
        };
        distances.push(d);
    }
    Ok(BsDistanceProfile {
        distances,
        mismatch,
    })
}

/// Smallest grid value whose tail-set diameter exceeds `tol` after having
/// been at or below it earlier in the grid — the first period-doubling of
/// the set. Diverged columns are skipped. `None` when the grid never shows
/// the below-then-above pattern.
pub fn first_bifurcation_point(bs: &BifurcativeSet, tol: f64) -> Option<f64> {
    let mut seen_below = false;
    for (i, col) in bs.columns().iter().enumerate() {
        if let TailColumn::Tail(tail) = col {
            let diam = tail_diameter(tail);
            if diam <= tol {
                seen_below = true;
            } else if seen_below {
                return Some(bs.grid()[i]);
            }
        }
    }
    None
}

/// Spread (max - min) of a tail sample set.
pub fn tail_diameter(tail: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in tail {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{weights_recurrence, FractionalOrder};
    use crate::maps::MapSpec;
    use crate::solver::{solve_iolm, solve_orbit, OrbitProblem};
    use crate::sweep::{run_sweep, SweepAxis, SweepConfig};
    use crate::MapFamily;

    fn synthetic_orbit(samples: Vec<f64>) -> Orbit {
        Orbit::from_parts(samples, false, None)
    }

    #[test]
    fn constant_orbit_is_fixed_point_like() {
        let orbit = synthetic_orbit(vec![0.5; 100]);
        let v = detect_period(&orbit, 50, 16, 1e-4).unwrap();
        assert_eq!(v.kind, PeriodKind::FixedPointLike);
        assert_eq!(v.window, 50..100);
    }

    #[test]
    fn iolm_two_cycle_detected() {
        let orbit = solve_iolm(3.2, 0.1, 1000);
        let v = detect_period(&orbit, 200, 64, 1e-4).unwrap();
        match v.kind {
            PeriodKind::Npo { period, residual } => {
                assert_eq!(period, 2);
                assert!(residual <= 1e-4);
            }
            other => panic!("expected 2-cycle, got {other:?}"),
        }
    }

    #[test]
    fn folm_npo_two_detected_at_small_tolerance() {
        // Long-transient fractional orbit that settles onto an apparent
        // 2-cycle; the residual stays positive (never exactly periodic).
        let q = FractionalOrder::new(0.25).unwrap();
        let problem = OrbitProblem::new(q, MapSpec::Logistic { p: 1.8 }, 0.1, 3500).unwrap();
        let orbit = solve_orbit(&problem, &weights_recurrence(q, 3500)).unwrap();
        let v = detect_period(&orbit, 500, 64, 1e-4).unwrap();
        match v.kind {
            PeriodKind::Npo { period, residual } => {
                assert_eq!(period, 2);
                assert!(residual > 0.0 && residual < 1e-4);
            }
            other => panic!("expected 2-NPO, got {other:?}"),
        }
    }

    #[test]
    fn minimal_period_is_reported() {
        // Exact 2-periodic data also repeats at lag 4; lag 2 must win.
        let samples: Vec<f64> = (0..200).map(|n| if n % 2 == 0 { 0.2 } else { 0.9 }).collect();
        let v = detect_period(&synthetic_orbit(samples), 100, 16, 0.0).unwrap();
        assert_eq!(
            v.kind,
            PeriodKind::Npo {
                period: 2,
                residual: 0.0
            }
        );
    }

    #[test]
    fn exact_period_found_with_zero_tolerance() {
        let pattern = [0.1, 0.7, 0.3, 0.9, 0.4];
        let samples: Vec<f64> = (0..300).map(|n| pattern[n % pattern.len()]).collect();
        let v = detect_period(&synthetic_orbit(samples), 100, 16, 0.0).unwrap();
        assert_eq!(
            v.kind,
            PeriodKind::Npo {
                period: 5,
                residual: 0.0
            }
        );
    }

    #[test]
    fn chaotic_like_when_nothing_qualifies() {
        let orbit = solve_iolm(4.0, 0.2, 600);
        let v = detect_period(&orbit, 300, 32, 1e-4).unwrap();
        assert_eq!(v.kind, PeriodKind::ChaoticLike);
    }

    #[test]
    fn diverged_verdict() {
        let orbit = Orbit::from_parts(vec![0.5, 2e10], true, Some(1));
        let v = detect_period(&orbit, 1, 4, 1e-4).unwrap();
        assert_eq!(v.kind, PeriodKind::Diverged);
    }

    #[test]
    fn window_errors() {
        let orbit = synthetic_orbit(vec![0.5; 10]);
        assert!(matches!(
            detect_period(&orbit, 11, 4, 1e-4),
            Err(AnalysisError::WindowTooLarge { .. })
        ));
        assert!(matches!(
            detect_period(&orbit, 10, 4, 1e-4),
            Err(AnalysisError::DegenerateWindow)
        ));
        assert!(matches!(
            detect_period(&orbit, 5, 0, 1e-4),
            Err(AnalysisError::ZeroMaxPeriod)
        ));
        assert!(matches!(
            detect_period(&orbit, 5, 4, f64::NAN),
            Err(AnalysisError::InvalidTolerance { .. })
        ));
    }

    #[test]
    fn constant_orbit_segments_to_one_run() {
        let orbit = synthetic_orbit(vec![0.25; 1000]);
        let segs = segment_transients(&orbit, 100, 50, 8, 1e-6).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].kind, PeriodKind::FixedPointLike);
        assert_eq!(segs[0].range, 0..1000);
    }

    #[test]
    fn iolm_preperiod_then_cycle() {
        let orbit = solve_iolm(3.2, 0.1, 1000);
        let segs = segment_transients(&orbit, 100, 25, 16, 1e-4).unwrap();
        assert!(segs.len() >= 2, "expected a short preperiod, got {segs:?}");
        let last = segs.last().unwrap();
        assert!(matches!(last.kind, PeriodKind::Npo { period: 2, .. }));
        assert_eq!(last.range.end, 1001);
        // The cycle is reached quickly.
        assert!(last.range.start <= 200, "preperiod too long: {segs:?}");
    }

    #[test]
    fn segmentation_rejects_diverged_orbits() {
        let orbit = Orbit::from_parts(vec![0.5, 2e10], true, Some(1));
        assert!(matches!(
            segment_transients(&orbit, 1, 1, 4, 1e-4),
            Err(AnalysisError::DivergedOrbit { index: 1 })
        ));
    }

    #[test]
    fn segments_cover_orbit_and_align_to_stride() {
        let samples: Vec<f64> = (0..1000)
            .map(|n| {
                if n < 500 {
                    // noisy aperiodic ramp
                    (n as f64 * 0.7311).sin() * (1.0 + n as f64 * 1e-3)
                } else if n % 2 == 0 {
                    0.2
                } else {
                    0.8
                }
            })
            .collect();
        let segs = segment_transients(&synthetic_orbit(samples), 100, 50, 8, 1e-6).unwrap();
        assert_eq!(segs.first().unwrap().range.start, 0);
        assert_eq!(segs.last().unwrap().range.end, 1000);
        for pair in segs.windows(2) {
            assert_eq!(pair[0].range.end, pair[1].range.start);
            assert_eq!(pair[1].range.start % 50, 0);
        }
        assert!(segs
            .iter()
            .any(|s| matches!(s.kind, PeriodKind::Npo { period: 2, .. })));
    }

    #[test]
    fn hausdorff_basics() {
        let a = [0.0, 1.0, 2.0];
        let b = [0.5, 1.5, 2.5];
        assert_eq!(hausdorff_1d(&a, &b), 0.5);
        assert_eq!(hausdorff_1d(&a, &a), 0.0);
        let c = [0.0];
        assert_eq!(hausdorff_1d(&a, &c), 2.0);
        assert_eq!(hausdorff_1d(&c, &a), 2.0);
    }

    fn small_sweep(x0s: &[f64], lo: f64, hi: f64) -> crate::sweep::BifurcationDiagram {
        let config = SweepConfig::new(
            SweepAxis::ParamP,
            MapFamily::Logistic,
            crate::sweep::linspace(lo, hi, 40),
            0.5,
            x0s.to_vec(),
        )
        .with_n_max(600)
        .with_tail_length(100);
        run_sweep(&config).unwrap()
    }

    #[test]
    fn bs_distance_identity_and_symmetry() {
        let diagram = small_sweep(&[0.5, 0.1], 1.3, 1.6);
        let a = &diagram.sets[0];
        let b = &diagram.sets[1];
        let self_profile = bs_distance(a, a).unwrap();
        assert!(self_profile.distances().iter().all(|&d| d == 0.0));
        let ab = bs_distance(a, b).unwrap();
        let ba = bs_distance(b, a).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn bs_distance_grid_mismatch() {
        let d1 = small_sweep(&[0.5], 1.3, 1.6);
        let d2 = small_sweep(&[0.5], 1.3, 1.7);
        assert!(matches!(
            bs_distance(&d1.sets[0], &d2.sets[0]),
            Err(AnalysisError::GridMismatch)
        ));
    }

    #[test]
    fn divergence_mismatch_is_flagged_infinite() {
        // x0 = 1.01 diverges below q ~ 0.4 while x0 = 0.5 does not.
        let config = SweepConfig::new(
            SweepAxis::OrderQ,
            MapFamily::Logistic,
            vec![0.2, 0.6],
            2.4,
            vec![1.01, 0.5],
        )
        .with_n_max(400)
        .with_tail_length(50);
        let diagram = run_sweep(&config).unwrap();
        let profile = bs_distance(&diagram.sets[0], &diagram.sets[1]).unwrap();
        assert!(profile.mismatch()[0]);
        assert!(profile.distances()[0].is_infinite());
        assert!(!profile.mismatch()[1]);
        assert!(profile.distances()[1].is_finite());
    }

    #[test]
    fn first_bifurcation_below_then_above() {
        // Pre-bifurcation range only: no below-then-above pattern.
        let pre = small_sweep(&[0.5], 1.30, 1.38);
        assert_eq!(first_bifurcation_point(&pre.sets[0], 0.05), None);
        // A range across the knee does bifurcate.
        let across = small_sweep(&[0.5], 1.3, 1.6);
        let p = first_bifurcation_point(&across.sets[0], 0.05).unwrap();
        assert!((1.40..=1.50).contains(&p), "knee at {p}");
    }

    #[test]
    fn tail_diameter_handles_empty() {
        assert_eq!(tail_diameter(&[]), 0.0);
        assert_eq!(tail_diameter(&[1.5]), 0.0);
        assert_eq!(tail_diameter(&[1.0, 3.5, 2.0]), 2.5);
    }
}
