//! Full-memory orbit computation for the Caputo-like discrete iteration
//!
//! ```text
//! x(n) = x(0) + sum_{i=1..n} c[n-i] * f(x(i-1)),   n = 1..n_max
//! ```
//!
//! Every step sums the entire history, so an orbit costs O(n_max^2)
//! multiply-adds; each map value is evaluated once and cached, and the
//! inner sum runs in fixed ascending-k order (most recent history first)
//! for bitwise reproducibility. No short-memory truncation is applied:
//! the long-transient and bifurcation-set phenomena under study concern
//! the exact full-memory dynamics.

use thiserror::Error;

use crate::kernel::{FractionalOrder, KernelWeights};
use crate::maps::MapSpec;
use crate::special;
use crate::summation::stable_dot_rev;

/// Default magnitude beyond which an orbit is declared divergent: far
/// outside any attractor scale seen in these maps (|x| stays below ~3)
/// yet safely below overflow.
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e10;

/// An initial value problem for the fractional iteration.
#[derive(Debug, Clone)]
pub struct OrbitProblem {
    pub q: FractionalOrder,
    pub map: MapSpec,
    pub x0: f64,
    pub n_max: usize,
    pub divergence_threshold: f64,
}

/// Invalid problem definition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("initial condition must be finite, got {x0}")]
    NonFiniteInitial { x0: f64 },
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("divergence threshold must be positive and finite, got {threshold}")]
    InvalidThreshold { threshold: f64 },
}

impl OrbitProblem {
    /// Problem with the default divergence threshold.
    pub fn new(
        q: FractionalOrder,
        map: MapSpec,
        x0: f64,
        n_max: usize,
    ) -> Result<Self, ProblemError> {
        Self::with_threshold(q, map, x0, n_max, DEFAULT_DIVERGENCE_THRESHOLD)
    }

    pub fn with_threshold(
        q: FractionalOrder,
        map: MapSpec,
        x0: f64,
        n_max: usize,
        divergence_threshold: f64,
    ) -> Result<Self, ProblemError> {
        if !x0.is_finite() {
            return Err(ProblemError::NonFiniteInitial { x0 });
        }
        if n_max == 0 {
            return Err(ProblemError::EmptyHorizon);
        }
        if !(divergence_threshold > 0.0 && divergence_threshold.is_finite()) {
            return Err(ProblemError::InvalidThreshold {
                threshold: divergence_threshold,
            });
        }
        Ok(Self {
            q,
            map,
            x0,
            n_max,
            divergence_threshold,
        })
    }
}

/// A computed trajectory. `samples[0]` is the initial condition; when the
/// orbit diverged the sequence is truncated at the offending sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    samples: Vec<f64>,
    diverged: bool,
    divergence_index: Option<usize>,
}

impl Orbit {
    pub(crate) fn from_parts(
        samples: Vec<f64>,
        diverged: bool,
        divergence_index: Option<usize>,
    ) -> Self {
        Self {
            samples,
            diverged,
            divergence_index,
        }
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn diverged(&self) -> bool {
        self.diverged
    }

    #[inline]
    pub fn divergence_index(&self) -> Option<usize> {
        self.divergence_index
    }

    /// Last `tail_length` samples, or `None` when the orbit diverged or is
    /// shorter than requested.
    pub fn tail(&self, tail_length: usize) -> Option<&[f64]> {
        if self.diverged || self.samples.len() < tail_length {
            None
        } else {
            Some(&self.samples[self.samples.len() - tail_length..])
        }
    }
}

/// Solver failures (the weights must cover the requested horizon and match
/// the problem's fractional order).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("kernel weights cover {weights_len} lags but the horizon needs {needed}")]
    WeightHorizonMismatch { weights_len: usize, needed: usize },
    #[error("kernel weights were built for q={weights_q} but the problem has q={problem_q}")]
    OrderMismatch { weights_q: f64, problem_q: f64 },
    #[error("reference solver is limited to n_max <= {limit}, got {n_max}")]
    ReferenceHorizon { limit: usize, n_max: usize },
}

fn push_checked(
    samples: &mut Vec<f64>,
    fx: &mut Vec<f64>,
    map: &MapSpec,
    x: f64,
    threshold: f64,
) -> bool {
    samples.push(x);
    if !x.is_finite() || x.abs() > threshold {
        return false;
    }
    fx.push(map.eval_raw(x));
    true
}

/// Computes the orbit of `problem` with precomputed kernel weights.
///
/// A pure function of its inputs: identical problems produce bitwise
/// identical orbits. Computation stops early, with the offending sample
/// kept, as soon as a sample's magnitude exceeds the divergence threshold
/// or turns non-finite.
pub fn solve_orbit(problem: &OrbitProblem, weights: &KernelWeights) -> Result<Orbit, SolverError> {
    if weights.len() < problem.n_max {
        return Err(SolverError::WeightHorizonMismatch {
            weights_len: weights.len(),
            needed: problem.n_max,
        });
    }
    if weights.q() != problem.q {
        return Err(SolverError::OrderMismatch {
            weights_q: weights.q().get(),
            problem_q: problem.q.get(),
        });
    }

    let threshold = problem.divergence_threshold;
    let c = weights.as_slice();
    let mut samples = Vec::with_capacity(problem.n_max + 1);
    let mut fx = Vec::with_capacity(problem.n_max);

    if !push_checked(&mut samples, &mut fx, &problem.map, problem.x0, threshold) {
        return Ok(Orbit::from_parts(samples, true, Some(0)));
    }

    for n in 1..=problem.n_max {
        let memory = stable_dot_rev(&c[..n], &fx[..n]);
        let x = problem.x0 + memory;
        if !push_checked(&mut samples, &mut fx, &problem.map, x, threshold) {
            return Ok(Orbit::from_parts(samples, true, Some(n)));
        }
    }
    Ok(Orbit::from_parts(samples, false, None))
}

/// Horizon limit for [`solve_orbit_reference`]; the oracle costs O(N^2)
/// log-gamma evaluations and is meant for desk-scale cross-checks only.
pub const REFERENCE_N_MAX: usize = 10_000;

/// Independent reference solver that re-evaluates every Gamma-ratio via
/// plain log-gammas inside the double loop, with no precomputed weights
/// and no shared kernel code. Agrees with [`solve_orbit`] to 1e-8 per
/// sample on non-divergent orbits.
pub fn solve_orbit_reference(problem: &OrbitProblem) -> Result<Orbit, SolverError> {
    if problem.n_max > REFERENCE_N_MAX {
        return Err(SolverError::ReferenceHorizon {
            limit: REFERENCE_N_MAX,
            n_max: problem.n_max,
        });
    }

    let qv = problem.q.get();
    let gamma_q = special::gamma(qv);
    let threshold = problem.divergence_threshold;
    let mut samples = Vec::with_capacity(problem.n_max + 1);
    let mut fx = Vec::with_capacity(problem.n_max);

    if !push_checked(&mut samples, &mut fx, &problem.map, problem.x0, threshold) {
        return Ok(Orbit::from_parts(samples, true, Some(0)));
    }

    for n in 1..=problem.n_max {
        // Ascending k = n - i, mirroring the production summation order.
        let mut memory = 0.0;
        for k in 0..n {
            let kf = k as f64;
            let ratio = (special::ln_gamma(kf + qv) - special::ln_gamma(kf + 1.0)).exp();
            memory += (ratio / gamma_q) * fx[n - 1 - k];
        }
        let x = problem.x0 + memory;
        if !push_checked(&mut samples, &mut fx, &problem.map, x, threshold) {
            return Ok(Orbit::from_parts(samples, true, Some(n)));
        }
    }
    Ok(Orbit::from_parts(samples, false, None))
}

/// Classic integer-order logistic map `x(n+1) = p * x(n) * (1 - x(n))` —
/// the one-step recursion, not the difference form. Used for side-by-side
/// comparisons with the fractional map.
pub fn solve_iolm(p: f64, x0: f64, n_max: usize) -> Orbit {
    solve_iolm_with_threshold(p, x0, n_max, DEFAULT_DIVERGENCE_THRESHOLD)
}

pub fn solve_iolm_with_threshold(p: f64, x0: f64, n_max: usize, threshold: f64) -> Orbit {
    let mut samples = Vec::with_capacity(n_max + 1);
    let mut x = x0;
    samples.push(x);
    if !x.is_finite() || x.abs() > threshold {
        return Orbit::from_parts(samples, true, Some(0));
    }
    for n in 1..=n_max {
        x = p * x * (1.0 - x);
        samples.push(x);
        if !x.is_finite() || x.abs() > threshold {
            return Orbit::from_parts(samples, true, Some(n));
        }
    }
    Orbit::from_parts(samples, false, None)
}
