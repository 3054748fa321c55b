//! Numerical engine for Caputo-like discrete fractional-order 1-D maps.
//!
//! The crate computes orbits of the full-memory iteration
//!
//! ```text
//! x(n) = x(0) + sum_{i=1..n} c[n-i] * f(x(i-1))
//! ```
//!
//! where the memory weights `c[k] = Gamma(k+q) / (Gamma(q) * Gamma(k+1))`
//! decay like `k^(q-1)` for a fractional order `q` in `(0, 1]`. On top of
//! the solver it provides bifurcation-diagram sweeps over the map parameter
//! or the fractional order, periodicity and transient classification of
//! orbits, and set distances between the bifurcative sets generated from
//! different initial conditions.
//!
//! Modules:
//!
//! * [`kernel`] — stable evaluation of the Gamma-ratio memory weights
//!   (multiplicative recurrence, log-gamma, and the deliberately naive
//!   direct ratio that overflows past `k ~ 170`).
//! * [`maps`] — the 1-D nonlinearities (logistic, Puu cubic, custom).
//! * [`solver`] — full-memory orbit computation with divergence detection,
//!   an O(N^2)-gamma reference solver, and the classic one-step logistic map.
//! * [`sweep`] — deterministic (optionally parallel) bifurcation sweeps.
//! * [`analysis`] — numerically-periodic-orbit detection, transient
//!   segmentation, Hausdorff distances between bifurcative sets.
//! * [`io`] — the CSV/JSON dataset formats shared with the CLI.

pub mod analysis;
pub mod io;
pub mod kernel;
pub mod maps;
pub mod solver;
pub mod special;
pub mod summation;
pub mod sweep;

pub use analysis::{BsDistanceProfile, PeriodKind, PeriodVerdict, Segment};
pub use kernel::{DirectWeights, FractionalOrder, KernelWeights};
pub use maps::{MapFamily, MapSpec};
pub use solver::{Orbit, OrbitProblem};
pub use sweep::{BifurcationDiagram, BifurcativeSet, SweepAxis, SweepConfig, TailColumn};
