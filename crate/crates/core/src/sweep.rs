//! Bifurcation-diagram sweeps over the map parameter or the fractional
//! order.
//!
//! A sweep runs one orbit per (grid value, initial condition) pair and
//! stores the orbit tail — the bifurcative set of that initial condition.
//! Tasks are pure and written into index-addressed slots, so execution
//! order (and thread count) never changes the result; kernel weights are
//! built once per distinct order before any task launches.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{weights_recurrence, FractionalOrder, KernelWeights};
use crate::maps::MapFamily;
use crate::solver::{
    solve_iolm_with_threshold, solve_orbit, Orbit, OrbitProblem, DEFAULT_DIVERGENCE_THRESHOLD,
};

/// Which quantity the grid runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Grid over the map parameter; `fixed_value` is the order `q`.
    #[serde(rename = "p")]
    ParamP,
    /// Grid over the fractional order; `fixed_value` is the parameter.
    #[serde(rename = "q")]
    OrderQ,
}

impl SweepAxis {
    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::ParamP => "p",
            SweepAxis::OrderQ => "q",
        }
    }

    /// Label of the non-swept quantity.
    pub fn fixed_label(self) -> &'static str {
        match self {
            SweepAxis::ParamP => "q",
            SweepAxis::OrderQ => "p",
        }
    }
}

/// Default iteration horizon: long enough to outlive the multi-thousand
/// step transients of low-order maps at tolerable cost.
pub const DEFAULT_N_MAX: usize = 2500;
/// Default number of tail samples kept per grid value; resolves cycles up
/// to length 200 while keeping datasets small.
pub const DEFAULT_TAIL_LENGTH: usize = 200;

/// Full description of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub family: MapFamily,
    /// Strictly increasing axis values.
    pub grid: Vec<f64>,
    /// The non-swept one of (p, q).
    pub fixed_value: f64,
    pub initial_conditions: Vec<f64>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_tail_length")]
    pub tail_length: usize,
    #[serde(default = "default_threshold")]
    pub divergence_threshold: f64,
}

fn default_n_max() -> usize {
    DEFAULT_N_MAX
}

fn default_tail_length() -> usize {
    DEFAULT_TAIL_LENGTH
}

fn default_threshold() -> f64 {
    DEFAULT_DIVERGENCE_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepConfigError {
    #[error("grid must not be empty")]
    EmptyGrid,
    #[error("grid must be finite and strictly increasing (violation at index {index})")]
    GridNotIncreasing { index: usize },
    #[error("grid value {value} at index {index} is not a valid fractional order")]
    GridOrderOutOfRange { index: usize, value: f64 },
    #[error("fixed value {value} is not a valid fractional order")]
    FixedOrderOutOfRange { value: f64 },
    #[error("at least one initial condition is required")]
    NoInitialConditions,
    #[error("initial condition {value} at index {index} is not finite")]
    NonFiniteInitial { index: usize, value: f64 },
    #[error("tail_length ({tail_length}) must be >= 1 and < n_max ({n_max})")]
    BadTail { tail_length: usize, n_max: usize },
    #[error("divergence threshold must be positive and finite, got {threshold}")]
    BadThreshold { threshold: f64 },
}

impl SweepConfig {
    /// Config with the default horizon, tail length and threshold.
    pub fn new(
        axis: SweepAxis,
        family: MapFamily,
        grid: Vec<f64>,
        fixed_value: f64,
        initial_conditions: Vec<f64>,
    ) -> Self {
        Self {
            axis,
            family,
            grid,
            fixed_value,
            initial_conditions,
            n_max: DEFAULT_N_MAX,
            tail_length: DEFAULT_TAIL_LENGTH,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_tail_length(mut self, tail_length: usize) -> Self {
        self.tail_length = tail_length;
        self
    }

    pub fn with_divergence_threshold(mut self, threshold: f64) -> Self {
        self.divergence_threshold = threshold;
        self
    }

    pub fn validate(&self) -> Result<(), SweepConfigError> {
        if self.grid.is_empty() {
            return Err(SweepConfigError::EmptyGrid);
        }
        if !self.grid[0].is_finite() {
            return Err(SweepConfigError::GridNotIncreasing { index: 0 });
        }
        for (index, pair) in self.grid.windows(2).enumerate() {
            if !pair[1].is_finite() || !(pair[0] < pair[1]) {
                return Err(SweepConfigError::GridNotIncreasing { index: index + 1 });
            }
        }
        match self.axis {
            SweepAxis::OrderQ => {
                for (index, &value) in self.grid.iter().enumerate() {
                    if FractionalOrder::new(value).is_err() {
                        return Err(SweepConfigError::GridOrderOutOfRange { index, value });
                    }
                }
            }
            SweepAxis::ParamP => {
                if FractionalOrder::new(self.fixed_value).is_err() {
                    return Err(SweepConfigError::FixedOrderOutOfRange {
                        value: self.fixed_value,
                    });
                }
            }
        }
        if self.initial_conditions.is_empty() {
            return Err(SweepConfigError::NoInitialConditions);
        }
        for (index, &value) in self.initial_conditions.iter().enumerate() {
            if !value.is_finite() {
                return Err(SweepConfigError::NonFiniteInitial { index, value });
            }
        }
        if self.tail_length == 0 || self.tail_length >= self.n_max {
            return Err(SweepConfigError::BadTail {
                tail_length: self.tail_length,
                n_max: self.n_max,
            });
        }
        if !(self.divergence_threshold > 0.0 && self.divergence_threshold.is_finite()) {
            return Err(SweepConfigError::BadThreshold {
                threshold: self.divergence_threshold,
            });
        }
        Ok(())
    }

    /// The fractional order at a grid index.
    fn order_at(&self, grid_index: usize) -> FractionalOrder {
        let value = match self.axis {
            SweepAxis::ParamP => self.fixed_value,
            SweepAxis::OrderQ => self.grid[grid_index],
        };
        FractionalOrder::new(value).expect("validated order")
    }

    /// The map parameter at a grid index.
    fn param_at(&self, grid_index: usize) -> f64 {
        match self.axis {
            SweepAxis::ParamP => self.grid[grid_index],
            SweepAxis::OrderQ => self.fixed_value,
        }
    }
}

/// Inclusive, evenly spaced grid with `points` entries.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 1, "linspace needs at least one point");
    if points == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| if i == points - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

/// Tail data for one grid value of one bifurcative set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TailColumn {
    /// The last `tail_length` samples of a completed orbit.
    Tail(Vec<f64>),
    /// The orbit tripped the divergence threshold at `index`.
    Diverged { index: usize },
}

impl TailColumn {
    pub fn is_diverged(&self) -> bool {
        matches!(self, TailColumn::Diverged { .. })
    }

    pub fn tail(&self) -> Option<&[f64]> {
        match self {
            TailColumn::Tail(t) => Some(t),
            TailColumn::Diverged { .. } => None,
        }
    }
}

/// Per-grid-value tail samples generated from a single initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcativeSet {
    x0: f64,
    grid: Arc<[f64]>,
    columns: Vec<TailColumn>,
}

impl BifurcativeSet {
    pub fn new(x0: f64, grid: Arc<[f64]>, columns: Vec<TailColumn>) -> Self {
        assert_eq!(grid.len(), columns.len(), "one column per grid value");
        Self { x0, grid, columns }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn shared_grid(&self) -> Arc<[f64]> {
        Arc::clone(&self.grid)
    }

    pub fn columns(&self) -> &[TailColumn] {
        &self.columns
    }

    pub fn column(&self, grid_index: usize) -> &TailColumn {
        &self.columns[grid_index]
    }

    /// True when every grid value diverged.
    pub fn all_diverged(&self) -> bool {
        self.columns.iter().all(TailColumn::is_diverged)
    }
}

/// A keyed collection of bifurcative sets over one shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationDiagram {
    pub config: SweepConfig,
    pub sets: Vec<BifurcativeSet>,
}

impl BifurcationDiagram {
    pub fn grid(&self) -> &[f64] {
        &self.config.grid
    }

    /// The set generated from `x0`, matched exactly.
    pub fn set_for(&self, x0: f64) -> Option<&BifurcativeSet> {
        self.sets.iter().find(|s| s.x0 == x0)
    }

    pub fn all_diverged(&self) -> bool {
        self.sets.iter().all(BifurcativeSet::all_diverged)
    }
}

/// Kernel-weight tables for a sweep: one shared table when the order is
/// fixed, one per grid value when the order is swept.
pub enum WeightsCache {
    Shared(KernelWeights),
    PerPoint(Vec<KernelWeights>),
}

impl WeightsCache {
    pub fn table_count(&self) -> usize {
        match self {
            WeightsCache::Shared(_) => 1,
            WeightsCache::PerPoint(tables) => tables.len(),
        }
    }

    pub fn for_grid_index(&self, grid_index: usize) -> &KernelWeights {
        match self {
            WeightsCache::Shared(w) => w,
            WeightsCache::PerPoint(tables) => &tables[grid_index],
        }
    }
}

/// Builds the weight tables a sweep needs, before any orbit runs.
pub fn weights_cache(config: &SweepConfig) -> Result<WeightsCache, SweepConfigError> {
    config.validate()?;
    Ok(match config.axis {
        SweepAxis::ParamP => {
            let q = FractionalOrder::new(config.fixed_value).expect("validated order");
            WeightsCache::Shared(weights_recurrence(q, config.n_max))
        }
        SweepAxis::OrderQ => {
            let tables = config
                .grid
                .iter()
                .map(|&v| {
                    let q = FractionalOrder::new(v).expect("validated order");
                    weights_recurrence(q, config.n_max)
                })
                .collect();
            WeightsCache::PerPoint(tables)
        }
    })
}

fn column_from_orbit(orbit: &Orbit, tail_length: usize) -> TailColumn {
    match orbit.tail(tail_length) {
        Some(tail) => TailColumn::Tail(tail.to_vec()),
        None => TailColumn::Diverged {
            index: orbit.divergence_index().unwrap_or(0),
        },
    }
}

/// Runs the sweep on the current rayon pool. Output is bitwise identical
/// for any thread count: every (grid value, initial condition) orbit is an
/// independent pure task written into its own slot.
pub fn run_sweep(config: &SweepConfig) -> Result<BifurcationDiagram, SweepConfigError> {
    let cache = weights_cache(config)?;
    let grid: Arc<[f64]> = config.grid.clone().into();
    let grid_len = grid.len();
    let n_tasks = grid_len * config.initial_conditions.len();

    let columns: Vec<TailColumn> = (0..n_tasks)
        .into_par_iter()
        .map(|task| {
            let x0_index = task / grid_len;
            let grid_index = task % grid_len;
            let problem = OrbitProblem::with_threshold(
                config.order_at(grid_index),
                config.family.with_param(config.param_at(grid_index)),
                config.initial_conditions[x0_index],
                config.n_max,
                config.divergence_threshold,
            )
            .expect("validated problem");
            let orbit =
                solve_orbit(&problem, cache.for_grid_index(grid_index)).expect("matching weights");
            column_from_orbit(&orbit, config.tail_length)
        })
        .collect();

    let mut columns = columns.into_iter();
    let sets = config
        .initial_conditions
        .iter()
        .map(|&x0| {
            let cols: Vec<TailColumn> = columns.by_ref().take(grid_len).collect();
            BifurcativeSet::new(x0, Arc::clone(&grid), cols)
        })
        .collect();

    Ok(BifurcationDiagram {
        config: config.clone(),
        sets,
    })
}

/// Runs the sweep on a dedicated pool of `threads` workers (`None` uses
/// the global default pool).
pub fn run_sweep_threads(
    config: &SweepConfig,
    threads: Option<usize>,
) -> Result<BifurcationDiagram, SweepConfigError> {
    match threads {
        None => run_sweep(config),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .expect("thread pool");
            pool.install(|| run_sweep(config))
        }
    }
}

/// Sweep of the classic one-step logistic map over a parameter grid, for
/// side-by-side comparisons with the fractional diagrams. Same tail,
/// divergence and determinism contract as [`run_sweep`].
pub fn run_iolm_sweep(
    grid: &[f64],
    initial_conditions: &[f64],
    n_max: usize,
    tail_length: usize,
) -> Vec<BifurcativeSet> {
    let shared: Arc<[f64]> = grid.to_vec().into();
    initial_conditions
        .iter()
        .map(|&x0| {
            let columns: Vec<TailColumn> = grid
                .par_iter()
                .map(|&p| {
                    let orbit =
                        solve_iolm_with_threshold(p, x0, n_max, DEFAULT_DIVERGENCE_THRESHOLD);
                    column_from_orbit(&orbit, tail_length)
                })
                .collect();
            BifurcativeSet::new(x0, Arc::clone(&shared), columns)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> SweepConfig {
        SweepConfig::new(
            SweepAxis::ParamP,
            MapFamily::Logistic,
            linspace(1.3, 2.5, 25),
            0.5,
            vec![0.5, 0.1],
        )
        .with_n_max(400)
        .with_tail_length(80)
    }

    #[test]
    fn validation_catches_bad_configs() {
        let mut c = base_config();
        c.grid.clear();
        assert_eq!(c.validate(), Err(SweepConfigError::EmptyGrid));

        let mut c = base_config();
        c.grid = vec![1.0, 1.0];
        assert!(matches!(
            c.validate(),
            Err(SweepConfigError::GridNotIncreasing { index: 1 })
        ));

        let mut c = base_config();
        c.axis = SweepAxis::OrderQ;
        c.grid = vec![0.5, 1.5];
        assert!(matches!(
            c.validate(),
            Err(SweepConfigError::GridOrderOutOfRange { index: 1, .. })
        ));

        let mut c = base_config();
        c.fixed_value = 0.0;
        assert!(matches!(
            c.validate(),
            Err(SweepConfigError::FixedOrderOutOfRange { .. })
        ));

        let mut c = base_config();
        c.initial_conditions.clear();
        assert_eq!(c.validate(), Err(SweepConfigError::NoInitialConditions));

        let mut c = base_config();
        c.tail_length = 400;
        assert!(matches!(c.validate(), Err(SweepConfigError::BadTail { .. })));
    }

    #[test]
    fn linspace_endpoints_exact() {
        let g = linspace(1.3, 2.5, 600);
        assert_eq!(g.len(), 600);
        assert_eq!(g[0], 1.3);
        assert_eq!(g[599], 2.5);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(linspace(0.7, 0.9, 1), vec![0.7]);
    }

    #[test]
    fn cache_is_shared_on_param_axis() {
        let cache = weights_cache(&base_config()).unwrap();
        assert_eq!(cache.table_count(), 1);
        assert_eq!(cache.for_grid_index(0).q().get(), 0.5);
        assert_eq!(cache.for_grid_index(17).q().get(), 0.5);
    }

    #[test]
    fn cache_is_per_point_on_order_axis() {
        let mut c = base_config();
        c.axis = SweepAxis::OrderQ;
        c.grid = linspace(0.1, 1.0, 10);
        c.fixed_value = 2.4;
        let cache = weights_cache(&c).unwrap();
        assert_eq!(cache.table_count(), 10);
        assert_eq!(cache.for_grid_index(9).q().get(), 1.0);
        // q = 1 table is all ones.
        assert!(cache
            .for_grid_index(9)
            .as_slice()
            .iter()
            .all(|&w| w == 1.0));
    }

    #[test]
    fn degenerate_single_point_sweep_equals_orbit_tail() {
        let config = SweepConfig::new(
            SweepAxis::ParamP,
            MapFamily::Logistic,
            vec![1.8],
            0.5,
            vec![0.1],
        )
        .with_n_max(400)
        .with_tail_length(80);
        let diagram = run_sweep(&config).unwrap();
        assert_eq!(diagram.sets.len(), 1);
        let col = diagram.sets[0].column(0);

        let q = FractionalOrder::new(0.5).unwrap();
        let problem =
            OrbitProblem::new(q, crate::maps::MapSpec::Logistic { p: 1.8 }, 0.1, 400).unwrap();
        let orbit = solve_orbit(&problem, &weights_recurrence(q, 400)).unwrap();
        assert_eq!(col.tail().unwrap(), orbit.tail(80).unwrap());
    }

    #[test]
    fn diverged_columns_are_markers() {
        let config = SweepConfig::new(
            SweepAxis::OrderQ,
            MapFamily::Logistic,
            vec![0.2, 0.3, 0.6, 0.9],
            2.4,
            vec![1.01],
        )
        .with_n_max(300)
        .with_tail_length(60);
        let diagram = run_sweep(&config).unwrap();
        let set = &diagram.sets[0];
        assert!(set.column(0).is_diverged());
        assert!(set.column(1).is_diverged());
        assert!(!set.column(2).is_diverged());
        assert!(!set.column(3).is_diverged());
        assert!(!set.all_diverged());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let config = base_config();
        let one = run_sweep_threads(&config, Some(1)).unwrap();
        let four = run_sweep_threads(&config, Some(4)).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn iolm_sweep_produces_tails() {
        let grid = linspace(2.8, 4.0, 10);
        let sets = run_iolm_sweep(&grid, &[0.5, 0.9, 0.1], 500, 100);
        assert_eq!(sets.len(), 3);
        for set in &sets {
            assert_eq!(set.columns().len(), 10);
            assert!(set.columns().iter().all(|c| !c.is_diverged()));
        }
    }
}
