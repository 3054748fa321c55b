//! Command-line surface.

use clap::{Args, Parser, Subcommand};
use fracmap_core::maps::MapFamily;

/// Simulator for Caputo-like fractional-order 1-D maps: orbits,
/// bifurcation diagrams, kernel diagnostics and orbit analysis.
#[derive(Debug, Parser)]
#[command(name = "fracmap", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one orbit and write the n,x time series.
    Orbit(OrbitArgs),
    /// Sweep a bifurcation diagram over p (fixed q) or over q (fixed p).
    Bifurcation(BifurcationArgs),
    /// Classify an orbit (or every tail of a diagram) for periodicity and
    /// transient regimes.
    Analyze(AnalyzeArgs),
    /// Per-grid-value Hausdorff distance between two bifurcative sets of
    /// one diagram file.
    #[command(name = "compare-bs")]
    CompareBs(CompareBsArgs),
    /// Dump the three kernel-weight evaluation paths with finite-flags.
    #[command(name = "kernel-check")]
    KernelCheck(KernelCheckArgs),
    /// Emit a named preset dataset (fig1..fig9).
    Repro(ReproArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = "fracmap-out")]
    pub out: String,

    /// Data file format.
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    pub format: String,

    /// Worker threads for sweeps: a count or `auto`.
    #[arg(long, default_value = "auto", value_parser = parse_threads)]
    pub threads: Threads,

    /// Assert that no randomness is involved anywhere (always true; the
    /// engine is seedless by construction).
    #[arg(long)]
    pub seedless: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Count(usize),
}

impl Threads {
    pub fn as_option(self) -> Option<usize> {
        match self {
            Threads::Auto => None,
            Threads::Count(n) => Some(n),
        }
    }
}

impl std::fmt::Display for Threads {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threads::Auto => f.write_str("auto"),
            Threads::Count(n) => write!(f, "{n}"),
        }
    }
}

fn parse_threads(s: &str) -> Result<Threads, String> {
    if s == "auto" {
        return Ok(Threads::Auto);
    }
    s.parse::<usize>()
        .ok()
        .filter(|&n| n >= 1)
        .map(Threads::Count)
        .ok_or_else(|| format!("`{s}` is not `auto` or a positive thread count"))
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Map family.
    #[arg(long, value_parser = parse_map_family)]
    pub map: MapFamily,

    /// Map parameter (p for logistic, a for Puu).
    #[arg(long)]
    pub param: f64,

    /// Fractional order in (0, 1].
    #[arg(long)]
    pub q: f64,

    /// Initial condition.
    #[arg(long)]
    pub x0: f64,

    /// Iteration horizon.
    #[arg(long = "n-max", default_value_t = 2500)]
    pub n_max: usize,

    /// Divergence threshold on |x|.
    #[arg(long, default_value_t = 1e10)]
    pub threshold: f64,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct BifurcationArgs {
    /// Map family.
    #[arg(long, value_parser = parse_map_family)]
    pub map: MapFamily,

    /// Swept axis: the map parameter or the fractional order.
    #[arg(long, value_parser = ["p", "q"])]
    pub axis: String,

    /// Axis grid as lo:hi:points (inclusive endpoints).
    #[arg(long, value_parser = parse_grid)]
    pub grid: GridSpec,

    /// Fixed fractional order (required when --axis p).
    #[arg(long)]
    pub q: Option<f64>,

    /// Fixed map parameter (required when --axis q).
    #[arg(long)]
    pub param: Option<f64>,

    /// Initial conditions, comma separated.
    #[arg(long, value_parser = parse_x0_list)]
    pub x0: X0List,

    /// Iteration horizon per grid point.
    #[arg(long = "n-max", default_value_t = 2500)]
    pub n_max: usize,

    /// Tail samples kept per grid point.
    #[arg(long, default_value_t = 200)]
    pub tail: usize,

    /// Divergence threshold on |x|.
    #[arg(long, default_value_t = 1e10)]
    pub threshold: f64,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Input CSV: an orbit (n,x) or a diagram (long format).
    #[arg(long)]
    pub input: String,

    /// Sliding window length (orbit input).
    #[arg(long, default_value_t = fracmap_core::analysis::DEFAULT_WINDOW)]
    pub window: usize,

    /// Window stride (orbit input).
    #[arg(long, default_value_t = fracmap_core::analysis::DEFAULT_STRIDE)]
    pub stride: usize,

    /// Largest period tested.
    #[arg(long = "max-period", default_value_t = fracmap_core::analysis::DEFAULT_MAX_PERIOD)]
    pub max_period: usize,

    /// Periodicity tolerance on state values.
    #[arg(long, default_value_t = fracmap_core::analysis::DEFAULT_PERIOD_TOL)]
    pub tol: f64,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CompareBsArgs {
    /// Input diagram CSV (long format).
    #[arg(long)]
    pub input: String,

    /// Initial condition of the first set (as written in the file).
    #[arg(long)]
    pub a: f64,

    /// Initial condition of the second set.
    #[arg(long)]
    pub b: f64,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct KernelCheckArgs {
    /// Fractional order in (0, 1].
    #[arg(long)]
    pub q: f64,

    /// Number of lags to tabulate.
    #[arg(long = "n-max", default_value_t = 250)]
    pub n_max: usize,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    /// Preset id: fig1..fig9.
    pub figure: String,

    /// Override the preset's iteration horizon.
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,

    /// Override the preset's grid resolution.
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,

    /// Override the preset's tail length.
    #[arg(long)]
    pub tail: Option<usize>,

    /// Override the initial condition(s) where the preset has a single
    /// series (fig1 only).
    #[arg(long, value_parser = parse_x0_list)]
    pub x0: Option<X0List>,

    #[command(flatten)]
    pub common: CommonArgs,
}

/// Inclusive lo:hi:points grid specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        fracmap_core::sweep::linspace(self.lo, self.hi, self.points)
    }
}

pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{s}` must be lo:hi:points"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("grid lower bound `{}` is not a number", parts[0]))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("grid upper bound `{}` is not a number", parts[1]))?;
    let points: usize = parts[2]
        .parse()
        .map_err(|_| format!("grid point count `{}` is not an integer", parts[2]))?;
    if points == 0 {
        return Err("grid needs at least one point".to_string());
    }
    if points > 1 && !(lo < hi) {
        return Err(format!("grid bounds must satisfy lo < hi, got {lo}:{hi}"));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err("grid bounds must be finite".to_string());
    }
    Ok(GridSpec { lo, hi, points })
}

/// Comma-separated list of initial conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct X0List(pub Vec<f64>);

pub fn parse_x0_list(s: &str) -> Result<X0List, String> {
    let mut out = Vec::new();
    for field in s.split(',') {
        let v: f64 = field
            .trim()
            .parse()
            .map_err(|_| format!("initial condition `{field}` is not a number"))?;
        if !v.is_finite() {
            return Err(format!("initial condition `{field}` is not finite"));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err("at least one initial condition is required".to_string());
    }
    Ok(X0List(out))
}

pub fn parse_map_family(s: &str) -> Result<MapFamily, String> {
    s.parse()
}
