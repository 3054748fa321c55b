//! Dataset formats shared between the library and the CLI.
//!
//! All CSV files use `,` separators, `.` decimal points, a mandatory
//! column-header row, and floats printed with `{}` — the shortest
//! representation that parses back to the identical bits — after optional
//! `#`-prefixed provenance lines. Writers take any `io::Write`, so the
//! same bytes can go to a file or to a determinism check.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::{DirectWeights, KernelWeights};
use crate::solver::Orbit;
use crate::sweep::{BifurcativeSet, TailColumn};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

fn bad(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Malformed {
        line,
        msg: msg.into(),
    }
}

/// Provenance for a single-orbit dataset.
#[derive(Debug, Clone)]
pub struct OrbitRecord<'a> {
    /// Map name: `logistic`, `puu`, a custom name, or `iolm` for the
    /// classic one-step recursion.
    pub map: &'a str,
    pub param: f64,
    /// Fractional order; absent for the classic recursion.
    pub q: Option<f64>,
    pub x0: f64,
    pub orbit: &'a Orbit,
}

/// Writes the `n,x` time-series CSV with a provenance comment line.
pub fn write_orbit_csv<W: Write>(mut w: W, rec: &OrbitRecord) -> io::Result<()> {
    write!(w, "# map={} param={}", rec.map, rec.param)?;
    if let Some(q) = rec.q {
        write!(w, " q={q}")?;
    }
    writeln!(
        w,
        " x0={} n_max={} diverged={}",
        rec.x0,
        rec.orbit.len().saturating_sub(1),
        rec.orbit.diverged()
    )?;
    writeln!(w, "n,x")?;
    for (n, x) in rec.orbit.samples().iter().enumerate() {
        writeln!(w, "{n},{x}")?;
    }
    Ok(())
}

/// An orbit dataset read back from CSV.
#[derive(Debug, Clone)]
pub struct ParsedOrbit {
    pub map: Option<String>,
    pub param: Option<f64>,
    pub q: Option<f64>,
    pub x0: Option<f64>,
    pub orbit: Orbit,
}

fn parse_meta_line(line: &str, meta: &mut BTreeMap<String, String>) {
    for field in line.trim_start_matches('#').split_whitespace() {
        if let Some((k, v)) = field.split_once('=') {
            meta.insert(k.to_string(), v.to_string());
        }
    }
}

fn meta_f64(meta: &BTreeMap<String, String>, key: &str) -> Option<f64> {
    meta.get(key).and_then(|v| v.parse().ok())
}

/// Parses an orbit CSV produced by [`write_orbit_csv`].
pub fn parse_orbit_csv<R: BufRead>(r: R) -> Result<ParsedOrbit, FormatError> {
    let mut meta = BTreeMap::new();
    let mut samples = Vec::new();
    let mut header_seen = false;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            parse_meta_line(trimmed, &mut meta);
            continue;
        }
        if !header_seen {
            if trimmed != "n,x" {
                return Err(bad(line_no, format!("expected header `n,x`, got `{trimmed}`")));
            }
            header_seen = true;
            continue;
        }
        let (n_str, x_str) = trimmed
            .split_once(',')
            .ok_or_else(|| bad(line_no, "expected `n,x` row"))?;
        let n: usize = n_str
            .parse()
            .map_err(|_| bad(line_no, format!("bad index `{n_str}`")))?;
        if n != samples.len() {
            return Err(bad(line_no, format!("non-contiguous index {n}")));
        }
        let x: f64 = x_str
            .parse()
            .map_err(|_| bad(line_no, format!("bad sample `{x_str}`")))?;
        samples.push(x);
    }
    if !header_seen {
        return Err(bad(0, "missing header row"));
    }
    if samples.is_empty() {
        return Err(bad(0, "no samples"));
    }
    let diverged = meta.get("diverged").map(String::as_str) == Some("true");
    let divergence_index = diverged.then(|| samples.len() - 1);
    Ok(ParsedOrbit {
        map: meta.get("map").cloned(),
        param: meta_f64(&meta, "param"),
        q: meta_f64(&meta, "q"),
        x0: meta_f64(&meta, "x0"),
        orbit: Orbit::from_parts(samples, diverged, divergence_index),
    })
}

/// Provenance for a bifurcation-diagram dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramRecord<'a> {
    /// `p` or `q` — the swept axis.
    pub axis_label: &'a str,
    /// Label of the fixed quantity (`q`, `p`), or empty for none.
    pub fixed_label: &'a str,
    pub fixed_value: f64,
    pub map: &'a str,
    pub n_max: usize,
    pub tail_length: usize,
    pub grid: &'a [f64],
    pub sets: &'a [BifurcativeSet],
}

/// Writes the long-format `grid_value,x0,sample,diverged` CSV. Tail rows
/// carry `diverged=0`; a diverged (grid value, x0) pair collapses to a
/// single marker row with an empty sample and `diverged=1`.
pub fn write_bifurcation_csv<W: Write>(mut w: W, rec: &DiagramRecord) -> io::Result<()> {
    write!(w, "# axis={}", rec.axis_label)?;
    if !rec.fixed_label.is_empty() {
        write!(w, " fixed_{}={}", rec.fixed_label, rec.fixed_value)?;
    }
    writeln!(
        w,
        " map={} n_max={} tail_length={}",
        rec.map, rec.n_max, rec.tail_length
    )?;
    writeln!(w, "grid_value,x0,sample,diverged")?;
    for set in rec.sets {
        for (i, column) in set.columns().iter().enumerate() {
            let g = rec.grid[i];
            match column {
                TailColumn::Tail(tail) => {
                    for x in tail {
                        writeln!(w, "{g},{},{x},0", set.x0())?;
                    }
                }
                TailColumn::Diverged { .. } => {
                    writeln!(w, "{g},{},,1", set.x0())?;
                }
            }
        }
    }
    Ok(())
}

/// A diagram dataset read back from the long CSV.
#[derive(Debug, Clone)]
pub struct ParsedDiagram {
    pub axis_label: Option<String>,
    pub map: Option<String>,
    pub grid: Arc<[f64]>,
    pub sets: Vec<BifurcativeSet>,
}

impl ParsedDiagram {
    pub fn set_for(&self, x0: f64) -> Option<&BifurcativeSet> {
        self.sets.iter().find(|s| s.x0() == x0)
    }
}

/// Parses a long-format bifurcation CSV produced by
/// [`write_bifurcation_csv`]. Grid order follows first appearance, one
/// column per (grid value, x0) pair; every set must cover the same grid.
pub fn parse_bifurcation_csv<R: BufRead>(r: R) -> Result<ParsedDiagram, FormatError> {
    let mut meta = BTreeMap::new();
    let mut header_seen = false;
    let mut grid: Vec<f64> = Vec::new();
    // x0 -> per-grid-index column being accumulated, in first-seen order.
    let mut order: Vec<f64> = Vec::new();
    let mut partial: Vec<Vec<Option<TailColumn>>> = Vec::new();

    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            parse_meta_line(trimmed, &mut meta);
            continue;
        }
        if !header_seen {
            if trimmed != "grid_value,x0,sample,diverged" {
                return Err(bad(
                    line_no,
                    format!("expected header `grid_value,x0,sample,diverged`, got `{trimmed}`"),
                ));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 4 {
            return Err(bad(line_no, format!("expected 4 fields, got {}", fields.len())));
        }
        let g: f64 = fields[0]
            .parse()
            .map_err(|_| bad(line_no, format!("bad grid value `{}`", fields[0])))?;
        let x0: f64 = fields[1]
            .parse()
            .map_err(|_| bad(line_no, format!("bad x0 `{}`", fields[1])))?;
        let diverged = match fields[3] {
            "0" => false,
            "1" => true,
            other => return Err(bad(line_no, format!("bad diverged flag `{other}`"))),
        };

        let grid_index = match grid.iter().rposition(|&v| v == g) {
            Some(i) => i,
            None => {
                if let Some(&last) = grid.last() {
                    if g < last {
                        return Err(bad(line_no, format!("grid value {g} out of order")));
                    }
                }
                grid.push(g);
                grid.len() - 1
            }
        };
        let set_index = match order.iter().position(|&v| v == x0) {
            Some(i) => i,
            None => {
                order.push(x0);
                partial.push(Vec::new());
                order.len() - 1
            }
        };
        let columns = &mut partial[set_index];
        if columns.len() < grid_index + 1 {
            columns.resize(grid_index + 1, None);
        }
        if diverged {
            if columns[grid_index].is_some() {
                return Err(bad(line_no, "diverged marker for a grid value with samples"));
            }
            columns[grid_index] = Some(TailColumn::Diverged { index: 0 });
        } else {
            let x: f64 = fields[2]
                .parse()
                .map_err(|_| bad(line_no, format!("bad sample `{}`", fields[2])))?;
            match &mut columns[grid_index] {
                Some(TailColumn::Tail(t)) => t.push(x),
                Some(TailColumn::Diverged { .. }) => {
                    return Err(bad(line_no, "samples after a diverged marker"))
                }
                slot @ None => *slot = Some(TailColumn::Tail(vec![x])),
            }
        }
    }
    if !header_seen {
        return Err(bad(0, "missing header row"));
    }
    if grid.is_empty() {
        return Err(bad(0, "no data rows"));
    }

    let shared: Arc<[f64]> = grid.into();
    let mut sets = Vec::with_capacity(order.len());
    for (x0, columns) in order.into_iter().zip(partial) {
        if columns.len() != shared.len() || columns.iter().any(Option::is_none) {
            return Err(bad(
                0,
                format!("set for x0={x0} does not cover every grid value"),
            ));
        }
        let columns: Vec<TailColumn> = columns.into_iter().map(Option::unwrap).collect();
        sets.push(BifurcativeSet::new(x0, Arc::clone(&shared), columns));
    }
    Ok(ParsedDiagram {
        axis_label: meta.get("axis").cloned(),
        map: meta.get("map").cloned(),
        grid: shared,
        sets,
    })
}

/// Writes the three-path kernel comparison table
/// `k,c_direct,c_loggamma,c_recurrence,direct_finite`.
pub fn write_kernel_check_csv<W: Write>(
    mut w: W,
    direct: &DirectWeights,
    loggamma: &KernelWeights,
    recurrence: &KernelWeights,
) -> io::Result<()> {
    writeln!(w, "# q={} n_max={}", recurrence.q(), recurrence.len())?;
    writeln!(w, "k,c_direct,c_loggamma,c_recurrence,direct_finite")?;
    for k in 0..recurrence.len() {
        writeln!(
            w,
            "{k},{},{},{},{}",
            direct.value(k),
            loggamma[k],
            recurrence[k],
            u8::from(direct.is_entry_finite(k))
        )?;
    }
    Ok(())
}

/// Plot-ready long CSV: one row per tail sample with a per-x0 color key,
/// diverged pairs omitted.
pub fn write_plot_csv<W: Write>(
    mut w: W,
    axis_label: &str,
    grid: &[f64],
    sets: &[BifurcativeSet],
) -> io::Result<()> {
    writeln!(w, "{axis_label},x0,sample,color")?;
    for (si, set) in sets.iter().enumerate() {
        let color = series_color(si);
        for (i, column) in set.columns().iter().enumerate() {
            if let TailColumn::Tail(tail) = column {
                for x in tail {
                    writeln!(w, "{},{},{x},{color}", grid[i], set.x0())?;
                }
            }
        }
    }
    Ok(())
}

/// Stable per-series color assignment mirroring the usual multi-set
/// diagram coloring (first set green, then blue, red, magenta, ...).
pub fn series_color(index: usize) -> &'static str {
    const PALETTE: [&str; 6] = ["green", "blue", "red", "magenta", "orange", "cyan"];
    PALETTE[index % PALETTE.len()]
}

/// Minimal scatter-plot description emitted next to diagram datasets;
/// rendering is left to external tooling.
#[derive(Debug, Clone, Serialize)]
pub struct PlotDescription {
    pub kind: &'static str,
    pub x_label: String,
    pub y_label: String,
    pub data_file: String,
    pub series: Vec<PlotSeries>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlotSeries {
    pub x0: f64,
    pub color: String,
    pub label: String,
}

impl PlotDescription {
    pub fn scatter(x_label: &str, data_file: &str, sets: &[BifurcativeSet]) -> Self {
        Self {
            kind: "scatter",
            x_label: x_label.to_string(),
            y_label: "x".to_string(),
            data_file: data_file.to_string(),
            series: sets
                .iter()
                .enumerate()
                .map(|(i, s)| PlotSeries {
                    x0: s.x0(),
                    color: series_color(i).to_string(),
                    label: format!("x0={}", s.x0()),
                })
                .collect(),
        }
    }
}

/// JSON view of an orbit dataset (`--format json`).
#[derive(Debug, Clone, Serialize)]
pub struct OrbitJson<'a> {
    pub map: &'a str,
    pub param: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub x0: f64,
    pub diverged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_index: Option<usize>,
    pub samples: &'a [f64],
}

impl<'a> OrbitJson<'a> {
    pub fn new(rec: &OrbitRecord<'a>) -> Self {
        Self {
            map: rec.map,
            param: rec.param,
            q: rec.q,
            x0: rec.x0,
            diverged: rec.orbit.diverged(),
            divergence_index: rec.orbit.divergence_index(),
            samples: rec.orbit.samples(),
        }
    }
}

/// JSON view of a diagram dataset (`--format json`).
#[derive(Debug, Clone, Serialize)]
pub struct DiagramJson<'a> {
    pub axis: &'a str,
    pub fixed_label: &'a str,
    pub fixed_value: f64,
    pub map: &'a str,
    pub n_max: usize,
    pub tail_length: usize,
    pub grid: &'a [f64],
    pub sets: Vec<DiagramJsonSet<'a>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagramJsonSet<'a> {
    pub x0: f64,
    pub columns: &'a [TailColumn],
}

impl<'a> DiagramJson<'a> {
    pub fn new(rec: &DiagramRecord<'a>) -> Self {
        Self {
            axis: rec.axis_label,
            fixed_label: rec.fixed_label,
            fixed_value: rec.fixed_value,
            map: rec.map,
            n_max: rec.n_max,
            tail_length: rec.tail_length,
            grid: rec.grid,
            sets: rec
                .sets
                .iter()
                .map(|s| DiagramJsonSet {
                    x0: s.x0(),
                    columns: s.columns(),
                })
                .collect(),
        }
    }
}
