//! Subcommand implementations.

mod repro;

use std::fs;

use serde::{Deserialize, Serialize};

use fracmap_core::analysis::{
    classify_samples, detect_period, segment_transients, PeriodKind, PeriodVerdict, Segment,
};
use fracmap_core::io as fio;
use fracmap_core::kernel::{
    weights_direct, weights_loggamma, weights_recurrence, FractionalOrder,
};
use fracmap_core::maps::MapFamily;
use fracmap_core::solver::{solve_orbit, OrbitProblem};
use fracmap_core::sweep::{run_sweep_threads, BifurcationDiagram, SweepAxis, SweepConfig};

use crate::args::{
    AnalyzeArgs, BifurcationArgs, Command, CommonArgs, CompareBsArgs, KernelCheckArgs, OrbitArgs,
};
use crate::outdir::OutDir;
use crate::{CliError, Outcome};

/// Resolved configuration echoed into the `config.json` sidecar; thread
/// count and output paths are execution details kept in the run manifest
/// instead, so equal configurations yield byte-identical sidecars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum RunConfig {
    Orbit {
        family: MapFamily,
        param: f64,
        q: f64,
        x0: f64,
        n_max: usize,
        divergence_threshold: f64,
        format: String,
    },
    Bifurcation {
        sweep: SweepConfig,
        format: String,
    },
    Analyze {
        input: String,
        window: usize,
        stride: usize,
        max_period: usize,
        tol: f64,
    },
    CompareBs {
        input: String,
        a: f64,
        b: f64,
    },
    KernelCheck {
        q: f64,
        n_max: usize,
        format: String,
    },
    Repro {
        figure: String,
        n_max: Option<usize>,
        grid_points: Option<usize>,
        tail: Option<usize>,
        x0: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn of(common: &CommonArgs) -> Format {
        match common.format.as_str() {
            "json" => Format::Json,
            _ => Format::Csv,
        }
    }

    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Orbit(args) => run_orbit(args),
        Command::Bifurcation(args) => run_bifurcation(args),
        Command::Analyze(args) => run_analyze(args),
        Command::CompareBs(args) => run_compare_bs(args),
        Command::KernelCheck(args) => run_kernel_check(args),
        Command::Repro(args) => repro::run(args),
    }
}

fn order_from(q: f64) -> Result<FractionalOrder, CliError> {
    FractionalOrder::new(q).map_err(CliError::config)
}

fn run_orbit(args: OrbitArgs) -> Result<Outcome, CliError> {
    let q = order_from(args.q)?;
    let map = args.map.with_param(args.param);
    let problem = OrbitProblem::with_threshold(q, map, args.x0, args.n_max, args.threshold)
        .map_err(CliError::config)?;
    let weights = weights_recurrence(q, args.n_max);
    let orbit = solve_orbit(&problem, &weights).map_err(CliError::config)?;

    let record = fio::OrbitRecord {
        map: args.map.name(),
        param: args.param,
        q: Some(args.q),
        x0: args.x0,
        orbit: &orbit,
    };
    let format = Format::of(&args.common);
    let mut out = OutDir::create(&args.common.out)?;
    match format {
        Format::Csv => out.write_file("orbit.csv", |w| fio::write_orbit_csv(w, &record))?,
        Format::Json => out.write_json("orbit.json", &fio::OrbitJson::new(&record))?,
    }
    out.finish(
        "orbit",
        &RunConfig::Orbit {
            family: args.map,
            param: args.param,
            q: args.q,
            x0: args.x0,
            n_max: args.n_max,
            divergence_threshold: args.threshold,
            format: format.ext().to_string(),
        },
    )?;
    Ok(if orbit.diverged() {
        Outcome::AllDiverged
    } else {
        Outcome::Ok
    })
}

fn run_bifurcation(args: BifurcationArgs) -> Result<Outcome, CliError> {
    let (axis, fixed_value) = match args.axis.as_str() {
        "p" => (
            SweepAxis::ParamP,
            args.q
                .ok_or_else(|| CliError::config("--axis p requires --q <order>"))?,
        ),
        "q" => (
            SweepAxis::OrderQ,
            args.param
                .ok_or_else(|| CliError::config("--axis q requires --param <value>"))?,
        ),
        other => return Err(CliError::config(format!("unknown axis `{other}`"))),
    };
    let config = SweepConfig::new(
        axis,
        args.map,
        args.grid.values(),
        fixed_value,
        args.x0.0.clone(),
    )
    .with_n_max(args.n_max)
    .with_tail_length(args.tail)
    .with_divergence_threshold(args.threshold);
    config.validate().map_err(CliError::config)?;

    let diagram =
        run_sweep_threads(&config, args.common.threads.as_option()).map_err(CliError::config)?;

    let format = Format::of(&args.common);
    let mut out = OutDir::create(&args.common.out)?;
    let base = format!("bd_{}", axis.label());
    write_diagram_outputs(&mut out, &base, &diagram, format)?;
    let all_diverged = diagram.all_diverged();
    out.finish(
        "bifurcation",
        &RunConfig::Bifurcation {
            sweep: config,
            format: format.ext().to_string(),
        },
    )?;
    Ok(if all_diverged {
        Outcome::AllDiverged
    } else {
        Outcome::Ok
    })
}

/// Writes a diagram dataset (chosen format) plus its plot-ready companion
/// files under `base`.
pub(crate) fn write_diagram_outputs(
    out: &mut OutDir,
    base: &str,
    diagram: &BifurcationDiagram,
    format: Format,
) -> Result<(), CliError> {
    let config = &diagram.config;
    let record = fio::DiagramRecord {
        axis_label: config.axis.label(),
        fixed_label: config.axis.fixed_label(),
        fixed_value: config.fixed_value,
        map: config.family.name(),
        n_max: config.n_max,
        tail_length: config.tail_length,
        grid: diagram.grid(),
        sets: &diagram.sets,
    };
    match format {
        Format::Csv => {
            out.write_file(&format!("{base}.csv"), |w| {
                fio::write_bifurcation_csv(w, &record)
            })?;
        }
        Format::Json => {
            out.write_json(&format!("{base}.json"), &fio::DiagramJson::new(&record))?;
        }
    }
    let plot_csv = format!("{base}_plot.csv");
    out.write_file(&plot_csv, |w| {
        fio::write_plot_csv(w, config.axis.label(), diagram.grid(), &diagram.sets)
    })?;
    out.write_json(
        &format!("{base}_plot.json"),
        &fio::PlotDescription::scatter(config.axis.label(), &plot_csv, &diagram.sets),
    )?;
    Ok(())
}

#[derive(Serialize)]
struct OrbitAnalysis<'a> {
    input: &'a str,
    window: usize,
    stride: usize,
    max_period: usize,
    tol: f64,
    verdict: PeriodVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    segments: Option<Vec<Segment>>,
}

#[derive(Serialize)]
struct DiagramAnalysis<'a> {
    input: &'a str,
    max_period: usize,
    tol: f64,
    columns: Vec<ColumnVerdict>,
}

#[derive(Serialize)]
struct ColumnVerdict {
    x0: f64,
    grid_value: f64,
    #[serde(flatten)]
    kind: PeriodKind,
}

fn run_analyze(args: AnalyzeArgs) -> Result<Outcome, CliError> {
    let path = std::path::Path::new(&args.input);
    let text = fs::read_to_string(path).map_err(CliError::io_at(path))?;
    let header = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .unwrap_or("");

    let mut out = OutDir::create(&args.common.out)?;
    match header.trim() {
        "n,x" => {
            let parsed = fio::parse_orbit_csv(text.as_bytes()).map_err(CliError::config)?;
            let window = args.window.min(parsed.orbit.len().saturating_sub(1));
            let verdict = detect_period(&parsed.orbit, window, args.max_period, args.tol)
                .map_err(CliError::config)?;
            let segments = if parsed.orbit.diverged() {
                None
            } else {
                Some(
                    segment_transients(
                        &parsed.orbit,
                        window,
                        args.stride,
                        args.max_period,
                        args.tol,
                    )
                    .map_err(CliError::config)?,
                )
            };
            out.write_json(
                "analysis.json",
                &OrbitAnalysis {
                    input: &args.input,
                    window,
                    stride: args.stride,
                    max_period: args.max_period,
                    tol: args.tol,
                    verdict,
                    segments,
                },
            )?;
        }
        "grid_value,x0,sample,diverged" => {
            let parsed = fio::parse_bifurcation_csv(text.as_bytes()).map_err(CliError::config)?;
            let mut columns = Vec::new();
            for set in &parsed.sets {
                for (i, column) in set.columns().iter().enumerate() {
                    let kind = match column.tail() {
                        Some(tail) => classify_samples(tail, args.max_period, args.tol),
                        None => PeriodKind::Diverged,
                    };
                    columns.push(ColumnVerdict {
                        x0: set.x0(),
                        grid_value: parsed.grid[i],
                        kind,
                    });
                }
            }
            out.write_json(
                "analysis.json",
                &DiagramAnalysis {
                    input: &args.input,
                    max_period: args.max_period,
                    tol: args.tol,
                    columns,
                },
            )?;
        }
        other => {
            return Err(CliError::config(format!(
                "unrecognized input schema (header `{other}`); expected an orbit (`n,x`) or \
                 diagram (`grid_value,x0,sample,diverged`) CSV"
            )))
        }
    }
    out.finish(
        "analyze",
        &RunConfig::Analyze {
            input: args.input.clone(),
            window: args.window,
            stride: args.stride,
            max_period: args.max_period,
            tol: args.tol,
        },
    )?;
    Ok(Outcome::Ok)
}

fn run_compare_bs(args: CompareBsArgs) -> Result<Outcome, CliError> {
    let path = std::path::Path::new(&args.input);
    let text = fs::read_to_string(path).map_err(CliError::io_at(path))?;
    let parsed = fio::parse_bifurcation_csv(text.as_bytes()).map_err(CliError::config)?;
    let pick = |x0: f64| {
        parsed.set_for(x0).ok_or_else(|| {
            let known: Vec<String> = parsed.sets.iter().map(|s| s.x0().to_string()).collect();
            CliError::config(format!(
                "no bifurcative set for x0={x0} in {}; file has x0 in {{{}}}",
                args.input,
                known.join(", ")
            ))
        })
    };
    let a = pick(args.a)?;
    let b = pick(args.b)?;
    let profile = fracmap_core::analysis::bs_distance(a, b).map_err(CliError::config)?;

    let mut out = OutDir::create(&args.common.out)?;
    out.write_file("bs_distance.csv", |w| {
        use std::io::Write;
        writeln!(w, "# x0_a={} x0_b={}", args.a, args.b)?;
        writeln!(w, "grid_value,distance,mismatch")?;
        for (i, g) in parsed.grid.iter().enumerate() {
            writeln!(
                w,
                "{g},{},{}",
                profile.distances()[i],
                u8::from(profile.mismatch()[i])
            )?;
        }
        Ok(())
    })?;
    out.finish(
        "compare-bs",
        &RunConfig::CompareBs {
            input: args.input.clone(),
            a: args.a,
            b: args.b,
        },
    )?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct KernelCheckJson {
    q: f64,
    rows: Vec<KernelRow>,
}

#[derive(Serialize)]
struct KernelRow {
    k: usize,
    direct: f64,
    log_gamma: f64,
    recurrence: f64,
    direct_finite: bool,
}

fn run_kernel_check(args: KernelCheckArgs) -> Result<Outcome, CliError> {
    let q = order_from(args.q)?;
    if args.n_max == 0 {
        return Err(CliError::config("--n-max must be at least 1"));
    }
    let direct = weights_direct(q, args.n_max);
    let loggamma = weights_loggamma(q, args.n_max);
    let recurrence = weights_recurrence(q, args.n_max);

    let format = Format::of(&args.common);
    let mut out = OutDir::create(&args.common.out)?;
    match format {
        Format::Csv => out.write_file("kernel_check.csv", |w| {
            fio::write_kernel_check_csv(w, &direct, &loggamma, &recurrence)
        })?,
        Format::Json => {
            let rows = (0..recurrence.len())
                .map(|k| KernelRow {
                    k,
                    direct: direct.value(k),
                    log_gamma: loggamma[k],
                    recurrence: recurrence[k],
                    direct_finite: direct.is_entry_finite(k),
                })
                .collect();
            out.write_json("kernel_check.json", &KernelCheckJson { q: args.q, rows })?;
        }
    }
    out.finish(
        "kernel-check",
        &RunConfig::KernelCheck {
            q: args.q,
            n_max: args.n_max,
            format: format.ext().to_string(),
        },
    )?;
    Ok(Outcome::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config_round_trips_through_json() {
        let configs = vec![
            RunConfig::Orbit {
                family: MapFamily::Logistic,
                param: 2.4,
                q: 0.3,
                x0: 0.5,
                n_max: 2500,
                divergence_threshold: 1e10,
                format: "csv".into(),
            },
            RunConfig::Bifurcation {
                sweep: SweepConfig::new(
                    SweepAxis::ParamP,
                    MapFamily::Puu,
                    vec![1.3, 1.9, 2.5],
                    0.5,
                    vec![1.01, 0.5, 0.1],
                ),
                format: "json".into(),
            },
            RunConfig::Analyze {
                input: "orbit.csv".into(),
                window: 400,
                stride: 100,
                max_period: 64,
                tol: 1e-4,
            },
            RunConfig::CompareBs {
                input: "bd_p.csv".into(),
                a: 0.5,
                b: 0.1,
            },
            RunConfig::KernelCheck {
                q: 0.5,
                n_max: 250,
                format: "csv".into(),
            },
            RunConfig::Repro {
                figure: "fig6".into(),
                n_max: Some(5000),
                grid_points: None,
                tail: None,
                x0: None,
            },
        ];
        for config in configs {
            let text = serde_json::to_string(&config).unwrap();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, config);
        }
    }
}
