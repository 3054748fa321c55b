//! Named preset datasets, one per published figure.
//!
//! Every preset writes into `<out>/<figure>/` and honors `--n-max`,
//! `--grid-points`, `--tail` and `--threads` overrides where they make
//! sense. Grids over the fractional order start at 0.005 (the admissible
//! range is the half-open (0, 1]).

use std::io::Write;

use serde::Serialize;

use fracmap_core::analysis::{detect_period, segment_transients, Segment};
use fracmap_core::io as fio;
use fracmap_core::kernel::{weights_recurrence, FractionalOrder};
use fracmap_core::maps::MapFamily;
use fracmap_core::solver::{solve_iolm, solve_orbit, Orbit, OrbitProblem};
use fracmap_core::special;
use fracmap_core::sweep::{
    linspace, run_iolm_sweep, run_sweep_threads, BifurcationDiagram, BifurcativeSet, SweepAxis,
    SweepConfig,
};

use super::{write_diagram_outputs, Format, RunConfig};
use crate::args::ReproArgs;
use crate::outdir::OutDir;
use crate::{CliError, Outcome};

const Q_GRID_LO: f64 = 0.005;

struct Preset<'a> {
    args: &'a ReproArgs,
    out: OutDir,
    format: Format,
    threads: Option<usize>,
}

pub fn run(args: ReproArgs) -> Result<Outcome, CliError> {
    let out = OutDir::create(&args.common.out)?;
    let mut preset = Preset {
        format: Format::of(&args.common),
        threads: args.common.threads.as_option(),
        args: &args,
        out,
    };
    match args.figure.as_str() {
        "fig1" => preset.fig1()?,
        "fig2" => preset.fig2()?,
        "fig3" => preset.fig3()?,
        "fig4" => preset.fig4()?,
        "fig5" => preset.fig5()?,
        "fig6" => preset.fig6_fig7(2500, "fig6")?,
        "fig7" => preset.fig6_fig7(7500, "fig7")?,
        "fig8" => preset.fig8()?,
        "fig9" => preset.fig9()?,
        other => {
            return Err(CliError::config(format!(
                "unknown figure id `{other}` (expected fig1..fig9)"
            )))
        }
    }
    preset.out.finish(
        "repro",
        &RunConfig::Repro {
            figure: args.figure.clone(),
            n_max: args.n_max,
            grid_points: args.grid_points,
            tail: args.tail,
            x0: args.x0.as_ref().map(|l| l.0.clone()),
        },
    )?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct SegmentsReport {
    x0: f64,
    window: usize,
    stride: usize,
    max_period: usize,
    tol: f64,
    segments: Vec<Segment>,
}

impl Preset<'_> {
    fn n_max(&self, default: usize) -> usize {
        self.args.n_max.unwrap_or(default)
    }

    fn grid_points(&self, default: usize) -> usize {
        self.args.grid_points.unwrap_or(default)
    }

    fn tail(&self, default: usize) -> usize {
        self.args.tail.unwrap_or(default)
    }

    fn write_orbit(&mut self, name: &str, rec: &fio::OrbitRecord) -> Result<(), CliError> {
        match self.format {
            Format::Csv => self
                .out
                .write_file(&format!("{name}.csv"), |w| fio::write_orbit_csv(w, rec)),
            Format::Json => self
                .out
                .write_json(&format!("{name}.json"), &fio::OrbitJson::new(rec)),
        }
    }

    fn sweep(&self, config: &SweepConfig) -> Result<BifurcationDiagram, CliError> {
        run_sweep_threads(config, self.threads).map_err(CliError::config)
    }

    fn write_diagram(
        &mut self,
        base: &str,
        diagram: &BifurcationDiagram,
    ) -> Result<(), CliError> {
        write_diagram_outputs(&mut self.out, base, diagram, self.format)
    }

    /// One long CSV per bifurcative set, as `<dir>/bs_<axis>_x0_<v>.csv`.
    fn write_per_set(
        &mut self,
        dir: &str,
        diagram: &BifurcationDiagram,
    ) -> Result<(), CliError> {
        let config = &diagram.config;
        for set in &diagram.sets {
            let single = std::slice::from_ref(set);
            let record = fio::DiagramRecord {
                axis_label: config.axis.label(),
                fixed_label: config.axis.fixed_label(),
                fixed_value: config.fixed_value,
                map: config.family.name(),
                n_max: config.n_max,
                tail_length: config.tail_length,
                grid: diagram.grid(),
                sets: single,
            };
            let name = format!("{dir}/bs_{}_x0_{}.csv", config.axis.label(), set.x0());
            self.out
                .write_file(&name, |w| fio::write_bifurcation_csv(w, &record))?;
        }
        Ok(())
    }

    /// Time series at q=0.3, p=2.4 plus transient segmentation. Two
    /// initial conditions by default: 0.5 and 0.02 — the latter is the
    /// one whose series shows the chaotic / periodic-like / chaotic
    /// transient pattern (the structure depends on the initial condition).
    fn fig1(&mut self) -> Result<(), CliError> {
        let n_max = self.n_max(2500);
        let x0s = self
            .args
            .x0
            .as_ref()
            .map(|l| l.0.clone())
            .unwrap_or_else(|| vec![0.5, 0.02]);
        let q = FractionalOrder::new(0.3).expect("0.3 is a valid order");
        let weights = weights_recurrence(q, n_max);
        for &x0 in &x0s {
            let problem =
                OrbitProblem::new(q, MapFamily::Logistic.with_param(2.4), x0, n_max)
                    .map_err(CliError::config)?;
            let orbit = solve_orbit(&problem, &weights).map_err(CliError::config)?;
            let rec = fio::OrbitRecord {
                map: "logistic",
                param: 2.4,
                q: Some(0.3),
                x0,
                orbit: &orbit,
            };
            self.write_orbit(&format!("fig1/orbit_x0_{x0}"), &rec)?;
            if !orbit.diverged() {
                // Window of 200 resolves the ~700-sample periodic-like
                // episode; 400 would swallow its boundaries.
                let (window, stride, max_period, tol) = (200, 50, 64, 1e-3);
                let segments = segment_transients(&orbit, window, stride, max_period, tol)
                    .map_err(CliError::config)?;
                self.out.write_json(
                    &format!("fig1/segments_x0_{x0}.json"),
                    &SegmentsReport {
                        x0,
                        window,
                        stride,
                        max_period,
                        tol,
                        segments,
                    },
                )?;
            }
        }
        Ok(())
    }

    /// The constant-map stress sums: direct gamma ratios against the
    /// log-gamma identity, over n = 1..=250 at q = 0.5. The direct column
    /// degrades to 0/NaN contributions once the gammas overflow.
    fn fig2(&mut self) -> Result<(), CliError> {
        let n_max = self.n_max(250);
        let q = 0.5;
        self.out.write_file("fig2/kernel_sums.csv", |w| {
            writeln!(w, "# q={q} f=1 (constant)")?;
            writeln!(w, "n,sum_direct,sum_loggamma")?;
            let mut direct = 0.0f64;
            let mut stable = 0.0f64;
            for n in 1..=n_max {
                let k = (n - 1) as f64;
                direct += special::gamma(k + q) / special::gamma(k + 1.0);
                stable += (special::ln_gamma(k + q) - special::ln_gamma(k + 1.0)).exp();
                writeln!(w, "{n},{direct},{stable}")?;
            }
            Ok(())
        })
    }

    /// Integer-order 2-cycle next to the fractional 2-NPO that never
    /// becomes exactly periodic.
    fn fig3(&mut self) -> Result<(), CliError> {
        let n_max = self.n_max(3500);
        let iolm = solve_iolm(3.2, 0.1, n_max);
        self.write_orbit(
            "fig3/orbit_iolm_p3.2",
            &fio::OrbitRecord {
                map: "iolm",
                param: 3.2,
                q: None,
                x0: 0.1,
                orbit: &iolm,
            },
        )?;

        let q = FractionalOrder::new(0.25).expect("0.25 is a valid order");
        let problem = OrbitProblem::new(q, MapFamily::Logistic.with_param(1.8), 0.1, n_max)
            .map_err(CliError::config)?;
        let folm = solve_orbit(&problem, &weights_recurrence(q, n_max)).map_err(CliError::config)?;
        self.write_orbit(
            "fig3/orbit_folm_q0.25_p1.8",
            &fio::OrbitRecord {
                map: "logistic",
                param: 1.8,
                q: Some(0.25),
                x0: 0.1,
                orbit: &folm,
            },
        )?;

        #[derive(Serialize)]
        struct Verdicts {
            window: usize,
            max_period: usize,
            tol: f64,
            iolm: fracmap_core::analysis::PeriodVerdict,
            folm: fracmap_core::analysis::PeriodVerdict,
        }
        let (window, max_period, tol) = (500.min(n_max / 2), 64, 1e-4);
        let verdict = |orbit: &Orbit| {
            detect_period(orbit, window, max_period, tol).map_err(CliError::config)
        };
        let report = Verdicts {
            window,
            max_period,
            tol,
            iolm: verdict(&iolm)?,
            folm: verdict(&folm)?,
        };
        self.out.write_json("fig3/verdicts.json", &report)
    }

    /// Single-initial-condition diagrams over p for q in {0.1, 0.5, 1};
    /// the admissible parameter interval widens to [-3, 3] at q = 1.
    fn fig4(&mut self) -> Result<(), CliError> {
        let n_max = self.n_max(2500);
        let points = self.grid_points(600);
        let tail = self.tail(200);
        for (q, lo, hi) in [(0.1, -2.5, 2.5), (0.5, -2.5, 2.5), (1.0, -3.0, 3.0)] {
            let config = SweepConfig::new(
                SweepAxis::ParamP,
                MapFamily::Logistic,
                linspace(lo, hi, points),
                q,
                vec![0.5],
            )
            .with_n_max(n_max)
            .with_tail_length(tail);
            config.validate().map_err(CliError::config)?;
            let diagram = self.sweep(&config)?;
            self.write_diagram(&format!("fig4/bd_p_q{q}"), &diagram)?;
        }
        Ok(())
    }

    /// Three-set diagrams where every set coincides: the classic
    /// one-step logistic map, and the fractional scheme at its q = 1
    /// limit.
    fn fig5(&mut self) -> Result<(), CliError> {
        let n_max = self.n_max(2500);
        let points = self.grid_points(600);
        let tail = self.tail(200);

        let grid = linspace(2.8, 4.0, points);
        let sets = run_iolm_sweep(&grid, &[0.5, 0.9, 0.1], n_max, tail);
        self.write_iolm_diagram("fig5/bd_iolm", &grid, &sets, n_max, tail)?;

        let config = SweepConfig::new(
            SweepAxis::ParamP,
            MapFamily::Logistic,
            linspace(1.3, 2.5, points),
            1.0,
            vec![1.01, 0.5, 0.1],
        )
        .with_n_max(n_max)
        .with_tail_length(tail);
        config.validate().map_err(CliError::config)?;
        let diagram = self.sweep(&config)?;
        self.write_diagram("fig5/bd_q1", &diagram)
    }

    fn write_iolm_diagram(
        &mut self,
        base: &str,
        grid: &[f64],
        sets: &[BifurcativeSet],
        n_max: usize,
        tail: usize,
    ) -> Result<(), CliError> {
        let record = fio::DiagramRecord {
            axis_label: "p",
            fixed_label: "",
            fixed_value: 0.0,
            map: "iolm",
            n_max,
            tail_length: tail,
            grid,
            sets,
        };
        self.out
            .write_file(&format!("{base}.csv"), |w| fio::write_bifurcation_csv(w, &record))?;
        let plot_csv = format!("{base}_plot.csv");
        self.out
            .write_file(&plot_csv, |w| fio::write_plot_csv(w, "p", grid, sets))?;
        self.out.write_json(
            &format!("{base}_plot.json"),
            &fio::PlotDescription::scatter("p", &plot_csv, sets),
        )
    }

    /// The central dataset: three bifurcative sets over p at q = 0.5 and
    /// over q at p = 2.4 (fig6 at the 2500 horizon, fig7 at 7500).
    fn fig6_fig7(&mut self, default_n_max: usize, dir: &str) -> Result<(), CliError> {
        let n_max = self.n_max(default_n_max);
        let points = self.grid_points(600);
        let tail = self.tail(200);
        let x0s = vec![1.01, 0.5, 0.1];

        let p_axis = SweepConfig::new(
            SweepAxis::ParamP,
            MapFamily::Logistic,
            linspace(1.3, 2.5, points),
            0.5,
            x0s.clone(),
        )
        .with_n_max(n_max)
        .with_tail_length(tail);
        p_axis.validate().map_err(CliError::config)?;
        let diagram = self.sweep(&p_axis)?;
        self.write_diagram(&format!("{dir}/bd_p"), &diagram)?;
        self.write_per_set(dir, &diagram)?;

        let q_axis = SweepConfig::new(
            SweepAxis::OrderQ,
            MapFamily::Logistic,
            linspace(Q_GRID_LO, 1.0, points),
            2.4,
            x0s,
        )
        .with_n_max(n_max)
        .with_tail_length(tail);
        q_axis.validate().map_err(CliError::config)?;
        let diagram = self.sweep(&q_axis)?;
        self.write_diagram(&format!("{dir}/bd_q"), &diagram)?;
        self.write_per_set(dir, &diagram)
    }

    /// Five initial conditions: diagram over q at p = 2.2 and over p at
    /// q = 0.3.
    fn fig8(&mut self) -> Result<(), CliError> {
        let n_max = self.n_max(2500);
        let points = self.grid_points(600);
        let tail = self.tail(200);
        let x0s = vec![0.1, 0.5, 0.95, 0.7, 0.85];

        let q_axis = SweepConfig::new(
            SweepAxis::OrderQ,
            MapFamily::Logistic,
            linspace(Q_GRID_LO, 1.0, points),
            2.2,
            x0s.clone(),
        )
        .with_n_max(n_max)
        .with_tail_length(tail);
        q_axis.validate().map_err(CliError::config)?;
        let diagram = self.sweep(&q_axis)?;
        self.write_diagram("fig8/bd_q", &diagram)?;

        let p_axis = SweepConfig::new(
            SweepAxis::ParamP,
            MapFamily::Logistic,
            linspace(1.3, 2.5, points),
            0.3,
            x0s,
        )
        .with_n_max(n_max)
        .with_tail_length(tail);
        p_axis.validate().map_err(CliError::config)?;
        let diagram = self.sweep(&p_axis)?;
        self.write_diagram("fig8/bd_p", &diagram)
    }

    /// The Puu cubic over q at a = 1.27, four positive initial conditions
    /// (the diagram is symmetric under x -> -x, so the positive seeds
    /// cover the upper half).
    fn fig9(&mut self) -> Result<(), CliError> {
        let n_max = self.n_max(2500);
        let points = self.grid_points(600);
        let tail = self.tail(200);
        let config = SweepConfig::new(
            SweepAxis::OrderQ,
            MapFamily::Puu,
            linspace(Q_GRID_LO, 1.0, points),
            1.27,
            vec![0.2, 0.5, 0.1, 0.4],
        )
        .with_n_max(n_max)
        .with_tail_length(tail);
        config.validate().map_err(CliError::config)?;
        let diagram = self.sweep(&config)?;
        self.write_diagram("fig9/bd_q", &diagram)?;
        self.write_per_set("fig9", &diagram)
    }
}
