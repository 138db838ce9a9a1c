//! Command-line front end.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use plategap_core::galerkin::GalerkinReport;
use plategap_core::modal::SolveReport;
use plategap_core::optimize::{delta_scan_evidence, ConjectureOptions, DeltaScanRow, ScanEvidence};
use plategap_core::parity::SampledField;
use plategap_core::series::{max_gap_with, sample_curve, GapSeries};
use plategap_core::{Force, Geometry, PlateConfig};
use serde::Serialize;

use crate::config::{Format, RunConfig, SolverKind};
use crate::drivers;
use crate::error::{AppError, AppResult};
use crate::fft::FftEvaluator;
use crate::io::{self, emit, to_json, Sink};
use crate::specs::{
    parse_abscissa, parse_force, parse_force_class, parse_reinforcement, parse_reinforcement_class,
};
use crate::tables::{compute_table, TableId};

/// Gap functions of partially hinged reinforced plates.
#[derive(Debug, Parser)]
#[command(name = "plategap", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every command; each one overrides the config file.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Plate half-width.
    #[arg(long, global = true)]
    ell: Option<f64>,
    /// Poisson ratio.
    #[arg(long, global = true)]
    sigma: Option<f64>,
    /// Stiffening strength.
    #[arg(long, global = true)]
    d: Option<f64>,
    /// Series terms or modes.
    #[arg(long, global = true)]
    terms: Option<usize>,
    /// Modal y-panels.
    #[arg(long, global = true)]
    panels: Option<usize>,
    /// Sample count of exported curves and fields.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Relative tolerance of reference comparisons.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Vertical half-width parameter of cross reinforcements.
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// Strip half-width of cross reinforcements.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Solver.
    #[arg(long, global = true, value_enum)]
    solver: Option<SolverKind>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format of stdout and files.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Include wall times in reports (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproduce a reference table and compare it cell by cell.
    Table {
        /// Which table.
        #[arg(value_enum)]
        which: TableId,
        /// Exit with code 3 when a comparison fails.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Solve one (force, reinforcement) pair and export the solution.
    Solve {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        common: Common,
    },
    /// Export the gap curve of one (force, reinforcement) pair.
    Gap {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        common: Common,
    },
    /// Solve min over reinforcements of max over forces of the maximal gap.
    Optimize {
        /// Reinforcement class, e.g. `none,cross:0..5`.
        #[arg(long)]
        class_d: Option<String>,
        /// Force class, e.g. `sin:1..10`.
        #[arg(long)]
        class_f: Option<String>,
        /// Skip failed cells instead of aborting.
        #[arg(long)]
        allow_failed: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Maximal gaps of the edge delta pairs over a grid of abscissae.
    Scan {
        /// Interior grid points `z_i = i pi / (points + 1)`.
        #[arg(long, default_value_t = 999)]
        points: usize,
        /// Explicit comma-separated abscissae instead of the grid.
        #[arg(long)]
        z: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Numerical evidence for the four conjectures.
    Conjectures {
        /// Interior points of the delta scan.
        #[arg(long, default_value_t = 999)]
        scan_points: usize,
        /// Random competitors of the sign(y) force.
        #[arg(long, default_value_t = 20)]
        competitors: usize,
        /// Seed of the competitor generator.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Skip the truss minimaxmax.
        #[arg(long)]
        no_truss: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Export the geometry record of a reinforcement.
    Geometry {
        /// Reinforcement spec.
        #[arg(long)]
        reinforcement: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Args)]
struct Pair {
    /// Force spec, e.g. `sin:1`, `eig:2`, `unit-delta:pi/2`, `even-test`.
    #[arg(long)]
    force: Option<String>,
    /// Reinforcement spec, e.g. `none`, `cross:1`, `strips` (default none).
    #[arg(long)]
    reinforcement: Option<String>,
}

impl Common {
    fn resolve(&self) -> AppResult<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(ell, sigma, d, panels, mu, solver, format);
        if self.terms.is_some() {
            c.terms = self.terms;
        }
        if self.grid.is_some() {
            c.grid = self.grid;
        }
        if self.tol.is_some() {
            c.tol = self.tol;
        }
        if self.eps.is_some() {
            c.eps = self.eps;
        }
        if self.out.is_some() {
            c.out.clone_from(&self.out);
        }
        c.validate().map_err(|e| match e {
            AppError::Config { field, message, .. } => {
                AppError::Usage(format!("--{}: {message}", field.unwrap_or_default()))
            }
            other => other,
        })?;
        Ok(c)
    }
}

struct Ctx<'a> {
    run: RunConfig,
    cfg: PlateConfig,
    sink: Sink,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    timing: bool,
    evaluator: FftEvaluator,
}

impl Ctx<'_> {
    fn note(&mut self, msg: &str) {
        let _ = writeln!(self.err, "{msg}");
    }

    /// Writes the stdout document and mirrors it into `stem.{csv,json}`.
    fn primary(&mut self, stem: &str, csv: &str, json: &str) -> AppResult<()> {
        match self.run.format {
            Format::Csv => {
                self.sink.file(&format!("{stem}.csv"), csv)?;
                emit(self.out, csv)
            }
            Format::Json => {
                self.sink.file(&format!("{stem}.json"), json)?;
                emit(self.out, json)
            }
        }
    }
}

/// Runs the command line; returns the process exit code. Errors are
/// written to `err` as one JSON line.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = writeln!(
                err,
                "{}",
                AppError::Usage(e.to_string().trim().to_string()).to_json()
            );
            return 2;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_json());
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> AppResult<i32> {
    drivers::init_threads()?;
    let common = match &cli.command {
        Command::Table { common, .. }
        | Command::Solve { common, .. }
        | Command::Gap { common, .. }
        | Command::Optimize { common, .. }
        | Command::Scan { common, .. }
        | Command::Conjectures { common, .. }
        | Command::Geometry { common, .. } => common.clone(),
    };
    let run = common.resolve()?;
    let mut ctx = Ctx {
        cfg: run.plate()?,
        sink: Sink::new(run.out.clone()),
        run,
        out,
        err,
        timing: common.timing,
        evaluator: FftEvaluator::new(),
    };
    match cli.command {
        Command::Table { which, strict, .. } => cmd_table(&mut ctx, which, strict),
        Command::Solve { pair, .. } => cmd_solve(&mut ctx, &pair).map(|_| 0),
        Command::Gap { pair, .. } => cmd_gap(&mut ctx, &pair).map(|_| 0),
        Command::Optimize {
            class_d,
            class_f,
            allow_failed,
            ..
        } => cmd_optimize(&mut ctx, class_d, class_f, allow_failed).map(|_| 0),
        Command::Scan { points, z, .. } => cmd_scan(&mut ctx, points, z.as_deref()).map(|_| 0),
        Command::Conjectures {
            scan_points,
            competitors,
            seed,
            no_truss,
            ..
        } => {
            let opts = ConjectureOptions {
                scan_points,
                scan_terms: ctx.run.terms.unwrap_or(1000),
                competitors,
                seed,
                solver: ctx.run.solver_choice()?,
                include_truss: !no_truss,
            };
            cmd_conjectures(&mut ctx, &opts).map(|_| 0)
        }
        Command::Geometry { reinforcement, .. } => cmd_geometry(&mut ctx, reinforcement).map(|_| 0),
    }
}

fn cmd_table(ctx: &mut Ctx, which: TableId, strict: bool) -> AppResult<i32> {
    let t = Instant::now();
    let rep = compute_table(which, &ctx.run, &ctx.evaluator)?;
    let name = format!("table_{}", which.name());
    ctx.sink
        .file(&format!("{name}.csv"), &io::table_matrix_csv(&rep)?)?;
    ctx.sink
        .file(&format!("{name}_diff.csv"), &io::table_diff_csv(&rep)?)?;
    ctx.sink.file(&format!("{name}.json"), &to_json(&rep)?)?;
    if which == TableId::T2 {
        ctx.sink
            .file(&format!("{name}_ratios.csv"), &io::table_ratio_csv(&rep)?)?;
    }
    match ctx.run.format {
        Format::Csv => emit(ctx.out, &io::table_diff_csv(&rep)?)?,
        Format::Json => emit(ctx.out, &to_json(&rep)?)?,
    }
    let c = &rep.comparison;
    let cells = c.cells.iter().filter(|x| x.status != "skip").count();
    let mut msg = format!(
        "table {}: {} of {} cells within tolerance ({}), max relative difference {:.3e}",
        rep.table,
        cells - c.failed,
        cells,
        c.basis,
        c.max_rel_diff
    );
    for o in c.ordering.iter().filter(|o| !o.holds) {
        msg += &format!(
            "; ordering differs in {}: {}",
            o.column,
            o.computed.join(" < ")
        );
    }
    if let Some(o) = &rep.optimum {
        msg += &format!(
            "; optimum ({}, {}) = {:.5}e-4",
            o.reinforcement,
            o.force,
            o.value * 1e4
        );
    }
    if ctx.timing {
        msg += &format!("; {:.2} s", t.elapsed().as_secs_f64());
    }
    ctx.note(&msg);
    Ok(if strict && !c.passed() { 3 } else { 0 })
}

/// Solver output of a single pair.
struct Solved {
    force: Force,
    geom: Geometry,
    solver: &'static str,
    series: GapSeries,
    field: Option<SampledField>,
    modal: Option<SolveReport>,
    galerkin: Option<GalerkinReport>,
}

fn pair_inputs(ctx: &Ctx, pair: &Pair) -> AppResult<(Force, Geometry)> {
    let fs = pair
        .force
        .clone()
        .or_else(|| ctx.run.force.clone())
        .ok_or_else(|| {
            AppError::Usage("a force is required (--force or `force` in the config)".into())
        })?;
    let rs = pair
        .reinforcement
        .clone()
        .or_else(|| ctx.run.reinforcement.clone())
        .unwrap_or_else(|| "none".into());
    let force = parse_force(&fs)?;
    let geom = io::geometry(
        parse_reinforcement(&rs, &ctx.run.spec_context()?)?,
        &ctx.cfg,
    )?;
    Ok((force, geom))
}

fn sample_axes(ctx: &Ctx) -> (Vec<f64>, Vec<f64>) {
    let nx = ctx.run.grid.unwrap_or(64);
    let ny = 32;
    let xs = (0..=nx).map(|i| i as f64 * PI / nx as f64).collect();
    let ys = (0..=ny)
        .map(|j| ctx.cfg.ell * (2.0 * j as f64 / ny as f64 - 1.0))
        .collect();
    (xs, ys)
}

fn solve_pair(ctx: &Ctx, pair: &Pair, with_field: bool) -> AppResult<Solved> {
    let (force, geom) = pair_inputs(ctx, pair)?;
    let (xs, ys) = sample_axes(ctx);
    let timing = ctx.timing;
    let mut s = Solved {
        force,
        geom,
        solver: "analytic",
        series: GapSeries::new(vec![], 0.0),
        field: None,
        modal: None,
        galerkin: None,
    };
    match ctx.run.solver {
        SolverKind::Galerkin => {
            let (sol, series, mut rep) =
                drivers::solve_stiffened(&s.force, &s.geom, &ctx.cfg, &ctx.run.galerkin_options())?;
            if !timing {
                rep.wall_time_s = None;
            }
            s.solver = "galerkin";
            s.series = series;
            s.field = with_field.then(|| SampledField::from_fn(xs, ys, |x, y| sol.value(x, y)));
            s.galerkin = Some(rep);
        }
        kind => {
            let choice = ctx.run.solver_choice()?;
            let closed = if kind == SolverKind::Modal {
                None
            } else {
                plategap_core::optimize::closed_form_series(
                    &s.force,
                    &s.geom,
                    &ctx.cfg,
                    choice.terms,
                )
            };
            match closed {
                Some(r) => s.series = r?,
                None if kind == SolverKind::Analytic => {
                    return Err(AppError::Usage(format!(
                        "no closed form for {} on {}; use --solver modal",
                        s.force.label(),
                        s.geom.reinforcement().label()
                    )))
                }
                None => {
                    let (sol, series, mut rep) = drivers::solve_weakened(
                        &s.force,
                        &s.geom,
                        &ctx.cfg,
                        &choice.modal_options(),
                    )?;
                    if !timing {
                        rep.wall_time_s = None;
                    }
                    s.solver = "modal";
                    s.series = series;
                    s.field = with_field.then(|| sol.sample(xs, ys));
                    s.modal = Some(rep);
                }
            }
        }
    }
    Ok(s)
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    force: &'a Force,
    reinforcement: String,
    model: &'static str,
    solver: &'static str,
    max_gap: f64,
    argmax: f64,
    terms: usize,
    tail_bound: f64,
    coefficients: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    modal_report: Option<&'a SolveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    galerkin_report: Option<&'a GalerkinReport>,
}

fn cmd_solve(ctx: &mut Ctx, pair: &Pair) -> AppResult<()> {
    let s = solve_pair(ctx, pair, true)?;
    let (argmax, max_gap) = max_gap_with(&s.series, &ctx.evaluator);
    let doc = SolveOutput {
        force: &s.force,
        reinforcement: s.geom.reinforcement().label(),
        model: if s.solver == "galerkin" {
            "stiffening"
        } else {
            "weakening"
        },
        solver: s.solver,
        max_gap,
        argmax,
        terms: s.series.terms(),
        tail_bound: s.series.tail_bound,
        coefficients: &s.series.coefficients,
        modal_report: s.modal.as_ref(),
        galerkin_report: s.galerkin.as_ref(),
    };
    let json = to_json(&doc)?;
    ctx.sink.file("solve.json", &json)?;
    if let Some(f) = &s.field {
        ctx.sink.file("solution.csv", &io::field_csv(f)?)?;
    }
    ctx.primary("gap_series", &io::series_csv(&s.series)?, &json)?;
    ctx.note(&format!(
        "{} on {}: max gap {:.6e} at x = {:.10}",
        s.force.label(),
        doc.reinforcement,
        max_gap,
        argmax
    ));
    Ok(())
}

#[derive(Serialize)]
struct GapOutput<'a> {
    force: &'a Force,
    reinforcement: String,
    solver: &'static str,
    max_gap: f64,
    argmax: f64,
    terms: usize,
    tail_bound: f64,
    curve: Vec<(f64, f64)>,
}

fn cmd_gap(ctx: &mut Ctx, pair: &Pair) -> AppResult<()> {
    let s = solve_pair(ctx, pair, false)?;
    let (argmax, max_gap) = max_gap_with(&s.series, &ctx.evaluator);
    let curve = sample_curve(&s.series, ctx.run.grid.unwrap_or(2000), &ctx.evaluator);
    let csv = io::curve_csv(&curve)?;
    let doc = GapOutput {
        force: &s.force,
        reinforcement: s.geom.reinforcement().label(),
        solver: s.solver,
        max_gap,
        argmax,
        terms: s.series.terms(),
        tail_bound: s.series.tail_bound,
        curve,
    };
    ctx.primary("gap_curve", &csv, &to_json(&doc)?)?;
    ctx.note(&format!(
        "{} on {}: max gap {:.6e} at x = {:.10}",
        s.force.label(),
        doc.reinforcement,
        max_gap,
        argmax
    ));
    Ok(())
}

fn cmd_optimize(
    ctx: &mut Ctx,
    class_d: Option<String>,
    class_f: Option<String>,
    allow: bool,
) -> AppResult<()> {
    let cd = class_d
        .or_else(|| ctx.run.class_d.clone())
        .unwrap_or_else(|| "none".into());
    let cf = class_f
        .or_else(|| ctx.run.class_f.clone())
        .ok_or_else(|| AppError::Usage("a force class is required (--class-f)".into()))?;
    let sc = ctx.run.spec_context()?;
    let geoms = parse_reinforcement_class(&cd, &sc)?
        .into_iter()
        .map(|r| io::geometry(r, &ctx.cfg))
        .collect::<AppResult<Vec<_>>>()?;
    let forces = parse_force_class(&cf)?;
    let rep = drivers::minimaxmax(
        &geoms,
        &forces,
        &ctx.run.solver_choice()?,
        &ctx.cfg,
        allow || ctx.run.allow_failed,
        &ctx.evaluator,
    )?;
    ctx.primary("minimax", &io::minimax_csv(&rep)?, &to_json(&rep)?)?;
    let (d, f) = rep.optimum();
    let msg = format!(
        "optimum ({d}, {f}) with maximal gap {:.5}e-4",
        rep.value * 1e4
    );
    ctx.note(&msg);
    Ok(())
}

#[derive(Serialize)]
struct ScanOutput<'a> {
    terms: usize,
    rows: &'a [DeltaScanRow],
    evidence: Option<ScanEvidence>,
}

fn cmd_scan(ctx: &mut Ctx, points: usize, z: Option<&str>) -> AppResult<()> {
    let zs: Vec<f64> = match z {
        Some(list) => list
            .split(',')
            .map(|s| parse_abscissa(s).ok_or_else(|| AppError::spec("abscissa", s, "not a number")))
            .collect::<AppResult<_>>()?,
        None => (1..=points)
            .map(|i| i as f64 * PI / (points + 1) as f64)
            .collect(),
    };
    let terms = ctx.run.delta_terms();
    let rows = drivers::delta_scan(&zs, terms, &ctx.cfg, &ctx.evaluator)?;
    let evidence = z.is_none().then(|| delta_scan_evidence(&rows));
    let doc = ScanOutput {
        terms,
        rows: &rows,
        evidence: evidence.clone(),
    };
    ctx.primary("scan", &io::scan_csv(&rows)?, &to_json(&doc)?)?;
    if let Some(e) = evidence {
        ctx.note(&format!(
            "scan argmax: unit-norm z = {:.6}, raw z = {:.6} (pi/2 = {:.6})",
            e.argmax_normalized,
            e.argmax_raw,
            PI / 2.0
        ));
    }
    Ok(())
}

fn cmd_conjectures(ctx: &mut Ctx, opts: &ConjectureOptions) -> AppResult<()> {
    let rep = drivers::conjecture_suite(&ctx.cfg, opts, &ctx.evaluator)?;
    let mut rows = vec![
        (
            "worst delta at pi/2",
            rep.worst_delta.supported,
            format!("argmax {:.6}", rep.worst_delta.argmax_normalized),
        ),
        (
            "sign(y) is the worst force",
            rep.sign_force.supported,
            format!(
                "sign gap {:.6e}, best competitor {:.6e}",
                rep.sign_force.sign_gap,
                rep.sign_force
                    .competitor_gaps
                    .iter()
                    .cloned()
                    .fold(0.0, f64::max)
            ),
        ),
        (
            "(f1, D0) is optimal",
            rep.cross_optimum.supported,
            format!(
                "({}, {})",
                rep.cross_optimum.reinforcement, rep.cross_optimum.force
            ),
        ),
    ];
    if let Some(t) = &rep.truss_optimum {
        rows.push((
            "(e1, Strips) is optimal",
            t.supported,
            format!("({}, {})", t.reinforcement, t.force),
        ));
    }
    let mut csv = String::from("conjecture,supported,detail\n");
    for (name, ok, detail) in &rows {
        csv += &format!("{name},{ok},\"{detail}\"\n");
    }
    ctx.primary("conjectures", &csv, &to_json(&rep)?)?;
    ctx.note(&format!(
        "{}: {} of {} supported",
        rep.note,
        rows.iter().filter(|r| r.1).count(),
        rows.len()
    ));
    Ok(())
}

fn cmd_geometry(ctx: &mut Ctx, reinforcement: Option<String>) -> AppResult<()> {
    let rs = reinforcement
        .or_else(|| ctx.run.reinforcement.clone())
        .ok_or_else(|| AppError::Usage("a reinforcement is required (--reinforcement)".into()))?;
    let geom = io::geometry(
        parse_reinforcement(&rs, &ctx.run.spec_context()?)?,
        &ctx.cfg,
    )?;
    let rec = io::geometry_record(&geom)?;
    let mut csv = String::from("polygon,vertex,x,y\n");
    for (i, poly) in rec.vertices.iter().enumerate() {
        for (j, p) in poly.iter().enumerate() {
            csv += &format!("{i},{j},{:e},{:e}\n", p[0], p[1]);
        }
    }
    ctx.primary("geometry", &csv, &to_json(&rec)?)?;
    ctx.note(&format!(
        "{}: area {:.6e}, {} polygons",
        rec.kind,
        rec.area,
        rec.vertices.len()
    ));
    Ok(())
}
