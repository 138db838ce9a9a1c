//! Parallel versions of the core solvers. Every map collects in input
//! order, so results are identical to the serial ones.

use std::f64::consts::PI;
use std::time::Instant;

use plategap_core::galerkin::{
    solve_stiffened_galerkin, GalerkinOptions, GalerkinReport, GalerkinSolution,
};
use plategap_core::modal::{ModalOptions, PreparedProblem, SolveReport, WeakenedSolution};
use plategap_core::optimize::{
    self, cross_table_classes, delta_scan_evidence, delta_scan_row, optimum_evidence,
    sign_evidence, sign_force_and_competitors, truss_table_classes, CellValue, ConjectureOptions,
    ConjectureReport, DeltaScanRow, Method, MinimaxReport, SolverChoice,
};
use plategap_core::series::{max_gap_with, GapSeries, GridEvaluator};
use plategap_core::{Force, Geometry, PlateConfig, Result};
use rayon::prelude::*;

use crate::error::{AppError, AppResult};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "PLATEGAP_THREADS";

/// Sizes the global rayon pool from `PLATEGAP_THREADS` when it is set.
/// Calling it twice is harmless.
pub fn init_threads() -> AppResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| AppError::Usage(format!("{THREADS_ENV}={v} is not a thread count")))?;
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Evaluator usable from several threads.
pub trait SyncEvaluator: GridEvaluator + Sync {}
impl<T: GridEvaluator + Sync> SyncEvaluator for T {}

/// Modal solve of the weakening model with modes solved in parallel; fills
/// the wall time of the report.
pub fn solve_weakened(
    force: &Force,
    geom: &Geometry,
    cfg: &PlateConfig,
    opts: &ModalOptions,
) -> Result<(WeakenedSolution, GapSeries, SolveReport)> {
    let t = Instant::now();
    let p = PreparedProblem::new(force, geom, cfg, opts)?;
    let profiles = (1..=p.terms() as u32)
        .into_par_iter()
        .map(|m| p.solve_mode(m))
        .collect::<Result<Vec<_>>>()?;
    let (sol, series, mut rep) = p.assemble(profiles)?;
    rep.wall_time_s = Some(t.elapsed().as_secs_f64());
    Ok((sol, series, rep))
}

/// Galerkin solve of the stiffening model with the wall time filled in.
pub fn solve_stiffened(
    force: &Force,
    geom: &Geometry,
    cfg: &PlateConfig,
    opts: &GalerkinOptions,
) -> Result<(GalerkinSolution, GapSeries, GalerkinReport)> {
    let t = Instant::now();
    let (sol, series, mut rep) = solve_stiffened_galerkin(force, geom, cfg, opts)?;
    rep.wall_time_s = Some(t.elapsed().as_secs_f64());
    Ok((sol, series, rep))
}

/// Gap series with the same solver selection as
/// [`optimize::gap_series`], modal solves running in parallel.
pub fn gap_series(
    f: &Force,
    geom: &Geometry,
    solver: &SolverChoice,
    cfg: &PlateConfig,
) -> Result<GapSeries> {
    match solver.method {
        Method::Analytic => optimize::gap_series(f, geom, solver, cfg),
        Method::Modal => Ok(solve_weakened(f, geom, cfg, &solver.modal_options())?.1),
        Method::Auto => match optimize::closed_form_series(f, geom, cfg, solver.terms) {
            Some(r) => r,
            None => Ok(solve_weakened(f, geom, cfg, &solver.modal_options())?.1),
        },
    }
}

/// One matrix cell.
pub fn evaluate_cell(
    f: &Force,
    geom: &Geometry,
    solver: &SolverChoice,
    cfg: &PlateConfig,
    evaluator: &dyn SyncEvaluator,
) -> Result<CellValue> {
    let s = gap_series(f, geom, solver, cfg)?;
    let (argmax, value) = max_gap_with(&s, evaluator);
    Ok(CellValue { value, argmax })
}

/// [`optimize::minimaxmax`] with the cells evaluated in parallel.
pub fn minimaxmax(
    class_d: &[Geometry],
    class_f: &[Force],
    solver: &SolverChoice,
    cfg: &PlateConfig,
    allow_failed: bool,
    evaluator: &dyn SyncEvaluator,
) -> Result<MinimaxReport> {
    let nf = class_f.len();
    let flat: Vec<Result<CellValue>> = (0..class_d.len() * nf)
        .into_par_iter()
        .map(|k| {
            evaluate_cell(
                &class_f[k % nf.max(1)],
                &class_d[k / nf.max(1)],
                solver,
                cfg,
                evaluator,
            )
        })
        .collect();
    let mut it = flat.into_iter();
    let cells = (0..class_d.len())
        .map(|_| it.by_ref().take(nf).collect())
        .collect();
    MinimaxReport::from_cells(
        class_d.iter().map(|g| g.reinforcement().label()).collect(),
        class_f.iter().map(Force::label).collect(),
        cells,
        allow_failed,
    )
}

/// [`optimize::worst_delta_scan`] with the rows evaluated in parallel.
pub fn delta_scan(
    zs: &[f64],
    terms: usize,
    cfg: &PlateConfig,
    evaluator: &dyn SyncEvaluator,
) -> Result<Vec<DeltaScanRow>> {
    zs.par_iter()
        .map(|&z| delta_scan_row(z, terms, cfg, evaluator))
        .collect()
}

/// [`optimize::conjecture_suite`] with every stage parallel.
pub fn conjecture_suite(
    cfg: &PlateConfig,
    opts: &ConjectureOptions,
    evaluator: &dyn SyncEvaluator,
) -> Result<ConjectureReport> {
    let zs: Vec<f64> = (1..=opts.scan_points)
        .map(|i| i as f64 * PI / (opts.scan_points + 1) as f64)
        .collect();
    let worst_delta = delta_scan_evidence(&delta_scan(&zs, opts.scan_terms, cfg, evaluator)?);

    let (sign, competitors) = sign_force_and_competitors(opts.competitors, opts.seed, cfg);
    let empty = Geometry::empty(cfg);
    let modal = SolverChoice {
        method: Method::Modal,
        ..opts.solver
    };
    let sign_gap = evaluate_cell(&sign, &empty, &modal, cfg, evaluator)?.value;
    let competitor_gaps = competitors
        .par_iter()
        .map(|f| evaluate_cell(f, &empty, &modal, cfg, evaluator).map(|c| c.value))
        .collect::<Result<Vec<_>>>()?;
    let sign_force = sign_evidence(sign_gap, competitor_gaps);

    let (gd, gf) = cross_table_classes(0.3, cfg)?;
    let analytic = SolverChoice {
        method: Method::Analytic,
        ..opts.solver
    };
    let cross_optimum = optimum_evidence(
        &minimaxmax(&gd, &gf, &analytic, cfg, false, evaluator)?,
        1,
        0,
    );

    let truss_optimum = if opts.include_truss {
        let (td, tf) = truss_table_classes(cfg)?;
        Some(optimum_evidence(
            &minimaxmax(&td, &tf, &modal, cfg, false, evaluator)?,
            1,
            0,
        ))
    } else {
        None
    };
    Ok(ConjectureReport {
        note: "numerical evidence, not proof".to_string(),
        worst_delta,
        sign_force,
        cross_optimum,
        truss_optimum,
    })
}
