//! Worst-force (maxmax) and best-reinforcement (minimaxmax) searches over
//! finite classes, the delta-load scan and numerical evidence for the
//! optimality conjectures.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::fabs;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::PlateConfig;
use crate::cross::{limit_gap, sinh_gap, smeared_delta_gap, CrossData};
use crate::error::{Error, Result};
use crate::force::{Force, GSpec, Normalization, Profile};
use crate::geometry::{Geometry, Reinforcement, TrussPreset};
use crate::modal::{solve_weakened, ModalOptions};
use crate::series::{delta_gap, max_gap_with, Clenshaw, GapSeries, GridEvaluator};

/// Which solver evaluates a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    /// Closed-form series where one exists, the modal solver otherwise.
    Auto,
    /// Closed-form series only; other cells fail.
    Analytic,
    /// Always the modal solver.
    Modal,
}

/// Solver selection and discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverChoice {
    /// Solver.
    pub method: Method,
    /// Modes / series terms.
    pub terms: usize,
    /// Modal `y`-panels.
    pub panels: usize,
    /// Modal Gauss order.
    pub order: usize,
}

impl Default for SolverChoice {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            terms: 250,
            panels: 64,
            order: 8,
        }
    }
}

impl SolverChoice {
    /// Modal options with the same term count.
    pub fn modal_options(&self) -> ModalOptions {
        ModalOptions {
            terms: self.terms,
            panels: self.panels,
            order: self.order,
        }
    }
}

/// Closed-form gap series of `f` on `geom`, or `None` when the pair has
/// none (non-cross reinforcement or a force without closed form).
pub fn closed_form_series(
    f: &Force,
    geom: &Geometry,
    cfg: &PlateConfig,
    terms: usize,
) -> Option<Result<GapSeries>> {
    let cross = match geom.reinforcement() {
        Reinforcement::Empty | Reinforcement::SymmetricCrossN { .. } => {
            CrossData::from_geometry(geom, cfg).ok()?
        }
        _ => return None,
    };
    match f {
        Force::SeparableSine {
            g,
            profile: Profile::BoundaryLimit,
        } => Some(limit_gap(g, &cross, cfg, terms)),
        Force::SeparableSine {
            g,
            profile: Profile::SinhAlpha(a),
        } => Some(sinh_gap(g, *a, &cross, cfg, terms)),
        Force::DeltaPair { z, normalized } if geom.is_empty() => Some(if *normalized {
            crate::series::normalized_delta_gap(*z, terms, cfg)
        } else {
            delta_gap(*z, terms, cfg)
        }),
        Force::SmearedDelta { z, eta, alpha } if geom.is_empty() => {
            Some(smeared_delta_gap(*z, *eta, *alpha, cfg, terms))
        }
        _ => None,
    }
}

/// Gap series of `f` on `geom` with the selected solver.
pub fn gap_series(
    f: &Force,
    geom: &Geometry,
    solver: &SolverChoice,
    cfg: &PlateConfig,
) -> Result<GapSeries> {
    match solver.method {
        Method::Modal => Ok(solve_weakened(f, geom, cfg, &solver.modal_options())?.1),
        Method::Analytic => closed_form_series(f, geom, cfg, solver.terms).unwrap_or_else(|| {
            Err(Error::precondition(alloc::format!(
                "no closed form for {} on {}",
                f.label(),
                geom.reinforcement().label()
            )))
        }),
        Method::Auto => match closed_form_series(f, geom, cfg, solver.terms) {
            Some(r) => r,
            None => Ok(solve_weakened(f, geom, cfg, &solver.modal_options())?.1),
        },
    }
}

/// Maximal gap and its abscissa for one `(f, D)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellValue {
    /// `G^infinity_{f, D}`.
    pub value: f64,
    /// Abscissa of the maximum.
    pub argmax: f64,
}

/// Evaluates one cell.
pub fn evaluate_cell(
    f: &Force,
    geom: &Geometry,
    solver: &SolverChoice,
    cfg: &PlateConfig,
    evaluator: &dyn GridEvaluator,
) -> Result<CellValue> {
    let s = gap_series(f, geom, solver, cfg)?;
    let (argmax, value) = max_gap_with(&s, evaluator);
    Ok(CellValue { value, argmax })
}

/// Result of [`maxmax`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MaxmaxResult {
    /// Index of the worst force (first one on ties).
    pub worst: usize,
    /// `G^infinity_D`.
    pub value: f64,
    /// Per-force values.
    pub values: Vec<f64>,
    /// Per-force argmax abscissae.
    pub argmax: Vec<f64>,
}

/// The worst force of a finite class for a fixed reinforcement.
pub fn maxmax(
    geom: &Geometry,
    forces: &[Force],
    solver: &SolverChoice,
    cfg: &PlateConfig,
    evaluator: &dyn GridEvaluator,
) -> Result<MaxmaxResult> {
    if forces.is_empty() {
        return Err(Error::EmptyClass("force class is empty".into()));
    }
    let cells = forces
        .iter()
        .map(|f| evaluate_cell(f, geom, solver, cfg, evaluator))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0;
    for (i, c) in cells.iter().enumerate() {
        if c.value > cells[worst].value {
            worst = i;
        }
    }
    Ok(MaxmaxResult {
        worst,
        value: cells[worst].value,
        values: cells.iter().map(|c| c.value).collect(),
        argmax: cells.iter().map(|c| c.argmax).collect(),
    })
}

/// Full value matrix of a minimaxmax problem, rows indexed by
/// reinforcements and columns by forces.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MinimaxReport {
    /// Reinforcement labels.
    pub reinforcements: Vec<String>,
    /// Force labels.
    pub forces: Vec<String>,
    /// `values[D][f]`, `None` for failed cells.
    pub values: Vec<Vec<Option<f64>>>,
    /// Argmax abscissae, same layout.
    pub argmax: Vec<Vec<Option<f64>>>,
    /// Error messages of failed cells.
    pub errors: Vec<Vec<Option<String>>>,
    /// Worst force per reinforcement.
    pub worst_force: Vec<usize>,
    /// Row maxima `G^infinity_D`.
    pub row_max: Vec<f64>,
    /// Index of the optimal reinforcement.
    pub best_reinforcement: usize,
    /// Index of the worst force for it.
    pub best_force: usize,
    /// `G^infinity = min_D max_f`.
    pub value: f64,
}

impl MinimaxReport {
    /// Builds the report from evaluated cells `cells[D][f]`. Failed cells
    /// abort unless `allow_failed`; a row without any value always aborts.
    pub fn from_cells(
        reinforcements: Vec<String>,
        forces: Vec<String>,
        cells: Vec<Vec<Result<CellValue>>>,
        allow_failed: bool,
    ) -> Result<Self> {
        if reinforcements.is_empty() {
            return Err(Error::EmptyClass("reinforcement class is empty".into()));
        }
        if forces.is_empty() {
            return Err(Error::EmptyClass("force class is empty".into()));
        }
        if cells.len() != reinforcements.len() || cells.iter().any(|r| r.len() != forces.len()) {
            return Err(Error::precondition(
                "cell matrix does not match the class sizes",
            ));
        }
        let mut values = Vec::new();
        let mut argmax = Vec::new();
        let mut errors = Vec::new();
        let mut worst_force = Vec::new();
        let mut row_max = Vec::new();
        for (ri, row) in cells.into_iter().enumerate() {
            let mut v = Vec::new();
            let mut a = Vec::new();
            let mut e = Vec::new();
            for (fi, cell) in row.into_iter().enumerate() {
                match cell {
                    Ok(c) => {
                        v.push(Some(c.value));
                        a.push(Some(c.argmax));
                        e.push(None);
                    }
                    Err(err) => {
                        if !allow_failed {
                            return Err(Error::numeric(alloc::format!(
                                "cell ({}, {}) failed: {err}",
                                reinforcements[ri],
                                forces[fi]
                            )));
                        }
                        v.push(None);
                        a.push(None);
                        e.push(Some(err.to_string()));
                    }
                }
            }
            let mut best: Option<usize> = None;
            for (i, x) in v.iter().enumerate() {
                if let Some(x) = x {
                    if best.is_none_or(|b| *x > v[b].unwrap_or(f64::NEG_INFINITY)) {
                        best = Some(i);
                    }
                }
            }
            let w = best.ok_or_else(|| {
                Error::numeric(alloc::format!(
                    "every cell of row {} failed",
                    reinforcements[ri]
                ))
            })?;
            worst_force.push(w);
            row_max.push(v[w].unwrap_or(f64::NAN));
            values.push(v);
            argmax.push(a);
            errors.push(e);
        }
        let mut best_reinforcement = 0;
        for (i, m) in row_max.iter().enumerate() {
            if *m < row_max[best_reinforcement] {
                best_reinforcement = i;
            }
        }
        Ok(Self {
            best_force: worst_force[best_reinforcement],
            value: row_max[best_reinforcement],
            reinforcements,
            forces,
            values,
            argmax,
            errors,
            worst_force,
            row_max,
            best_reinforcement,
        })
    }

    /// `min_D max_f` recomputed from the value matrix.
    pub fn recompute(&self) -> f64 {
        self.values
            .iter()
            .map(|row| {
                row.iter()
                    .flatten()
                    .fold(f64::NEG_INFINITY, |a, v| a.max(*v))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The optimal pair as `(reinforcement label, force label)`.
    pub fn optimum(&self) -> (&str, &str) {
        (
            &self.reinforcements[self.best_reinforcement],
            &self.forces[self.best_force],
        )
    }
}

/// Evaluates the full matrix and solves `min_D max_f G_{f, D}`.
pub fn minimaxmax(
    class_d: &[Geometry],
    class_f: &[Force],
    solver: &SolverChoice,
    cfg: &PlateConfig,
    allow_failed: bool,
    evaluator: &dyn GridEvaluator,
) -> Result<MinimaxReport> {
    let cells = class_d
        .iter()
        .map(|g| {
            class_f
                .iter()
                .map(|f| evaluate_cell(f, g, solver, cfg, evaluator))
                .collect()
        })
        .collect();
    MinimaxReport::from_cells(
        class_d.iter().map(|g| g.reinforcement().label()).collect(),
        class_f.iter().map(Force::label).collect(),
        cells,
        allow_failed,
    )
}

/// One row of the delta-load scan.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeltaScanRow {
    /// Load abscissa.
    pub z: f64,
    /// Maximal gap of the unit-norm load.
    pub normalized: f64,
    /// Maximal gap of `T_z`.
    pub raw: f64,
    /// Abscissa of the maximal gap.
    pub argmax: f64,
}

/// Maximal gaps of `T_z` and of its unit-norm version over `zs`.
pub fn worst_delta_scan(
    zs: &[f64],
    terms: usize,
    cfg: &PlateConfig,
    evaluator: &dyn GridEvaluator,
) -> Result<Vec<DeltaScanRow>> {
    zs.iter()
        .map(|&z| delta_scan_row(z, terms, cfg, evaluator))
        .collect()
}

/// One row of [`worst_delta_scan`].
pub fn delta_scan_row(
    z: f64,
    terms: usize,
    cfg: &PlateConfig,
    evaluator: &dyn GridEvaluator,
) -> Result<DeltaScanRow> {
    let s = delta_gap(z, terms, cfg)?;
    let (argmax, raw) = max_gap_with(&s, evaluator);
    let at_z = s.eval(z);
    let normalized = raw * libm::sqrt(2.0) / libm::sqrt(at_z);
    Ok(DeltaScanRow {
        z,
        normalized,
        raw,
        argmax,
    })
}

/// Settings of [`conjecture_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConjectureOptions {
    /// Interior points of the `z` scan, `z_i = i pi / (points + 1)`.
    pub scan_points: usize,
    /// Series terms of the scan.
    pub scan_terms: usize,
    /// Random competitors of the `sign(y)` force.
    pub competitors: usize,
    /// Seed of the competitor generator.
    pub seed: u64,
    /// Solver for the forces without closed form.
    pub solver: SolverChoice,
    /// Include the truss minimaxmax.
    pub include_truss: bool,
}

impl Default for ConjectureOptions {
    fn default() -> Self {
        Self {
            scan_points: 999,
            scan_terms: 1000,
            competitors: 20,
            seed: 2024,
            solver: SolverChoice::default(),
            include_truss: true,
        }
    }
}

/// Scan evidence that the worst delta load sits at `z = pi/2`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanEvidence {
    /// Grid argmax of the unit-norm scan.
    pub argmax_normalized: f64,
    /// Grid argmax of the raw scan.
    pub argmax_raw: f64,
    /// Grid spacing.
    pub spacing: f64,
    /// Both argmaxes equal `pi/2` to within the spacing.
    pub supported: bool,
}

/// Evidence that `sign(y)` beats non-odd competitors of equal sup-norm.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SignEvidence {
    /// Maximal gap of `sign(y)`.
    pub sign_gap: f64,
    /// Maximal gaps of the competitors.
    pub competitor_gaps: Vec<f64>,
    /// No competitor exceeds `sign(y)`.
    pub supported: bool,
}

/// Evidence from a minimaxmax matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimumEvidence {
    /// Optimal reinforcement.
    pub reinforcement: String,
    /// Worst force for it.
    pub force: String,
    /// `G^infinity`.
    pub value: f64,
    /// The optimum is the expected pair.
    pub supported: bool,
}

/// Numerical evidence (not proof) for the four conjectures.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConjectureReport {
    /// Always "numerical evidence, not proof".
    pub note: String,
    /// Worst delta load at `pi/2`.
    pub worst_delta: ScanEvidence,
    /// `sign(y)` is the worst odd-normalized force.
    pub sign_force: SignEvidence,
    /// `(f^1, D^0)` is optimal in the cross table.
    pub cross_optimum: OptimumEvidence,
    /// `(e_1, Strips)` is optimal among trusses.
    pub truss_optimum: Option<OptimumEvidence>,
}

/// Scan of `z_i = i pi / (points + 1)` and its argmaxes.
pub fn delta_scan_evidence(rows: &[DeltaScanRow]) -> ScanEvidence {
    let argmax = |key: fn(&DeltaScanRow) -> f64| {
        let mut best = 0;
        for (i, r) in rows.iter().enumerate() {
            if key(r) > key(&rows[best]) {
                best = i;
            }
        }
        rows.get(best).map_or(f64::NAN, |r| r.z)
    };
    let spacing = PI / (rows.len() + 1) as f64;
    let an = argmax(|r| r.normalized);
    let ar = argmax(|r| r.raw);
    ScanEvidence {
        argmax_normalized: an,
        argmax_raw: ar,
        spacing,
        supported: fabs(an - 0.5 * PI) <= 0.5 * spacing && fabs(ar - 0.5 * PI) <= 0.5 * spacing,
    }
}

/// The `sign(y)` force (constant in `x`) and `count` seeded competitors
/// `g(x) p(y)` with `sup |g| = sup |p| = 1` and `p` neither odd nor even.
pub fn sign_force_and_competitors(
    count: usize,
    seed: u64,
    cfg: &PlateConfig,
) -> (Force, Vec<Force>) {
    let sign = Force::SeparableSine {
        g: GSpec::Samples(vec![1.0, 1.0]),
        profile: Profile::Sign,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut samples: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let top = samples.iter().fold(0.0f64, |a, v| a.max(fabs(*v)));
        for s in &mut samples {
            *s /= top;
        }
        let mut poly: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sup = (0..=2000)
            .map(|j| {
                let t = -1.0 + j as f64 / 1000.0;
                fabs(poly.iter().rev().fold(0.0, |acc, c| acc * t + c))
            })
            .fold(0.0f64, f64::max);
        for c in &mut poly {
            *c /= sup;
        }
        out.push(Force::SeparableSine {
            g: GSpec::Samples(samples),
            profile: Profile::Poly(poly),
        });
    }
    let _ = cfg;
    (sign, out)
}

/// Forces `f^1..f^10` (limits with `g = sin(n x)`) and the cross class
/// `{empty, D^0..D^5}` with half-width `mu`.
pub fn cross_table_classes(mu: f64, cfg: &PlateConfig) -> Result<(Vec<Geometry>, Vec<Force>)> {
    let eps = cross_table_eps(cfg);
    let mut geoms = vec![Geometry::empty(cfg)];
    for n in 0..=5 {
        geoms.push(Geometry::new(Reinforcement::cross_n(n, mu, eps), cfg)?);
    }
    let forces = (1..=10).map(Force::sine_limit).collect();
    Ok((geoms, forces))
}

/// Strip half-width used in the cross tables; it does not enter the limit
/// gap, which only sees the vertical arms.
pub fn cross_table_eps(cfg: &PlateConfig) -> f64 {
    0.5 * cfg.ell
}

/// Forces `e_1..e_5` (unit `L^2` torsional eigenfunctions) and the class
/// `{empty, Strips, Triangles, Squares, Hexagons}`.
pub fn truss_table_classes(cfg: &PlateConfig) -> Result<(Vec<Geometry>, Vec<Force>)> {
    let mut geoms = vec![Geometry::empty(cfg)];
    for p in TrussPreset::ALL {
        geoms.push(Geometry::new(Reinforcement::truss(p, cfg), cfg)?);
    }
    let forces = (1..=5)
        .map(|m| Force::ResonantEigen {
            m,
            normalization: Normalization::UnitL2,
        })
        .collect();
    Ok((geoms, forces))
}

/// Runs all four evidence checks serially.
pub fn conjecture_suite(
    cfg: &PlateConfig,
    opts: &ConjectureOptions,
    evaluator: &dyn GridEvaluator,
) -> Result<ConjectureReport> {
    let zs: Vec<f64> = (1..=opts.scan_points)
        .map(|i| i as f64 * PI / (opts.scan_points + 1) as f64)
        .collect();
    let rows = worst_delta_scan(&zs, opts.scan_terms, cfg, evaluator)?;
    let worst_delta = delta_scan_evidence(&rows);

    let (sign, competitors) = sign_force_and_competitors(opts.competitors, opts.seed, cfg);
    let empty = Geometry::empty(cfg);
    let modal = SolverChoice {
        method: Method::Modal,
        ..opts.solver
    };
    let sign_gap = evaluate_cell(&sign, &empty, &modal, cfg, evaluator)?.value;
    let competitor_gaps = competitors
        .iter()
        .map(|f| evaluate_cell(f, &empty, &modal, cfg, evaluator).map(|c| c.value))
        .collect::<Result<Vec<_>>>()?;
    let sign_force = sign_evidence(sign_gap, competitor_gaps);

    let (gd, gf) = cross_table_classes(0.3, cfg)?;
    let analytic = SolverChoice {
        method: Method::Analytic,
        ..opts.solver
    };
    let rep = minimaxmax(&gd, &gf, &analytic, cfg, false, evaluator)?;
    let cross_optimum = optimum_evidence(&rep, 1, 0);

    let truss_optimum = if opts.include_truss {
        let (td, tf) = truss_table_classes(cfg)?;
        let rep = minimaxmax(&td, &tf, &modal, cfg, false, evaluator)?;
        Some(optimum_evidence(&rep, 1, 0))
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

/// Compares the `sign(y)` gap with competitor gaps.
pub fn sign_evidence(sign_gap: f64, competitor_gaps: Vec<f64>) -> SignEvidence {
    let supported = competitor_gaps
        .iter()
        .all(|g| *g <= sign_gap * (1.0 + 1e-12));
    SignEvidence {
        sign_gap,
        competitor_gaps,
        supported,
    }
}

/// Checks that the optimum of `rep` is `(D index, f index)`.
pub fn optimum_evidence(rep: &MinimaxReport, d: usize, f: usize) -> OptimumEvidence {
    let (rd, rf) = rep.optimum();
    OptimumEvidence {
        reinforcement: rd.to_string(),
        force: rf.to_string(),
        value: rep.value,
        supported: rep.best_reinforcement == d && rep.best_force == f,
    }
}

/// Serial default evaluator used when callers do not supply one.
pub fn default_evaluator() -> &'static dyn GridEvaluator {
    &Clenshaw
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(v: f64) -> Result<CellValue> {
        Ok(CellValue {
            value: v,
            argmax: 1.0,
        })
    }

    fn labels(n: usize, p: &str) -> Vec<String> {
        (0..n).map(|i| alloc::format!("{p}{i}")).collect()
    }

    #[test]
    fn report_picks_min_of_row_maxima_with_first_tie() {
        let cells = vec![
            vec![cell(3.0), cell(5.0), cell(5.0)],
            vec![cell(4.0), cell(2.0), cell(1.0)],
            vec![cell(4.0), cell(4.0), cell(0.5)],
        ];
        let r = MinimaxReport::from_cells(labels(3, "D"), labels(3, "f"), cells, false).unwrap();
        assert_eq!(r.worst_force, vec![1, 0, 0]);
        assert_eq!(r.best_reinforcement, 1);
        assert_eq!(r.best_force, 0);
        assert_eq!(r.value, 4.0);
        assert_eq!(r.recompute(), r.value);
    }

    #[test]
    fn failed_cells_need_permission() {
        let mk = || {
            vec![
                vec![cell(3.0), Err(Error::numeric("boom"))],
                vec![cell(2.0), cell(1.0)],
            ]
        };
        assert!(MinimaxReport::from_cells(labels(2, "D"), labels(2, "f"), mk(), false).is_err());
        let r = MinimaxReport::from_cells(labels(2, "D"), labels(2, "f"), mk(), true).unwrap();
        assert_eq!(r.values[0][1], None);
        assert!(r.errors[0][1].is_some());
        assert_eq!(r.best_reinforcement, 1);
        let dead = vec![vec![Err(Error::numeric("a")), Err(Error::numeric("b"))]];
        assert!(MinimaxReport::from_cells(labels(1, "D"), labels(2, "f"), dead, true).is_err());
    }

    #[test]
    fn enlarging_classes_is_monotone() {
        let cfg = PlateConfig::preset();
        let (gd, gf) = cross_table_classes(0.3, &cfg).unwrap();
        let s = SolverChoice {
            method: Method::Analytic,
            ..Default::default()
        };
        let ev = default_evaluator();
        let small = minimaxmax(&gd[..3], &gf[..4], &s, &cfg, false, ev).unwrap();
        let more_f = minimaxmax(&gd[..3], &gf[..6], &s, &cfg, false, ev).unwrap();
        let more_d = minimaxmax(&gd, &gf[..4], &s, &cfg, false, ev).unwrap();
        for (a, b) in small.row_max.iter().zip(&more_f.row_max) {
            assert!(b >= a);
        }
        assert!(more_d.value <= small.value);
    }

    #[test]
    fn maxmax_examples() {
        let cfg = PlateConfig::preset();
        let (gd, gf) = cross_table_classes(0.3, &cfg).unwrap();
        let s = SolverChoice::default();
        let ev = default_evaluator();
        let one = maxmax(&gd[2], &gf[4..5], &s, &cfg, ev).unwrap();
        assert_eq!(one.worst, 0);
        let free = maxmax(&gd[0], &gf, &s, &cfg, ev).unwrap();
        assert_eq!(free.worst, 0);
        assert!((free.value * 1e4 - 65.444).abs() < 1e-3);
        let d1 = maxmax(&gd[2], &gf, &s, &cfg, ev).unwrap();
        assert_eq!(d1.worst, 0);
        assert!((d1.value * 1e4 / 53.964 - 1.0).abs() < 5e-3);
        assert!(maxmax(&gd[0], &[], &s, &cfg, ev).is_err());
    }

    #[test]
    fn analytic_only_rejects_trusses() {
        let cfg = PlateConfig::preset();
        let g = Geometry::new(Reinforcement::truss(TrussPreset::Strips, &cfg), &cfg).unwrap();
        let s = SolverChoice {
            method: Method::Analytic,
            ..Default::default()
        };
        assert!(gap_series(&Force::sine_limit(1), &g, &s, &cfg).is_err());
        let auto = SolverChoice {
            terms: 30,
            ..Default::default()
        };
        assert!(gap_series(&Force::sine_limit(1), &g, &auto, &cfg).is_ok());
    }

    #[test]
    fn delta_scan_rows() {
        let cfg = PlateConfig::preset();
        let ev = default_evaluator();
        let r = delta_scan_row(0.5 * PI, 2000, &cfg, ev).unwrap();
        assert!((r.argmax - 0.5 * PI).abs() < 1e-6);
        let rows = worst_delta_scan(&[0.3, 0.9, 1.4], 500, &cfg, ev).unwrap();
        assert!(rows
            .windows(2)
            .all(|w| w[0].raw < w[1].raw && w[0].normalized < w[1].normalized));
    }

    #[test]
    fn competitors_are_normalized_and_deterministic() {
        let cfg = PlateConfig::preset();
        let (_, a) = sign_force_and_competitors(5, 7, &cfg);
        let (_, b) = sign_force_and_competitors(5, 7, &cfg);
        assert_eq!(a, b);
        for f in &a {
            if let Force::SeparableSine {
                g: GSpec::Samples(s),
                profile: Profile::Poly(p),
            } = f
            {
                assert!((s.iter().fold(0.0f64, |m, v| m.max(v.abs())) - 1.0).abs() < 1e-15);
                let sup = (0..=2000)
                    .map(|j| {
                        let t = -1.0 + j as f64 / 1000.0;
                        p.iter().rev().fold(0.0, |acc, c| acc * t + c).abs()
                    })
                    .fold(0.0f64, f64::max);
                assert!((sup - 1.0).abs() < 1e-12);
            } else {
                panic!("unexpected competitor shape");
            }
        }
    }
}
