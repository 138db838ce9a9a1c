//! Per-mode solver for the force-weakening model
//! `Delta^2 u = f / (1 + d chi_D)` with hinged edges at `x = 0, pi` and free
//! edges at `y = +-ell`.
//!
//! Only the right-hand side carries `chi_D`, so the problem decouples in
//! `x`: with `u = sum Y_k(y) sin(k x)` every mode solves
//! `Y'''' - 2 k^2 Y'' + k^4 Y = h_k` with the free-edge conditions
//! `Y'' - sigma k^2 Y = 0` and `Y''' - (2 - sigma) k^2 Y' = -t^+` at `ell`,
//! `= +t^-` at `-ell`, where `t^+-` are the sine coefficients of edge loads.
//!
//! The particular solution is the free-space Green integral
//! `int G(y - s) h_k(s) ds` with `G(t) = e^(-k|t|)(1 + k|t|) / (4 k^3)`,
//! evaluated by Gauss-Legendre quadrature on a symmetric panel grid. The
//! homogeneous part uses the decaying basis `e^(k(y - ell))`,
//! `(y - ell) e^(k(y - ell))`, `e^(-k(y + ell))`, `(y + ell) e^(-k(y + ell))`,
//! which never overflows.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{exp, fabs, sin};

use crate::config::PlateConfig;
use crate::error::{Error, Result};
use crate::force::{Force, GSpec, ResolvedForce, YProfile};
use crate::geometry::Geometry;
use crate::num::IntPow;
use crate::num::{solve_dense, GaussRule, NeumaierSum};
use crate::parity::SampledField;
use crate::series::GapSeries;

/// Discretization parameters of the modal solver.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModalOptions {
    /// Number of `x`-modes.
    pub terms: usize,
    /// Approximate number of Gauss panels across `[-ell, ell]`.
    pub panels: usize,
    /// Gauss order per panel.
    pub order: usize,
}

impl Default for ModalOptions {
    fn default() -> Self {
        Self {
            terms: 250,
            panels: 64,
            order: 8,
        }
    }
}

/// Symmetric Gauss-Legendre grid on `]-ell, ell[`.
#[derive(Debug, Clone, PartialEq)]
pub struct YGrid {
    /// Quadrature nodes, increasing.
    pub nodes: Vec<f64>,
    /// Quadrature weights.
    pub weights: Vec<f64>,
    /// Panel endpoints, increasing, from `-ell` to `ell`.
    pub panel_edges: Vec<f64>,
    ell: f64,
}

impl YGrid {
    /// Builds the grid from breakpoints (mirrored to make the grid
    /// symmetric), roughly `panels` uniform panels overall and geometric
    /// grading towards `+-ell` down to a width of `0.1 / layer`.
    pub fn new(
        ell: f64,
        breakpoints: &[f64],
        panels: usize,
        order: usize,
        layer: Option<f64>,
    ) -> Result<Self> {
        if !(ell > 0.0) || panels == 0 || order == 0 {
            return Err(Error::domain(
                "grid needs ell > 0, panels >= 1 and order >= 1",
            ));
        }
        let mut half: Vec<f64> = vec![0.0, ell];
        half.extend(breakpoints.iter().map(|b| fabs(*b)).filter(|b| *b < ell));
        if let Some(rate) = layer {
            let mut w = 0.5 * ell;
            while rate > 0.0 && w > 0.1 / rate {
                half.push(ell - w);
                w *= 0.5;
            }
        }
        half.sort_by(f64::total_cmp);
        half.dedup_by(|a, b| fabs(*a - *b) <= 1e-14 * ell);
        let mut edges = Vec::new();
        for w in half.windows(2) {
            let n = (libm::ceil(panels as f64 * (w[1] - w[0]) / (2.0 * ell)) as usize).max(1);
            for i in 0..n {
                edges.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
            }
        }
        edges.push(ell);
        let rule = GaussRule::new(order);
        let mut pos = Vec::new();
        let mut pw = Vec::new();
        for w in edges.windows(2) {
            for (x, wt) in rule.mapped(w[0], w[1]) {
                pos.push(x);
                pw.push(wt);
            }
        }
        let mut nodes: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
        nodes.extend_from_slice(&pos);
        let mut weights: Vec<f64> = pw.iter().rev().copied().collect();
        weights.extend_from_slice(&pw);
        let mut panel_edges: Vec<f64> = edges.iter().rev().map(|x| -x).collect();
        panel_edges.pop();
        panel_edges.extend_from_slice(&edges);
        Ok(Self {
            nodes,
            weights,
            panel_edges,
            ell,
        })
    }

    /// Grid suited to a geometry and a force.
    pub fn for_problem(
        geom: &Geometry,
        profile_layer: Option<f64>,
        kinks: &[f64],
        opts: &ModalOptions,
    ) -> Result<Self> {
        let mut bps: Vec<f64> = geom.y_breakpoints().to_vec();
        bps.extend_from_slice(kinks);
        let layer = profile_layer.unwrap_or(0.0).max(opts.terms as f64);
        Self::new(geom.ell(), &bps, opts.panels, opts.order, Some(layer))
    }

    /// Half-width of the strip.
    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// `true` for a grid without nodes.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `j`-th derivative of the Green function of `(d^2 - k^2)^2` at `t`.
fn green(k: f64, t: f64, j: u32) -> f64 {
    let a = fabs(t);
    let e = exp(-k * a);
    let sg = if t < 0.0 { -1.0 } else { 1.0 };
    match j {
        0 => e * (1.0 + k * a) / (4.0 * k * k * k),
        1 => -t * e / (4.0 * k),
        2 => -(1.0 - k * a) * e / (4.0 * k),
        _ => sg * (2.0 - k * a) * e / 4.0,
    }
}

/// `j`-th derivatives of the four homogeneous basis functions at `y`.
fn basis(k: f64, ell: f64, y: f64, j: u32) -> [f64; 4] {
    let t = y - ell;
    let tau = y + ell;
    let ep = exp(k * t);
    let em = exp(-k * tau);
    let kj = k.ipow(j as i32);
    let nk = (-k).ipow(j as i32);
    let (kj1, nk1) = if j == 0 {
        (0.0, 0.0)
    } else {
        (
            j as f64 * k.ipow(j as i32 - 1),
            j as f64 * (-k).ipow(j as i32 - 1),
        )
    };
    [kj * ep, (kj * t + kj1) * ep, nk * em, (nk * tau + nk1) * em]
}

/// Solution of one mode.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeProfile {
    /// Mode.
    pub m: u32,
    /// Coefficients of the exponential homogeneous basis.
    pub coefficients: [f64; 4],
    /// `h_m` at the grid nodes.
    pub rhs: Vec<f64>,
    /// Edge-load coefficients `(t^+, t^-)`.
    pub loads: (f64, f64),
    /// `Y, Y', Y'', Y'''` at `ell` and at `-ell`.
    pub edge_values: [[f64; 4]; 2],
    /// Largest relative free-edge residual.
    pub bc_residual: f64,
}

impl ModeProfile {
    /// `Y(ell) - Y(-ell)`.
    pub fn gap(&self) -> f64 {
        self.edge_values[0][0] - self.edge_values[1][0]
    }

    /// `j`-th derivative of `Y_m` at `y` (`j <= 3`).
    pub fn eval(&self, grid: &YGrid, y: f64, j: u32) -> f64 {
        let k = self.m as f64;
        let mut s = NeumaierSum::new();
        if self.rhs.iter().any(|v| *v != 0.0) {
            for ((&node, &w), &h) in grid.nodes.iter().zip(&grid.weights).zip(&self.rhs) {
                s.add(w * green(k, y - node, j) * h);
            }
        }
        let b = basis(k, grid.ell, y, j);
        for i in 0..4 {
            s.add(self.coefficients[i] * b[i]);
        }
        s.value()
    }

    /// Homogeneous coefficients `(A, B, C, D)` in the basis
    /// `cosh(m y), sinh(m y), y cosh(m y), y sinh(m y)`; the particular
    /// Green integral is not included.
    pub fn hyperbolic_coefficients(&self, ell: f64) -> [f64; 4] {
        let e = exp(-(self.m as f64) * ell);
        let [c1, c2, c3, c4] = self.coefficients;
        [
            e * (c1 - ell * c2 + c3 + ell * c4),
            e * (c1 - ell * c2 - c3 - ell * c4),
            e * (c2 + c4),
            e * (c2 - c4),
        ]
    }
}

/// Solves one mode for rhs samples `h` on `grid` and edge loads
/// `(t^+, t^-)`.
pub fn mode_solve(
    m: u32,
    grid: &YGrid,
    h: &[f64],
    loads: (f64, f64),
    cfg: &PlateConfig,
) -> Result<ModeProfile> {
    if m == 0 {
        return Err(Error::domain("mode must be at least 1"));
    }
    if h.len() != grid.len() {
        return Err(Error::precondition("rhs samples do not match the grid"));
    }
    let k = m as f64;
    let (s, ell) = (cfg.sigma, grid.ell);
    let k2 = k * k;
    let has_rhs = h.iter().any(|v| *v != 0.0);
    let particular = |y: f64| -> [f64; 4] {
        let mut out = [0.0; 4];
        if has_rhs {
            for (j, o) in out.iter_mut().enumerate() {
                let mut acc = NeumaierSum::new();
                for ((&node, &w), &hv) in grid.nodes.iter().zip(&grid.weights).zip(h) {
                    acc.add(w * green(k, y - node, j as u32) * hv);
                }
                *o = acc.value();
            }
        }
        out
    };
    let ends = [ell, -ell];
    let parts = [particular(ell), particular(-ell)];
    let mut a = [0.0; 16];
    let mut rhs = [0.0; 4];
    for (e, &y) in ends.iter().enumerate() {
        let b: [[f64; 4]; 4] = core::array::from_fn(|j| basis(k, ell, y, j as u32));
        let p = parts[e];
        let load = if e == 0 { -loads.0 } else { loads.1 };
        for c in 0..4 {
            a[(2 * e) * 4 + c] = b[2][c] - s * k2 * b[0][c];
            a[(2 * e + 1) * 4 + c] = b[3][c] - (2.0 - s) * k2 * b[1][c];
        }
        rhs[2 * e] = -(p[2] - s * k2 * p[0]);
        rhs[2 * e + 1] = load - (p[3] - (2.0 - s) * k2 * p[1]);
    }
    // Row scaling keeps the pivots comparable across modes.
    let mut a_scaled = a;
    let mut r_scaled = rhs;
    for r in 0..4 {
        let sc = (0..4).map(|c| fabs(a[r * 4 + c])).fold(0.0, f64::max);
        for c in 0..4 {
            a_scaled[r * 4 + c] /= sc;
        }
        r_scaled[r] /= sc;
    }
    let c = solve_dense(&a_scaled, &r_scaled, 4)
        .ok_or_else(|| Error::Singular(alloc::format!("free-edge system of mode {m}")))?;
    let coefficients = [c[0], c[1], c[2], c[3]];
    let mut edge_values = [[0.0; 4]; 2];
    let mut bc_residual: f64 = 0.0;
    for (e, &y) in ends.iter().enumerate() {
        for j in 0..4 {
            let b = basis(k, ell, y, j as u32);
            edge_values[e][j] = parts[e][j] + (0..4).map(|i| coefficients[i] * b[i]).sum::<f64>();
        }
        let v = edge_values[e];
        let load = if e == 0 { -loads.0 } else { loads.1 };
        let r1 = fabs(v[2] - s * k2 * v[0]);
        let s1 = fabs(v[2]) + fabs(s * k2 * v[0]);
        let r2 = fabs(v[3] - (2.0 - s) * k2 * v[1] - load);
        let s2 = fabs(v[3]) + fabs((2.0 - s) * k2 * v[1]) + fabs(load);
        if s1 > 0.0 {
            bc_residual = bc_residual.max(r1 / s1);
        }
        if s2 > 0.0 {
            bc_residual = bc_residual.max(r2 / s2);
        }
    }
    if !coefficients.iter().all(|v| v.is_finite()) {
        return Err(Error::numeric(alloc::format!(
            "non-finite solution in mode {m}"
        )));
    }
    Ok(ModeProfile {
        m,
        coefficients,
        rhs: h.to_vec(),
        loads,
        edge_values,
        bc_residual,
    })
}

/// `sum_I int_I cos(j x) dx` for `j = 0..=jmax`, with the sines generated
/// by the Chebyshev recurrence and re-anchored every 32 steps.
pub(crate) fn cosine_moments(intervals: &[(f64, f64)], jmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; jmax + 1];
    for &(a, b) in intervals {
        out[0] += b - a;
        for x in [b, a] {
            let sign = if x == b { 1.0 } else { -1.0 };
            let c2 = 2.0 * libm::cos(x);
            let (mut prev, mut cur) = (0.0, sin(x));
            for (j, o) in out.iter_mut().enumerate().skip(1) {
                if j % 32 == 0 {
                    prev = sin((j - 1) as f64 * x);
                    cur = sin(j as f64 * x);
                }
                *o += sign * cur / j as f64;
                let next = c2 * cur - prev;
                prev = cur;
                cur = next;
            }
        }
    }
    out
}

/// Sine coefficients `k = 1..=terms` of `g / (1 + d chi)` where `chi` is the
/// indicator of the union of `intervals`.
pub fn weakened_sine_coefficients(
    g: &GSpec,
    intervals: &[(f64, f64)],
    d: f64,
    terms: usize,
) -> Vec<f64> {
    let mut out: Vec<f64> = (1..=terms as u32).map(|k| g.sine_coefficient(k)).collect();
    if d == 0.0 || intervals.is_empty() {
        return out;
    }
    let factor = 2.0 * d / (PI * (1.0 + d));
    match g {
        GSpec::Modes(modes) => {
            let nmax = modes.iter().map(|p| p.0).max().unwrap_or(0) as usize;
            let cm = cosine_moments(intervals, terms + nmax);
            for (idx, o) in out.iter_mut().enumerate() {
                let k = idx + 1;
                let mut acc = 0.0;
                for &(n, amp) in modes {
                    let n = n as usize;
                    let diff = n.abs_diff(k);
                    acc += amp * 0.5 * (cm[diff] - cm[n + k]);
                }
                *o -= factor * acc;
            }
        }
        _ => {
            for (idx, o) in out.iter_mut().enumerate() {
                let k = idx as u32 + 1;
                let acc: f64 = intervals
                    .iter()
                    .map(|&(a, b)| g.interval_sine_integral(k, a, b))
                    .sum();
                *o -= factor * acc;
            }
        }
    }
    out
}

/// Ordinates just inside the two free edges, above and below every
/// interior breakpoint, where edge traces read the cross-section.
fn edge_probes(geom: &Geometry) -> (f64, f64) {
    let ell = geom.ell();
    let bps = geom.y_breakpoints();
    let below_top = bps
        .iter()
        .copied()
        .filter(|b| *b < ell * (1.0 - 1e-14))
        .fold(-ell, f64::max);
    let above_bottom = bps
        .iter()
        .copied()
        .filter(|b| *b > -ell * (1.0 - 1e-14))
        .fold(ell, f64::min);
    (0.5 * (below_top + ell), 0.5 * (above_bottom - ell))
}

/// A force and reinforcement prepared for independent per-mode solves.
#[derive(Debug, Clone)]
pub struct PreparedProblem {
    cfg: PlateConfig,
    terms: usize,
    grid: YGrid,
    profile: Vec<f64>,
    class_of: Vec<usize>,
    brackets: Vec<Vec<f64>>,
    loads: Option<(Vec<f64>, Vec<f64>)>,
}

impl PreparedProblem {
    /// Resolves the force, builds the grid and tabulates the weakened
    /// sine coefficients on every distinct cross-section.
    pub fn new(
        force: &Force,
        geom: &Geometry,
        cfg: &PlateConfig,
        opts: &ModalOptions,
    ) -> Result<Self> {
        cfg.validate()?;
        if opts.terms == 0 {
            return Err(Error::domain("at least one mode is required"));
        }
        if fabs(geom.ell() - cfg.ell) > 1e-15 * cfg.ell {
            return Err(Error::precondition(
                "geometry was built for a different plate",
            ));
        }
        let resolved = force.resolve(cfg)?;
        let terms = opts.terms;
        let d = cfg.d;
        match resolved {
            ResolvedForce::Separable { g, c_g, profile } => {
                let kinks = profile.kinks();
                let grid = YGrid::for_problem(geom, profile.boundary_layer(), kinks, opts)?;
                let values: Vec<f64> = grid
                    .nodes
                    .iter()
                    .map(|&y| profile.value(y, c_g, cfg.ell))
                    .collect();
                let (class_of, brackets) = tabulate(&g, geom, &grid.nodes, d, terms);
                Ok(Self {
                    cfg: *cfg,
                    terms,
                    grid,
                    profile: values,
                    class_of,
                    brackets,
                    loads: None,
                })
            }
            ResolvedForce::EdgeTrace { g, c_g } => {
                let grid = YGrid::for_problem(geom, None, &[], opts)?;
                let (top, bottom) = edge_probes(geom);
                let up = weakened_sine_coefficients(&g, &geom.cross_section(top), d, terms);
                let down = weakened_sine_coefficients(&g, &geom.cross_section(bottom), d, terms);
                let tp = up.iter().map(|v| v / (2.0 * c_g)).collect();
                let tm = down.iter().map(|v| -v / (2.0 * c_g)).collect();
                Ok(Self::trace_only(cfg, terms, grid, tp, tm))
            }
            ResolvedForce::DeltaPair { z, scale } => {
                let grid = YGrid::for_problem(geom, None, &[], opts)?;
                let (top, bottom) = edge_probes(geom);
                let w = |y: f64| {
                    if geom.cross_section(y).iter().any(|&(a, b)| z > a && z < b) {
                        1.0 / (1.0 + d)
                    } else {
                        1.0
                    }
                };
                let (wt, wb) = (w(top), w(bottom));
                let tp = (1..=terms)
                    .map(|k| scale * wt * sin(k as f64 * z) / PI)
                    .collect();
                let tm = (1..=terms)
                    .map(|k| -scale * wb * sin(k as f64 * z) / PI)
                    .collect();
                Ok(Self::trace_only(cfg, terms, grid, tp, tm))
            }
        }
    }

    fn trace_only(
        cfg: &PlateConfig,
        terms: usize,
        grid: YGrid,
        tp: Vec<f64>,
        tm: Vec<f64>,
    ) -> Self {
        let n = grid.len();
        Self {
            cfg: *cfg,
            terms,
            grid,
            profile: vec![0.0; n],
            class_of: vec![0; n],
            brackets: vec![vec![0.0; terms]],
            loads: Some((tp, tm)),
        }
    }

    /// Number of modes.
    pub fn terms(&self) -> usize {
        self.terms
    }

    /// The `y`-grid.
    pub fn grid(&self) -> &YGrid {
        &self.grid
    }

    /// Number of distinct cross-sections met by the grid.
    pub fn classes(&self) -> usize {
        self.brackets.len()
    }

    /// `h_m` at the grid nodes.
    pub fn rhs(&self, m: u32) -> Vec<f64> {
        let idx = m as usize - 1;
        self.profile
            .iter()
            .zip(&self.class_of)
            .map(|(p, &c)| {
                if *p == 0.0 {
                    0.0
                } else {
                    p * self.brackets[c][idx]
                }
            })
            .collect()
    }

    /// Edge-load coefficients of mode `m`.
    pub fn loads(&self, m: u32) -> (f64, f64) {
        match &self.loads {
            Some((tp, tm)) => (tp[m as usize - 1], tm[m as usize - 1]),
            None => (0.0, 0.0),
        }
    }

    /// Solves mode `m` (`1..=terms`).
    pub fn solve_mode(&self, m: u32) -> Result<ModeProfile> {
        if m == 0 || m as usize > self.terms {
            return Err(Error::domain(alloc::format!(
                "mode {m} outside 1..={}",
                self.terms
            )));
        }
        mode_solve(m, &self.grid, &self.rhs(m), self.loads(m), &self.cfg)
    }

    /// Collects per-mode solutions, in mode order, into the full solution.
    pub fn assemble(
        &self,
        profiles: Vec<ModeProfile>,
    ) -> Result<(WeakenedSolution, GapSeries, SolveReport)> {
        if profiles.len() != self.terms
            || profiles
                .iter()
                .enumerate()
                .any(|(i, p)| p.m as usize != i + 1)
        {
            return Err(Error::precondition(
                "profiles must cover modes 1..=terms in order",
            ));
        }
        let coefficients: Vec<f64> = profiles.iter().map(ModeProfile::gap).collect();
        let top = coefficients.iter().fold(0.0f64, |a, c| a.max(fabs(*c)));
        let last = coefficients.last().copied().unwrap_or(0.0);
        // coefficients decay like k^-3 or faster: sum_{k>K} |c_K| (K/k)^3 <= |c_K| K / 2
        let tail = fabs(last) * self.terms as f64 / 2.0;
        let report = SolveReport {
            terms: self.terms,
            nodes: self.grid.len(),
            classes: self.classes(),
            max_bc_residual: profiles.iter().fold(0.0, |a, p| a.max(p.bc_residual)),
            truncation_estimate: if top > 0.0 { tail / top } else { 0.0 },
            wall_time_s: None,
        };
        let series = GapSeries::new(coefficients, tail);
        Ok((
            WeakenedSolution {
                grid: self.grid.clone(),
                profiles,
            },
            series,
            report,
        ))
    }
}

fn tabulate(
    g: &GSpec,
    geom: &Geometry,
    nodes: &[f64],
    d: f64,
    terms: usize,
) -> (Vec<usize>, Vec<Vec<f64>>) {
    let mut class_of = Vec::with_capacity(nodes.len());
    let mut brackets: Vec<Vec<f64>> = Vec::new();
    let mut last: Option<Vec<(f64, f64)>> = None;
    for &y in nodes {
        let cs = if d == 0.0 {
            Vec::new()
        } else {
            geom.cross_section(y)
        };
        if last.as_ref() != Some(&cs) {
            brackets.push(weakened_sine_coefficients(g, &cs, d, terms));
            last = Some(cs);
        }
        class_of.push(brackets.len() - 1);
    }
    (class_of, brackets)
}

/// Diagnostics of a modal solve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    /// Number of modes.
    pub terms: usize,
    /// Number of `y`-nodes.
    pub nodes: usize,
    /// Distinct cross-sections on the grid.
    pub classes: usize,
    /// Largest relative free-edge residual over all modes.
    pub max_bc_residual: f64,
    /// Estimated truncated tail relative to the largest gap coefficient.
    pub truncation_estimate: f64,
    /// Elapsed time, filled in by drivers that can measure it.
    pub wall_time_s: Option<f64>,
}

/// Assembled modal solution `u = sum Y_m(y) sin(m x)`.
#[derive(Debug, Clone)]
pub struct WeakenedSolution {
    /// The `y`-grid of the Green integrals.
    pub grid: YGrid,
    /// Per-mode profiles, modes `1..=terms`.
    pub profiles: Vec<ModeProfile>,
}

impl WeakenedSolution {
    /// `u(x, y)`.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let mut s = NeumaierSum::new();
        for p in &self.profiles {
            s.add(p.eval(&self.grid, y, 0) * sin(p.m as f64 * x));
        }
        s.value()
    }

    /// Samples `u` on a tensor grid.
    pub fn sample(&self, xs: Vec<f64>, ys: Vec<f64>) -> SampledField {
        let cols: Vec<Vec<f64>> = ys
            .iter()
            .map(|&y| {
                self.profiles
                    .iter()
                    .map(|p| p.eval(&self.grid, y, 0))
                    .collect()
            })
            .collect();
        let mut values = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            let sines: Vec<f64> = self.profiles.iter().map(|p| sin(p.m as f64 * x)).collect();
            for col in &cols {
                let mut s = NeumaierSum::new();
                for (a, b) in col.iter().zip(&sines) {
                    s.add(a * b);
                }
                values.push(s.value());
            }
        }
        SampledField { xs, ys, values }
    }
}

/// `h_m` at the ordinates `ys` for a force that has pointwise values.
pub fn modal_rhs(
    force: &Force,
    geom: &Geometry,
    m: u32,
    ys: &[f64],
    cfg: &PlateConfig,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::domain("mode must be at least 1"));
    }
    match force.resolve(cfg)? {
        ResolvedForce::Separable { g, c_g, profile } => Ok(ys
            .iter()
            .map(|&y| {
                let cs = if cfg.d == 0.0 {
                    Vec::new()
                } else {
                    geom.cross_section(y)
                };
                let b = weakened_sine_coefficients(&g, &cs, cfg.d, m as usize)[m as usize - 1];
                profile_value(&profile, y, c_g, cfg.ell) * b
            })
            .collect()),
        _ => Err(Error::precondition(
            "edge traces have no interior rhs; they enter as edge loads",
        )),
    }
}

fn profile_value(p: &YProfile, y: f64, c_g: f64, ell: f64) -> f64 {
    p.value(y, c_g, ell)
}

/// Solves the force-weakening problem mode by mode.
pub fn solve_weakened(
    force: &Force,
    geom: &Geometry,
    cfg: &PlateConfig,
    opts: &ModalOptions,
) -> Result<(WeakenedSolution, GapSeries, SolveReport)> {
    let prepared = PreparedProblem::new(force, geom, cfg, opts)?;
    let profiles = (1..=opts.terms as u32)
        .map(|m| prepared.solve_mode(m))
        .collect::<Result<Vec<_>>>()?;
    prepared.assemble(profiles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross::{limit_gap, mode_constants_raw, CrossData};
    use crate::force::Profile;
    use crate::geometry::Reinforcement;
    use crate::parity::parity_split;
    use crate::series::{max_gap, upsilon_bar};

    fn cfg() -> PlateConfig {
        PlateConfig::preset()
    }

    fn small() -> ModalOptions {
        ModalOptions {
            terms: 12,
            panels: 64,
            order: 8,
        }
    }

    #[test]
    fn grid_is_symmetric_and_integrates_polynomials() {
        let ell = cfg().ell;
        let g = YGrid::new(ell, &[0.3 * ell, -0.7 * ell], 20, 6, Some(500.0)).unwrap();
        let n = g.len();
        for j in 0..n {
            assert_eq!(g.nodes[j], -g.nodes[n - 1 - j]);
            assert_eq!(g.weights[j], g.weights[n - 1 - j]);
        }
        let s: f64 = g.nodes.iter().zip(&g.weights).map(|(y, w)| w * y * y).sum();
        assert!((s - 2.0 * ell.ipow(3) / 3.0).abs() < 1e-18);
    }

    #[test]
    fn zero_data_gives_zero_profile() {
        let c = cfg();
        let g = YGrid::new(c.ell, &[], 16, 8, None).unwrap();
        let p = mode_solve(3, &g, &vec![0.0; g.len()], (0.0, 0.0), &c).unwrap();
        assert_eq!(p.coefficients, [0.0; 4]);
        assert_eq!(p.gap(), 0.0);
    }

    #[test]
    fn edge_load_reproduces_the_delta_kernel() {
        // antisymmetric unit edge load in mode m gives the gap 4 Upsilon_m / (1 - sigma) * t
        let c = cfg();
        let g = YGrid::new(c.ell, &[], 16, 8, None).unwrap();
        for m in [1u32, 2, 17] {
            let p = mode_solve(m, &g, &vec![0.0; g.len()], (0.25, -0.25), &c).unwrap();
            let expect = upsilon_bar(m, &c).unwrap();
            assert!(
                (p.gap() / expect - 1.0).abs() < 1e-12,
                "m={m}: {} vs {expect}",
                p.gap()
            );
            assert!(p.bc_residual < 1e-12);
        }
    }

    #[test]
    fn reproduces_the_analytic_cross_profile() {
        // rhs piecewise K e^(alpha y) gamma^i: the cross solution is the exact answer
        let c = cfg();
        let eps = 0.01;
        let (gam, gh, c_g, alpha) = (0.8, 0.45, 2.0, 150.5);
        let grid = YGrid::new(c.ell, &[eps, -eps], 64, 8, Some(alpha)).unwrap();
        for m in [1u32, 4, 30] {
            let mc = mode_constants_raw(m, alpha, gam, gh, c_g, eps, &c).unwrap();
            let p = Profile::ExpAlpha(alpha);
            let h: Vec<f64> = grid
                .nodes
                .iter()
                .map(|&y| p.value(y, c_g, c.ell).unwrap() * if y.abs() < eps { gh } else { gam })
                .collect();
            let prof = mode_solve(m, &grid, &h, (0.0, 0.0), &c).unwrap();
            let mut worst: f64 = 0.0;
            let mut top: f64 = 0.0;
            for i in 0..=40 {
                let y = -c.ell + 2.0 * c.ell * i as f64 / 40.0;
                let (u, v) = (prof.eval(&grid, y, 0), mc.profile(y, 0));
                worst = worst.max((u - v).abs());
                top = top.max(v.abs());
            }
            assert!(worst < 1e-8 * top, "m={m}: {worst} vs {top}");
            assert!((prof.gap() - mc.xi()).abs() < 1e-8 * mc.xi().abs());
            assert!(prof.bc_residual < 1e-10);
        }
    }

    #[test]
    fn hyperbolic_coefficients_reproduce_the_homogeneous_part() {
        let c = cfg();
        let grid = YGrid::new(c.ell, &[], 16, 8, None).unwrap();
        let p = mode_solve(5, &grid, &vec![0.0; grid.len()], (0.3, 0.1), &c).unwrap();
        let [a, b, cc, d] = p.hyperbolic_coefficients(c.ell);
        let y = 0.37 * c.ell;
        let k = 5.0;
        let direct = (a + cc * y) * libm::cosh(k * y) + (b + d * y) * libm::sinh(k * y);
        assert!((direct - p.eval(&grid, y, 0)).abs() < 1e-12 * direct.abs());
    }

    #[test]
    fn sine_limit_on_free_plate_gives_upsilon_bar() {
        let c = cfg();
        let geom = Geometry::empty(&c);
        let (_, s, rep) = solve_weakened(&Force::sine_limit(1), &geom, &c, &small()).unwrap();
        assert!((max_gap(&s).1 * 1e4 - 65.444).abs() < 5e-4);
        assert!(rep.max_bc_residual < 1e-10);
    }

    #[test]
    fn limit_trace_on_cross_matches_the_analytic_limit() {
        let c = cfg();
        let geom = Geometry::new(Reinforcement::cross_n(2, 0.3, 0.01), &c).unwrap();
        let cross = CrossData::from_geometry(&geom, &c).unwrap();
        let opts = ModalOptions {
            terms: 60,
            ..ModalOptions::default()
        };
        let (_, s, _) = solve_weakened(&Force::sine_limit(3), &geom, &c, &opts).unwrap();
        let a = limit_gap(&GSpec::sine(3), &cross, &c, 60).unwrap();
        for (u, v) in s.coefficients.iter().zip(&a.coefficients) {
            assert!((u - v).abs() < 1e-10 * a.coefficients[2].abs());
        }
    }

    #[test]
    fn rhs_examples() {
        let c = cfg();
        let empty = Geometry::empty(&c);
        let f = Force::SeparableSine {
            g: GSpec::sine(2),
            profile: Profile::Sign,
        };
        let ys = [-0.01, 0.004];
        assert_eq!(modal_rhs(&f, &empty, 2, &ys, &c).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(modal_rhs(&f, &empty, 3, &ys, &c).unwrap(), vec![0.0, 0.0]);
        let geom = Geometry::new(Reinforcement::cross_n(1, 0.3, 0.005), &c).unwrap();
        let cross = CrossData::from_geometry(&geom, &c).unwrap();
        let g = GSpec::sine(1);
        let f = Force::SeparableSine {
            g: g.clone(),
            profile: Profile::ExpAlpha(80.5),
        };
        let y = 0.012;
        for m in 1..6 {
            let h = modal_rhs(&f, &geom, m, &[y], &c).unwrap()[0];
            let expect = crate::cross::gamma_m(&g, m, &cross)
                * Profile::ExpAlpha(80.5).value(y, 2.0, c.ell).unwrap();
            assert!((h - expect).abs() < 1e-12 * expect.abs().max(1.0));
        }
        assert!(modal_rhs(
            &Force::DeltaPair {
                z: 1.0,
                normalized: false
            },
            &geom,
            1,
            &[0.0],
            &c
        )
        .is_err());
    }

    #[test]
    fn even_force_has_zero_gap_and_odd_force_has_odd_solution() {
        let c = cfg();
        let geom = Geometry::new(Reinforcement::cross_n(1, 0.3, 0.006), &c).unwrap();
        let even = Force::SeparableSine {
            g: GSpec::sine(1),
            profile: Profile::CoshAlpha(60.5),
        };
        let (_, s, _) = solve_weakened(&even, &geom, &c, &small()).unwrap();
        assert!(s.coefficients.iter().all(|v| v.abs() < 1e-12));
        let odd = Force::SeparableSine {
            g: GSpec::sine(1),
            profile: Profile::SinhAlpha(60.5),
        };
        let (sol, s, _) = solve_weakened(&odd, &geom, &c, &small()).unwrap();
        let ys: Vec<f64> = (0..9)
            .map(|j| c.ell * (2.0 * j as f64 - 8.0) / 8.0)
            .collect();
        let xs = vec![0.4, 1.3, 2.9];
        let (e, o) = parity_split(&sol.sample(xs, ys)).unwrap();
        assert!(e.sup_norm() < 1e-12 * o.sup_norm().max(1e-300));
        assert!(max_gap(&s).1 > 0.0);
    }

    #[test]
    fn gap_is_linear_in_the_force() {
        let c = cfg();
        let geom = Geometry::new(Reinforcement::cross_n(0, 0.3, 0.005), &c).unwrap();
        let f1 = Force::SeparableSine {
            g: GSpec::Modes(vec![(1, 1.0)]),
            profile: Profile::Sign,
        };
        let f3 = Force::SeparableSine {
            g: GSpec::Modes(vec![(1, 3.0)]),
            profile: Profile::Sign,
        };
        let (_, a, _) = solve_weakened(&f1, &geom, &c, &small()).unwrap();
        let (_, b, _) = solve_weakened(&f3, &geom, &c, &small()).unwrap();
        for (u, v) in a.coefficients.iter().zip(&b.coefficients) {
            assert!((3.0 * u - v).abs() <= 1e-13 * v.abs().max(1e-300));
        }
    }

    #[test]
    fn doubling_the_grid_changes_little() {
        let c = cfg();
        let geom = Geometry::new(Reinforcement::cross_n(1, 0.3, 0.006), &c).unwrap();
        let f = Force::ResonantEigen {
            m: 1,
            normalization: crate::force::Normalization::UnitL2,
        };
        let o1 = ModalOptions {
            terms: 20,
            panels: 64,
            order: 8,
        };
        let o2 = ModalOptions {
            terms: 20,
            panels: 128,
            order: 8,
        };
        let (_, a, _) = solve_weakened(&f, &geom, &c, &o1).unwrap();
        let (_, b, _) = solve_weakened(&f, &geom, &c, &o2).unwrap();
        let (ga, gb) = (max_gap(&a).1, max_gap(&b).1);
        assert!((ga - gb).abs() < 1e-8 * gb, "{ga} vs {gb}");
    }

    #[test]
    fn weakened_coefficients_agree_between_paths() {
        let iv = vec![(0.2, 0.5), (1.0, 1.7), (2.9, 3.1)];
        let modes = GSpec::Modes(vec![(3, 1.0), (7, -0.4)]);
        let fast = weakened_sine_coefficients(&modes, &iv, 2.0, 300);
        for k in [1usize, 3, 7, 100, 299] {
            let direct: f64 = modes.sine_coefficient(k as u32)
                - 4.0 / (3.0 * PI)
                    * iv.iter()
                        .map(|&(a, b)| modes.interval_sine_integral(k as u32, a, b))
                        .sum::<f64>();
            assert!((fast[k - 1] - direct).abs() < 1e-12, "k={k}");
        }
    }
}
