//! Galerkin solver for the plate-stiffening model
//! `(u, v)_{H^2_*} + d (u, v)_D = <f, v>`.
//!
//! The stiffening form integrates over `D`, so the modes couple. The trial
//! space is `sin(m x) q_j(y)`, `m = 1..=M_x`, `j = 0..=K_y`, with `q_j` the
//! `L^2(-ell, ell)`-orthonormal Legendre polynomials. The free edges are
//! natural for this form, so the basis carries no constraint in `y`.
//!
//! With `S_mn = int sin(m x) sin(n x)` and `C_mn = int cos(m x) cos(n x)`
//! over a cross-section, the bilinear density is
//! `(q_i'' - m^2 q_i)(q_j'' - n^2 q_j) S_mn
//!   + (1 - sigma) (2 m n q_i' q_j' C_mn + (m^2 q_i q_j'' + n^2 q_i'' q_j) S_mn)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{fabs, sin, sqrt};

use crate::config::PlateConfig;
use crate::error::{Error, Result};
use crate::force::{Force, ResolvedForce};
use crate::geometry::Geometry;
use crate::modal::{cosine_moments, YGrid};
use crate::num::GaussRule;
use crate::num::IntPow;
use crate::series::GapSeries;

/// Basis sizes and quadrature of the Galerkin solver.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GalerkinOptions {
    /// Number of `x`-modes `M_x`.
    pub modes: usize,
    /// Largest polynomial degree `K_y`.
    pub degree: usize,
    /// Approximate number of `y`-panels for the integrals over `D` and the load.
    pub panels: usize,
    /// Gauss order per panel.
    pub order: usize,
}

impl Default for GalerkinOptions {
    fn default() -> Self {
        Self {
            modes: 20,
            degree: 12,
            panels: 64,
            order: 8,
        }
    }
}

/// `q_j, q_j', q_j''` for `j = 0..=k` at `y`.
pub fn legendre_basis(k: usize, ell: f64, y: f64) -> Vec<[f64; 3]> {
    let t = y / ell;
    let mut p = vec![[0.0; 3]; k + 1];
    p[0] = [1.0, 0.0, 0.0];
    if k >= 1 {
        p[1] = [t, 1.0, 0.0];
    }
    for n in 1..k {
        let nf = n as f64;
        let a = 2.0 * nf + 1.0;
        let (pn, pm) = (p[n], p[n - 1]);
        p[n + 1] = [
            (a * t * pn[0] - nf * pm[0]) / (nf + 1.0),
            (a * (pn[0] + t * pn[1]) - nf * pm[1]) / (nf + 1.0),
            (a * (2.0 * pn[1] + t * pn[2]) - nf * pm[2]) / (nf + 1.0),
        ];
    }
    p.iter()
        .enumerate()
        .map(|(j, v)| {
            let c = sqrt((2 * j + 1) as f64 / (2.0 * ell));
            [c * v[0], c * v[1] / ell, c * v[2] / (ell * ell)]
        })
        .collect()
}

/// Discrete Galerkin solution.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GalerkinSolution {
    /// Number of `x`-modes.
    pub modes: usize,
    /// Polynomial degree.
    pub degree: usize,
    /// Half-width.
    pub ell: f64,
    /// Coefficients, index `(m - 1) (degree + 1) + j`.
    pub coefficients: Vec<f64>,
}

impl GalerkinSolution {
    /// `u(x, y)`.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let q = legendre_basis(self.degree, self.ell, y);
        let k = self.degree + 1;
        (0..self.modes)
            .map(|mi| {
                let prof: f64 = (0..k)
                    .map(|j| self.coefficients[mi * k + j] * q[j][0])
                    .sum();
                prof * sin((mi + 1) as f64 * x)
            })
            .sum()
    }

    /// Gap coefficients `Y_m(ell) - Y_m(-ell)`.
    pub fn gap_series(&self) -> GapSeries {
        let k = self.degree + 1;
        let top = legendre_basis(self.degree, self.ell, self.ell);
        let bottom = legendre_basis(self.degree, self.ell, -self.ell);
        let c = (0..self.modes)
            .map(|mi| {
                (0..k)
                    .map(|j| self.coefficients[mi * k + j] * (top[j][0] - bottom[j][0]))
                    .sum()
            })
            .collect();
        GapSeries::new(c, 0.0)
    }
}

/// Diagnostics of a Galerkin solve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GalerkinReport {
    /// Number of `x`-modes.
    pub modes: usize,
    /// Polynomial degree.
    pub degree: usize,
    /// `<f, u>` at the requested basis size.
    pub energy: f64,
    /// `<f, u>` on the coarser basis `(ceil(M_x / 2), K_y - 2)`.
    pub energy_coarse: f64,
    /// `|energy - energy_coarse| / |energy|`.
    pub energy_change: f64,
    /// Elapsed time, filled in by drivers that can measure it.
    pub wall_time_s: Option<f64>,
}

/// Assembles and solves the system for one basis size; returns the
/// solution and `<f, u>`.
fn solve_level(
    resolved: &ResolvedForce,
    geom: &Geometry,
    cfg: &PlateConfig,
    grid: &YGrid,
    modes: usize,
    degree: usize,
) -> Result<(GalerkinSolution, f64)> {
    let (s, ell, d) = (cfg.sigma, cfg.ell, cfg.d);
    let k = degree + 1;
    let n = modes * k;
    let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);

    // plate form, block diagonal in m; exact Gauss rule for degree 2 K_y
    let rule = GaussRule::new(degree + 2);
    let nodes: Vec<(f64, f64)> = rule.mapped(-ell, ell).collect();
    let qs: Vec<Vec<[f64; 3]>> = nodes
        .iter()
        .map(|(y, _)| legendre_basis(degree, ell, *y))
        .collect();
    for mi in 0..modes {
        let m2 = ((mi + 1) as f64).ipow(2);
        for i in 0..k {
            for j in 0..=i {
                let mut acc = 0.0;
                for ((_, w), q) in nodes.iter().zip(&qs) {
                    let (a0, a1, a2) = (q[i][0], q[i][1], q[i][2]);
                    let (b0, b1, b2) = (q[j][0], q[j][1], q[j][2]);
                    acc += w
                        * (a2 * b2 + m2 * m2 * a0 * b0 + 2.0 * (1.0 - s) * m2 * a1 * b1
                            - s * m2 * (a0 * b2 + a2 * b0));
                }
                let v = 0.5 * PI * acc;
                a[(mi * k + i, mi * k + j)] = v;
                a[(mi * k + j, mi * k + i)] = v;
            }
        }
    }

    // stiffening form over D
    if d > 0.0 && !geom.is_empty() {
        for (&y, &w) in grid.nodes.iter().zip(&grid.weights) {
            let cs = geom.cross_section(y);
            if cs.is_empty() {
                continue;
            }
            let cm = cosine_moments(&cs, 2 * modes);
            let q = legendre_basis(degree, ell, y);
            for mi in 0..modes {
                let mf = (mi + 1) as f64;
                for ni in 0..=mi {
                    let nf = (ni + 1) as f64;
                    let ss = 0.5 * (cm[mi - ni] - cm[mi + ni + 2]);
                    let cc = 0.5 * (cm[mi - ni] + cm[mi + ni + 2]);
                    for i in 0..k {
                        let (a0, a1, a2) = (q[i][0], q[i][1], q[i][2]);
                        for j in 0..k {
                            let (b0, b1, b2) = (q[j][0], q[j][1], q[j][2]);
                            let v = (a2 - mf * mf * a0) * (b2 - nf * nf * b0) * ss
                                + (1.0 - s)
                                    * (2.0 * mf * nf * a1 * b1 * cc
                                        + (mf * mf * a0 * b2 + nf * nf * a2 * b0) * ss);
                            let (r, c) = (mi * k + i, ni * k + j);
                            a[(r, c)] += d * w * v;
                            if mi != ni {
                                a[(c, r)] += d * w * v;
                            }
                        }
                    }
                }
            }
        }
    }

    let b = load_vector(resolved, cfg, grid, modes, degree);
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::numeric("Galerkin matrix is not positive definite"))?;
    let x = chol.solve(&nalgebra::DVector::from_column_slice(&b));
    let energy: f64 = x.iter().zip(&b).map(|(u, f)| u * f).sum();
    let coefficients: Vec<f64> = x.iter().copied().collect();
    if !coefficients.iter().all(|v| v.is_finite()) {
        return Err(Error::numeric("non-finite Galerkin solution"));
    }
    Ok((
        GalerkinSolution {
            modes,
            degree,
            ell,
            coefficients,
        },
        energy,
    ))
}

fn load_vector(
    resolved: &ResolvedForce,
    cfg: &PlateConfig,
    grid: &YGrid,
    modes: usize,
    degree: usize,
) -> Vec<f64> {
    let ell = cfg.ell;
    let k = degree + 1;
    let mut b = vec![0.0; modes * k];
    let top = legendre_basis(degree, ell, ell);
    let bottom = legendre_basis(degree, ell, -ell);
    match resolved {
        ResolvedForce::Separable { g, c_g, profile } => {
            let mut moments = vec![0.0; k];
            for (&y, &w) in grid.nodes.iter().zip(&grid.weights) {
                let p = profile.value(y, *c_g, ell);
                let q = legendre_basis(degree, ell, y);
                for j in 0..k {
                    moments[j] += w * p * q[j][0];
                }
            }
            for mi in 0..modes {
                let gm = 0.5 * PI * g.sine_coefficient((mi + 1) as u32);
                for j in 0..k {
                    b[mi * k + j] = gm * moments[j];
                }
            }
        }
        ResolvedForce::EdgeTrace { g, c_g } => {
            for mi in 0..modes {
                let gm = 0.5 * PI * g.sine_coefficient((mi + 1) as u32) / (2.0 * c_g);
                for j in 0..k {
                    b[mi * k + j] = gm * (top[j][0] - bottom[j][0]);
                }
            }
        }
        ResolvedForce::DeltaPair { z, scale } => {
            for mi in 0..modes {
                let gm = 0.5 * scale * sin((mi + 1) as f64 * z);
                for j in 0..k {
                    b[mi * k + j] = gm * (top[j][0] - bottom[j][0]);
                }
            }
        }
    }
    b
}

/// Solves the plate-stiffening problem on the tensor basis and reports the
/// energy `<f, u>` at the requested and a coarser basis size.
pub fn solve_stiffened_galerkin(
    force: &Force,
    geom: &Geometry,
    cfg: &PlateConfig,
    opts: &GalerkinOptions,
) -> Result<(GalerkinSolution, GapSeries, GalerkinReport)> {
    cfg.validate()?;
    if opts.modes == 0 || opts.degree < 3 {
        return Err(Error::domain(
            "Galerkin basis needs at least one mode and degree >= 3",
        ));
    }
    let resolved = force.resolve(cfg)?;
    let (layer, kinks) = match &resolved {
        ResolvedForce::Separable { profile, .. } => (profile.boundary_layer(), profile.kinks()),
        _ => (None, &[][..]),
    };
    let mut bps = geom.y_breakpoints().to_vec();
    bps.extend_from_slice(kinks);
    let grid = YGrid::new(cfg.ell, &bps, opts.panels, opts.order, layer)?;
    let (sol, energy) = solve_level(&resolved, geom, cfg, &grid, opts.modes, opts.degree)?;
    let (_, energy_coarse) = solve_level(
        &resolved,
        geom,
        cfg,
        &grid,
        opts.modes.div_ceil(2),
        opts.degree - 2,
    )?;
    let series = sol.gap_series();
    let report = GalerkinReport {
        modes: opts.modes,
        degree: opts.degree,
        energy,
        energy_coarse,
        energy_change: if energy != 0.0 {
            fabs(energy - energy_coarse) / fabs(energy)
        } else {
            0.0
        },
        wall_time_s: None,
    };
    Ok((sol, series, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::force::{GSpec, Profile};
    use crate::geometry::{Reinforcement, TrussPreset};
    use crate::modal::{solve_weakened, ModalOptions};
    use crate::series::max_gap;

    #[test]
    fn legendre_basis_is_orthonormal() {
        let ell = 0.3;
        let rule = GaussRule::new(20);
        let k = 8;
        for i in 0..=k {
            for j in 0..=k {
                let v: f64 = rule
                    .mapped(-ell, ell)
                    .map(|(y, w)| {
                        let q = legendre_basis(k, ell, y);
                        w * q[i][0] * q[j][0]
                    })
                    .sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        // derivative check by finite differences
        let (y, h) = (0.11, 1e-5);
        let q = legendre_basis(k, ell, y);
        let (qp, qm) = (legendre_basis(k, ell, y + h), legendre_basis(k, ell, y - h));
        for j in 0..=k {
            assert!(
                ((qp[j][0] - qm[j][0]) / (2.0 * h) - q[j][1]).abs() < 1e-5 * (1.0 + q[j][1].abs())
            );
            assert!(
                ((qp[j][1] - qm[j][1]) / (2.0 * h) - q[j][2]).abs() < 1e-4 * (1.0 + q[j][2].abs())
            );
        }
    }

    #[test]
    fn without_stiffening_matches_the_modal_solver() {
        let cfg = PlateConfig::preset().with_d(0.0);
        let geom = Geometry::new(Reinforcement::cross_n(1, 0.3, 0.005), &cfg).unwrap();
        let f = Force::sine_limit(1);
        let (_, gs, _) =
            solve_stiffened_galerkin(&f, &geom, &cfg, &GalerkinOptions::default()).unwrap();
        let (_, ms, _) = solve_weakened(
            &f,
            &geom,
            &cfg,
            &ModalOptions {
                terms: 20,
                ..Default::default()
            },
        )
        .unwrap();
        let (a, b) = (max_gap(&gs).1, max_gap(&ms).1);
        assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
    }

    #[test]
    fn stiffening_never_raises_the_energy() {
        let free = PlateConfig::preset().with_d(0.0);
        let stiff = PlateConfig::preset();
        let opts = GalerkinOptions {
            modes: 8,
            degree: 8,
            panels: 32,
            order: 8,
        };
        let cases = [
            (Force::sine_limit(1), Reinforcement::cross_n(0, 0.3, 0.004)),
            (Force::sine_limit(3), Reinforcement::cross_n(2, 0.5, 0.01)),
            (
                Force::SeparableSine {
                    g: GSpec::Modes(alloc::vec![(1, 1.0), (2, -0.5)]),
                    profile: Profile::Sign,
                },
                Reinforcement::truss(TrussPreset::Strips, &stiff),
            ),
            (
                Force::DeltaPair {
                    z: 1.0,
                    normalized: false,
                },
                Reinforcement::cross_n(1, 0.3, 0.002),
            ),
            (
                Force::SeparableSine {
                    g: GSpec::sine(2),
                    profile: Profile::SinhAlpha(40.5),
                },
                Reinforcement::cross_n(3, 0.2, 0.006),
            ),
        ];
        for (f, r) in cases {
            let g0 = Geometry::new(r.clone(), &free).unwrap();
            let g1 = Geometry::new(r, &stiff).unwrap();
            let (_, _, r0) = solve_stiffened_galerkin(&f, &g0, &free, &opts).unwrap();
            let (_, _, r1) = solve_stiffened_galerkin(&f, &g1, &stiff, &opts).unwrap();
            assert!(
                r1.energy <= r0.energy * (1.0 + 1e-12),
                "{} > {}",
                r1.energy,
                r0.energy
            );
            assert!(r1.energy > 0.0);
        }
    }

    #[test]
    fn even_force_on_symmetric_reinforcement_has_zero_gap() {
        let cfg = PlateConfig::preset();
        let geom = Geometry::new(Reinforcement::cross_n(1, 0.3, 0.005), &cfg).unwrap();
        let f = Force::SeparableSine {
            g: GSpec::sine(1),
            profile: Profile::CoshAlpha(30.5),
        };
        let opts = GalerkinOptions {
            modes: 6,
            degree: 8,
            panels: 32,
            order: 8,
        };
        let (sol, s, _) = solve_stiffened_galerkin(&f, &geom, &cfg, &opts).unwrap();
        let top = sol.coefficients.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(s
            .coefficients
            .iter()
            .all(|c| c.abs() < 1e-12 * top.max(1e-300)));
    }
}
