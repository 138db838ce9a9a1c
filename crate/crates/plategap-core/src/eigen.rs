//! First torsional eigenpairs of the free-edge plate.
//!
//! For the `x`-mode `m` the odd ansatz
//! `theta(y) = a sinh(beta y) + b sin(gamma y)` with
//! `beta^2 = m^2 + sqrt(nu)` and `gamma^2 = sqrt(nu) - m^2` solves
//! `theta'''' - 2 m^2 theta'' + m^4 theta = nu theta`. The free-edge
//! conditions at `y = ell` give a 2x2 determinant in `gamma`; its smallest
//! root in `]0, pi/(2 ell)[` is the first torsional eigenvalue.

use core::f64::consts::PI;

use libm::{cos, cosh, exp, fabs, sin, sqrt, tanh};

use crate::config::PlateConfig;
use crate::error::{Error, Result};
use crate::force::Normalization;
use crate::num::IntPow;
use crate::num::{brent_root, integrate_adaptive};

/// Number of scan points used to bracket the first root.
const SCAN_POINTS: usize = 20_001;

/// First torsional eigenpair of mode `m`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TorsionalEigenpair {
    /// `x`-mode.
    pub m: u32,
    /// Eigenvalue `nu_m`.
    pub nu: f64,
    /// `sqrt(m^2 + sqrt(nu))`.
    pub beta: f64,
    /// `sqrt(sqrt(nu) - m^2)`.
    pub gamma: f64,
    /// Coefficient of `sin(gamma y)` relative to `sinh(beta y)/sinh(beta ell)`.
    pub b_coef: f64,
    /// Overall amplitude applied to the raw profile.
    pub scale: f64,
    /// Amplitude convention.
    pub normalization: Normalization,
    ell: f64,
    sigma: f64,
}

/// `tanh(sqrt(2) m ell) > sigma^2/(2 - sigma)^2 sqrt(2) m ell`.
pub fn is_admissible(m: u32, cfg: &PlateConfig) -> bool {
    let s = core::f64::consts::SQRT_2 * m as f64 * cfg.ell;
    let r = cfg.sigma * cfg.sigma / ((2.0 - cfg.sigma) * (2.0 - cfg.sigma));
    tanh(s) > r * s
}

/// Free-edge determinant divided by `gamma cosh(beta ell)`.
pub fn determinant(gamma: f64, m: u32, cfg: &PlateConfig) -> f64 {
    let (s, ell) = (cfg.sigma, cfg.ell);
    let m2 = (m as f64) * (m as f64);
    let nu_root = gamma * gamma + m2;
    let beta = sqrt(m2 + nu_root);
    let row_sinh = (beta * beta - s * m2) * tanh(beta * ell);
    let row_sin = -gamma * gamma - s * m2;
    let col_sinh = beta * beta * beta - (2.0 - s) * m2 * beta;
    let col_sin = -gamma * gamma * gamma - (2.0 - s) * m2 * gamma;
    (row_sinh * col_sin * cos(gamma * ell) - row_sin * sin(gamma * ell) * col_sinh) / gamma
}

/// First torsional eigenpair of mode `m` with the given amplitude convention.
pub fn torsional_eigenpair(
    m: u32,
    normalization: Normalization,
    cfg: &PlateConfig,
) -> Result<TorsionalEigenpair> {
    cfg.validate()?;
    if m == 0 {
        return Err(Error::domain("eigen mode must be at least 1"));
    }
    if !is_admissible(m, cfg) {
        return Err(Error::EigenvalueNotFound { m });
    }
    let gmax = PI / (2.0 * cfg.ell);
    let det = |g: f64| determinant(g, m, cfg);
    let lo = 1e-9 * gmax;
    let hi = gmax * (1.0 - 1e-12);
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut prev = (lo, det(lo));
    let mut bracket = None;
    for i in 1..SCAN_POINTS {
        let g = lo + step * i as f64;
        let v = det(g);
        if v == 0.0 || (v > 0.0) != (prev.1 > 0.0) {
            bracket = Some((prev.0, g));
            break;
        }
        prev = (g, v);
    }
    let (a, b) = bracket.ok_or(Error::EigenvalueNotFound { m })?;
    let gamma = brent_root(det, a, b, 1e-15 * gmax).ok_or(Error::EigenvalueNotFound { m })?;
    let m2 = (m as f64) * (m as f64);
    let nu_root = gamma * gamma + m2;
    let beta = sqrt(m2 + nu_root);
    let (s, ell) = (cfg.sigma, cfg.ell);
    let b_coef = -(beta * beta - s * m2) / ((-gamma * gamma - s * m2) * sin(gamma * ell));
    let mut e = TorsionalEigenpair {
        m,
        nu: nu_root * nu_root,
        beta,
        gamma,
        b_coef,
        scale: 1.0,
        normalization,
        ell,
        sigma: s,
    };
    e.scale = match normalization {
        Normalization::Raw => 1.0,
        Normalization::UnitL2 => {
            let i2 = 2.0 * integrate_adaptive(|y| e.raw(y, 0).ipow(2), 0.0, ell, 1e-16);
            1.0 / sqrt(0.5 * PI * i2)
        }
        Normalization::UnitL1 => {
            let i1 = 2.0 * integrate_adaptive(|y| fabs(e.raw(y, 0)), 0.0, ell, 1e-16);
            1.0 / (2.0 * i1)
        }
    };
    Ok(e)
}

impl TorsionalEigenpair {
    /// `k`-th derivative of `sinh(beta y)/sinh(beta ell) + b sin(gamma y)`.
    fn raw(&self, y: f64, k: u32) -> f64 {
        let (b, g, ell) = (self.beta, self.gamma, self.ell);
        // sinh(b y)/sinh(b ell) and cosh(b y)/sinh(b ell) without overflow
        let den = 1.0 - exp(-2.0 * b * ell);
        let ep = exp(b * (y - ell));
        let em = exp(-b * (y + ell));
        let hyp = if k.is_multiple_of(2) {
            (ep - em) / den
        } else {
            (ep + em) / den
        };
        let trig = match k % 4 {
            0 => sin(g * y),
            1 => cos(g * y),
            2 => -sin(g * y),
            _ => -cos(g * y),
        };
        b.ipow(k as i32) * hyp + self.b_coef * g.ipow(k as i32) * trig
    }

    /// Normalized profile `theta(y)`.
    pub fn profile(&self, y: f64) -> f64 {
        self.scale * self.raw(y, 0)
    }

    /// `k`-th derivative of the normalized profile.
    pub fn profile_derivative(&self, y: f64, k: u32) -> f64 {
        self.scale * self.raw(y, k)
    }

    /// `ebar(x, y) = sin(m x) theta(y)`.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        sin(self.m as f64 * x) * self.profile(y)
    }

    /// Relative free-edge residuals `(theta'' - sigma m^2 theta,
    /// theta''' - (2 - sigma) m^2 theta')` at `y = ell`.
    pub fn bc_residuals(&self) -> (f64, f64) {
        let m2 = (self.m as f64).ipow(2);
        let s = self.sigma;
        let y = self.ell;
        let d: [f64; 4] = core::array::from_fn(|k| self.raw(y, k as u32));
        let r1 = (d[2] - s * m2 * d[0]) / (fabs(d[2]) + fabs(s * m2 * d[0]));
        let r2 = (d[3] - (2.0 - s) * m2 * d[1]) / (fabs(d[3]) + fabs((2.0 - s) * m2 * d[1]));
        (fabs(r1), fabs(r2))
    }

    /// Relative residual of `theta'''' - 2 m^2 theta'' + m^4 theta - nu theta`
    /// at `y`.
    pub fn ode_residual(&self, y: f64) -> f64 {
        let m2 = (self.m as f64).ipow(2);
        let d4 = self.raw(y, 4);
        let d2 = self.raw(y, 2);
        let d0 = self.raw(y, 0);
        let r = d4 - 2.0 * m2 * d2 + m2 * m2 * d0 - self.nu * d0;
        let scale = fabs(d4) + fabs(2.0 * m2 * d2) + fabs(m2 * m2 * d0) + fabs(self.nu * d0);
        fabs(r) / scale.max(f64::MIN_POSITIVE)
    }

    /// `|det|` at the returned root relative to the scan endpoints.
    pub fn determinant_ratio(&self, cfg: &PlateConfig) -> f64 {
        let gmax = PI / (2.0 * self.ell);
        let at = fabs(determinant(self.gamma, self.m, cfg));
        let ends = fabs(determinant(1e-9 * gmax, self.m, cfg)).max(fabs(determinant(
            gmax * (1.0 - 1e-12),
            self.m,
            cfg,
        )));
        at / ends
    }

    /// Sanity bound used by callers: `cosh(beta ell)` stays finite.
    pub fn is_finite(&self) -> bool {
        cosh(self.beta * self.ell).is_finite() && self.nu.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_lie_in_bracket() {
        let cfg = PlateConfig::preset();
        for m in 1..=5u32 {
            let e = torsional_eigenpair(m, Normalization::UnitL2, &cfg).unwrap();
            let m4 = (m as f64).ipow(4);
            let upper = ((m * m) as f64 + PI * PI / (4.0 * cfg.ell * cfg.ell)).ipow(2);
            assert!(m4 < e.nu && e.nu < upper, "m={m} nu={}", e.nu);
        }
    }

    #[test]
    fn first_eigenvalue_value() {
        let cfg = PlateConfig::preset();
        let e = torsional_eigenpair(1, Normalization::Raw, &cfg).unwrap();
        assert!((e.nu - 10943.63).abs() < 0.01, "nu_1 = {}", e.nu);
    }

    #[test]
    fn profile_is_odd_and_satisfies_the_edge_conditions() {
        let cfg = PlateConfig::preset();
        for m in [1u32, 3, 50, 2734] {
            let e = torsional_eigenpair(m, Normalization::UnitL2, &cfg).unwrap();
            assert_eq!(e.profile(0.0), 0.0);
            let (r1, r2) = e.bc_residuals();
            assert!(r1 < 1e-10 && r2 < 1e-10, "m={m}: {r1} {r2}");
            for y in [0.3 * cfg.ell, -0.7 * cfg.ell, cfg.ell] {
                assert!(e.ode_residual(y) < 1e-8, "m={m}");
            }
            assert!(e.determinant_ratio(&cfg) < 1e-10);
        }
    }

    #[test]
    fn normalizations_are_consistent() {
        let cfg = PlateConfig::preset();
        let e2 = torsional_eigenpair(2, Normalization::UnitL2, &cfg).unwrap();
        let n2 = 0.5 * PI * integrate_adaptive(|y| e2.profile(y).ipow(2), -cfg.ell, cfg.ell, 1e-16);
        assert!((n2 - 1.0).abs() < 1e-10);
        let e1 = torsional_eigenpair(2, Normalization::UnitL1, &cfg).unwrap();
        let n1 = 2.0 * integrate_adaptive(|y| e1.profile(y).abs(), -cfg.ell, cfg.ell, 1e-16);
        assert!((n1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn admissibility_limit() {
        let cfg = PlateConfig::preset();
        assert!(is_admissible(2734, &cfg));
        assert!(!is_admissible(2735, &cfg));
        assert!(matches!(
            torsional_eigenpair(2735, Normalization::Raw, &cfg),
            Err(Error::EigenvalueNotFound { m: 2735 })
        ));
    }
}
