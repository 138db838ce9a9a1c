//! Explicit solution for the cross reinforcements `D^N` under the
//! exponential forces `K_alpha e^(alpha y) g(x)` and `R_alpha sinh(alpha y) g(x)`,
//! and its `alpha -> infinity` limits.
//!
//! On each mode `m` the solution is piecewise
//! `(A_i + C_i y) cosh(m y) + (B_i + D_i y) sinh(m y) + K_alpha e^(alpha y) gamma^i / (m^2 - alpha^2)^2`
//! over the three regions `y > eps` (`i = 1`), `|y| < eps` (`i = 2`) and
//! `y < -eps` (`i = 3`), where the force seen by the plate is `gamma_m`
//! outside the strip and `gamma_hat_m = gamma_tilde_m / (1 + d)` inside.
//!
//! All `alpha`-hyperbolics are evaluated in exponent-shifted form with
//! `E = e^(-alpha ell)`: `K sinh(alpha ell) = alpha / (2 C_g)`,
//! `K cosh(alpha ell) = alpha (1 + E^2) / (2 C_g (1 - E^2))`, and
//! `K e^(alpha eps) = (alpha / C_g) e^(-alpha (ell - eps)) / (1 - E^2)`.
//! The junction amplitude is `a = K e^(alpha eps) (gamma_hat - gamma) / (m^2 - alpha^2)^2`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cosh, exp, fabs, sinh};

use crate::config::PlateConfig;
use crate::error::{Error, Result};
use crate::force::{check_alpha, GSpec};
use crate::geometry::{Geometry, Reinforcement};
use crate::num::IntPow;
use crate::series::{upsilon, upsilon_tail_bound, GapSeries};

/// Guard on `|m^2 - alpha^2|`.
pub const RESONANCE_GUARD: f64 = 1e-8;
/// Largest admissible `m ell` for the direct `m`-hyperbolics.
pub const MAX_M_ELL: f64 = 350.0;

/// Cross data the analytic formulas need: the vertical arm intervals
/// `I^N`, the strip half-width and the effective stiffening strength.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossData {
    /// Vertical arm intervals.
    pub arms: Vec<(f64, f64)>,
    /// Strip half-width (irrelevant when `d = 0`).
    pub eps: f64,
    /// Effective `d`; zero for the empty plate.
    pub d: f64,
}

impl CrossData {
    /// Arms of `D^N` with parameters `(N, mu, eps)`.
    pub fn symmetric(n: u32, mu: f64, eps: f64, d: f64) -> Self {
        let mut arms = Vec::new();
        if mu > 0.0 {
            let half = mu / (2 * n + 1) as f64;
            for i in 1..=2 * n + 1 {
                let c = PI * i as f64 / (2 * n + 2) as f64;
                arms.push((c - half, c + half));
            }
        }
        Self { arms, eps, d }
    }

    /// Cross data of a geometry, which must be empty or a `D^N`.
    pub fn from_geometry(geom: &Geometry, cfg: &PlateConfig) -> Result<Self> {
        match geom.reinforcement() {
            Reinforcement::Empty => Ok(Self {
                arms: Vec::new(),
                eps: 0.5 * cfg.ell,
                d: 0.0,
            }),
            Reinforcement::SymmetricCrossN { n, mu, eps } => {
                Ok(Self::symmetric(*n, *mu, *eps, cfg.d))
            }
            other => Err(Error::precondition(alloc::format!(
                "analytic cross formulas need an empty plate or a D^N cross, got {}",
                other.label()
            ))),
        }
    }

    /// `1 / (1 + d chi_{I^N}(x))`.
    pub fn weakening(&self, x: f64) -> f64 {
        if self.arms.iter().any(|&(a, b)| x > a && x < b) {
            1.0 / (1.0 + self.d)
        } else {
            1.0
        }
    }
}

/// `gamma_tilde_m = (2/pi) int g sin(m x)`.
pub fn gamma_tilde(g: &GSpec, m: u32) -> f64 {
    g.sine_coefficient(m)
}

/// `gamma_m = gamma_tilde_m - 2d/(pi(1+d)) sum_I int_I g sin(m x)`, the sine
/// coefficients of `g / (1 + d chi_{I^N})`.
pub fn gamma_m(g: &GSpec, m: u32, cross: &CrossData) -> f64 {
    let base = gamma_tilde(g, m);
    if cross.d == 0.0 || cross.arms.is_empty() {
        return base;
    }
    let corr: f64 = cross
        .arms
        .iter()
        .map(|&(a, b)| g.interval_sine_integral(m, a, b))
        .sum();
    base - 2.0 * cross.d / (PI * (1.0 + cross.d)) * corr
}

/// The full constant stack of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeConstants {
    /// Mode.
    pub m: u32,
    /// Exponential rate.
    pub alpha: f64,
    /// `int |g|`.
    pub c_g: f64,
    /// `K_alpha` (underflows to 0 for huge `alpha ell`).
    pub k_alpha: f64,
    /// `R_alpha`.
    pub r_alpha: f64,
    /// `R_alpha / K_alpha = (1 + E) / (1 - E)`.
    pub r_over_k: f64,
    /// Force outside the strip.
    pub gamma: f64,
    /// Force inside the strip.
    pub gamma_hat: f64,
    /// `(sigma m^2 - alpha^2) / (m^2 - alpha^2)^2`.
    pub zeta1: f64,
    /// `((2 - sigma) m^2 - alpha^2) / (m^2 - alpha^2)^2`.
    pub zeta2: f64,
    /// `F_1..F_4` at `eps`.
    pub f_plus: [f64; 4],
    /// `F_1..F_4` at `-eps`.
    pub f_minus: [f64; 4],
    /// `F_i(eps) + e^(-2 alpha eps) F_i(-eps)`.
    pub fpm_plus: [f64; 4],
    /// `F_i(eps) - e^(-2 alpha eps) F_i(-eps)`.
    pub fpm_minus: [f64; 4],
    /// Junction amplitude `a`.
    pub a: f64,
    /// `G_1..G_4`.
    pub g_consts: [f64; 4],
    /// `[A_i, B_i, C_i, D_i]` for regions 1, 2, 3.
    pub regions: [[f64; 4]; 3],
    eps: f64,
    ell: f64,
    sigma: f64,
    /// `alpha / C_g / (1 - E^2)`, the shifted particular amplitude.
    part_amp: f64,
}

fn f_consts(m: f64, al: f64, e: f64) -> [f64; 4] {
    let (ch, sh) = (cosh(m * e), sinh(m * e));
    let (m2, m3, al2) = (m * m, m * m * m, al * al);
    let f1 = (al * (al2 - 3.0 * m2) * sh + 2.0 * m3 * ch) / (2.0 * m3)
        + (al2 - m2) * (m * sh - al * ch) / (2.0 * m2) * e;
    let f2 = -(al * (al2 - 3.0 * m2) * ch + 2.0 * m3 * sh) / (2.0 * m3)
        - (al2 - m2) * (m * ch - al * sh) / (2.0 * m2) * e;
    let f3 = (al2 - m2) * (al * ch - m * sh) / (2.0 * m2);
    let f4 = -(al2 - m2) * (al * sh - m * ch) / (2.0 * m2);
    [f1, f2, f3, f4]
}

/// Computes the constant stack for explicit `gamma`, `gamma_hat` and `C_g`.
pub fn mode_constants_raw(
    m: u32,
    alpha: f64,
    gamma: f64,
    gamma_hat: f64,
    c_g: f64,
    eps: f64,
    cfg: &PlateConfig,
) -> Result<ModeConstants> {
    if m == 0 {
        return Err(Error::domain("mode must be at least 1"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(alloc::format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(eps > 0.0 && eps < cfg.ell) {
        return Err(Error::domain(alloc::format!(
            "eps = {eps} must lie in ]0, ell["
        )));
    }
    let mf = m as f64;
    let (s, l) = (cfg.sigma, cfg.ell);
    if mf * l > MAX_M_ELL {
        return Err(Error::domain(alloc::format!(
            "m ell = {} exceeds {MAX_M_ELL}",
            mf * l
        )));
    }
    let m2 = mf * mf;
    let diff = m2 - alpha * alpha;
    if fabs(diff) < RESONANCE_GUARD {
        return Err(Error::NearResonance { m, alpha });
    }
    let d2 = diff * diff;
    let e = exp(-alpha * l);
    let ks = alpha / (2.0 * c_g);
    let kc = ks * (1.0 + e * e) / (1.0 - e * e);
    let k_alpha = ks / sinh(alpha * l);
    let r_over_k = (1.0 + e) / (1.0 - e);
    let r_alpha = alpha / (2.0 * c_g) * 2.0 * e / ((1.0 - e) * (1.0 - e));
    let part_amp = alpha / c_g / (1.0 - e * e);
    let k_e_eps = part_amp * exp(-alpha * (l - eps));
    let a = k_e_eps * (gamma_hat - gamma) / d2;

    let fp = f_consts(mf, alpha, eps);
    let fm = f_consts(mf, alpha, -eps);
    let q = exp(-2.0 * alpha * eps);
    let p: [f64; 4] = core::array::from_fn(|i| fp[i] + q * fm[i]);
    let mm: [f64; 4] = core::array::from_fn(|i| fp[i] - q * fm[i]);

    let (c, sh) = (cosh(mf * l), sinh(mf * l));
    let ml = mf * l;
    let g1 = -a / 2.0
        * ((1.0 - s) * m2 * c * p[0]
            + mf * (2.0 * c + (1.0 - s) * ml * sh) * p[3]
            + (1.0 - s) * m2 * sh * mm[1]
            + mf * (2.0 * sh + (1.0 - s) * ml * c) * mm[2]);
    let g2 = a / 2.0
        * ((1.0 - s) * m2 * mf * c * mm[1] - m2 * ((1.0 + s) * c - (1.0 - s) * ml * sh) * mm[2]
            + (1.0 - s) * m2 * mf * sh * p[0]
            - m2 * ((1.0 + s) * sh - (1.0 - s) * ml * c) * p[3]);
    let g3 = -a / 2.0
        * ((1.0 - s) * m2 * c * mm[0]
            + mf * (2.0 * c + (1.0 - s) * ml * sh) * mm[3]
            + (1.0 - s) * m2 * sh * p[1]
            + mf * (2.0 * sh + (1.0 - s) * ml * c) * p[2]);
    let g4 = a / 2.0
        * ((1.0 - s) * m2 * mf * c * p[1] - m2 * ((1.0 + s) * c - (1.0 - s) * ml * sh) * p[2]
            + (1.0 - s) * m2 * mf * sh * mm[0]
            - m2 * ((1.0 + s) * sh - (1.0 - s) * ml * c) * mm[3]);

    let z1 = (s * m2 - alpha * alpha) / d2;
    let z2 = ((2.0 - s) * m2 - alpha * alpha) / d2;
    let c2 = (mf * c * (ks * gamma * z1 + g3) + sh * (alpha * kc * gamma * z2 + g4))
        / (m2 * ((3.0 + s) * sh * c + (1.0 - s) * ml));
    let dd2 = (mf * sh * (kc * gamma * z1 + g1) + c * (alpha * ks * gamma * z2 + g2))
        / (m2 * ((3.0 + s) * sh * c - (1.0 - s) * ml));
    let a2 = (dd2 * m2 * ((1.0 + s) * sh - (1.0 - s) * ml * c) - alpha * ks * gamma * z2 - g2)
        / ((1.0 - s) * m2 * mf * sh);
    let b2 = (c2 * m2 * ((1.0 + s) * c - (1.0 - s) * ml * sh) - alpha * kc * gamma * z2 - g4)
        / ((1.0 - s) * m2 * mf * c);
    let r2 = [a2, b2, c2, dd2];
    let r1: [f64; 4] = core::array::from_fn(|i| r2[i] + a * fp[i]);
    let r3: [f64; 4] = core::array::from_fn(|i| r2[i] + a * q * fm[i]);
    let out = ModeConstants {
        m,
        alpha,
        c_g,
        k_alpha,
        r_alpha,
        r_over_k,
        gamma,
        gamma_hat,
        zeta1: z1,
        zeta2: z2,
        f_plus: fp,
        f_minus: fm,
        fpm_plus: p,
        fpm_minus: mm,
        a,
        g_consts: [g1, g2, g3, g4],
        regions: [r1, r2, r3],
        eps,
        ell: l,
        sigma: s,
        part_amp,
    };
    if out.regions.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::numeric(alloc::format!(
            "non-finite constants for m = {m}, alpha = {alpha}"
        )));
    }
    Ok(out)
}

/// Constant stack of mode `m` for `g` and the cross `cross`.
pub fn mode_constants(
    m: u32,
    alpha: f64,
    g: &GSpec,
    cross: &CrossData,
    cfg: &PlateConfig,
) -> Result<ModeConstants> {
    check_alpha(alpha)?;
    mode_constants_with(m, alpha, g, g.c_g(), cross, cfg)
}

/// [`mode_constants`] with `C_g` supplied, so series builders integrate
/// `|g|` once instead of once per mode.
fn mode_constants_with(
    m: u32,
    alpha: f64,
    g: &GSpec,
    c_g: f64,
    cross: &CrossData,
    cfg: &PlateConfig,
) -> Result<ModeConstants> {
    let gt = gamma_tilde(g, m);
    let gam = gamma_m(g, m, cross);
    mode_constants_raw(m, alpha, gam, gt / (1.0 + cross.d), c_g, cross.eps, cfg)
}

impl ModeConstants {
    /// Region index (0, 1, 2) of `y`.
    pub fn region(&self, y: f64) -> usize {
        if y > self.eps {
            0
        } else if y >= -self.eps {
            1
        } else {
            2
        }
    }

    /// `k`-th derivative of the mode profile of the exponential force in
    /// region `r` (0-based) at `y`.
    pub fn profile_in_region(&self, r: usize, y: f64, k: u32) -> f64 {
        let m = self.m as f64;
        let [a, b, c, d] = self.regions[r];
        let (ch, sh) = (cosh(m * y), sinh(m * y));
        let pick = |j: u32, even: f64, odd: f64| if j.is_multiple_of(2) { even } else { odd };
        let mk = m.ipow(k as i32);
        let cosh_k = mk * pick(k, ch, sh);
        let sinh_k = mk * pick(k, sh, ch);
        let (ycosh_k, ysinh_k) = if k == 0 {
            (y * ch, y * sh)
        } else {
            let mk1 = m.ipow(k as i32 - 1);
            (
                y * cosh_k + k as f64 * mk1 * pick(k - 1, ch, sh),
                y * sinh_k + k as f64 * mk1 * pick(k - 1, sh, ch),
            )
        };
        let force = if r == 1 { self.gamma_hat } else { self.gamma };
        let diff = m * m - self.alpha * self.alpha;
        let part =
            self.alpha.ipow(k as i32) * self.part_amp * exp(self.alpha * (y - self.ell)) * force
                / (diff * diff);
        a * cosh_k + b * sinh_k + c * ycosh_k + d * ysinh_k + part
    }

    /// `k`-th derivative of the mode profile at `y`.
    pub fn profile(&self, y: f64, k: u32) -> f64 {
        self.profile_in_region(self.region(y), y, k)
    }

    /// Gap coefficient of the exponential force.
    pub fn xi(&self) -> f64 {
        let m = self.m as f64;
        let l = self.ell;
        let (c, s) = (cosh(m * l), sinh(m * l));
        let [a1, b1, c1, d1] = self.regions[0];
        let [a3, b3, c3, d3] = self.regions[2];
        let diff = m * m - self.alpha * self.alpha;
        (a1 - a3) * c
            + (b1 + b3) * s
            + (c1 + c3) * l * c
            + (d1 - d3) * l * s
            + self.alpha * self.gamma / (self.c_g * diff * diff)
    }

    /// Gap coefficient of the sinh force, `(R_alpha / K_alpha) xi`.
    pub fn beta(&self) -> f64 {
        self.r_over_k * self.xi()
    }

    /// Free-edge residuals `(Y'' - sigma m^2 Y, Y''' - (2 - sigma) m^2 Y')`
    /// at `y`, each relative to the size of its terms.
    pub fn edge_residuals(&self, y: f64) -> (f64, f64) {
        let m2 = (self.m as f64).ipow(2);
        let s = self.sigma;
        let d: [f64; 4] = core::array::from_fn(|k| self.profile(y, k as u32));
        let r1 = fabs(d[2] - s * m2 * d[0]) / (fabs(d[2]) + fabs(s * m2 * d[0]));
        let r2 = fabs(d[3] - (2.0 - s) * m2 * d[1]) / (fabs(d[3]) + fabs((2.0 - s) * m2 * d[1]));
        (r1, r2)
    }

    /// Relative mismatch of values and first three derivatives across
    /// `y = eps` and `y = -eps`.
    pub fn junction_mismatch(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (ra, rb, y) in [(0usize, 1usize, self.eps), (1, 2, -self.eps)] {
            for k in 0..4 {
                let (u, v) = (
                    self.profile_in_region(ra, y, k),
                    self.profile_in_region(rb, y, k),
                );
                let scale = fabs(u).max(fabs(v)).max(f64::MIN_POSITIVE);
                worst = worst.max(fabs(u - v) / scale);
            }
        }
        worst
    }

    /// Relative residual of `Y'''' - 2 m^2 Y'' + m^4 Y - rhs` at `y`.
    pub fn ode_residual(&self, y: f64) -> f64 {
        let m2 = (self.m as f64).ipow(2);
        let r = self.region(y);
        let force = if r == 1 { self.gamma_hat } else { self.gamma };
        let rhs = self.part_amp * exp(self.alpha * (y - self.ell)) * force;
        let d4 = self.profile(y, 4);
        let d2 = self.profile(y, 2);
        let d0 = self.profile(y, 0);
        let scale = fabs(d4) + fabs(2.0 * m2 * d2) + fabs(m2 * m2 * d0) + fabs(rhs);
        fabs(d4 - 2.0 * m2 * d2 + m2 * m2 * d0 - rhs) / scale.max(f64::MIN_POSITIVE)
    }
}

/// The constant stack evaluated literally with unshifted hyperbolics, for
/// cross-checking the shifted form where nothing overflows. Returns
/// `(xi, [A_i, B_i, C_i, D_i] for the three regions)`.
pub fn mode_constants_naive(
    m: u32,
    alpha: f64,
    gamma: f64,
    gamma_hat: f64,
    c_g: f64,
    eps: f64,
    cfg: &PlateConfig,
) -> (f64, [[f64; 4]; 3]) {
    let mf = m as f64;
    let (s, l, al) = (cfg.sigma, cfg.ell, alpha);
    let m2 = mf * mf;
    let k = al / (2.0 * c_g * sinh(al * l));
    let diff = m2 - al * al;
    let d2 = diff * diff;
    let a = k * exp(al * eps) * (gamma_hat - gamma) / d2;
    let fp = f_consts(mf, al, eps);
    let fm = f_consts(mf, al, -eps);
    let q = exp(-2.0 * al * eps);
    let p: [f64; 4] = core::array::from_fn(|i| fp[i] + q * fm[i]);
    let mm: [f64; 4] = core::array::from_fn(|i| fp[i] - q * fm[i]);
    let (c, sh) = (cosh(mf * l), sinh(mf * l));
    let ml = mf * l;
    let g1 = -a / 2.0
        * ((1.0 - s) * m2 * c * p[0]
            + mf * (2.0 * c + (1.0 - s) * ml * sh) * p[3]
            + (1.0 - s) * m2 * sh * mm[1]
            + mf * (2.0 * sh + (1.0 - s) * ml * c) * mm[2]);
    let g2 = a / 2.0
        * ((1.0 - s) * m2 * mf * c * mm[1] - m2 * ((1.0 + s) * c - (1.0 - s) * ml * sh) * mm[2]
            + (1.0 - s) * m2 * mf * sh * p[0]
            - m2 * ((1.0 + s) * sh - (1.0 - s) * ml * c) * p[3]);
    let g3 = -a / 2.0
        * ((1.0 - s) * m2 * c * mm[0]
            + mf * (2.0 * c + (1.0 - s) * ml * sh) * mm[3]
            + (1.0 - s) * m2 * sh * p[1]
            + mf * (2.0 * sh + (1.0 - s) * ml * c) * p[2]);
    let g4 = a / 2.0
        * ((1.0 - s) * m2 * mf * c * p[1] - m2 * ((1.0 + s) * c - (1.0 - s) * ml * sh) * p[2]
            + (1.0 - s) * m2 * mf * sh * mm[0]
            - m2 * ((1.0 + s) * sh - (1.0 - s) * ml * c) * mm[3]);
    let z1 = (s * m2 - al * al) / d2;
    let z2 = ((2.0 - s) * m2 - al * al) / d2;
    let (sa, ca) = (sinh(al * l), cosh(al * l));
    let c2 = (mf * c * (k * gamma * z1 * sa + g3) + sh * (al * k * gamma * z2 * ca + g4))
        / (m2 * ((3.0 + s) * sh * c + (1.0 - s) * ml));
    let dd2 = (mf * sh * (k * gamma * z1 * ca + g1) + c * (al * k * gamma * z2 * sa + g2))
        / (m2 * ((3.0 + s) * sh * c - (1.0 - s) * ml));
    let a2 = (dd2 * m2 * ((1.0 + s) * sh - (1.0 - s) * ml * c) - al * k * gamma * z2 * sa - g2)
        / ((1.0 - s) * m2 * mf * sh);
    let b2 = (c2 * m2 * ((1.0 + s) * c - (1.0 - s) * ml * sh) - al * k * gamma * z2 * ca - g4)
        / ((1.0 - s) * m2 * mf * c);
    let r2 = [a2, b2, c2, dd2];
    let r1: [f64; 4] = core::array::from_fn(|i| r2[i] + a * fp[i]);
    let r3: [f64; 4] = core::array::from_fn(|i| r2[i] + a * q * fm[i]);
    let xi = (r1[0] - r3[0]) * c
        + (r1[1] + r3[1]) * sh
        + (r1[2] + r3[2]) * l * c
        + (r1[3] - r3[3]) * l * sh
        + k * gamma * (exp(al * l) - exp(-al * l)) / d2;
    (xi, [r1, r2, r3])
}

/// `xi_m(alpha)` for `g` and `cross`.
pub fn xi_m(m: u32, alpha: f64, g: &GSpec, cross: &CrossData, cfg: &PlateConfig) -> Result<f64> {
    Ok(mode_constants(m, alpha, g, cross, cfg)?.xi())
}

/// `beta_m(alpha) = (R_alpha / K_alpha) xi_m(alpha)`.
pub fn beta_m(m: u32, alpha: f64, g: &GSpec, cross: &CrossData, cfg: &PlateConfig) -> Result<f64> {
    Ok(mode_constants(m, alpha, g, cross, cfg)?.beta())
}

/// `beta_bar_m = 2 gamma_m Upsilon_m / (C_g (1 - sigma))`.
pub fn beta_bar(m: u32, g: &GSpec, cross: &CrossData, cfg: &PlateConfig) -> Result<f64> {
    beta_bar_with(m, g, g.c_g(), cross, cfg)
}

fn beta_bar_with(m: u32, g: &GSpec, c_g: f64, cross: &CrossData, cfg: &PlateConfig) -> Result<f64> {
    Ok(2.0 * gamma_m(g, m, cross) * upsilon(m, cfg)? / (c_g * (1.0 - cfg.sigma)))
}

/// `omega_bar_m`, the first-order coefficient of
/// `beta_m(alpha) = beta_bar_m - omega_bar_m / alpha + o(1/alpha)`.
pub fn omega_bar(m: u32, g: &GSpec, cross: &CrossData, cfg: &PlateConfig) -> Result<f64> {
    let (s, l) = (cfg.sigma, cfg.ell);
    let mf = m as f64;
    let x = mf * l;
    // (1+sigma) S C + (1-sigma) m ell over (3+sigma) S C + (1-sigma) m ell, divided by cosh^2
    let t = libm::tanh(x);
    let sech2 = 1.0 / (cosh(x) * cosh(x));
    let num = (1.0 + s) * t + (1.0 - s) * x * sech2;
    let den = (3.0 + s) * t + (1.0 - s) * x * sech2;
    Ok(gamma_m(g, m, cross) / g.c_g() * num / ((1.0 - s) * mf * mf * den))
}

/// Limit gap series `c_m = beta_bar_m`, `m = 1..=terms`.
pub fn limit_gap(
    g: &GSpec,
    cross: &CrossData,
    cfg: &PlateConfig,
    terms: usize,
) -> Result<GapSeries> {
    g.validate()?;
    let c_g = g.c_g();
    let coefficients = (1..=terms as u32)
        .map(|m| beta_bar_with(m, g, c_g, cross, cfg))
        .collect::<Result<Vec<_>>>()?;
    // |gamma_m| <= 2 C_g / pi
    let tail = 4.0 / (PI * (1.0 - cfg.sigma)) * upsilon_tail_bound(terms, cfg);
    Ok(GapSeries::new(coefficients, tail))
}

/// Gap series of the finite-`alpha` sinh force, `c_m = beta_m(alpha)`.
pub fn sinh_gap(
    g: &GSpec,
    alpha: f64,
    cross: &CrossData,
    cfg: &PlateConfig,
    terms: usize,
) -> Result<GapSeries> {
    g.validate()?;
    check_alpha(alpha)?;
    let c_g = g.c_g();
    let coefficients = (1..=terms as u32)
        .map(|m| Ok(mode_constants_with(m, alpha, g, c_g, cross, cfg)?.beta()))
        .collect::<Result<Vec<_>>>()?;
    let tail = 4.0 / (PI * (1.0 - cfg.sigma)) * upsilon_tail_bound(terms, cfg);
    Ok(GapSeries::new(coefficients, tail))
}

/// `w(x, y)` of the exponential force summed over `m = 1..=terms`.
pub fn w_eval(
    x: f64,
    y: f64,
    alpha: f64,
    g: &GSpec,
    cross: &CrossData,
    cfg: &PlateConfig,
    terms: usize,
) -> Result<f64> {
    let mut s = crate::num::NeumaierSum::new();
    for m in 1..=terms as u32 {
        let mc = mode_constants(m, alpha, g, cross, cfg)?;
        s.add(mc.profile(y, 0) * libm::sin(m as f64 * x));
    }
    Ok(s.value())
}

/// The `alpha -> infinity` limit of the exponential force: the edge
/// functional `v -> int g / (C_g (1 + d chi_{I^N})) v(x, ell) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitTrace {
    /// `x`-factor.
    pub g: GSpec,
    /// `int |g|`.
    pub c_g: f64,
    /// Cross data.
    pub cross: CrossData,
}

impl LimitTrace {
    /// Weight of the trace on `y = ell`.
    pub fn weight(&self, x: f64) -> f64 {
        self.g.value(x) / self.c_g * self.cross.weakening(x)
    }

    /// Weight of the odd part: half on `y = ell`, minus half on `y = -ell`.
    pub fn odd_weight(&self, x: f64) -> f64 {
        0.5 * self.weight(x)
    }

    /// `(x_j, weight)` at `n + 1` uniform points.
    pub fn sampled(&self, n: usize) -> Vec<(f64, f64)> {
        (0..=n)
            .map(|j| {
                let x = j as f64 * PI / n as f64;
                (x, self.weight(x))
            })
            .collect()
    }

    /// `int_0^pi weight(x) sin(m x) dx = (pi / 2) gamma_m / C_g`, closed form.
    pub fn sine_moment(&self, m: u32) -> f64 {
        0.5 * PI * gamma_m(&self.g, m, &self.cross) / self.c_g
    }
}

/// The limit trace of the exponential force with `g` on `cross`.
pub fn limit_force_trace(g: &GSpec, cross: &CrossData) -> Result<LimitTrace> {
    g.validate()?;
    Ok(LimitTrace {
        g: g.clone(),
        c_g: g.c_g(),
        cross: cross.clone(),
    })
}

/// Gap series of the smeared delta
/// `chi_[z - eta, z + eta](x) R_alpha sinh(alpha y)` on the free plate.
pub fn smeared_delta_gap(
    z: f64,
    eta: f64,
    alpha: f64,
    cfg: &PlateConfig,
    terms: usize,
) -> Result<GapSeries> {
    crate::force::Force::SmearedDelta { z, eta, alpha }.validate()?;
    let c_g = 2.0 * eta;
    let coefficients = (1..=terms as u32)
        .map(|m| {
            let mf = m as f64;
            let gt = 4.0 * libm::sin(mf * z) * libm::sin(mf * eta) / (PI * mf);
            mode_constants_raw(m, alpha, gt, gt, c_g, 0.5 * cfg.ell, cfg).map(|c| c.beta())
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = 4.0 / (PI * (1.0 - cfg.sigma)) * upsilon_tail_bound(terms, cfg) / c_g.min(1.0);
    Ok(GapSeries::new(coefficients, tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::integrate_adaptive;
    use crate::series::{max_gap, upsilon_bar};

    fn cfg() -> PlateConfig {
        PlateConfig::preset()
    }

    #[test]
    fn gamma_reduces_without_arms_or_stiffening() {
        let c = cfg();
        let g = GSpec::sine(3);
        let none = CrossData::symmetric(1, 0.0, 0.01, 2.0);
        assert_eq!(gamma_m(&g, 3, &none), 1.0);
        assert_eq!(gamma_m(&g, 2, &none), 0.0);
        let soft = CrossData::symmetric(1, 0.3, 0.01, 0.0);
        let g2 = GSpec::Modes(alloc::vec![(1, 0.5), (4, 2.0)]);
        for m in 1..8 {
            assert_eq!(gamma_m(&g2, m, &soft), gamma_tilde(&g2, m));
        }
        let _ = c;
    }

    #[test]
    fn gamma_closed_form_matches_quadrature() {
        let cross = CrossData::symmetric(1, 0.3, 0.01, 2.0);
        let g = GSpec::sine(7);
        for m in [1u32, 7, 9] {
            let mut quad = 0.0;
            let mut edges: Vec<f64> = alloc::vec![0.0, PI];
            for (a, b) in &cross.arms {
                edges.push(*a);
                edges.push(*b);
            }
            edges.sort_by(f64::total_cmp);
            for w in edges.windows(2) {
                quad += integrate_adaptive(
                    |x| g.value(x) * cross.weakening(x) * libm::sin(m as f64 * x),
                    w[0],
                    w[1],
                    1e-14,
                );
            }
            quad *= 2.0 / PI;
            assert!((gamma_m(&g, m, &cross) - quad).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_stiffening_removes_junction_terms() {
        let c = cfg().with_d(0.0);
        let cross = CrossData::symmetric(2, 0.3, 0.01, 0.0);
        let mc = mode_constants(3, 40.5, &GSpec::sine(3), &cross, &c).unwrap();
        assert_eq!(mc.a, 0.0);
        assert_eq!(mc.g_consts, [0.0; 4]);
        assert_eq!(mc.regions[0], mc.regions[1]);
        assert_eq!(mc.regions[2], mc.regions[1]);
    }

    #[test]
    fn junction_and_edge_conditions_hold() {
        let c = cfg();
        for (n, mu) in [(0u32, 0.3), (2, 0.5)] {
            let cross = CrossData::symmetric(n, mu, 0.01, c.d);
            for &alpha in &[10.5, 200.5, 3000.5] {
                for m in [1u32, 2, 5, 40] {
                    let mc = mode_constants(m, alpha, &GSpec::sine(1), &cross, &c).unwrap();
                    if mc.gamma == 0.0 && mc.gamma_hat == 0.0 {
                        continue;
                    }
                    assert!(
                        mc.junction_mismatch() < 1e-8,
                        "m={m} alpha={alpha}: {}",
                        mc.junction_mismatch()
                    );
                    for y in [c.ell, -c.ell] {
                        let (r1, r2) = mc.edge_residuals(y);
                        assert!(r1 < 1e-8 && r2 < 1e-8, "m={m} alpha={alpha}: {r1} {r2}");
                    }
                    for y in [0.5 * c.ell, 0.004, -0.004, -0.8 * c.ell] {
                        assert!(mc.ode_residual(y) < 1e-8, "m={m} alpha={alpha} y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn shifted_and_naive_stacks_agree() {
        let c = cfg();
        for &(m, alpha) in &[(1u32, 10.5), (3, 50.5), (7, 1000.5), (40, 20000.5)] {
            let (gam, gh) = (0.8, 0.5);
            let mc = mode_constants_raw(m, alpha, gam, gh, 2.0, 0.01, &c).unwrap();
            let (xi, regs) = mode_constants_naive(m, alpha, gam, gh, 2.0, 0.01, &c);
            assert!(
                (mc.xi() - xi).abs() <= 1e-12 * xi.abs(),
                "m={m} alpha={alpha}"
            );
            for r in 0..3 {
                for j in 0..4 {
                    let (u, v) = (mc.regions[r][j], regs[r][j]);
                    assert!(
                        (u - v).abs() <= 1e-12 * v.abs().max(1e-300),
                        "m={m} alpha={alpha}"
                    );
                }
            }
        }
    }

    #[test]
    fn near_resonance_is_reported() {
        let c = cfg();
        let r = mode_constants_raw(3, 3.0 + 1e-12, 1.0, 1.0, 2.0, 0.01, &c);
        assert!(matches!(r, Err(Error::NearResonance { m: 3, .. })));
    }

    #[test]
    fn r_over_k_expansion() {
        let c = cfg();
        let mc = mode_constants_raw(1, 1000.5, 1.0, 1.0, 2.0, 0.01, &c).unwrap();
        let e = exp(-1000.5 * c.ell);
        assert!(((mc.r_over_k - 1.0) / (2.0 * e) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn limit_of_sine_force_on_free_plate() {
        let c = cfg();
        let empty = CrossData::symmetric(0, 0.0, 0.01, 0.0);
        for n in 1..=5u32 {
            let bb = beta_bar(n, &GSpec::sine(n), &empty, &c).unwrap();
            assert!((bb - upsilon_bar(n, &c).unwrap()).abs() < 1e-16);
        }
        let s = limit_gap(&GSpec::sine(1), &empty, &c, 250).unwrap();
        assert!((max_gap(&s).1 * 1e4 - 65.444).abs() < 5e-4);
        let large = sinh_gap(&GSpec::sine(1), 1e5 + 0.5, &empty, &c, 5).unwrap();
        assert!((large.coefficients[0] / upsilon_bar(1, &c).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn beta_bar_is_scale_invariant() {
        let c = cfg();
        let cross = CrossData::symmetric(1, 0.3, 0.01, c.d);
        let g = GSpec::Modes(alloc::vec![(1, 1.0), (3, 0.4)]);
        let g5 = GSpec::Modes(alloc::vec![(1, 5.0), (3, 2.0)]);
        let top = beta_bar(1, &g, &cross, &c).unwrap().abs();
        for m in 1..10 {
            let (a, b) = (
                beta_bar(m, &g, &cross, &c).unwrap(),
                beta_bar(m, &g5, &cross, &c).unwrap(),
            );
            assert!((a - b).abs() <= 1e-10 * top, "m={m}: {a} {b}");
        }
    }

    #[test]
    fn omega_bar_has_the_sign_of_gamma() {
        let c = cfg();
        let cross = CrossData::symmetric(0, 0.3, 0.01, c.d);
        for n in 1..=3 {
            for m in 1..=10 {
                let g = GSpec::sine(n);
                let gm = gamma_m(&g, m, &cross);
                if gm.abs() < 1e-14 {
                    continue;
                }
                assert!(omega_bar(m, &g, &cross, &c).unwrap() / gm > 0.0);
            }
        }
    }

    #[test]
    fn limit_trace_moments() {
        let cross = CrossData::symmetric(1, 0.3, 0.01, 2.0);
        let t = limit_force_trace(&GSpec::sine(2), &cross).unwrap();
        let mut edges: Vec<f64> = alloc::vec![0.0, PI];
        for (a, b) in &cross.arms {
            edges.push(*a);
            edges.push(*b);
        }
        edges.sort_by(f64::total_cmp);
        for m in [1u32, 2, 3] {
            let quad: f64 = edges
                .windows(2)
                .map(|w| {
                    integrate_adaptive(|x| t.weight(x) * libm::sin(m as f64 * x), w[0], w[1], 1e-14)
                })
                .sum();
            assert!((quad - t.sine_moment(m)).abs() < 1e-10);
        }
        let free =
            limit_force_trace(&GSpec::sine(2), &CrossData::symmetric(0, 0.0, 0.01, 0.0)).unwrap();
        assert!((free.weight(0.3) - libm::sin(0.6) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn smeared_delta_approaches_delta_coefficients() {
        let c = cfg();
        let z = 1.1;
        let s = smeared_delta_gap(z, 1e-4, 1e6 + 0.5, &c, 20).unwrap();
        let d = crate::series::delta_gap(z, 20, &c).unwrap();
        for m in 0..20 {
            assert!((s.coefficients[m] - d.coefficients[m]).abs() < 1e-4 * d.coefficients[0].abs());
        }
    }
}
