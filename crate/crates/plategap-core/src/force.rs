//! Force descriptors.
//!
//! Most forces are separable, `f(x, y) = g(x) p(y)`. The exponential
//! profiles carry the normalizations `K_alpha = alpha / (2 C_g sinh(alpha ell))`
//! and `R_alpha = alpha / (2 C_g (cosh(alpha ell) - 1))` with
//! `C_g = int_0^pi |g|`, so that their `alpha -> infinity` limits are boundary
//! traces of unit mass. Those traces, and the Dirac pairs `T_z`, are not
//! pointwise functions; solvers handle them through the free-edge
//! conditions.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, exp, fabs, round, sin};

use crate::config::PlateConfig;
use crate::eigen::{torsional_eigenpair, TorsionalEigenpair};
use crate::error::{Error, Result};

/// The `x`-factor `g` of a separable force.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GSpec {
    /// `g(x) = sum a_n sin(n x)` over `(n, a_n)`.
    Modes(Vec<(u32, f64)>),
    /// Indicator of `[a, b]`.
    Box {
        /// Left end.
        a: f64,
        /// Right end.
        b: f64,
    },
    /// Piecewise-linear interpolant of samples on the uniform grid
    /// `x_i = i pi / (n - 1)`.
    Samples(Vec<f64>),
}

impl GSpec {
    /// `g(x) = sin(n x)`.
    pub fn sine(n: u32) -> Self {
        GSpec::Modes(alloc::vec![(n, 1.0)])
    }

    /// Checks the specification is well formed.
    pub fn validate(&self) -> Result<()> {
        match self {
            GSpec::Modes(v) => {
                if v.is_empty() || v.iter().any(|(n, a)| *n == 0 || !a.is_finite()) {
                    return Err(Error::domain("mode list must be nonempty with n >= 1"));
                }
            }
            GSpec::Box { a, b } => {
                if !(0.0 <= *a && a < b && *b <= PI) {
                    return Err(Error::domain(format!("box [{a}, {b}] must lie in [0, pi]")));
                }
            }
            GSpec::Samples(s) => {
                if s.len() < 2 || s.iter().any(|v| !v.is_finite()) {
                    return Err(Error::domain("need at least two finite samples"));
                }
            }
        }
        if self.c_g() <= 0.0 {
            return Err(Error::domain("g must not vanish identically"));
        }
        Ok(())
    }

    /// `g(x)`.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            GSpec::Modes(v) => v.iter().map(|&(n, a)| a * sin(n as f64 * x)).sum(),
            GSpec::Box { a, b } => {
                if x >= *a && x <= *b {
                    1.0
                } else {
                    0.0
                }
            }
            GSpec::Samples(s) => {
                let h = PI / (s.len() - 1) as f64;
                let t = (x / h).clamp(0.0, (s.len() - 1) as f64);
                let i = (t as usize).min(s.len() - 2);
                let f = t - i as f64;
                s[i] * (1.0 - f) + s[i + 1] * f
            }
        }
    }

    /// `C_g = int_0^pi |g(x)| dx`.
    pub fn c_g(&self) -> f64 {
        match self {
            GSpec::Modes(v) if v.len() == 1 => 2.0 * fabs(v[0].1),
            GSpec::Modes(v) => {
                // Sum |G(b) - G(a)| over the sign intervals of g, with
                // G = -sum a_n cos(n x) / n its antiderivative.
                let anti = |x: f64| -> f64 {
                    v.iter()
                        .map(|&(n, a)| -a * libm::cos(n as f64 * x) / n as f64)
                        .sum()
                };
                let nmax = v.iter().map(|p| p.0).max().unwrap_or(1);
                let pieces = 16 * nmax as usize;
                let h = PI / pieces as f64;
                let mut total = 0.0;
                let mut left = 0.0;
                let mut g_left = anti(0.0);
                let mut prev = self.value(0.5 * h);
                for i in 1..pieces {
                    let x = i as f64 * h;
                    let mid = self.value(x + 0.5 * h);
                    let fx = self.value(x);
                    let root = if fx == 0.0 {
                        Some(x)
                    } else if prev * fx < 0.0 {
                        Some(bisect_root(|t| self.value(t), x - 0.5 * h, x))
                    } else if fx * mid < 0.0 {
                        Some(bisect_root(|t| self.value(t), x, x + 0.5 * h))
                    } else {
                        None
                    };
                    if let Some(r) = root {
                        if r > left {
                            let g_r = anti(r);
                            total += fabs(g_r - g_left);
                            left = r;
                            g_left = g_r;
                        }
                    }
                    prev = mid;
                }
                total + fabs(anti(PI) - g_left)
            }
            GSpec::Box { a, b } => b - a,
            GSpec::Samples(s) => {
                let h = PI / (s.len() - 1) as f64;
                s.windows(2)
                    .map(|w| {
                        let (p, q) = (w[0], w[1]);
                        if p * q >= 0.0 {
                            0.5 * h * (fabs(p) + fabs(q))
                        } else {
                            0.5 * h * (p * p + q * q) / (fabs(p) + fabs(q))
                        }
                    })
                    .sum()
            }
        }
    }

    /// `int_a^b g(x) sin(m x) dx` in closed form.
    pub fn interval_sine_integral(&self, m: u32, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            GSpec::Modes(v) => v
                .iter()
                .map(|&(n, amp)| amp * sin_sin_integral(n, m, a, b))
                .sum(),
            GSpec::Box { a: ga, b: gb } => {
                let (lo, hi) = (a.max(*ga), b.min(*gb));
                if hi <= lo {
                    0.0
                } else {
                    let mf = m as f64;
                    (cos(mf * lo) - cos(mf * hi)) / mf
                }
            }
            GSpec::Samples(s) => {
                let h = PI / (s.len() - 1) as f64;
                let mf = m as f64;
                // antiderivative of (p + q x) sin(m x)
                let prim = |p: f64, q: f64, x: f64| {
                    -(p + q * x) * cos(mf * x) / mf + q * sin(mf * x) / (mf * mf)
                };
                let first = ((a / h) as usize).min(s.len() - 2);
                let mut total = 0.0;
                for i in first..s.len() - 1 {
                    let (x0, x1) = (i as f64 * h, (i + 1) as f64 * h);
                    if x0 >= b {
                        break;
                    }
                    let (lo, hi) = (a.max(x0), b.min(x1));
                    if hi <= lo {
                        continue;
                    }
                    let q = (s[i + 1] - s[i]) / h;
                    let p = s[i] - q * x0;
                    total += prim(p, q, hi) - prim(p, q, lo);
                }
                total
            }
        }
    }

    /// Sine coefficient `(2/pi) int_0^pi g(x) sin(m x) dx`.
    pub fn sine_coefficient(&self, m: u32) -> f64 {
        match self {
            GSpec::Modes(v) => v.iter().filter(|p| p.0 == m).map(|p| p.1).sum(),
            _ => 2.0 / PI * self.interval_sine_integral(m, 0.0, PI),
        }
    }

    /// Largest `m` for which the sine coefficients are not identically zero,
    /// if finite.
    pub fn max_mode(&self) -> Option<u32> {
        match self {
            GSpec::Modes(v) => v.iter().map(|p| p.0).max(),
            _ => None,
        }
    }
}

/// `int_a^b sin(n x) sin(m x) dx`.
pub fn sin_sin_integral(n: u32, m: u32, a: f64, b: f64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    if n == m {
        0.5 * (b - a) - (sin(2.0 * mf * b) - sin(2.0 * mf * a)) / (4.0 * mf)
    } else {
        let d = nf - mf;
        let s = nf + mf;
        (sin(d * b) - sin(d * a)) / (2.0 * d) - (sin(s * b) - sin(s * a)) / (2.0 * s)
    }
}

/// The `y`-factor of a separable force.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Profile {
    /// `R_alpha sinh(alpha y)`.
    SinhAlpha(f64),
    /// `K_alpha e^(alpha y)`.
    ExpAlpha(f64),
    /// `R_alpha cosh(alpha y)`, an even profile.
    CoshAlpha(f64),
    /// The `alpha -> infinity` limit of `SinhAlpha`: the trace
    /// `g / (2 C_g)` on `y = ell` and `-g / (2 C_g)` on `y = -ell`.
    BoundaryLimit,
    /// `sign(y)`.
    Sign,
    /// `sum_k c_k (y / ell)^k`.
    Poly(Vec<f64>),
}

impl Profile {
    fn alpha(&self) -> Option<f64> {
        match self {
            Profile::SinhAlpha(a) | Profile::ExpAlpha(a) | Profile::CoshAlpha(a) => Some(*a),
            _ => None,
        }
    }

    /// Checks `alpha > 0` and `alpha` not an integer.
    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.alpha() {
            check_alpha(a)?;
        }
        if let Profile::Poly(c) = self {
            if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(
                    "polynomial profile needs finite coefficients",
                ));
            }
        }
        Ok(())
    }

    /// `p(y)` for a force whose `g` has mass `c_g`; `None` for traces.
    pub fn value(&self, y: f64, c_g: f64, ell: f64) -> Option<f64> {
        Some(match self {
            Profile::SinhAlpha(a) => {
                let e = exp(-a * ell);
                a / (2.0 * c_g) * (exp(a * (y - ell)) - exp(-a * (y + ell)))
                    / ((1.0 - e) * (1.0 - e))
            }
            Profile::CoshAlpha(a) => {
                let e = exp(-a * ell);
                a / (2.0 * c_g) * (exp(a * (y - ell)) + exp(-a * (y + ell)))
                    / ((1.0 - e) * (1.0 - e))
            }
            Profile::ExpAlpha(a) => {
                let e = exp(-a * ell);
                a / c_g * exp(a * (y - ell)) / (1.0 - e * e)
            }
            Profile::BoundaryLimit => return None,
            Profile::Sign => {
                if y > 0.0 {
                    1.0
                } else if y < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Profile::Poly(c) => {
                let t = y / ell;
                c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
            }
        })
    }

    /// `true` for profiles whose value is `alpha`-exponential and so need
    /// graded quadrature near the edges.
    pub fn boundary_layer(&self) -> Option<f64> {
        self.alpha()
    }
}

/// Checks `alpha > 0`, finite and not an integer.
pub fn check_alpha(a: f64) -> Result<()> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {a}")));
    }
    if fabs(a - round(a)) < 1e-12 {
        return Err(Error::domain(format!(
            "alpha must not be an integer, got {a}"
        )));
    }
    Ok(())
}

/// Amplitude convention for eigenfunction forces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Normalization {
    /// `||e||_{L^2(Omega)} = 1`.
    UnitL2,
    /// `||e||_{L^1(Omega)} = 1`.
    UnitL1,
    /// `theta(y) = sinh(beta y) / sinh(beta ell) + b sin(gamma y)`.
    Raw,
}

/// Tagged description of the force `f`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Force {
    /// `g(x) p(y)`.
    SeparableSine {
        /// `x`-factor.
        g: GSpec,
        /// `y`-factor.
        profile: Profile,
    },
    /// `T_z = (delta_(z, ell) - delta_(z, -ell)) / 2`, optionally rescaled
    /// to unit dual norm on the free plate.
    DeltaPair {
        /// Abscissa in `]0, pi[`.
        z: f64,
        /// Rescale to unit dual norm.
        normalized: bool,
    },
    /// `chi_[z - eta, z + eta](x) R_alpha sinh(alpha y)` with `C_g = 2 eta`.
    SmearedDelta {
        /// Centre.
        z: f64,
        /// Half-width.
        eta: f64,
        /// Exponential rate.
        alpha: f64,
    },
    /// The first torsional eigenfunction with `m - 1` nodes in `x`.
    ResonantEigen {
        /// `x`-mode.
        m: u32,
        /// Amplitude convention.
        normalization: Normalization,
    },
}

impl Force {
    /// `alpha -> infinity` limit force with `g = sin(n x)`.
    pub fn sine_limit(n: u32) -> Self {
        Force::SeparableSine {
            g: GSpec::sine(n),
            profile: Profile::BoundaryLimit,
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> alloc::string::String {
        match self {
            Force::SeparableSine {
                g: GSpec::Modes(v),
                profile,
            } if v.len() == 1 => {
                format!("sin({}x)/{}", v[0].0, profile_tag(profile))
            }
            Force::SeparableSine { profile, .. } => format!("separable/{}", profile_tag(profile)),
            Force::DeltaPair { z, normalized } => {
                format!("{}T(z={z:.6})", if *normalized { "unit-" } else { "" })
            }
            Force::SmearedDelta { z, eta, alpha } => {
                format!("smeared(z={z},eta={eta},alpha={alpha})")
            }
            Force::ResonantEigen { m, .. } => format!("e{m}"),
        }
    }

    /// Checks every invariant of the force.
    pub fn validate(&self) -> Result<()> {
        match self {
            Force::SeparableSine { g, profile } => {
                g.validate()?;
                profile.validate()
            }
            Force::DeltaPair { z, .. } => {
                if !(*z > 0.0 && *z < PI) {
                    return Err(Error::domain(format!("z = {z} must lie in ]0, pi[")));
                }
                Ok(())
            }
            Force::SmearedDelta { z, eta, alpha } => {
                if !(*z > 0.0 && *z < PI) {
                    return Err(Error::domain(format!("z = {z} must lie in ]0, pi[")));
                }
                if !(*eta > 0.0 && *eta < z.min(PI - z)) {
                    return Err(Error::domain(format!(
                        "eta = {eta} must lie in ]0, min(z, pi - z)["
                    )));
                }
                check_alpha(*alpha)
            }
            Force::ResonantEigen { m, .. } => {
                if *m == 0 || *m > 2734 {
                    return Err(Error::domain(format!(
                        "eigen mode m = {m} must lie in 1..=2734"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `true` for forces concentrated on the free edges.
    pub fn is_trace(&self) -> bool {
        matches!(
            self,
            Force::DeltaPair { .. }
                | Force::SeparableSine {
                    profile: Profile::BoundaryLimit,
                    ..
                }
        )
    }

    /// Precomputes everything the solvers need.
    pub fn resolve(&self, cfg: &PlateConfig) -> Result<ResolvedForce> {
        self.validate()?;
        Ok(match self {
            Force::SeparableSine {
                g,
                profile: Profile::BoundaryLimit,
            } => ResolvedForce::EdgeTrace {
                g: g.clone(),
                c_g: g.c_g(),
            },
            Force::SeparableSine { g, profile } => ResolvedForce::Separable {
                g: g.clone(),
                c_g: g.c_g(),
                profile: YProfile::Plain(profile.clone()),
            },
            Force::DeltaPair { z, normalized } => {
                let scale = if *normalized {
                    crate::series::delta_normalization(*z, crate::series::DELTA_TERMS, cfg)?
                } else {
                    1.0
                };
                ResolvedForce::DeltaPair { z: *z, scale }
            }
            Force::SmearedDelta { z, eta, alpha } => ResolvedForce::Separable {
                g: GSpec::Box {
                    a: z - eta,
                    b: z + eta,
                },
                c_g: 2.0 * eta,
                profile: YProfile::Plain(Profile::SinhAlpha(*alpha)),
            },
            Force::ResonantEigen { m, normalization } => {
                let e = torsional_eigenpair(*m, *normalization, cfg)?;
                ResolvedForce::Separable {
                    g: GSpec::sine(*m),
                    c_g: 2.0,
                    profile: YProfile::Torsional(e),
                }
            }
        })
    }

    /// `f(x, y)` for forces that are functions.
    pub fn value(&self, x: f64, y: f64, cfg: &PlateConfig) -> Result<f64> {
        self.resolve(cfg)?.value(x, y, cfg.ell)
    }
}

fn profile_tag(p: &Profile) -> alloc::string::String {
    match p {
        Profile::SinhAlpha(a) => format!("sinh({a})"),
        Profile::ExpAlpha(a) => format!("exp({a})"),
        Profile::CoshAlpha(a) => format!("cosh({a})"),
        Profile::BoundaryLimit => "limit".into(),
        Profile::Sign => "sign".into(),
        Profile::Poly(_) => "poly".into(),
    }
}

/// The `y`-factor of a resolved separable force.
#[derive(Debug, Clone, PartialEq)]
pub enum YProfile {
    /// An analytic profile.
    Plain(Profile),
    /// A torsional eigenfunction profile, already normalized.
    Torsional(TorsionalEigenpair),
}

impl YProfile {
    /// `p(y)`.
    pub fn value(&self, y: f64, c_g: f64, ell: f64) -> f64 {
        match self {
            YProfile::Plain(p) => p.value(y, c_g, ell).unwrap_or(0.0),
            YProfile::Torsional(e) => e.profile(y),
        }
    }

    /// Exponential rate of a boundary layer, if any.
    pub fn boundary_layer(&self) -> Option<f64> {
        match self {
            YProfile::Plain(p) => p.boundary_layer(),
            YProfile::Torsional(_) => None,
        }
    }

    /// Ordinates where the profile is not smooth.
    pub fn kinks(&self) -> &'static [f64] {
        match self {
            YProfile::Plain(Profile::Sign) => &[0.0],
            _ => &[],
        }
    }
}

/// A force with its derived constants computed.
#[derive(Debug, Clone, PartialEq)]
pub enum ResolvedForce {
    /// `g(x) p(y)`.
    Separable {
        /// `x`-factor.
        g: GSpec,
        /// `int |g|`.
        c_g: f64,
        /// `y`-factor.
        profile: YProfile,
    },
    /// Odd edge trace `+- g / (2 C_g)` on `y = +- ell`.
    EdgeTrace {
        /// `x`-factor.
        g: GSpec,
        /// `int |g|`.
        c_g: f64,
    },
    /// `scale * T_z`.
    DeltaPair {
        /// Abscissa.
        z: f64,
        /// Multiplier.
        scale: f64,
    },
}

impl ResolvedForce {
    /// `f(x, y)`; precondition error for traces.
    pub fn value(&self, x: f64, y: f64, ell: f64) -> Result<f64> {
        match self {
            ResolvedForce::Separable { g, c_g, profile } => {
                Ok(g.value(x) * profile.value(y, *c_g, ell))
            }
            _ => Err(Error::precondition("edge traces have no pointwise values")),
        }
    }
}

/// Root of `f` on `[a, b]` by bisection, given a sign change.
fn bisect_root<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::integrate_adaptive;

    #[test]
    fn c_g_of_sines() {
        assert!((GSpec::sine(3).c_g() - 2.0).abs() < 1e-15);
        let two = GSpec::Modes(alloc::vec![(1, 1.0), (3, 1.0)]);
        // int_0^pi |sin x + sin 3x| = int 4 sin x cos^2 x ... computed numerically
        let direct = integrate_adaptive(|x| fabs(sin(x) + sin(3.0 * x)), 0.0, PI, 1e-14);
        assert!((two.c_g() - direct).abs() < 1e-10);
        assert!((GSpec::Box { a: 1.0, b: 1.5 }.c_g() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_sine_integrals_match_quadrature() {
        let specs = [
            GSpec::Modes(alloc::vec![(2, 0.7), (5, -1.3)]),
            GSpec::Box { a: 0.4, b: 1.9 },
            GSpec::Samples(alloc::vec![0.0, 1.0, -0.5, 2.0, 0.3]),
        ];
        for g in &specs {
            for m in [1u32, 2, 7] {
                let (a, b) = (0.3, 2.2);
                let exact = g.interval_sine_integral(m, a, b);
                let mut quad = 0.0;
                let parts = 64;
                for i in 0..parts {
                    let lo = a + (b - a) * i as f64 / parts as f64;
                    let hi = a + (b - a) * (i + 1) as f64 / parts as f64;
                    quad += integrate_adaptive(|x| g.value(x) * sin(m as f64 * x), lo, hi, 1e-14);
                }
                assert!(
                    (exact - quad).abs() < 1e-9,
                    "{g:?} m={m}: {exact} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn sample_c_g_handles_sign_changes() {
        let g = GSpec::Samples(alloc::vec![1.0, -1.0]);
        assert!((g.c_g() - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_profiles_have_unit_edge_mass() {
        let ell = PI / 150.0;
        let a = 2000.5;
        let c_g = 2.0;
        let p = Profile::SinhAlpha(a);
        let mass = integrate_adaptive(|y| p.value(y, c_g, ell).unwrap(), 0.0, ell, 1e-14);
        assert!((mass * c_g - 0.5).abs() < 1e-6);
        let e = Profile::ExpAlpha(a);
        let mass = integrate_adaptive(|y| e.value(y, c_g, ell).unwrap(), -ell, ell, 1e-14);
        assert!((mass * c_g - 1.0).abs() < 1e-10);
    }

    #[test]
    fn shifted_profiles_match_naive_forms() {
        let ell = PI / 150.0;
        let (a, c_g) = (80.5, 2.0);
        let r = a / (2.0 * c_g * (libm::cosh(a * ell) - 1.0));
        let k = a / (2.0 * c_g * libm::sinh(a * ell));
        for y in [-ell, -0.01, 0.0, 0.003, ell] {
            let s = Profile::SinhAlpha(a).value(y, c_g, ell).unwrap();
            assert!((s - r * libm::sinh(a * y)).abs() < 1e-12 * (1.0 + s.abs()));
            let e = Profile::ExpAlpha(a).value(y, c_g, ell).unwrap();
            assert!((e - k * exp(a * y)).abs() < 1e-12 * (1.0 + e.abs()));
        }
    }

    #[test]
    fn invalid_forces_are_rejected() {
        let bad_alpha = Force::SeparableSine {
            g: GSpec::sine(1),
            profile: Profile::SinhAlpha(3.0),
        };
        assert!(bad_alpha.validate().is_err());
        assert!(Force::DeltaPair {
            z: 0.0,
            normalized: false
        }
        .validate()
        .is_err());
        assert!(Force::SmearedDelta {
            z: 0.1,
            eta: 0.2,
            alpha: 10.5
        }
        .validate()
        .is_err());
        assert!(Force::ResonantEigen {
            m: 2735,
            normalization: Normalization::Raw
        }
        .validate()
        .is_err());
    }

    #[test]
    fn traces_have_no_point_values() {
        let cfg = PlateConfig::preset();
        assert!(Force::sine_limit(1).value(1.0, 0.0, &cfg).is_err());
    }
}
