//! Free-plate series kernels and maximization of sine series.
//!
//! The kernel `Upsilon_m = sinh^2(m ell) / (m^3 [(3+sigma) sinh(m ell) cosh(m ell)
//! + (1-sigma) m ell])` governs the gap of every edge load on the free
//! plate: the pair of opposite Dirac masses `T_z` at `(z, +-ell)` has gap
//! `4/(pi(1-sigma)) sum Upsilon_m sin(m z) sin(m x)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, cosh, fabs, sin, sqrt, tanh};

use crate::config::PlateConfig;
use crate::error::{Error, Result};
use crate::num::IntPow;
use crate::num::NeumaierSum;

/// Default number of terms for Dirac-pair series.
pub const DELTA_TERMS: usize = 10_000;
/// Default number of terms for cross-reinforcement series.
pub const CROSS_TERMS: usize = 250;

/// A truncated sine series `x -> sum_{m=1}^M c_m sin(m x)` on `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapSeries {
    /// `c_1, ..., c_M`.
    pub coefficients: Vec<f64>,
    /// Bound on the sup norm of the neglected tail.
    pub tail_bound: f64,
}

impl GapSeries {
    /// Series with the given coefficients and tail bound.
    pub fn new(coefficients: Vec<f64>, tail_bound: f64) -> Self {
        Self {
            coefficients,
            tail_bound: tail_bound.max(0.0),
        }
    }

    /// Number of terms `M`.
    pub fn terms(&self) -> usize {
        self.coefficients.len()
    }

    /// Compensated direct evaluation at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut s = NeumaierSum::new();
        for (i, c) in self.coefficients.iter().enumerate() {
            if *c != 0.0 {
                s.add(c * sin((i + 1) as f64 * x));
            }
        }
        s.value()
    }

    /// Derivative `sum m c_m cos(m x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        let mut s = NeumaierSum::new();
        for (i, c) in self.coefficients.iter().enumerate() {
            if *c != 0.0 {
                let m = (i + 1) as f64;
                s.add(m * c * cos(m * x));
            }
        }
        s.value()
    }

    /// Every coefficient multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| c * k).collect(),
            tail_bound: self.tail_bound * fabs(k),
        }
    }

    /// Sup-norm distance bound `sum |a_m - b_m|` plus both tails.
    pub fn coefficient_distance(&self, other: &GapSeries) -> f64 {
        let n = self.terms().max(other.terms());
        let get = |s: &GapSeries, i: usize| s.coefficients.get(i).copied().unwrap_or(0.0);
        (0..n)
            .map(|i| fabs(get(self, i) - get(other, i)))
            .sum::<f64>()
            + self.tail_bound
            + other.tail_bound
    }
}

/// `Upsilon_m` in the overflow-safe form
/// `t^2 / (m^3 [(3+sigma) t + (1-sigma) m ell sech^2(m ell)])`, `t = tanh(m ell)`.
pub fn upsilon(m: u32, cfg: &PlateConfig) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("Upsilon_m needs m >= 1"));
    }
    Ok(upsilon_unchecked(m as f64, cfg))
}

fn upsilon_unchecked(m: f64, cfg: &PlateConfig) -> f64 {
    let x = m * cfg.ell;
    let t = tanh(x);
    let c = cosh(x);
    let sech2 = 1.0 / (c * c);
    t * t / (m * m * m * ((3.0 + cfg.sigma) * t + (1.0 - cfg.sigma) * x * sech2))
}

/// `Upsilon_m` straight from the hyperbolic definition; overflows for
/// large `m ell`.
pub fn upsilon_naive(m: u32, cfg: &PlateConfig) -> f64 {
    let m = m as f64;
    let x = m * cfg.ell;
    let (s, c) = (libm::sinh(x), cosh(x));
    s * s / (m * m * m * ((3.0 + cfg.sigma) * s * c + (1.0 - cfg.sigma) * x))
}

/// `Upsilon_m / (1 - sigma)`, the limit gap amplitude of `sin(m x)` loads.
pub fn upsilon_bar(m: u32, cfg: &PlateConfig) -> Result<f64> {
    Ok(upsilon(m, cfg)? / (1.0 - cfg.sigma))
}

/// Upper bound `ell / (4 M)` for `sum_{m > M} Upsilon_m`.
pub fn upsilon_tail_bound(terms: usize, cfg: &PlateConfig) -> f64 {
    cfg.ell / (4.0 * terms.max(1) as f64)
}

/// `Phi(x) = sum_{m=1}^M Upsilon_m sin^2(m x)`.
pub fn phi_eval(x: f64, terms: usize, cfg: &PlateConfig) -> f64 {
    let mut s = NeumaierSum::new();
    for m in 1..=terms {
        let v = sin(m as f64 * x);
        s.add(upsilon_unchecked(m as f64, cfg) * v * v);
    }
    s.value()
}

fn check_z(z: f64) -> Result<()> {
    if !(z > 0.0 && z < PI) {
        return Err(Error::domain(alloc::format!("z = {z} must lie in ]0, pi[")));
    }
    Ok(())
}

/// Gap series of `T_z` on the free plate:
/// `c_m = 4 Upsilon_m sin(m z) / (pi (1 - sigma))`.
pub fn delta_gap(z: f64, terms: usize, cfg: &PlateConfig) -> Result<GapSeries> {
    check_z(z)?;
    cfg.validate()?;
    let k = 4.0 / (PI * (1.0 - cfg.sigma));
    let coefficients = (1..=terms)
        .map(|m| k * upsilon_unchecked(m as f64, cfg) * sin(m as f64 * z))
        .collect();
    Ok(GapSeries::new(
        coefficients,
        k * upsilon_tail_bound(terms, cfg),
    ))
}

/// The factor `sqrt(2) / sqrt(G_{T_z}(z))` turning `T_z` into the unit
/// dual-norm load.
pub fn delta_normalization(z: f64, terms: usize, cfg: &PlateConfig) -> Result<f64> {
    let s = delta_gap(z, terms, cfg)?;
    let at_z = s.eval(z);
    if !(at_z > 0.0 && at_z.is_finite()) {
        return Err(Error::numeric(alloc::format!(
            "G_Tz(z) = {at_z} is not positive; increase the number of terms"
        )));
    }
    Ok(sqrt(2.0) / sqrt(at_z))
}

/// Gap series of the unit dual-norm load at `z`.
pub fn normalized_delta_gap(z: f64, terms: usize, cfg: &PlateConfig) -> Result<GapSeries> {
    let raw = delta_gap(z, terms, cfg)?;
    let at_z = raw.eval(z);
    if !(at_z > 0.0 && at_z.is_finite()) {
        return Err(Error::numeric(alloc::format!(
            "G_Tz(z) = {at_z} is not positive; increase the number of terms"
        )));
    }
    Ok(raw.scaled(sqrt(2.0) / sqrt(at_z)))
}

/// Evaluates a sine series on the uniform grid `x_j = j pi / n`,
/// `j = 0..=n`.
pub trait GridEvaluator {
    /// Values `sum_m c_m sin(m x_j)` for `j = 0..=n`.
    fn eval_grid(&self, coefficients: &[f64], n: usize) -> Vec<f64>;
}

/// Clenshaw recurrence per grid point; `O(n M)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Clenshaw;

impl GridEvaluator for Clenshaw {
    fn eval_grid(&self, c: &[f64], n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n + 1];
        for (j, o) in out.iter_mut().enumerate().take(n).skip(1) {
            let x = j as f64 * PI / n as f64;
            let two_cos = 2.0 * cos(x);
            let (mut b1, mut b2) = (0.0, 0.0);
            for &ck in c.iter().rev() {
                let b0 = ck + two_cos * b1 - b2;
                b2 = b1;
                b1 = b0;
            }
            *o = b1 * sin(x);
        }
        out
    }
}

/// Grid size used by [`max_gap`] for a series of `terms` terms.
pub fn grid_size(terms: usize) -> usize {
    (32 * terms).max(1024)
}

/// Absolute tolerance of the argmax refinement.
const X_TOL: f64 = 1e-10;

/// Global maximum `(x*, max |G|)` over `[0, pi]` with the default
/// evaluator.
pub fn max_gap(series: &GapSeries) -> (f64, f64) {
    max_gap_with(series, &Clenshaw)
}

/// Global maximum of `|sum c_m sin(m x)|`: dense grid scan, then
/// refinement of every candidate that can still beat the best grid value.
/// Ties go to the smallest abscissa; an all-zero series gives `(0, 0)`.
pub fn max_gap_with(series: &GapSeries, evaluator: &dyn GridEvaluator) -> (f64, f64) {
    let c = &series.coefficients;
    if c.iter().all(|v| *v == 0.0) {
        return (0.0, 0.0);
    }
    let n = grid_size(c.len());
    let h = PI / n as f64;
    let vals = evaluator.eval_grid(c, n);
    let abs: Vec<f64> = vals.iter().map(|v| fabs(*v)).collect();
    let best_grid = abs.iter().cloned().fold(0.0, f64::max);
    // Near a maximum the curve departs from the nearest grid value by at
    // most max|G''| h^2 / 8.
    let curvature: f64 = c
        .iter()
        .enumerate()
        .map(|(i, v)| ((i + 1) as f64).ipow(2) * fabs(*v))
        .sum();
    let slack = curvature * h * h / 8.0 + 1e-12 * best_grid;
    let mut cands: Vec<usize> = (1..n)
        .filter(|&j| {
            abs[j] >= abs[j - 1] && abs[j] >= abs[j + 1] && abs[j] >= best_grid - 2.0 * slack
        })
        .collect();
    cands.sort_by(|&a, &b| abs[b].total_cmp(&abs[a]).then(a.cmp(&b)));
    cands.truncate(64);
    cands.sort_unstable();
    let mut best = (0.0, 0.0);
    for j in cands {
        let (x, v) = refine(series, vals[j], (j - 1) as f64 * h, (j + 1) as f64 * h);
        let better =
            v > best.1 * (1.0 + 1e-14) || (fabs(v - best.1) <= 1e-14 * best.1 && x < best.0);
        if better {
            best = (x, v);
        }
    }
    best
}

fn refine(series: &GapSeries, grid_value: f64, a: f64, b: f64) -> (f64, f64) {
    let s = if grid_value >= 0.0 { 1.0 } else { -1.0 };
    let dp = |x: f64| s * series.derivative(x);
    let (da, db) = (dp(a), dp(b));
    let x = if da >= 0.0 && db <= 0.0 {
        crate::num::bisect_sign_change(dp, a, b, X_TOL * 1e-2)
    } else {
        golden_section_max(|x| fabs(series.eval(x)), a, b)
    };
    // keep the best of the refined point and the bracket centre
    let mid = 0.5 * (a + b);
    let (vx, vm) = (fabs(series.eval(x)), fabs(series.eval(mid)));
    if vm > vx {
        (mid, vm)
    } else {
        (x, vx)
    }
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (sqrt(5.0) - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > X_TOL * 1e-2 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Samples `(x_j, G(x_j))` on `n + 1` uniform points for plotting.
pub fn sample_curve(
    series: &GapSeries,
    n: usize,
    evaluator: &dyn GridEvaluator,
) -> Vec<(f64, f64)> {
    let v = evaluator.eval_grid(&series.coefficients, n);
    v.into_iter()
        .enumerate()
        .map(|(j, g)| (j as f64 * PI / n as f64, g))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> PlateConfig {
        PlateConfig::preset()
    }

    #[test]
    fn upsilon_reference_values() {
        let c = cfg();
        assert!((upsilon_bar(1, &c).unwrap() * 1e4 - 65.444).abs() < 0.0005);
        assert!((upsilon_bar(2, &c).unwrap() * 1e4 - 16.357).abs() < 0.0005);
        assert!(upsilon(0, &c).is_err());
    }

    #[test]
    fn upsilon_small_argument_limit() {
        for ell in [1e-3, 1e-4, 1e-5] {
            let c = PlateConfig::new(ell, 0.2, 2.0).unwrap();
            for m in [1u32, 3] {
                let ratio = upsilon(m, &c).unwrap() / (ell / (4.0 * (m * m) as f64));
                assert!(
                    (ratio - 1.0).abs() < 20.0 * (m as f64 * ell).ipow(2),
                    "{ratio}"
                );
            }
        }
    }

    #[test]
    fn safe_and_naive_forms_agree() {
        let c = cfg();
        for m in 1..=955u32 {
            // m ell <= 20
            let (a, b) = (upsilon(m, &c).unwrap(), upsilon_naive(m, &c));
            assert!((a - b).abs() <= 1e-14 * b, "m={m}");
        }
        assert!(upsilon(100_000, &c).unwrap() > 0.0);
    }

    #[test]
    fn upsilon_bar_is_strictly_decreasing() {
        let c = cfg();
        let v: Vec<f64> = (1..=500).map(|m| upsilon_bar(m, &c).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn upsilon_is_below_its_tail_majorant() {
        let c = cfg();
        for m in 1..=100_000u32 {
            let u = upsilon(m, &c).unwrap();
            assert!(u <= c.ell / (4.0 * (m as f64).ipow(2)) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn phi_endpoint_values_and_midpoint_identity() {
        let c = cfg();
        let m = 2000;
        assert!(phi_eval(0.0, m, &c).abs() < 1e-300);
        assert!(phi_eval(PI, m, &c).abs() < 1e-12);
        let odd: f64 = (0..m / 2)
            .map(|k| upsilon(2 * k as u32 + 1, &c).unwrap())
            .sum();
        assert!((phi_eval(PI / 2.0, m, &c) - odd).abs() < 1e-14);
    }

    #[test]
    fn single_mode_maximum() {
        let s = GapSeries::new(vec![-0.7], 0.0);
        let (x, v) = max_gap(&s);
        assert!((x - PI / 2.0).abs() < 1e-10);
        assert!((v - 0.7).abs() < 1e-15);
        let s3 = GapSeries::new(vec![0.0, 0.0, 2.0], 0.0);
        let (x, v) = max_gap(&s3);
        assert!((x - PI / 6.0).abs() < 1e-10 && (v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_series_maximum() {
        assert_eq!(max_gap(&GapSeries::new(vec![0.0; 5], 0.0)), (0.0, 0.0));
    }

    #[test]
    fn midpoint_delta_gap_peaks_at_midpoint() {
        let s = delta_gap(PI / 2.0, 400, &cfg()).unwrap();
        let (x, _) = max_gap(&s);
        assert!((x - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn normalized_value_at_load_point() {
        let c = cfg();
        let z = 0.9;
        let raw = delta_gap(z, 500, &c).unwrap();
        let unit = normalized_delta_gap(z, 500, &c).unwrap();
        assert!((unit.eval(z) - sqrt(2.0 * raw.eval(z))).abs() < 1e-12);
        assert!(delta_gap(0.0, 10, &c).is_err());
    }

    #[test]
    fn tail_bound_covers_truncation() {
        let c = cfg();
        let short = delta_gap(1.0, 200, &c).unwrap();
        let long = delta_gap(1.0, 20_000, &c).unwrap();
        for x in [0.3, 1.0, 2.0] {
            assert!((short.eval(x) - long.eval(x)).abs() <= short.tail_bound);
        }
    }

    proptest! {
        #[test]
        fn delta_gap_is_symmetric_in_load_and_observation(z in 0.01f64..3.13, x in 0.01f64..3.13) {
            let c = cfg();
            let a = delta_gap(z, 300, &c).unwrap().eval(x);
            let b = delta_gap(x, 300, &c).unwrap().eval(z);
            prop_assert!((a - b).abs() < 1e-14);
        }

        #[test]
        fn delta_gap_reflection_identity(z in 0.01f64..3.13, x in 0.0f64..PI) {
            let c = cfg();
            let a = delta_gap(PI - z, 300, &c).unwrap().eval(PI - x);
            let b = delta_gap(z, 300, &c).unwrap().eval(x);
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn phi_is_monotone_in_terms(x in 0.0f64..PI, m in 1usize..300) {
            let c = cfg();
            prop_assert!(phi_eval(x, m + 1, &c) >= phi_eval(x, m, &c));
        }

        #[test]
        fn max_gap_dominates_every_sample(c in proptest::collection::vec(-1.0f64..1.0, 1..12), x in 0.0f64..PI) {
            let s = GapSeries::new(c, 0.0);
            let (_, v) = max_gap(&s);
            prop_assert!(s.eval(x).abs() <= v * (1.0 + 1e-12) + 1e-15);
        }
    }
}
