//! Even/odd decomposition in `y` and the norm inequality
//! `||phi^o||_p <= ||phi||_p` on symmetric intervals.

use alloc::format;
use alloc::vec::Vec;

use libm::{fabs, pow};

use crate::error::{Error, Result};

/// A function sampled on a tensor grid, values stored row-major by `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    /// Abscissae.
    pub xs: Vec<f64>,
    /// Ordinates.
    pub ys: Vec<f64>,
    /// `values[i * ys.len() + j] = f(xs[i], ys[j])`.
    pub values: Vec<f64>,
}

impl SampledField {
    /// Samples `f` on the grid.
    pub fn from_fn<F: FnMut(f64, f64) -> f64>(xs: Vec<f64>, ys: Vec<f64>, mut f: F) -> Self {
        let mut values = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                values.push(f(x, y));
            }
        }
        Self { xs, ys, values }
    }

    /// Value at grid indices `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ys.len() + j]
    }

    /// Largest absolute value.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(fabs(*v)))
    }
}

/// Splits a sampled field into `(even, odd)` parts in `y`. The `y` grid
/// must be symmetric: `ys[j] = -ys[n - 1 - j]`.
pub fn parity_split(field: &SampledField) -> Result<(SampledField, SampledField)> {
    let ny = field.ys.len();
    let scale = field
        .ys
        .iter()
        .fold(0.0f64, |a, y| a.max(fabs(*y)))
        .max(1.0);
    for j in 0..ny {
        if fabs(field.ys[j] + field.ys[ny - 1 - j]) > 1e-12 * scale {
            return Err(Error::precondition(
                "parity split needs a y-symmetric sample grid",
            ));
        }
    }
    if field.values.len() != field.xs.len() * ny {
        return Err(Error::precondition("sample array does not match the grid"));
    }
    let mut even = field.clone();
    let mut odd = field.clone();
    for i in 0..field.xs.len() {
        for j in 0..ny {
            let (a, b) = (field.get(i, j), field.get(i, ny - 1 - j));
            even.values[i * ny + j] = 0.5 * (a + b);
            odd.values[i * ny + j] = 0.5 * (a - b);
        }
    }
    Ok((even, odd))
}

/// Result of [`parity_norm_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityNorms {
    /// `||phi^o||_p`.
    pub odd_norm: f64,
    /// `||phi||_p`.
    pub full_norm: f64,
    /// `true` when the inequality is strict beyond tolerance.
    pub strict: bool,
}

/// Compares `||phi^o||_p` with `||phi||_p` for `phi` sampled on an odd
/// number of uniform points over `[-a, a]`. Composite Simpson weights are
/// used for finite `p`; `p = f64::INFINITY` takes the sample maximum.
pub fn parity_norm_check(a: f64, samples: &[f64], p: f64) -> Result<ParityNorms> {
    if !(p >= 1.0) {
        return Err(Error::domain(format!(
            "norm exponent p = {p} must be at least 1"
        )));
    }
    let n = samples.len();
    if n < 3 || n.is_multiple_of(2) || !(a > 0.0) {
        return Err(Error::precondition(
            "need an odd number (>= 3) of samples on ]-a, a[",
        ));
    }
    let odd: Vec<f64> = (0..n)
        .map(|j| 0.5 * (samples[j] - samples[n - 1 - j]))
        .collect();
    let norm = |v: &[f64]| -> f64 {
        if p.is_infinite() {
            return v.iter().fold(0.0, |m, x| m.max(fabs(*x)));
        }
        let h = 2.0 * a / (n - 1) as f64;
        let s: f64 = v
            .iter()
            .enumerate()
            .map(|(j, x)| {
                let w = if j == 0 || j == n - 1 {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * pow(fabs(*x), p)
            })
            .sum();
        pow(s * h / 3.0, 1.0 / p)
    };
    let (odd_norm, full_norm) = (norm(&odd), norm(samples));
    let tol = 1e-10 * full_norm + 1e-300;
    if odd_norm > full_norm + tol {
        return Err(Error::numeric(format!(
            "odd part norm {odd_norm} exceeds full norm {full_norm}"
        )));
    }
    Ok(ParityNorms {
        odd_norm,
        full_norm,
        strict: full_norm - odd_norm > tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::IntPow;
    use libm::{cosh, exp, sin, sinh};
    use proptest::prelude::*;

    fn grid(n: usize, a: f64) -> Vec<f64> {
        (0..n)
            .map(|j| a * (2.0 * j as f64 - (n - 1) as f64) / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn sinh_field_is_odd() {
        let f = SampledField::from_fn(grid(5, 3.0), grid(9, 0.02), |x, y| sinh(40.0 * y) * sin(x));
        let (e, o) = parity_split(&f).unwrap();
        assert!(e.sup_norm() < 1e-15);
        assert_eq!(o, f);
    }

    #[test]
    fn exponential_splits_into_cosh_and_sinh() {
        let f = SampledField::from_fn(grid(4, 3.0), grid(11, 0.02), |x, y| exp(30.0 * y) * sin(x));
        let (e, o) = parity_split(&f).unwrap();
        for (i, &x) in f.xs.iter().enumerate() {
            for (j, &y) in f.ys.iter().enumerate() {
                assert!((e.get(i, j) - cosh(30.0 * y) * sin(x)).abs() < 1e-14);
                assert!((o.get(i, j) - sinh(30.0 * y) * sin(x)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_field_is_even_and_split_is_idempotent() {
        let f = SampledField::from_fn(grid(3, 1.0), grid(7, 1.0), |_, _| 1.0);
        let (e, o) = parity_split(&f).unwrap();
        assert_eq!(e, f);
        assert_eq!(o.sup_norm(), 0.0);
        let (ee, eo) = parity_split(&e).unwrap();
        assert_eq!(ee, e);
        assert_eq!(eo.sup_norm(), 0.0);
    }

    #[test]
    fn asymmetric_grid_is_rejected() {
        let f = SampledField::from_fn(vec![1.0], vec![-1.0, 0.0, 2.0], |_, _| 1.0);
        assert!(parity_split(&f).is_err());
    }

    #[test]
    fn norm_check_reference_cases() {
        let ys = grid(2001, 1.0);
        let odd: Vec<f64> = ys.iter().map(|y| y * y * y).collect();
        let r = parity_norm_check(1.0, &odd, 2.0).unwrap();
        assert!(!r.strict && r.odd_norm == r.full_norm);
        let even: Vec<f64> = ys.iter().map(|y| 1.0 + y * y).collect();
        let r = parity_norm_check(1.0, &even, 2.0).unwrap();
        assert!(r.strict && r.odd_norm == 0.0);
        let lin: Vec<f64> = ys.iter().map(|y| y + 1.0).collect();
        let r = parity_norm_check(1.0, &lin, 2.0).unwrap();
        assert!((r.odd_norm.ipow(2) - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.full_norm.ipow(2) - 8.0 / 3.0).abs() < 1e-12);
        assert!(r.strict);
        assert!(parity_norm_check(1.0, &lin, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn odd_part_never_has_larger_norm(
            v in proptest::collection::vec(-10.0f64..10.0, 1..40),
            p in prop_oneof![Just(1.0), Just(2.0), Just(3.5), Just(f64::INFINITY)],
        ) {
            let mut s = v.clone();
            if s.len() % 2 == 0 { s.pop(); }
            if s.len() < 3 { s = vec![1.0, -2.0, 0.5]; }
            let r = parity_norm_check(0.7, &s, p).unwrap();
            prop_assert!(r.odd_norm <= r.full_norm * (1.0 + 1e-10) + 1e-300);
        }
    }
}
