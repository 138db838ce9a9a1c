//! Sine-series grid evaluation by FFT.

use std::sync::Mutex;

use plategap_core::series::{Clenshaw, GridEvaluator};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Evaluates `sum_m c_m sin(m x_j)` on `x_j = j pi / n` as the imaginary
/// part of a length-`2n` inverse DFT. Costs `O(n log n)` instead of the
/// `O(n M)` of [`Clenshaw`], which it falls back to when `M >= 2n` would
/// alias.
pub struct FftEvaluator {
    planner: Mutex<FftPlanner<f64>>,
}

impl FftEvaluator {
    /// A fresh evaluator with an empty plan cache.
    pub fn new() -> Self {
        Self {
            planner: Mutex::new(FftPlanner::new()),
        }
    }
}

impl Default for FftEvaluator {
    fn default() -> Self {
        Self::new()
    }
}

impl std::fmt::Debug for FftEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("FftEvaluator")
    }
}

impl GridEvaluator for FftEvaluator {
    fn eval_grid(&self, c: &[f64], n: usize) -> Vec<f64> {
        if n < 2 || c.len() >= 2 * n {
            return Clenshaw.eval_grid(c, n);
        }
        let len = 2 * n;
        let fft = self
            .planner
            .lock()
            .unwrap_or_else(|p| p.into_inner())
            .plan_fft_inverse(len);
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        for (k, &v) in c.iter().enumerate() {
            buf[k + 1].re = v;
        }
        fft.process(&mut buf);
        let mut out: Vec<f64> = buf[..=n].iter().map(|z| z.im).collect();
        out[0] = 0.0;
        out[n] = 0.0;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use plategap_core::series::{delta_gap, max_gap_with};
    use plategap_core::PlateConfig;

    #[test]
    fn matches_clenshaw() {
        let c: Vec<f64> = (1..=300)
            .map(|m| ((m * 7 % 13) as f64 - 6.0) / (m * m) as f64)
            .collect();
        let a = FftEvaluator::new().eval_grid(&c, 1000);
        let b = Clenshaw.eval_grid(&c, 1000);
        let err = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn falls_back_when_terms_would_alias() {
        let c = vec![1.0; 50];
        assert_eq!(
            FftEvaluator::new().eval_grid(&c, 20),
            Clenshaw.eval_grid(&c, 20)
        );
    }

    #[test]
    fn same_argmax_as_serial_evaluator() {
        let cfg = PlateConfig::preset();
        let s = delta_gap(std::f64::consts::PI / 6.0, 400, &cfg).unwrap();
        let (xa, va) = max_gap_with(&s, &FftEvaluator::new());
        let (xb, vb) = max_gap_with(&s, &Clenshaw);
        assert!((xa - xb).abs() < 1e-9 && (va - vb).abs() < 1e-14 * vb);
    }
}
