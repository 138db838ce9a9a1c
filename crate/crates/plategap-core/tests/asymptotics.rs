//! Large-`alpha` behaviour of the exponential-force coefficients on crosses:
//! `beta_m(alpha) = beta_bar_m - omega_bar_m / alpha + o(1 / alpha)`.

use plategap_core::cross::{
    beta_bar, beta_m, limit_gap, mode_constants_raw, omega_bar, sinh_gap, CrossData,
};
use plategap_core::force::GSpec;
use plategap_core::series::max_gap;
use plategap_core::PlateConfig;

fn d0(cfg: &PlateConfig) -> CrossData {
    CrossData::symmetric(0, 0.3, 0.5 * cfg.ell, cfg.d)
}

/// `alpha (beta_m(alpha) - beta_bar_m)`, or `None` when `omega_bar_m`
/// vanishes because `gamma_m = 0`.
fn first_order(m: u32, n: u32, alpha: f64, cfg: &PlateConfig) -> Option<(f64, f64)> {
    let (g, cross) = (GSpec::sine(n), d0(cfg));
    let w = omega_bar(m, &g, &cross, cfg).unwrap();
    let diff = beta_m(m, alpha, &g, &cross, cfg).unwrap() - beta_bar(m, &g, &cross, cfg).unwrap();
    if w == 0.0 {
        assert!(diff.abs() < 1e-14, "m={m} n={n}: {diff}");
        return None;
    }
    Some((alpha * diff, w))
}

#[test]
fn first_order_term_within_one_percent() {
    let cfg = PlateConfig::preset();
    let mut checked = 0;
    for n in 1..=3 {
        for m in 1..=10 {
            if let Some((a, w)) = first_order(m, n, 1000.5, &cfg) {
                let rel = (a + w).abs() / w.abs();
                assert!(rel < 1e-2, "m={m} n={n}: {rel}");
                checked += 1;
            }
        }
    }
    assert!(checked >= 3);
}

#[test]
fn richardson_extrapolation_recovers_omega_bar() {
    let cfg = PlateConfig::preset();
    for n in 1..=3 {
        for m in 1..=10 {
            let vals: Vec<(f64, f64)> = [1000.5, 2000.5, 4000.5]
                .iter()
                .filter_map(|&a| first_order(m, n, a, &cfg))
                .collect();
            if vals.len() < 3 {
                continue;
            }
            let w = vals[0].1;
            for pair in vals.windows(2) {
                // the two alphas differ by a factor close to 2
                let r = 2.0 * pair[1].0 - pair[0].0;
                let rel = (r + w).abs() / w.abs();
                assert!(rel < 1e-3, "m={m} n={n}: {rel}");
            }
            // once exp(-alpha ell / 2) is negligible the second order term dominates
            let last = (2.0 * vals[2].0 - vals[1].0 + w).abs() / w.abs();
            assert!(last < 1e-5, "m={m} n={n}: {last}");
        }
    }
}

#[test]
fn exponential_gaps_approach_the_limit_gap() {
    let cfg = PlateConfig::preset();
    let cross = d0(&cfg);
    for n in 1..=3 {
        let g = GSpec::sine(n);
        let limit = limit_gap(&g, &cross, &cfg, 250).unwrap();
        let mut prev = f64::INFINITY;
        for alpha in [50.5, 100.5, 200.5, 400.5] {
            let s = sinh_gap(&g, alpha, &cross, &cfg, 250).unwrap();
            let d = s.coefficient_distance(&limit);
            assert!(d < prev, "n={n} alpha={alpha}: {d} !< {prev}");
            prev = d;
        }
        let s = sinh_gap(&g, 1e5 + 0.5, &cross, &cfg, 250).unwrap();
        assert!((max_gap(&s).1 / max_gap(&limit).1 - 1.0).abs() < 1e-3);
    }
}

#[test]
fn r_over_k_is_one_plus_twice_the_edge_exponential() {
    let cfg = PlateConfig::preset();
    for alpha in [500.5, 1000.5] {
        let mc = mode_constants_raw(2, alpha, 1.0, 1.0, 2.0, 0.5 * cfg.ell, &cfg).unwrap();
        let e = (-alpha * cfg.ell).exp();
        assert!(((mc.r_over_k - 1.0) / (2.0 * e) - 1.0).abs() < 2.0 * e);
    }
}
