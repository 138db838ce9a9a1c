//! The horizontal strip under the four families of limit forces: no member
//! has a maximal gap above that of `sin(x)`, which is `Upsilon_1 / (1 - sigma)`.

use plategap_core::cross::{limit_gap, CrossData};
use plategap_core::force::GSpec;
use plategap_core::series::{max_gap, upsilon_bar};
use plategap_core::PlateConfig;

fn strip(cfg: &PlateConfig) -> CrossData {
    CrossData::symmetric(0, 0.0, 0.5 * cfg.ell, cfg.d)
}

fn worst(members: impl IntoIterator<Item = (String, GSpec)>) -> (String, f64) {
    let cfg = PlateConfig::preset();
    let mut out = (String::new(), 0.0);
    for (name, g) in members {
        let s = limit_gap(&g, &strip(&cfg), &cfg, 250).unwrap();
        let v = max_gap(&s).1;
        if v > out.1 {
            out = (name, v);
        }
    }
    out
}

fn bound() -> f64 {
    upsilon_bar(1, &PlateConfig::preset()).unwrap() * (1.0 + 1e-12)
}

#[test]
fn single_modes() {
    let (name, v) = worst((1..=20).map(|m| (format!("sin({m}x)"), GSpec::sine(m))));
    assert!(v <= bound(), "{name}: {v}");
    assert_eq!(name, "sin(1x)");
}

#[test]
fn high_frequency_tails() {
    for n in 1..=50u32 {
        let harmonic = GSpec::Modes((n..n + 100).map(|m| (m, 1.0 / m as f64)).collect());
        let alternating = GSpec::Modes(
            (n..n + 100)
                .map(|m| (m, if m % 2 == 0 { 1.0 } else { -1.0 } / (m * m) as f64))
                .collect(),
        );
        let (name, v) = worst([
            (format!("harmonic tail from {n}"), harmonic),
            (format!("alternating tail from {n}"), alternating),
        ]);
        assert!(v <= bound(), "{name}: {v} > {}", bound());
    }
}

#[test]
fn mode_and_triple() {
    let (name, v) = worst((1..=20).map(|m| {
        (
            format!("sin({m}x) + sin({}x)", 3 * m),
            GSpec::Modes(vec![(m, 1.0), (3 * m, 1.0)]),
        )
    }));
    assert!(v <= bound(), "{name}: {v}");
}

#[test]
fn odd_harmonic_sums() {
    let (name, v) = worst((1..=50).map(|n| {
        (
            format!("odd sum N = {n}"),
            GSpec::Modes((1..=n).map(|k| (2 * k - 1, 1.0)).collect()),
        )
    }));
    assert!(v <= bound(), "{name}: {v}");
}
