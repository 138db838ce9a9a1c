//! Text syntax for forces, reinforcements and their finite classes.
//!
//! Forces:
//!
//! * `sin:N` is the edge-trace limit force with `g = sin(N x)`; a profile
//!   suffix picks a bulk force instead: `sin:N@sinh:A`, `@exp:A`, `@cosh:A`,
//!   `@sign`, `@limit`;
//! * `eig:M` (unit `L^2`) and `eig:M:raw` are torsional eigenfunctions;
//! * `delta:Z` and `unit-delta:Z` are the edge delta pairs `T_z` and their
//!   unit-norm versions;
//! * `smeared:Z:ETA:ALPHA` is the smeared delta;
//! * `sign` is `f = sign(y)`, `even-test` is `sin(x) cosh(100.5 y)`;
//! * `@file.json` reads a JSON force.
//!
//! Reinforcements: `none`, `cross:N` (with the configured `mu`, `eps`),
//! `cross:N:MU:EPS`, `strip` or `strip:EPS` (horizontal strip), the truss
//! presets `strips`, `triangles`, `squares`, `hexagons`, and `@file.json`
//! (a geometry record or a tagged reinforcement).
//!
//! Classes are comma-separated lists; an integer argument may be a range
//! `a..b` (inclusive), so `sin:1..10` and `cross:0..5` expand to ten and six
//! members. `trusses` expands to the four presets.
//!
//! Abscissae accept `pi`, `pi/K`, `J*pi/K` and plain numbers.

use std::f64::consts::PI;
use std::path::Path;

use plategap_core::force::{GSpec, Normalization, Profile};
use plategap_core::geometry::TrussPreset;
use plategap_core::{Force, PlateConfig, Reinforcement};
use serde::de::DeserializeOwned;

use crate::error::{AppError, AppResult};

/// Parameters the short forms fill in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecContext {
    /// Plate configuration.
    pub cfg: PlateConfig,
    /// Vertical half-width parameter of `cross:N`.
    pub mu: f64,
    /// Strip half-width of `cross:N` and `strip`.
    pub eps: f64,
}

/// `alpha` of the `even-test` force.
pub const EVEN_TEST_ALPHA: f64 = 100.5;

/// Parses `pi`, `pi/K`, `J*pi/K`, `J*pi` or a plain number.
pub fn parse_abscissa(s: &str) -> Option<f64> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Some(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().ok()?),
        None => (t, 1.0),
    };
    let k = match num.split_once('*') {
        Some((j, p)) if p.trim() == "pi" => j.trim().parse::<f64>().ok()?,
        None if num == "pi" => 1.0,
        _ => return None,
    };
    Some(k * PI / den)
}

fn number(what: &'static str, input: &str, s: &str) -> AppResult<f64> {
    parse_abscissa(s).ok_or_else(|| AppError::spec(what, input, format!("`{s}` is not a number")))
}

fn index(what: &'static str, input: &str, s: &str) -> AppResult<u32> {
    s.trim()
        .parse()
        .map_err(|_| AppError::spec(what, input, format!("`{s}` is not a nonnegative integer")))
}

fn read_json<T: DeserializeOwned>(what: &'static str, path: &str) -> AppResult<T> {
    let text = std::fs::read_to_string(Path::new(path)).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        AppError::spec(
            what,
            path,
            format!("line {}, column {}: {e}", e.line(), e.column()),
        )
    })
}

fn profile(input: &str, s: &str) -> AppResult<Profile> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let alpha = || number("force", input, arg);
    Ok(match kind {
        "limit" => Profile::BoundaryLimit,
        "sign" => Profile::Sign,
        "sinh" => Profile::SinhAlpha(alpha()?),
        "exp" => Profile::ExpAlpha(alpha()?),
        "cosh" => Profile::CoshAlpha(alpha()?),
        _ => {
            return Err(AppError::spec(
                "force",
                input,
                format!("unknown profile `{kind}`"),
            ))
        }
    })
}

/// Parses one force.
pub fn parse_force(s: &str) -> AppResult<Force> {
    let input = s.trim();
    if let Some(path) = input.strip_prefix('@') {
        return read_json("force", path);
    }
    let (head, prof) = match input.split_once('@') {
        Some((h, p)) => (h, Some(p)),
        None => (input, None),
    };
    let parts: Vec<&str> = head.split(':').collect();
    let want = |n: usize| -> AppResult<()> {
        if parts.len() == n {
            Ok(())
        } else {
            Err(AppError::spec(
                "force",
                input,
                format!("expected {} field(s) after `{}`", n - 1, parts[0]),
            ))
        }
    };
    let f = match parts[0] {
        "sin" => {
            want(2)?;
            let n = index("force", input, parts[1])?;
            let profile = match prof {
                Some(p) => profile(input, p)?,
                None => Profile::BoundaryLimit,
            };
            return Ok(Force::SeparableSine {
                g: GSpec::sine(n),
                profile,
            });
        }
        "eig" => {
            let normalization = match parts.get(2) {
                None => Normalization::UnitL2,
                Some(&"raw") => Normalization::Raw,
                Some(&"l2") => Normalization::UnitL2,
                Some(o) => {
                    return Err(AppError::spec(
                        "force",
                        input,
                        format!("unknown normalization `{o}`"),
                    ))
                }
            };
            if parts.len() > 3 {
                return Err(AppError::spec("force", input, "too many fields"));
            }
            Force::ResonantEigen {
                m: index("force", input, parts[1])?,
                normalization,
            }
        }
        "delta" | "unit-delta" => {
            want(2)?;
            Force::DeltaPair {
                z: number("force", input, parts[1])?,
                normalized: parts[0] == "unit-delta",
            }
        }
        "smeared" => {
            want(4)?;
            Force::SmearedDelta {
                z: number("force", input, parts[1])?,
                eta: number("force", input, parts[2])?,
                alpha: number("force", input, parts[3])?,
            }
        }
        "sign" => {
            want(1)?;
            Force::SeparableSine {
                g: GSpec::Samples(vec![1.0, 1.0]),
                profile: Profile::Sign,
            }
        }
        "even-test" => {
            want(1)?;
            Force::SeparableSine {
                g: GSpec::sine(1),
                profile: Profile::CoshAlpha(EVEN_TEST_ALPHA),
            }
        }
        other => {
            return Err(AppError::spec(
                "force",
                input,
                format!("unknown force kind `{other}`"),
            ))
        }
    };
    if prof.is_some() {
        return Err(AppError::spec(
            "force",
            input,
            "a profile suffix only applies to `sin:N`",
        ));
    }
    Ok(f)
}

/// Parses one reinforcement.
pub fn parse_reinforcement(s: &str, ctx: &SpecContext) -> AppResult<Reinforcement> {
    let input = s.trim();
    if let Some(path) = input.strip_prefix('@') {
        return crate::io::read_reinforcement(Path::new(path));
    }
    let parts: Vec<&str> = input.split(':').collect();
    let what = "reinforcement";
    let r = match (parts[0], parts.len()) {
        ("none" | "empty", 1) => Reinforcement::Empty,
        ("cross", 2) => Reinforcement::cross_n(index(what, input, parts[1])?, ctx.mu, ctx.eps),
        ("cross", 4) => Reinforcement::cross_n(
            index(what, input, parts[1])?,
            number(what, input, parts[2])?,
            number(what, input, parts[3])?,
        ),
        ("strip", 1) => Reinforcement::cross_n(0, 0.0, ctx.eps),
        ("strip", 2) => Reinforcement::cross_n(0, 0.0, number(what, input, parts[1])?),
        (name, 1) => match TrussPreset::ALL
            .iter()
            .find(|p| p.name().eq_ignore_ascii_case(name))
        {
            Some(p) => Reinforcement::truss(*p, &ctx.cfg),
            None => {
                return Err(AppError::spec(
                    what,
                    input,
                    format!("unknown reinforcement `{name}`"),
                ))
            }
        },
        _ => return Err(AppError::spec(what, input, "wrong number of fields")),
    };
    Ok(r)
}

/// Expands `a..b` in the first argument of each comma-separated item.
fn expand(list: &str, what: &'static str) -> AppResult<Vec<String>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let Some((kind, rest)) = item.split_once(':') else {
            out.push(item.to_string());
            continue;
        };
        let (arg, tail) = match rest.find([':', '@']) {
            Some(i) => (&rest[..i], &rest[i..]),
            None => (rest, ""),
        };
        match arg.split_once("..") {
            Some((a, b)) if !kind.starts_with('@') => {
                let (a, b) = (index(what, item, a)?, index(what, item, b)?);
                if a > b {
                    return Err(AppError::spec(what, item, "empty range"));
                }
                out.extend((a..=b).map(|k| format!("{kind}:{k}{tail}")));
            }
            _ => out.push(item.to_string()),
        }
    }
    if out.is_empty() {
        return Err(AppError::spec(what, list, "the class is empty"));
    }
    Ok(out)
}

/// Parses a force class such as `sin:1..10` or `eig:1..5,sign`.
pub fn parse_force_class(list: &str) -> AppResult<Vec<Force>> {
    expand(list, "force class")?
        .iter()
        .map(|s| parse_force(s))
        .collect()
}

/// Parses a reinforcement class such as `none,cross:0..5` or
/// `none,trusses`.
pub fn parse_reinforcement_class(list: &str, ctx: &SpecContext) -> AppResult<Vec<Reinforcement>> {
    let mut out = Vec::new();
    for s in expand(list, "reinforcement class")? {
        if s == "trusses" {
            out.extend(
                TrussPreset::ALL
                    .iter()
                    .map(|p| Reinforcement::truss(*p, &ctx.cfg)),
            );
        } else {
            out.push(parse_reinforcement(&s, ctx)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> SpecContext {
        let cfg = PlateConfig::preset();
        SpecContext {
            cfg,
            mu: 0.3,
            eps: 0.5 * cfg.ell,
        }
    }

    #[test]
    fn abscissae() {
        assert_eq!(parse_abscissa("pi/2"), Some(PI / 2.0));
        assert_eq!(parse_abscissa("3*pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_abscissa("pi"), Some(PI));
        assert_eq!(parse_abscissa("0.25"), Some(0.25));
        assert_eq!(parse_abscissa("tau"), None);
    }

    #[test]
    fn forces() {
        assert_eq!(parse_force("sin:3").unwrap(), Force::sine_limit(3));
        assert_eq!(
            parse_force("sin:2@sinh:100.5").unwrap(),
            Force::SeparableSine {
                g: GSpec::sine(2),
                profile: Profile::SinhAlpha(100.5)
            }
        );
        assert_eq!(
            parse_force("unit-delta:pi/2").unwrap(),
            Force::DeltaPair {
                z: PI / 2.0,
                normalized: true
            }
        );
        assert_eq!(
            parse_force("eig:4:raw").unwrap(),
            Force::ResonantEigen {
                m: 4,
                normalization: Normalization::Raw
            }
        );
        assert!(matches!(
            parse_force("smeared:pi/2:0.1:100.5").unwrap(),
            Force::SmearedDelta { .. }
        ));
        assert!(parse_force("sin:x").is_err());
        assert!(parse_force("delta:1@sign").is_err());
        assert!(parse_force("wave:1").is_err());
    }

    #[test]
    fn classes_expand_ranges_in_order() {
        let f = parse_force_class("sin:1..10").unwrap();
        assert_eq!(f.len(), 10);
        assert_eq!(f[9], Force::sine_limit(10));
        let f = parse_force_class("sin:1..2@sinh:50.5,eig:1").unwrap();
        assert_eq!(f.len(), 3);
        let d = parse_reinforcement_class("none,cross:0..5", &ctx()).unwrap();
        assert_eq!(d.len(), 7);
        assert_eq!(d[3], Reinforcement::cross_n(2, 0.3, 0.5 * ctx().cfg.ell));
        let t = parse_reinforcement_class("none,trusses", &ctx()).unwrap();
        assert_eq!(t.len(), 5);
        assert!(parse_reinforcement_class("cross:3..1", &ctx()).is_err());
        assert!(parse_reinforcement_class(" , ", &ctx()).is_err());
    }

    #[test]
    fn reinforcements() {
        let c = ctx();
        assert_eq!(
            parse_reinforcement("none", &c).unwrap(),
            Reinforcement::Empty
        );
        assert_eq!(
            parse_reinforcement("cross:1:0.5:0.01", &c).unwrap(),
            Reinforcement::cross_n(1, 0.5, 0.01)
        );
        assert_eq!(
            parse_reinforcement("strip:0.01", &c).unwrap(),
            Reinforcement::cross_n(0, 0.0, 0.01)
        );
        assert_eq!(
            parse_reinforcement("Hexagons", &c).unwrap(),
            Reinforcement::truss(TrussPreset::Hexagons, &c.cfg)
        );
        assert!(parse_reinforcement("cross:1:2", &c).is_err());
    }
}
