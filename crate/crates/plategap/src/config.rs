//! Run configuration: JSON file, then command-line overrides.

use std::path::{Path, PathBuf};

use plategap_core::galerkin::GalerkinOptions;
use plategap_core::optimize::{cross_table_eps, Method, SolverChoice};
use plategap_core::series::{CROSS_TERMS, DELTA_TERMS};
use plategap_core::PlateConfig;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};
use crate::specs::SpecContext;

/// Output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Comma-separated values.
    #[default]
    Csv,
    /// JSON documents.
    Json,
}

/// Solver of single solves and optimization cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Closed form where available, modal otherwise.
    #[default]
    Auto,
    /// Closed form only.
    Analytic,
    /// Per-mode boundary value problems (force-weakening model).
    Modal,
    /// Tensor Galerkin (plate-stiffening model); single solves only.
    Galerkin,
}

/// Every setting of a run. Missing fields take the preset values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Plate half-width.
    pub ell: f64,
    /// Poisson ratio.
    pub sigma: f64,
    /// Stiffening strength.
    pub d: f64,
    /// Series terms or modes; `None` uses the command default.
    pub terms: Option<usize>,
    /// Modal `y`-panels.
    pub panels: usize,
    /// Gauss order per panel.
    pub order: usize,
    /// Galerkin `x`-modes.
    pub galerkin_modes: usize,
    /// Galerkin polynomial degree.
    pub galerkin_degree: usize,
    /// Sample count of exported curves and fields.
    pub grid: Option<usize>,
    /// Relative tolerance of reference comparisons; `None` uses the
    /// per-table default.
    pub tol: Option<f64>,
    /// Vertical half-width parameter of cross reinforcements.
    pub mu: f64,
    /// Strip half-width of cross reinforcements; `None` means `ell / 2`.
    pub eps: Option<f64>,
    /// Solver.
    pub solver: SolverKind,
    /// Force spec (see [`crate::specs`]).
    pub force: Option<String>,
    /// Reinforcement spec.
    pub reinforcement: Option<String>,
    /// Reinforcement class spec.
    pub class_d: Option<String>,
    /// Force class spec.
    pub class_f: Option<String>,
    /// Keep going when single optimization cells fail.
    pub allow_failed: bool,
    /// Output directory; stdout only when absent.
    pub out: Option<PathBuf>,
    /// Output format.
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PlateConfig::preset();
        let g = GalerkinOptions::default();
        Self {
            ell: p.ell,
            sigma: p.sigma,
            d: p.d,
            terms: None,
            panels: 64,
            order: 8,
            galerkin_modes: g.modes,
            galerkin_degree: g.degree,
            grid: None,
            tol: None,
            mu: 0.3,
            eps: None,
            solver: SolverKind::Auto,
            force: None,
            reinforcement: None,
            class_d: None,
            class_f: None,
            allow_failed: false,
            out: None,
            format: Format::Csv,
        }
    }
}

/// Byte offset to 1-based (line, column).
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Finds where `"field"` is written, for value errors found after parsing.
fn locate_field(text: &str, field: &str) -> (usize, usize) {
    text.find(&format!("\"{field}\""))
        .map_or((0, 0), |i| line_col(text, i))
}

impl RunConfig {
    /// Reads a JSON config; errors carry line, column and field.
    pub fn from_file(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::from_json(&text, path)
    }

    /// Parses JSON text; `path` is only used in diagnostics.
    pub fn from_json(text: &str, path: &Path) -> AppResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path_str = e.path().to_string();
            let inner = e.into_inner();
            let msg = inner.to_string();
            // unknown fields are reported by name; others by their path
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.starts_with("unknown field"))
                .map(str::to_string)
                .or_else(|| Some(path_str).filter(|p| p != "."));
            AppError::Config {
                path: path.to_path_buf(),
                line: inner.line(),
                column: inner.column(),
                field,
                message: msg,
            }
        })?;
        cfg.validate().map_err(|err| match err {
            AppError::Config { field, message, .. } => {
                let (line, column) = field.as_deref().map_or((0, 0), |f| locate_field(text, f));
                AppError::Config {
                    path: path.to_path_buf(),
                    line,
                    column,
                    field,
                    message,
                }
            }
            other => other,
        })?;
        Ok(cfg)
    }

    /// Checks value ranges.
    pub fn validate(&self) -> AppResult<()> {
        let bad = |field: &str, message: String| AppError::Config {
            path: PathBuf::new(),
            line: 0,
            column: 0,
            field: Some(field.to_string()),
            message,
        };
        if let Err(e) = PlateConfig::new(self.ell, self.sigma, self.d) {
            let field = if !(self.ell > 0.0) {
                "ell"
            } else if !(self.sigma > 0.0 && self.sigma < 1.0) {
                "sigma"
            } else {
                "d"
            };
            return Err(bad(field, e.to_string()));
        }
        if self.terms == Some(0) {
            return Err(bad("terms", "terms must be positive".into()));
        }
        if self.panels == 0 || self.order == 0 {
            return Err(bad("panels", "panels and order must be positive".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(bad("tol", format!("tol = {t} must be positive")));
            }
        }
        if self.grid.is_some_and(|g| g < 2) {
            return Err(bad("grid", "grid needs at least 2 intervals".into()));
        }
        if !(self.mu >= 0.0) {
            return Err(bad("mu", format!("mu = {} must be nonnegative", self.mu)));
        }
        if let Some(e) = self.eps {
            if !(e > 0.0 && e < self.ell) {
                return Err(bad("eps", format!("eps = {e} must lie in ]0, ell[")));
            }
        }
        Ok(())
    }

    /// Plate configuration.
    pub fn plate(&self) -> AppResult<PlateConfig> {
        Ok(PlateConfig::new(self.ell, self.sigma, self.d)?)
    }

    /// Context for the short specification forms.
    pub fn spec_context(&self) -> AppResult<SpecContext> {
        let cfg = self.plate()?;
        Ok(SpecContext {
            cfg,
            mu: self.mu,
            eps: self.eps.unwrap_or_else(|| cross_table_eps(&cfg)),
        })
    }

    /// Terms, or the default for cross series and modal solves.
    pub fn cross_terms(&self) -> usize {
        self.terms.unwrap_or(CROSS_TERMS)
    }

    /// Terms, or the default for delta loads.
    pub fn delta_terms(&self) -> usize {
        self.terms.unwrap_or(DELTA_TERMS)
    }

    /// Solver choice for optimization cells.
    pub fn solver_choice(&self) -> AppResult<SolverChoice> {
        let method = match self.solver {
            SolverKind::Auto => Method::Auto,
            SolverKind::Analytic => Method::Analytic,
            SolverKind::Modal => Method::Modal,
            SolverKind::Galerkin => {
                return Err(AppError::Usage(
                    "the Galerkin solver is only available for `solve` and `gap`".into(),
                ))
            }
        };
        Ok(SolverChoice {
            method,
            terms: self.cross_terms(),
            panels: self.panels,
            order: self.order,
        })
    }

    /// Galerkin basis size.
    pub fn galerkin_options(&self) -> GalerkinOptions {
        GalerkinOptions {
            modes: self.galerkin_modes,
            degree: self.galerkin_degree,
            panels: self.panels,
            order: self.order,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_presets() {
        let c = RunConfig::from_json("{}", Path::new("c.json")).unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.plate().unwrap(), PlateConfig::preset());
        assert_eq!(c.cross_terms(), 250);
        assert_eq!(c.delta_terms(), 10_000);
    }

    #[test]
    fn unknown_field_is_located() {
        let text = "{\n  \"ell\": 0.02,\n  \"tems\": 3\n}";
        match RunConfig::from_json(text, Path::new("c.json")).unwrap_err() {
            AppError::Config { line, field, .. } => {
                assert_eq!(line, 3);
                assert_eq!(field.as_deref(), Some("tems"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn bad_value_is_located() {
        let text = "{\n  \"terms\": 10,\n  \"sigma\": 1.5\n}";
        match RunConfig::from_json(text, Path::new("c.json")).unwrap_err() {
            AppError::Config {
                line,
                column,
                field,
                ..
            } => {
                assert_eq!((line, column), (3, 3));
                assert_eq!(field.as_deref(), Some("sigma"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn type_error_is_located() {
        let err = RunConfig::from_json("{\"terms\": \"many\"}", Path::new("c.json")).unwrap_err();
        assert!(matches!(err, AppError::Config { line: 1, .. }));
    }
}
