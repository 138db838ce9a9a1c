//! Errors of the command-line layer and their JSON form.

use std::path::PathBuf;

use serde::Serialize;

/// Anything that can stop a command.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// A solver or domain error from the core crate.
    #[error(transparent)]
    Core(#[from] plategap_core::Error),
    /// Reading or writing a file failed.
    #[error("io error on {path}: {source}")]
    Io {
        /// File involved.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// A configuration file could not be parsed or holds invalid values.
    #[error("config error in {path} at line {line}, column {column}: {message}")]
    Config {
        /// Config file.
        path: PathBuf,
        /// 1-based line, 0 when unknown.
        line: usize,
        /// 1-based column, 0 when unknown.
        column: usize,
        /// Offending field, when known.
        field: Option<String>,
        /// Description.
        message: String,
    },
    /// A force, reinforcement or class specification string is malformed.
    #[error("cannot parse {what} `{input}`: {message}")]
    Spec {
        /// What was being parsed.
        what: &'static str,
        /// The input text.
        input: String,
        /// Description.
        message: String,
    },
    /// Invalid flag combination or value.
    #[error("usage: {0}")]
    Usage(String),
    /// Serialization failure.
    #[error("serialization error: {0}")]
    Serialize(String),
}

/// Convenience alias.
pub type AppResult<T> = Result<T, AppError>;

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
}

impl AppError {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        use plategap_core::Error as E;
        match self {
            AppError::Core(e) => match e {
                E::Domain(_) => "domain",
                E::Precondition(_) => "precondition",
                E::NearResonance { .. } => "near_resonance",
                E::EigenvalueNotFound { .. } => "eigenvalue_not_found",
                E::Singular(_) => "singular",
                E::Numeric(_) => "numeric",
                E::EmptyClass(_) => "empty_class",
            },
            AppError::Io { .. } => "io",
            AppError::Config { .. } => "config",
            AppError::Spec { .. } => "spec",
            AppError::Usage(_) => "usage",
            AppError::Serialize(_) => "serialize",
        }
    }

    /// Process exit code: 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config { .. } | AppError::Spec { .. } | AppError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// `{"error": {...}}` on one line.
    pub fn to_json(&self) -> String {
        let (path, line, column, field) = match self {
            AppError::Config {
                path,
                line,
                column,
                field,
                ..
            } => (
                Some(path.display().to_string()),
                Some(*line),
                Some(*column),
                field.clone(),
            ),
            AppError::Io { path, .. } => (Some(path.display().to_string()), None, None, None),
            _ => (None, None, None, None),
        };
        let body = ErrorBody {
            kind: self.kind(),
            message: self.to_string(),
            path,
            line,
            column,
            field,
        };
        serde_json::json!({ "error": body }).to_string()
    }

    pub(crate) fn spec(what: &'static str, input: &str, message: impl Into<String>) -> Self {
        AppError::Spec {
            what,
            input: input.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<serde_json::Error> for AppError {
    fn from(e: serde_json::Error) -> Self {
        AppError::Serialize(e.to_string())
    }
}

impl From<csv::Error> for AppError {
    fn from(e: csv::Error) -> Self {
        AppError::Serialize(e.to_string())
    }
}
