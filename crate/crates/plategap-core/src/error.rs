//! Error type shared by every solver in the crate.

use alloc::string::String;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes of the plate solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A structural precondition (grid shape, force kind, ...) is not met.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// `|m^2 - alpha^2|` is too small for the exponential force formulas.
    #[error("near resonance: mode {m} with alpha = {alpha}")]
    NearResonance {
        /// Fourier mode.
        m: u32,
        /// Exponential rate of the force.
        alpha: f64,
    },
    /// The torsional determinant has no sign change in its admissible bracket.
    #[error("no torsional eigenvalue found for mode {m}")]
    EigenvalueNotFound {
        /// Fourier mode.
        m: u32,
    },
    /// A linear system that should be nonsingular is numerically singular.
    #[error("singular system: {0}")]
    Singular(String),
    /// A non-finite or otherwise unusable intermediate value.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// A class enumeration produced no admissible element.
    #[error("empty class: {0}")]
    EmptyClass(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
