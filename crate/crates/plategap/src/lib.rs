//! Command-line tables, solves and optimization runs for reinforced plate
//! gap functions.
//!
//! This crate wraps the `no_std` solvers of [`plategap_core`] with what needs
//! an operating system: an FFT grid evaluator, rayon drivers, the embedded
//! reference values, file formats and the `plategap` binary.

#![warn(missing_docs)]
// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod drivers;
pub mod error;
pub mod fft;
pub mod io;
pub mod reference;
pub mod specs;
pub mod tables;

pub use error::{AppError, AppResult};
pub use fft::FftEvaluator;
