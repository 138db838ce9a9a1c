//! Torsional gap functions of partially hinged rectangular plates.
//!
//! The plate is `Omega = ]0, pi[ x ]-ell, ell[`, hinged on the short edges and
//! free on the long ones. A force `f` bends it and a reinforcement `D` either
//! stiffens the bending energy or weakens the force. The *gap function*
//! `G(x) = u(x, ell) - u(x, -ell)` measures the torsional response; its sup
//! over `x` is the maximal gap.
//!
//! The crate is `no_std` (with `alloc`) and contains:
//!
//! * [`config`], [`geometry`], [`force`], [`parity`]: the domain model;
//! * [`series`]: closed-form free-plate kernels and gap-series maximization;
//! * [`cross`]: the explicit solution for cross reinforcements under
//!   exponential forces and its `alpha -> infinity` limits;
//! * [`modal`], [`galerkin`], [`eigen`]: numerical solvers for arbitrary
//!   reinforcements and the torsional eigenpairs;
//! * [`optimize`]: worst-force and best-reinforcement searches.
//!
//! IO, command line handling, FFT evaluation and parallel drivers live in the
//! companion `plategap` crate.

#![cfg_attr(not(test), no_std)]
#![warn(missing_docs)]
// `!(x > 0.0)` style guards reject NaN along with out-of-range values; index
// loops keep the assembly code close to the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod config;
pub mod cross;
pub mod eigen;
pub mod error;
pub mod force;
pub mod galerkin;
pub mod geometry;
pub mod modal;
pub mod num;
pub mod optimize;
pub mod parity;
pub mod series;

pub use config::PlateConfig;
pub use error::{Error, Result};
pub use force::{Force, GSpec, Normalization, Profile};
pub use geometry::{Geometry, Reinforcement};
pub use series::GapSeries;
