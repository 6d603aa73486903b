//! Localization-density POVM laboratory for a free scalar field in 1+1 dimensions.
//!
//! The crate is organised around four layers:
//!
//! - [`mode_field`]: mode-expansion quantization on a periodic grid, single-particle
//!   states, normal-ordered quadratic kernels, `H^{-1/2}`, and a truncated-Fock
//!   brute-force oracle.
//! - [`localization`]: the localization density `Π(x)`, interval probabilities,
//!   the localization current `J^μ` and its continuity residual.
//! - [`geometry`]: coordinate charts on flat spacetime, pulled-back metrics,
//!   Christoffel symbols, weighted vector densities and the density-bundle
//!   connection.
//! - [`covariance`]: the linear-operator form of the localization density, its
//!   discrepancy from the naive form under a non-inertial chart, and the
//!   connection-modified density that restores chart independence.
//!
//! [`cli`] wires these into config-driven experiments; the `locpovm` binary is a
//! thin wrapper around it. See the crate's `examples/` directory for one runnable
//! program per capability.

pub mod cli;
pub mod covariance;
mod error;
pub mod geometry;
pub mod localization;
pub mod mode_field;

pub use error::{Error, Result};
