//! Kerr squeezing of atom-laser beams.
//!
//! The crate is organised around four layers:
//!
//! * [`single_mode`]: the exact single-mode Kerr model (closed-form quadrature
//!   variance, a Fock-basis brute-force oracle, phase optimisation, and the
//!   time-dependent nonlinearity generalisation).
//! * [`twa`]: a one-dimensional truncated-Wigner simulator of a Raman atom
//!   laser, integrated by symmetric split-step spectral stepping over
//!   ensembles of vacuum-noise-seeded trajectories.
//! * [`quadrature`]: plane-wave local oscillators, mode projection, quadrature
//!   variance estimation and the spatially integrated single-mode prediction.
//! * [`beam`]: beam-scale estimators (gravitational dilution, falling
//!   nonlinearity, two-beam intensity squeezing).
//!
//! [`app`] wires these together behind the `kerrbeam` command-line tool.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod beam;
pub mod config;
pub mod csv;
mod error;
pub mod fock;
pub mod manifest;
pub mod optimize;
pub mod quadrature;
pub mod single_mode;
pub mod study;
pub mod twa;
pub mod units;

pub use error::{Error, Result};
