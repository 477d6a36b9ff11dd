//! One-dimensional truncated-Wigner simulation of a Raman atom laser.
//!
//! Two c-number fields are evolved: `ψ₁`, the trapped condensate, and `ψ₂`,
//! the outcoupled beam. Each trajectory starts from a coherent condensate
//! plus half a quantum of vacuum noise per grid mode in both fields, and
//! then evolves deterministically under
//!
//! ```text
//! iħ∂ψ₁ = [-ħ²∂²/2m + ½mω²z² - ħΛ₁ + U₁₁(|ψ₁|² - 1/Δz) + U₁₂(|ψ₂|² - 1/2Δz)] ψ₁ - ħΩ e^{-ik₀z} ψ₂
//! iħ∂ψ₂ = [-ħ²∂²/2m - ħΛ₂ - ħδ + U₂₂(|ψ₂|² - 1/Δz) + U₁₂(|ψ₁|² - 1/2Δz)] ψ₂ - ħΩ* e^{ik₀z} ψ₁
//! ```
//!
//! with `z` pointing along the Raman kick (downward). The `1/Δz` terms remove
//! the mean field of the Wigner vacuum. Third-order derivative terms of the
//! Wigner equation are dropped, which leaves no noise during evolution.
//!
//! Validity of the truncation is assumed rather than monitored; it is good
//! for highly occupied modes over the few-tens-of-ms runs used here.

mod config;
mod ensemble;
mod evolve;
mod grid;
pub mod snapshot;
mod state;
mod stepper;

pub use config::{Absorber, BeamFrame, RamanConfig};
pub use ensemble::{run_ensemble, EnsembleOutput, EnsembleSpec, TrajectoryFailure};
pub use evolve::{evolve, EvolveReport};
pub use grid::Grid1D;
pub use state::{density, initial_state, Field, TrajectoryState};
pub use stepper::{step, SplitStepper};
