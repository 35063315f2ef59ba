//! Phase structure of the generalized mean-field Potts model.
//!
//! The `q`-color Potts model on the complete graph with energy
//! `-(beta / z) * sum_i nu_i^z` in the empirical color distribution `nu`.
//! This crate computes the solutions of its mean-field equation, the
//! critical temperatures and transition order, decides Gibbsianness of the
//! fuzzy (coarse-grained) model and of collapsing schemes, and provides exact
//! finite-volume enumerators and Monte Carlo samplers to check the
//! asymptotic formulas against.

pub mod critical;
pub mod error;
pub mod finite;
pub mod fuzzy;
pub mod model;
pub mod numeric;
pub mod scheme;
pub mod verify;

pub use critical::{CriticalSolver, CriticalTemperatures, Tolerances, TransitionOrder};
pub use error::{Error, Result, SchemeViolation};
pub use model::{Magnetization, ModelParams, ProbabilityVector};
