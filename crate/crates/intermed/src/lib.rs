//! Interventional direct and indirect effects for multiple mediators.
//!
//! `intermed` estimates how much of a binary treatment's effect on an
//! outcome travels through each of several — possibly high-dimensional,
//! mixed continuous/binary — mediators. Counterfactual mediator values are
//! resampled nonparametrically from the observed treatment arms (inverse
//! propensity weighted for observational data), pushed through a fitted
//! outcome model, and averaged by Monte Carlo integration, so no model for
//! the joint mediator distribution is ever required. The total effect is
//! decomposed on a chosen link scale into a direct effect, a joint indirect
//! effect, per-mediator indirect effects, a mutual-dependence component, and
//! a remainder, with exact telescoping identities by construction.
//!
//! Entry points:
//! - [`effects::estimate_effects`] — full decomposition when an unpenalized
//!   outcome model is feasible.
//! - [`highdim::run_all`] — per-mediator double-selection pipeline for
//!   wide mediator blocks.
//! - [`inference::bootstrap`] — percentile / BCa confidence intervals.
//! - [`sim`] — data-generating processes with oracle ground truth.
//!
//! See the `examples/` directory for runnable walkthroughs of each
//! capability, and the `intermed` binary for the file-based CLI.

pub mod cli;
pub mod counterfactual;
pub mod data;
pub mod effects;
pub mod elasticnet;
pub mod error;
pub mod glm;
pub mod highdim;
pub mod inference;
pub mod rng;
pub mod sim;

pub use data::{load_csv, ColumnRole, Dataset, Schema};
pub use effects::{EffectDecomposition, EstimandTable};
pub use error::{Error, Result};
pub use glm::{Family, LinkFunction};
