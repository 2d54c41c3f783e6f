//! Rate coverage analysis of a two-tier millimeter-wave cellular network
//! with biased user association.
//!
//! The library models base stations of each tier as Poisson point
//! processes thinned to line-of-sight balls, computes association
//! probabilities and per-BS loads under a micro-tier bias, evaluates the
//! network's rate coverage probability through interference Laplace
//! transforms, cross-validates everything against a seeded Monte Carlo
//! simulator, and searches for the bias maximizing rate coverage.
//!
//! Entry points:
//! - [`analysis::association_probabilities`] and [`analysis::rate_coverage`]
//!   for the analytical pipeline,
//! - [`montecarlo`] for the simulation oracle,
//! - [`optimizer::optimize_bias`] and [`optimizer::sweep`] for experiments,
//! - [`cli::run`] for the command-line orchestration.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod optimizer;

pub use error::{Error, Result};
pub use model::{FadingModel, NetworkConfig, Tier, TierParams};
