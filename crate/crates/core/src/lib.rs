//! Credit-risk scoring toolkit.
//!
//! * [`dataset`]: tabular data with a binary default target, CSV ingestion,
//!   stratified splitting and a synthetic credit-portfolio generator.
//! * [`linear_models`]: linear/logit/probit probability-of-default models fit by
//!   Newton–Raphson, odds ratios, and a weighted ridge solver.
//! * [`gbm`]: gradient boosted regression trees on binomial deviance.
//! * [`metrics`]: Lorenz curve, AUC and Gini (accuracy-ratio convention), R².
//! * [`lime`]: local ridge-surrogate explanations plus stability and
//!   failure-mode probes.
//! * [`model`]: saved model documents and the [`Blackbox`](lime::Blackbox)
//!   adapter shared by the CLI.

pub mod dataset;
pub mod error;
pub mod gbm;
pub mod lime;
pub mod linear_models;
pub mod metrics;
pub mod model;
pub mod parallel;

pub use error::{Error, ErrorClass, Result};

/// Version tag written into every persisted document.
pub const SCHEMA_VERSION: u32 = 1;

/// Logistic function, split on sign so neither branch overflows.
#[inline]
pub fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let z = eta.exp();
        z / (1.0 + z)
    }
}

/// Log-odds of a probability.
#[inline]
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}
