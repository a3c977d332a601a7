//! Desk-scale simulation of quantum nearest-neighbor classification.
//!
//! The crate evaluates the exact success probabilities of the swap-test and
//! centroid-distance circuits, simulates amplitude estimation (plain and
//! median-voted) and Dürr–Høyer minimum finding with full oracle-query
//! accounting, and reproduces the classical noise-robustness experiments that
//! accompany these algorithms.
//!
//! Module map:
//!
//! * [`oracle`]: sparse vectors, the `O`/`F` data oracles and the query ledger.
//! * [`circuits`]: analytic circuit probabilities plus a small statevector
//!   cross-check.
//! * [`amplitude`]: amplitude-estimation outcome distributions and sampling.
//! * [`minfind`]: exponential Grover search and Dürr–Høyer minimum finding.
//! * [`classify`]: end-to-end classifiers, k-NN, k-means and closed-form
//!   query bounds.
//! * [`baselines`]: direct and Monte-Carlo classical comparators.
//! * [`experiments`]: datasets, noise sweeps and the scaling studies.

pub mod amplitude;
pub mod baselines;
pub mod circuits;
pub mod classify;
mod error;
pub mod experiments;
pub mod minfind;
pub mod oracle;
pub mod report;
pub mod rng;
mod statevector;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Euler–Mascheroni constant as used by the failure-budget formulas.
pub const EULER_GAMMA: f64 = 0.5772156649;

/// Lower bound on the single-shot success probability of amplitude estimation.
pub const AE_SUCCESS: f64 = 8.0 / (std::f64::consts::PI * std::f64::consts::PI);
