//! Unbiased estimation of the total treatment effect (TTE) under network
//! interference with Bernoulli randomization.
//!
//! Given a surrogate graph `G`, outcomes `y` and an assignment `z` with
//! treatment probability `p`, the pseudo-inverse estimator is
//!
//! ```text
//! τ̂ = (1/n) Σ_i y_i Σ_{j ∈ M_i} (z_j/p − (1−z_j)/(1−p))
//! ```
//!
//! where `M_i` is the closed neighborhood of `i`. It is unbiased whenever
//! outcomes are linear in `z` and `G` contains the true interference
//! network. The crate also ships the difference-in-means baseline, a
//! conservative variance estimator, a SUTVA test, exact oracles for small
//! instances, and a simulation harness.
//!
//! ```
//! use snipe::graph::Graph;
//! use snipe::randomization::bernoulli_assign;
//! use snipe::estimators::pseudo_inverse;
//!
//! let g = Graph::ring(100, 2).unwrap();
//! let z = bernoulli_assign(100, 0.5, 7).unwrap();
//! let y: Vec<f64> = (0..100).map(|i| 1.0 + z.z()[i] as u8 as f64).collect();
//! let tau = pseudo_inverse(&g, &y, &z).unwrap();
//! assert!(tau.is_finite());
//! ```

pub mod error;
pub mod estimators;
pub mod graph;
pub mod harness;
pub mod inference;
pub mod oracle;
pub mod outcomes;
pub mod randomization;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
pub use estimators::{difference_in_means, interference_contrast, pseudo_inverse, EstimatorKind};
pub use graph::Graph;
pub use inference::{sutva_test, variance_estimate, EstimateReport, MetricReport, VarianceMode};
pub use outcomes::{ExposureModel, LinearModel, Link, PotentialOutcomes};
pub use randomization::{bernoulli_assign, Assignment};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
