//! First-exit times of the gradient system `dX = -U'(X) dt + ε dL` driven by
//! Brownian plus symmetric α-stable Lévy noise.
//!
//! * [`noise`]: the driving process, its characteristic exponent and samplers.
//! * [`split`]: the ε-dependent small/large jump decomposition.
//! * [`potential`]: single-well potentials, exit domains, gradient flow.
//! * [`engine`]: Euler and jump-adapted exit simulations, first-order process,
//!   tube deviations.
//! * [`lab`]: closed-form exit laws, Kramers comparison, experiment harness.
//! * [`cli`]: config parsing and the `levy-exit` subcommands.

pub mod cli;
pub mod engine;
pub mod error;
pub mod lab;
pub mod noise;
pub mod potential;
pub mod quad;
pub mod split;
pub mod stats;

pub use engine::{ExitRecord, PathParams, Scheme};
pub use error::{Error, Result};
pub use lab::{ExperimentConfig, StatsSummary, TheoryPrediction};
pub use noise::{RngStream, StableNoiseSpec};
pub use potential::{ExitDomain, PotentialSpec};
pub use split::SplitSpec;
