//! Probabilistic PCR5 (p-PCR5) density fusion and distributed bearing-only
//! particle filtering.
//!
//! The crate is organized bottom-up:
//!
//! - [`fusion_rules`]: discrete PCR5, discrete and continuous p-PCR5,
//!   Bayesian product fusion, and the sampling kernels used by the filters.
//! - [`filtering`]: single-sensor particle-filter machinery (motion model,
//!   azimuth likelihood, systematic resampling, kernel density estimation).
//! - [`distributed`]: the Bayesian, p-PCR5, whitened p-PCR5 and mean fusion
//!   architectures with their feedback loop.
//! - [`scenario`]: truth simulation, experiment configuration, single runs
//!   and Monte-Carlo batches.
//! - [`cli`]: the batch command-line front end and its CSV outputs.

pub mod cli;
pub mod distributed;
pub mod error;
pub mod filtering;
pub mod fusion_rules;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
