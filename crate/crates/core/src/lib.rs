//! Sampling toolkit for log-concave distributions supported on convex bodies.
//!
//! The core chain is projected Langevin Monte Carlo: a Euler step on the
//! potential's gradient flow plus Gaussian noise, followed by Euclidean
//! projection back onto the body. Every projection displacement is recorded,
//! which reconstructs the boundary local-time measure of the underlying
//! reflected diffusion. Around the chain sit convex-geometry oracles, a
//! hit-and-run baseline, coupled-chain experiments, empirical checks of the
//! theoretical boundary/coupling/escape bounds, and a Gaussian-cooling volume
//! estimator driven by either sampler.
//!
//! All randomness flows through seeded counter-based generators; any
//! experiment rerun with the same seed reproduces its output bit for bit,
//! regardless of thread count.

// `!(x > 0.0)` is the deliberate NaN-rejecting form of every numeric
// precondition here; rewriting via partial_cmp would obscure that.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Numeric kernels iterate several parallel arrays by index; zipped
// iterators would not make them clearer.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod geometry;
pub mod output;
pub mod potential;
pub mod rng;
pub mod sampler;
pub mod tol;
pub mod volume;

mod vecops;

use thiserror::Error;

/// Unified error type. `exit_code` groups variants the way the CLI reports
/// them: 1 for configuration problems, 2 for numeric failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("projection did not converge after {iters} iterations (residual {residual:.3e})")]
    ProjectionDiverged { iters: usize, residual: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_) | Error::Io(_) => 1,
            Error::ProjectionDiverged { .. } | Error::Numeric(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
