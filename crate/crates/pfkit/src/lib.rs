//! Rényi Pufferfish privacy toolkit.
//!
//! Mechanisms here add noise to a query `f(X)` so that the output
//! distributions conditioned on any protected pair of secrets stay close in
//! Rényi divergence, for every prior the adversary might hold. The crate is
//! organised bottom-up:
//!
//! - [`types`]: distributions, noise descriptors, guarantees, frameworks.
//! - [`renyi`]: shifted-noise divergences, guarantee conversions, and a
//!   numeric divergence oracle.
//! - [`transport`]: exact W∞, W_p, proximity thresholds and the
//!   distribution-aware transport cost on discrete distributions.
//! - [`mechanisms`]: calibration for the Wasserstein mechanisms, sampling,
//!   and noise application.
//! - [`pabi`]: accounting for contractive noisy iterations.
//! - [`priors`]: closed-form sensitivities for structured priors.
//! - [`joint`]: enumerated joint priors and conditional query laws.
//! - [`cli`]: the command-line front end used by the `pfkit` binary.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod joint;
pub mod mechanisms;
pub mod pabi;
pub mod priors;
pub mod renyi;
pub mod transport;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    Alpha, DiscreteDistribution, Framework, NoiseFamily, NoiseSpec, Norm, RppGuarantee, SecretPairInstance,
};
