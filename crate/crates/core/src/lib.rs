//! Sparse Bayesian regression for correlated responses.
//!
//! Three inference engines share one set of linear-algebra and sampling
//! primitives:
//!
//! * [`bayes_lasso`]: Gibbs sampler for the Bayesian LASSO.
//! * [`ard`]: mean-field variational ARD for a single response.
//! * [`mard`]: variational ARD for two correlated responses with a
//!   Normal-Wishart prior and Kronecker-structured precision.
//!
//! Every model is generic over the scalar type ([`Real`] covers `f32` and
//! `f64`); the `*64` / `*32` aliases below name the common instantiations.

pub mod error;
pub mod io;
pub mod mard;
pub mod matrix_ops;
pub mod scalar;
pub mod stats;

pub mod ard;
pub mod bayes_lasso;
pub mod dataset;
pub mod distributions;
pub mod evaluation;
pub mod recommender;

pub use error::{Error, ErrorKind, Result};
pub use matrix_ops::{Matrix, SpdMatrix, Vector};
pub use scalar::Real;

pub type LassoHyper64 = bayes_lasso::LassoHyper<f64>;
pub type LassoHyper32 = bayes_lasso::LassoHyper<f32>;
pub type ChainOutput64 = bayes_lasso::ChainOutput<f64>;
pub type ChainOutput32 = bayes_lasso::ChainOutput<f32>;
pub type ArdHyper64 = ard::ArdHyper<f64>;
pub type ArdHyper32 = ard::ArdHyper<f32>;
pub type ArdPosterior64 = ard::ArdPosterior<f64>;
pub type ArdPosterior32 = ard::ArdPosterior<f32>;
pub type MardHyper64 = mard::MardHyper<f64>;
pub type MardHyper32 = mard::MardHyper<f32>;
pub type MardPosterior64 = mard::MardPosterior<f64>;
pub type MardPosterior32 = mard::MardPosterior<f32>;
