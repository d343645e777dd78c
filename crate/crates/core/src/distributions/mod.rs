//! Random-variate generators and log-densities used by the three models.
//!
//! Conventions: Gamma is shape/rate, Inverse-Gamma is shape/scale, Normal
//! distributions are parametrized by precision, and the Wishart is
//! parametrized so that `E[K] = dof * scale`.

mod gig;
mod mvn;
mod mvt;
mod rng;
mod univariate;
mod wishart;

pub use gig::{sample_gig, GigParams};
pub use mvn::{sample_mvn_covariance_factor, sample_mvn_precision};
pub use mvt::{mvt_logpdf, sample_mvt, student_t_interval, student_t_quantile, MvtParams};
pub use rng::Rng;
pub use univariate::{
    gamma_logpdf, inv_gamma_logpdf, laplace_logpdf, normal_logpdf, sample_chi_squared,
    sample_exponential, sample_gamma, sample_inv_gamma, sample_laplace, sample_normal,
    sample_standard_normal, sample_uniform,
};
pub use wishart::{sample_wishart, wishart_inv_kron_moment};
