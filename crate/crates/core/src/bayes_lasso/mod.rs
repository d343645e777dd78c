//! Bayesian LASSO: the Laplace prior written as a Normal/Exponential scale
//! mixture so every full conditional is a standard distribution.
//!
//! ```text
//! y_i | beta, sigma2  ~ N(beta0 + x_i^T beta, sigma2)
//! beta0               ~ flat
//! sigma2              ~ InvGamma(a, b)           shape / scale
//! beta_j | gamma_j    ~ N(0, gamma_j)
//! gamma_j | lambda    ~ Exp(rate lambda / 2)
//! lambda              ~ Gamma(c, d)              shape / rate
//! ```

mod classical;
mod diagnostics;
mod gibbs;
mod output;

pub use classical::{classical_lasso, classical_lasso_with, CoordinateDescentOptions, LassoFit};
pub use diagnostics::{acf, effective_sample_size, mc_stderr};
pub use gibbs::{
    gibbs_step, gibbs_step_with, run_chain, run_chain_with, run_chains, Block, ChainConfig,
    ChainOutput, GibbsConfig, GibbsState, LassoHyper,
};
pub use output::{
    chain_column_names, posterior_summary, predict_gibbs, write_chain_csv, GibbsPrediction,
    PosteriorSummary, VariableSummary,
};
