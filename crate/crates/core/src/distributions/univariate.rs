use rand::Rng as _;
use rand_distr::{ChiSquared, Distribution, Exp, Gamma, StandardNormal};
use statrs::function::gamma::ln_gamma;

use super::Rng;
use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")))
    }
}

pub fn sample_uniform(rng: &mut Rng) -> f64 {
    rng.random::<f64>()
}

pub fn sample_standard_normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Normal with the given mean and variance.
pub fn sample_normal(mean: f64, variance: f64, rng: &mut Rng) -> Result<f64> {
    if !(variance >= 0.0) || !variance.is_finite() || !mean.is_finite() {
        return Err(Error::Parameter(format!(
            "normal needs finite mean and non-negative variance, got ({mean}, {variance})"
        )));
    }
    Ok(mean + variance.sqrt() * sample_standard_normal(rng))
}

/// Gamma with shape/rate parametrization (mean `shape / rate`).
pub fn sample_gamma(shape: f64, rate: f64, rng: &mut Rng) -> Result<f64> {
    positive("gamma shape", shape)?;
    positive("gamma rate", rate)?;
    let g = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(g.sample(rng))
}

/// Inverse-Gamma with shape/scale parametrization (mean `scale / (shape - 1)`).
pub fn sample_inv_gamma(shape: f64, scale: f64, rng: &mut Rng) -> Result<f64> {
    Ok(1.0 / sample_gamma(shape, scale, rng)?)
}

pub fn sample_chi_squared(dof: f64, rng: &mut Rng) -> Result<f64> {
    positive("chi-square dof", dof)?;
    let c = ChiSquared::new(dof).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(c.sample(rng))
}

pub fn sample_exponential(rate: f64, rng: &mut Rng) -> Result<f64> {
    positive("exponential rate", rate)?;
    let e = Exp::new(rate).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(e.sample(rng))
}

/// Laplace with density `exp(-|x - location| / scale) / (2 scale)`.
pub fn sample_laplace(location: f64, scale: f64, rng: &mut Rng) -> Result<f64> {
    positive("laplace scale", scale)?;
    let e = sample_exponential(1.0, rng)?;
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    Ok(location + sign * scale * e)
}

pub fn normal_logpdf(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    -0.5 * (LN_2PI + variance.ln() + d * d / variance)
}

pub fn gamma_logpdf(x: f64, shape: f64, rate: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
}

pub fn inv_gamma_logpdf(x: f64, shape: f64, scale: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    shape * scale.ln() - ln_gamma(shape) - (shape + 1.0) * x.ln() - scale / x
}

pub fn laplace_logpdf(x: f64, location: f64, scale: f64) -> f64 {
    -(2.0 * scale).ln() - (x - location).abs() / scale
}
