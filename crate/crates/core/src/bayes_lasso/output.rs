use std::io::Write;

use serde::{Deserialize, Serialize};

use super::gibbs::{ChainOutput, GibbsState};
use crate::distributions::{sample_standard_normal, Rng};
use crate::error::{Error, Result};
use crate::matrix_ops::Matrix;
use crate::scalar::Real;
use crate::stats::{equal_tail_interval, mean};

/// Column names of a chain dump: `beta0, beta_1..beta_p, sigma2, lambda, gamma_1..gamma_p`.
pub fn chain_column_names(p: usize) -> Vec<String> {
    let mut names = vec!["beta0".to_string()];
    names.extend((1..=p).map(|j| format!("beta_{j}")));
    names.push("sigma2".into());
    names.push("lambda".into());
    names.extend((1..=p).map(|j| format!("gamma_{j}")));
    names
}

fn flatten<T: Real>(s: &GibbsState<T>) -> Vec<f64> {
    let mut row = vec![s.beta0.as_f64()];
    row.extend(s.beta.iter().map(|v| v.as_f64()));
    row.push(s.sigma2.as_f64());
    row.push(s.lambda.as_f64());
    row.extend(s.gamma.iter().map(|v| v.as_f64()));
    row
}

/// One CSV row per kept draw.
pub fn write_chain_csv<T: Real, W: Write>(chain: &ChainOutput<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(chain_column_names(chain.p()))?;
    for s in &chain.draws {
        w.write_record(flatten(s).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSummary {
    pub name: String,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub level: f64,
    pub draws: usize,
    pub variables: Vec<VariableSummary>,
}

impl PosteriorSummary {
    pub fn get(&self, name: &str) -> Option<&VariableSummary> {
        self.variables.iter().find(|v| v.name == name)
    }
}

/// Posterior mean and equal-tail interval for every chain variable.
pub fn posterior_summary<T: Real>(chain: &ChainOutput<T>, level: f64) -> Result<PosteriorSummary> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Parameter(format!("level must be in (0,1), got {level}")));
    }
    if chain.draws.len() < 2 {
        return Err(Error::EmptyData(format!(
            "summary needs at least 2 kept draws, chain has {}",
            chain.draws.len()
        )));
    }
    let rows: Vec<Vec<f64>> = chain.draws.iter().map(flatten).collect();
    let variables = chain_column_names(chain.p())
        .into_iter()
        .enumerate()
        .map(|(k, name)| {
            let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            let (lower, upper) = equal_tail_interval(&col, level)?;
            Ok(VariableSummary { name, mean: mean(&col), lower, upper })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PosteriorSummary { level, draws: chain.draws.len(), variables })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsPrediction {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Posterior-predictive mean and equal-tail interval for each row of `x_new`:
/// one noisy response is simulated per kept draw.
pub fn predict_gibbs<T: Real>(
    chain: &ChainOutput<T>,
    x_new: &Matrix<T>,
    level: f64,
    rng: &mut Rng,
) -> Result<Vec<GibbsPrediction>> {
    if chain.draws.len() < 2 {
        return Err(Error::EmptyData("prediction needs at least 2 kept draws".into()));
    }
    if x_new.ncols() != chain.p() {
        return Err(Error::Dimension(format!(
            "x has {} columns but the chain has {} coefficients",
            x_new.ncols(),
            chain.p()
        )));
    }
    let mut out = Vec::with_capacity(x_new.nrows());
    for i in 0..x_new.nrows() {
        let row = x_new.row(i).transpose();
        let mut fitted = Vec::with_capacity(chain.draws.len());
        let mut sims = Vec::with_capacity(chain.draws.len());
        for s in &chain.draws {
            let mu = s.beta0.as_f64() + row.dot(&s.beta).as_f64();
            fitted.push(mu);
            sims.push(mu + s.sigma2.as_f64().sqrt() * sample_standard_normal(rng));
        }
        let (lower, upper) = equal_tail_interval(&sims, level)?;
        out.push(GibbsPrediction { mean: mean(&fitted), lower, upper });
    }
    Ok(out)
}
