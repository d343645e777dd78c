//! Fitted-model files and row-wise prediction shared by the subcommands.

use serde::{Deserialize, Serialize};
use sparse_bayes::ard::{fit_ard_with, predict_ard_rows, ArdHyper, ArdOptions, ArdPosterior};
use sparse_bayes::bayes_lasso::{predict_gibbs, run_chain_with, ChainConfig, ChainOutput, LassoHyper};
use sparse_bayes::dataset::Dataset;
use sparse_bayes::distributions::Rng;
use sparse_bayes::mard::{credible_region, fit_mard_with, sample_predictive, MardHyper, MardOptions, MardPosterior};
use sparse_bayes::{Error, Matrix, Result, SpdMatrix, Vector};

use crate::config::{ModelKind, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Posterior {
    /// One chain per response; features are used as given (the chain has its own intercept).
    GibbsLasso { chains: Vec<ChainOutput<f64>> },
    /// One fit per response.
    Ard { posteriors: Vec<ArdPosterior<f64>> },
    Mard { posterior: MardPosterior<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub feature_names: Vec<String>,
    pub response_names: Vec<String>,
    pub level: f64,
    #[serde(flatten)]
    pub posterior: Posterior,
}

impl FittedModel {
    pub fn kind(&self) -> ModelKind {
        match self.posterior {
            Posterior::GibbsLasso { .. } => ModelKind::GibbsLasso,
            Posterior::Ard { .. } => ModelKind::Ard,
            Posterior::Mard { .. } => ModelKind::Mard,
        }
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Predictive summary for one row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowPrediction {
    pub song_id: String,
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl RowPrediction {
    /// Rectangle spanned by the first two responses.
    pub fn region(&self) -> Option<[(f64, f64); 2]> {
        (self.mean.len() == 2).then(|| [(self.lower[0], self.upper[0]), (self.lower[1], self.upper[1])])
    }
}

pub fn fit_model(kind: ModelKind, train: &Dataset, cfg: &RunConfig) -> Result<FittedModel> {
    let level = cfg.level()?;
    let a = cfg.a.unwrap_or(0.01);
    let b = cfg.b.unwrap_or(0.01);
    let c = cfg.c.unwrap_or(0.01);
    let d = cfg.d.unwrap_or(0.01);
    let columns = |k: usize| train.y.column(k).into_owned();
    let posterior = match kind {
        ModelKind::GibbsLasso => {
            let hyper = LassoHyper { a, b, c, d };
            let root = Rng::new(cfg.seed());
            let chain_cfg = ChainConfig::new(
                cfg.iters.unwrap_or(10_000),
                cfg.burn_in.unwrap_or(1_000),
                cfg.thin.unwrap_or(1),
                cfg.seed(),
            );
            let chains = (0..train.y.ncols())
                .map(|k| run_chain_with(&train.x, &columns(k), &hyper, &chain_cfg, &mut root.split(k as u64)))
                .collect::<Result<Vec<_>>>()?;
            Posterior::GibbsLasso { chains }
        }
        ModelKind::Ard => {
            let hyper = ArdHyper { a0: a, b0: b, c0: c, d0: d };
            let opts = ArdOptions { tol: cfg.tol(), max_iter: cfg.max_iter(), intercept: cfg.intercept(), init_d: None };
            let posteriors = (0..train.y.ncols())
                .map(|k| fit_ard_with(&train.x, &columns(k), &hyper, &opts))
                .collect::<Result<Vec<_>>>()?;
            Posterior::Ard { posteriors }
        }
        ModelKind::Mard => {
            let hyper = MardHyper { v0: SpdMatrix::identity(2), nu0: cfg.nu0.unwrap_or(2.0), c, d };
            let opts = MardOptions {
                tol: cfg.tol(),
                max_iter: cfg.max_iter(),
                intercept: cfg.intercept(),
                ..MardOptions::default()
            };
            let posterior = fit_mard_with(&train.x, &train.y, &hyper, &opts).map_err(|e| match e {
                Error::Unsupported(msg) => Error::Unsupported(format!("{msg}; try --components or --model ard")),
                other => other,
            })?;
            Posterior::Mard { posterior }
        }
    };
    Ok(FittedModel {
        feature_names: train.feature_names.clone(),
        response_names: train.response_names.clone(),
        level,
        posterior,
    })
}

/// Predictions at `level` for every row of `x`. Sampled quantities use a
/// stream split from `seed` per row, so results do not depend on batching.
pub fn predict_rows(model: &FittedModel, x: &Matrix<f64>, ids: &[String], level: f64, draws: usize, seed: u64) -> Result<Vec<RowPrediction>> {
    if x.ncols() != model.feature_names.len() {
        return Err(Error::Dimension(format!(
            "data has {} features, model was fitted on {}",
            x.ncols(),
            model.feature_names.len()
        )));
    }
    let root = Rng::new(seed);
    let n = x.nrows();
    let m = model.response_names.len();
    let mut out: Vec<RowPrediction> = ids
        .iter()
        .map(|id| RowPrediction { song_id: id.clone(), mean: vec![0.0; m], lower: vec![0.0; m], upper: vec![0.0; m] })
        .collect();
    match &model.posterior {
        Posterior::GibbsLasso { chains } => {
            for (k, chain) in chains.iter().enumerate() {
                for i in 0..n {
                    let row = x.rows(i, 1).into_owned();
                    let g = predict_gibbs(chain, &row, level, &mut root.split((i * m + k) as u64))?;
                    (out[i].mean[k], out[i].lower[k], out[i].upper[k]) = (g[0].mean, g[0].lower, g[0].upper);
                }
            }
        }
        Posterior::Ard { posteriors } => {
            for (k, post) in posteriors.iter().enumerate() {
                for (i, t) in predict_ard_rows(post, x)?.into_iter().enumerate() {
                    let (lo, hi) = t.interval(level)?;
                    (out[i].mean[k], out[i].lower[k], out[i].upper[k]) = (t.location, lo, hi);
                }
            }
        }
        Posterior::Mard { posterior } => {
            let b = posterior.b_star();
            let off = usize::from(posterior.intercept);
            for i in 0..n {
                let row: Vector<f64> = x.row(i).transpose();
                let samples = sample_predictive(posterior, &row, draws, &mut root.split(i as u64))?;
                let region = credible_region(&samples, level)?;
                for k in 0..2 {
                    let mut mean = b.column(k).rows(off, row.len()).dot(&row);
                    if posterior.intercept {
                        mean += b[(0, k)];
                    }
                    out[i].mean[k] = mean;
                }
                (out[i].lower[0], out[i].upper[0]) = region.a_interval;
                (out[i].lower[1], out[i].upper[1]) = region.v_interval;
            }
        }
    }
    Ok(out)
}

/// Training rows of `data`: its split if present, else all rows.
pub fn training_rows(data: &Dataset) -> Result<Dataset> {
    match &data.split {
        Some(s) => Ok(data.select(&s.train_idx)),
        None => Ok(data.clone()),
    }
}
