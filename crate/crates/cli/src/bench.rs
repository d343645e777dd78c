//! ARD against MARD on generated two-response data with a shared sparse
//! coefficient pattern, over a grid of training sizes.

use std::fmt;

use serde::{Deserialize, Serialize};
use sparse_bayes::ard::{fit_ard, predict_ard_rows, ArdHyper};
use sparse_bayes::dataset::synthetic_dataset;
use sparse_bayes::distributions::Rng;
use sparse_bayes::evaluation::{region_hits, rmse};
use sparse_bayes::mard::{credible_region, fit_mard, sample_predictive, MardHyper};
use sparse_bayes::stats::variance;
use sparse_bayes::{Error, Matrix, Result, SpdMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub features: usize,
    pub nonzero: usize,
    pub test_size: usize,
    /// Noise covariance of the two responses, row-major 2x2.
    pub noise_cov: [f64; 4],
    pub level: f64,
    pub draws: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![1000, 500, 100],
            features: 100,
            nonzero: 20,
            test_size: 1000,
            noise_cov: [100.0, 85.0, 85.0, 100.0],
            level: 0.95,
            draws: 1000,
            tol: 1e-3,
            max_iter: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelScores {
    /// Sample standard deviation of `estimate - truth` over all coefficients.
    pub coef_error_sd: f64,
    /// Test RMSE per response.
    pub rmse: [f64; 2],
    /// RMSE over both responses together.
    pub rmse_pooled: f64,
    /// Test points whose truth lies in the credible rectangle.
    pub region_hits: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n_train: usize,
    pub ard: ModelScores,
    /// `Err` carries the reason MARD could not be fitted (e.g. n < p).
    pub mard: std::result::Result<ModelScores, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub n_test: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, n_train: usize) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.n_train == n_train)
    }
}

fn coef_error_sd(estimate: &Matrix<f64>, truth: &Matrix<f64>) -> f64 {
    let errors: Vec<f64> = (estimate - truth).iter().copied().collect();
    variance(&errors).sqrt()
}

fn pooled(truth: &Matrix<f64>, pred: &Matrix<f64>) -> Result<f64> {
    rmse(truth.as_slice(), pred.as_slice())
}

pub fn run_synth_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let max_n = *cfg.sizes.iter().max().ok_or_else(|| Error::Parameter("no training sizes".into()))?;
    if cfg.test_size == 0 || cfg.sizes.contains(&0) {
        return Err(Error::Parameter("training and test sizes must be positive".into()));
    }
    let c = cfg.noise_cov;
    let noise = SpdMatrix::new(Matrix::from_row_slice(2, 2, &c))?;
    let data = synthetic_dataset(max_n + cfg.test_size, cfg.features, cfg.nonzero, &noise, cfg.seed)?;
    let test_idx: Vec<usize> = (max_n..max_n + cfg.test_size).collect();
    let test = data.dataset.select(&test_idx);
    let truth: Vec<[f64; 2]> = (0..cfg.test_size).map(|i| [test.y[(i, 0)], test.y[(i, 1)]]).collect();

    let mut rows = Vec::with_capacity(cfg.sizes.len());
    for (slot, &n) in cfg.sizes.iter().enumerate() {
        let train = data.dataset.select(&(0..n).collect::<Vec<_>>());

        let mut b_ard = Matrix::zeros(cfg.features, 2);
        let mut pred = Matrix::zeros(cfg.test_size, 2);
        let mut intervals = vec![[(0.0, 0.0); 2]; cfg.test_size];
        let (mut iterations, mut converged) = (0, true);
        for k in 0..2 {
            let post = fit_ard(&train.x, &train.y.column(k).into_owned(), &ArdHyper::default(), cfg.tol, cfg.max_iter)?;
            b_ard.set_column(k, &post.beta_star);
            iterations = iterations.max(post.iterations);
            converged &= post.converged;
            for (i, t) in predict_ard_rows(&post, &test.x)?.into_iter().enumerate() {
                pred[(i, k)] = t.location;
                intervals[i][k] = t.interval(cfg.level)?;
            }
        }
        let ard = ModelScores {
            coef_error_sd: coef_error_sd(&b_ard, &data.b_true),
            rmse: [rmse(test.y.column(0).as_slice(), pred.column(0).as_slice())?, rmse(test.y.column(1).as_slice(), pred.column(1).as_slice())?],
            rmse_pooled: pooled(&test.y, &pred)?,
            region_hits: region_hits(&truth, &intervals)?,
            iterations,
            converged,
        };

        let mard = match fit_mard(&train.x, &train.y, &MardHyper::default(), cfg.tol, cfg.max_iter) {
            Err(Error::Unsupported(msg)) => Err(msg),
            Err(e) => return Err(e),
            Ok(post) => {
                let b = post.b_star();
                let pred = &test.x * &b;
                let root = Rng::new(cfg.seed).split(slot as u64);
                let mut regions = Vec::with_capacity(cfg.test_size);
                for i in 0..cfg.test_size {
                    let samples = sample_predictive(&post, &test.x.row(i).transpose(), cfg.draws, &mut root.split(i as u64))?;
                    let r = credible_region(&samples, cfg.level)?;
                    regions.push([r.a_interval, r.v_interval]);
                }
                Ok(ModelScores {
                    coef_error_sd: coef_error_sd(&b, &data.b_true),
                    rmse: [rmse(test.y.column(0).as_slice(), pred.column(0).as_slice())?, rmse(test.y.column(1).as_slice(), pred.column(1).as_slice())?],
                    rmse_pooled: pooled(&test.y, &pred)?,
                    region_hits: region_hits(&truth, &regions)?,
                    iterations: post.iterations,
                    converged: post.converged,
                })
            }
        };
        rows.push(BenchRow { n_train: n, ard, mard });
    }
    Ok(BenchReport { config: cfg.clone(), n_test: cfg.test_size, rows })
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "coefficient error sd")?;
        writeln!(f, "{:>8}  {:>8}  {:>8}", "n", "ARD", "MARD")?;
        let mard_cell = |r: &BenchRow, g: &dyn Fn(&ModelScores) -> String| match &r.mard {
            Ok(s) => g(s),
            Err(_) => "n/a".to_string(),
        };
        for r in &self.rows {
            writeln!(f, "{:>8}  {:>8.4}  {:>8}", r.n_train, r.ard.coef_error_sd, mard_cell(r, &|s| format!("{:.4}", s.coef_error_sd)))?;
        }
        writeln!(f, "\ntest RMSE (both responses)")?;
        writeln!(f, "{:>8}  {:>8}  {:>8}", "n", "ARD", "MARD")?;
        for r in &self.rows {
            writeln!(f, "{:>8}  {:>8.3}  {:>8}", r.n_train, r.ard.rmse_pooled, mard_cell(r, &|s| format!("{:.3}", s.rmse_pooled)))?;
        }
        writeln!(f, "\ncredible regions containing the truth (of {})", self.n_test)?;
        writeln!(f, "{:>8}  {:>8}  {:>8}", "n", "ARD", "MARD")?;
        for r in &self.rows {
            writeln!(f, "{:>8}  {:>8}  {:>8}", r.n_train, r.ard.region_hits, mard_cell(r, &|s| s.region_hits.to_string()))?;
        }
        Ok(())
    }
}
