//! Run configuration: an optional flat JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sparse_bayes::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    GibbsLasso,
    Ard,
    Mard,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::GibbsLasso => "gibbs-lasso",
            ModelKind::Ard => "ard",
            ModelKind::Mard => "mard",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RankingKind {
    Distance,
    Random,
}

/// Every setting a subcommand may read. All fields are optional so a config
/// file and the flags can each supply a subset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Model to fit
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Input file (dataset CSV unless stated otherwise)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed for every random choice
    #[arg(long)]
    pub seed: Option<u64>,
    /// Gibbs iterations
    #[arg(long)]
    pub iters: Option<usize>,
    /// Gibbs burn-in iterations
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Keep every n-th Gibbs draw
    #[arg(long)]
    pub thin: Option<usize>,
    /// Convergence tolerance for the variational fits
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap for the variational fits
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Credible level for intervals and regions
    #[arg(long)]
    pub level: Option<f64>,
    /// Training rows (count-based split)
    #[arg(long, conflicts_with = "train_fraction")]
    pub train_count: Option<usize>,
    /// Test rows for a count-based split (default: the remaining rows)
    #[arg(long, requires = "train_count")]
    pub test_count: Option<usize>,
    /// Training share (fraction-based split)
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Principal components to keep (0 disables PCA; default all)
    #[arg(long)]
    pub components: Option<usize>,
    /// Fit an intercept (default true)
    #[arg(long)]
    pub intercept: Option<bool>,
    /// First prior hyperparameter (noise shape)
    #[arg(long)]
    pub a: Option<f64>,
    /// Second prior hyperparameter (noise scale/rate)
    #[arg(long)]
    pub b: Option<f64>,
    /// Relevance / penalty prior shape
    #[arg(long)]
    pub c: Option<f64>,
    /// Relevance / penalty prior rate
    #[arg(long)]
    pub d: Option<f64>,
    /// Wishart prior degrees of freedom (MARD)
    #[arg(long)]
    pub nu0: Option<f64>,
    /// Penalty of the classical LASSO baseline
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Predictive draws per row for sampled regions
    #[arg(long)]
    pub draws: Option<usize>,
    /// Fitted model file
    #[arg(long)]
    pub fit: Option<PathBuf>,
    /// Directory of per-song feature CSVs
    #[arg(long)]
    pub features_dir: Option<PathBuf>,
    /// Annotation CSV (song_id, frame, arousal, valence)
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Predictions CSV to score instead of fitting
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Catalog CSV (song_id, arousal, valence)
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Query song id
    #[arg(long)]
    pub song: Option<String>,
    /// Number of recommendations
    #[arg(long)]
    pub k: Option<usize>,
    /// Ranking inside the credible rectangle
    #[arg(long, value_enum)]
    pub ranking: Option<RankingKind>,
    /// Training sizes for the synthetic benchmark, comma separated
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Feature count for the synthetic benchmark
    #[arg(long)]
    pub features: Option<usize>,
    /// Nonzero coefficient rows for the synthetic benchmark
    #[arg(long)]
    pub nonzero: Option<usize>,
    /// Test rows for the synthetic benchmark
    #[arg(long)]
    pub test_size: Option<usize>,
    /// Uncorrelated unit-variance noise instead of the correlated default
    #[arg(long)]
    pub independent_noise: Option<bool>,
    /// Response to export (name or zero-based index)
    #[arg(long)]
    pub response: Option<String>,
    /// Largest autocorrelation lag to export
    #[arg(long)]
    pub max_lag: Option<usize>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parameter(format!("config file {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parameter(format!("config file {}: {e}", path.display())))
    }

    /// Values set in `flags` win over values in `self`.
    pub fn overlay(self, flags: &RunConfig) -> Result<Self> {
        let to_map = |c: &RunConfig| -> Result<Map<String, Value>> {
            match serde_json::to_value(c)? {
                Value::Object(m) => Ok(m),
                _ => unreachable!("RunConfig serializes to an object"),
            }
        };
        let mut base = to_map(&self)?;
        for (k, v) in to_map(flags)? {
            if !v.is_null() {
                base.insert(k, v);
            }
        }
        Ok(serde_json::from_value(Value::Object(base))?)
    }

    pub fn require_input(&self) -> Result<&Path> {
        self.input.as_deref().ok_or_else(|| Error::Parameter("--input is required".into()))
    }

    pub fn require_output(&self) -> Result<&Path> {
        self.output.as_deref().ok_or_else(|| Error::Parameter("--output is required".into()))
    }

    pub fn require_model(&self) -> Result<ModelKind> {
        self.model.ok_or_else(|| Error::Parameter("--model is required (gibbs-lasso, ard or mard)".into()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn level(&self) -> Result<f64> {
        let level = self.level.unwrap_or(0.95);
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::Parameter(format!("--level must be in (0,1), got {level}")));
        }
        Ok(level)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-3)
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter.unwrap_or(1_000)
    }

    pub fn draws(&self) -> usize {
        self.draws.unwrap_or(1_000)
    }

    pub fn intercept(&self) -> bool {
        self.intercept.unwrap_or(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: RunConfig = serde_json::from_str(r#"{"seed": 3, "tol": 0.01, "model": "mard"}"#).unwrap();
        let flags = RunConfig { seed: Some(9), ..RunConfig::default() };
        let merged = file.overlay(&flags).unwrap();
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.tol, Some(0.01));
        assert_eq!(merged.model, Some(ModelKind::Mard));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed": 3}"#).is_err());
    }
}
