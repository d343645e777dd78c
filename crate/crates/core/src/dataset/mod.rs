//! Song-level preprocessing, PCA, train/test splits and the synthetic
//! two-response generator.
//!
//! Data handling is in `f64`; cast with `Matrix::cast` for single precision fits.

mod files;
mod pca;
mod synthetic;

pub use files::{
    load_songs, read_dataset, sidecar_path, write_dataset, DatasetMeta, RESPONSE_NAMES,
};
pub use pca::{pca, Pca, PcaFit};
pub use synthetic::{synthetic_dataset, SyntheticData};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::distributions::Rng;
use crate::error::{Error, Result};
use crate::matrix_ops::{Matrix, Vector};

/// Fraction of leading frames discarded from every song.
pub const LEADING_TRIM: f64 = 0.10;
/// Fewest frames a song may have.
pub const MIN_FRAMES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SongSeries {
    pub song_id: String,
    /// frames x features, one row per 2 Hz frame.
    pub feature_frames: Matrix<f64>,
    /// frames x 2: arousal then valence, each in [-1, 1].
    pub annotation_frames: Matrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SongSummary {
    pub song_id: String,
    pub features: Vector<f64>,
    /// Mean arousal and valence.
    pub av: Vector<f64>,
    /// Frames removed by the trailing-zero rule.
    pub trailing_zeros: usize,
}

impl SongSeries {
    pub fn validate(&self) -> Result<()> {
        let frames = self.feature_frames.nrows();
        if frames < MIN_FRAMES {
            return Err(Error::EmptyData(format!(
                "song {} has {frames} frames, at least {MIN_FRAMES} are needed",
                self.song_id
            )));
        }
        if self.annotation_frames.nrows() != frames || self.annotation_frames.ncols() != 2 {
            return Err(Error::Dimension(format!(
                "song {}: annotations are {}x{}, expected {frames}x2",
                self.song_id,
                self.annotation_frames.nrows(),
                self.annotation_frames.ncols()
            )));
        }
        if self.feature_frames.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { variable: format!("features of song {}", self.song_id) });
        }
        if self.annotation_frames.iter().any(|v| !(-1.0..=1.0).contains(v)) {
            return Err(Error::Parameter(format!("song {}: annotations must lie in [-1, 1]", self.song_id)));
        }
        Ok(())
    }
}

/// Summarizes one song: drop the first `ceil(0.1 * frames)` frames, then the
/// trailing run of frames whose features are all exactly zero, and average
/// what is left.
pub fn preprocess_song(series: &SongSeries) -> Result<SongSummary> {
    series.validate()?;
    let frames = series.feature_frames.nrows();
    let start = (LEADING_TRIM * frames as f64 - 1e-9).ceil() as usize;
    let mut end = frames;
    while end > start && series.feature_frames.row(end - 1).iter().all(|v| *v == 0.0) {
        end -= 1;
    }
    if end == start {
        return Err(Error::EmptyData(format!("song {}: every frame was trimmed away", series.song_id)));
    }
    let kept = (end - start) as f64;
    let features = series.feature_frames.rows(start, end - start).row_sum().transpose() / kept;
    let av = series.annotation_frames.rows(start, end - start).row_sum().transpose() / kept;
    Ok(SongSummary { song_id: series.song_id.clone(), features, av, trailing_zeros: frames - end })
}

/// Train/test partition of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    pub seed: u64,
}

impl Split {
    /// Uniform random split with `ceil(n * fraction)` training rows.
    pub fn by_fraction(n: usize, train_fraction: f64, seed: u64) -> Result<Self> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::Parameter(format!("train fraction must be in (0,1), got {train_fraction}")));
        }
        let train = (n as f64 * train_fraction - 1e-9).ceil() as usize;
        if train == 0 || train >= n {
            return Err(Error::Parameter(format!(
                "fraction {train_fraction} of {n} rows leaves an empty train or test set"
            )));
        }
        Self::by_count(n, train, n - train, seed)
    }

    /// Uniform random split with explicit sizes; rows beyond `train + test` are unused.
    pub fn by_count(n: usize, train: usize, test: usize, seed: u64) -> Result<Self> {
        if train == 0 || test == 0 || train + test > n {
            return Err(Error::Parameter(format!(
                "cannot take {train} train and {test} test rows from {n}"
            )));
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut Rng::new(seed));
        let mut train_idx = idx[..train].to_vec();
        let mut test_idx = idx[train..train + test].to_vec();
        train_idx.sort_unstable();
        test_idx.sort_unstable();
        Ok(Self { train_idx, test_idx, seed })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &i in self.train_idx.iter().chain(&self.test_idx) {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Consistency(format!("split index {i} is out of range or repeated")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix<f64>,
    pub y: Matrix<f64>,
    pub song_ids: Vec<String>,
    pub feature_names: Vec<String>,
    pub response_names: Vec<String>,
    pub pca: Option<Pca>,
    pub split: Option<Split>,
}

impl Dataset {
    pub fn new(x: Matrix<f64>, y: Matrix<f64>, song_ids: Vec<String>) -> Result<Self> {
        let feature_names = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
        let response_names = match y.ncols() {
            2 => vec!["arousal".to_string(), "valence".to_string()],
            m => (1..=m).map(|j| format!("y{j}")).collect(),
        };
        let d = Self { x, y, song_ids, feature_names, response_names, pca: None, split: None };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.x.nrows();
        if self.y.nrows() != n || self.song_ids.len() != n {
            return Err(Error::Dimension(format!(
                "x has {n} rows, y has {}, ids {}",
                self.y.nrows(),
                self.song_ids.len()
            )));
        }
        if self.feature_names.len() != self.x.ncols() || self.response_names.len() != self.y.ncols() {
            return Err(Error::Dimension("column names disagree with matrix widths".into()));
        }
        if let Some(s) = &self.split {
            s.validate(n)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Rows `idx` as a new dataset without split information.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(idx),
            y: self.y.select_rows(idx),
            song_ids: idx.iter().map(|&i| self.song_ids[i].clone()).collect(),
            feature_names: self.feature_names.clone(),
            response_names: self.response_names.clone(),
            pca: self.pca.clone(),
            split: None,
        }
    }

    pub fn with_split(mut self, split: Split) -> Result<Self> {
        split.validate(self.n())?;
        self.split = Some(split);
        Ok(self)
    }

    /// `(train, test)` subsets; errors if no split is attached.
    pub fn train_test(&self) -> Result<(Self, Self)> {
        let s = self.split.as_ref().ok_or_else(|| Error::Parameter("dataset has no train/test split".into()))?;
        Ok((self.select(&s.train_idx), self.select(&s.test_idx)))
    }

    /// Replaces the features by their principal component scores.
    pub fn with_pca(mut self, n_components: Option<usize>) -> Result<Self> {
        let k = n_components.unwrap_or_else(|| self.x.ncols().min(self.n()));
        let fit = pca(&self.x, k)?;
        self.x = fit.scores.clone();
        self.feature_names = (1..=k).map(|j| format!("pc{j}")).collect();
        self.pca = Some(fit.model());
        Ok(self)
    }
}

/// Stacks song summaries into a dataset, in input order.
pub fn assemble(summaries: &[SongSummary]) -> Result<Dataset> {
    let first = summaries.first().ok_or_else(|| Error::EmptyData("no songs".into()))?;
    let p = first.features.len();
    if summaries.iter().any(|s| s.features.len() != p) {
        return Err(Error::Dimension("songs disagree on feature count".into()));
    }
    let x = Matrix::from_fn(summaries.len(), p, |i, j| summaries[i].features[j]);
    let y = Matrix::from_fn(summaries.len(), 2, |i, j| summaries[i].av[j]);
    Dataset::new(x, y, summaries.iter().map(|s| s.song_id.clone()).collect())
}
