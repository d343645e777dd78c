//! Reference arousal/valence results on the DEAM data (1802 songs, 1262
//! training and 540 test), kept for side-by-side display.

use sparse_bayes::evaluation::{MetricsReport, ReportTable};

pub const SONGS: usize = 1802;
pub const TRAIN_SONGS: usize = 1262;
pub const TEST_SONGS: usize = 540;

/// `(model, train R2, test R2, interval hits)` for arousal then valence.
const ROWS: [(&str, [f64; 2], [f64; 2], Option<[usize; 2]>); 4] = [
    ("classical-lasso", [0.22, 0.12], [0.15, 0.06], None),
    ("gibbs-lasso", [0.60, 0.45], [0.58, 0.25], Some([201, 185])),
    ("ard", [0.75, 0.59], [0.66, 0.29], Some([270, 231])),
    ("mard", [0.74, 0.56], [0.66, 0.33], Some([517, 518])),
];

/// ARD test points with both responses inside their intervals.
pub const ARD_JOINT_HITS: usize = 131;

pub fn reports() -> Vec<MetricsReport> {
    ROWS.iter()
        .map(|(name, train, test, hits)| MetricsReport {
            model_name: name.to_string(),
            response_names: vec!["arousal".into(), "valence".into()],
            train_r2: train.to_vec(),
            test_r2: test.to_vec(),
            rmse: Vec::new(),
            interval_hits: hits.map(|h| h.to_vec()).unwrap_or_default(),
            region_hits: (*name == "ard").then_some(ARD_JOINT_HITS),
            n_test: TEST_SONGS,
        })
        .collect()
}

pub fn table() -> String {
    ReportTable(&reports()).to_string()
}
