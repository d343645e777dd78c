use proptest::prelude::*;
use sparse_bayes::dataset::{pca, preprocess_song, read_dataset, write_dataset, Dataset, SongSeries, Split};
use sparse_bayes::distributions::{sample_standard_normal, Rng};
use sparse_bayes::Matrix;

#[test]
fn isotropic_data_has_flat_spectrum() {
    let mut rng = Rng::new(1);
    let x = Matrix::from_fn(10_000, 6, |_, _| sample_standard_normal(&mut rng));
    let fit = pca(&x, 6).unwrap();
    let e = &fit.explained;
    assert!(e[0] / e[5] < 1.2, "{e}");
    // total variance is preserved
    let total: f64 = (0..6).map(|j| {
        let c = x.column(j);
        let m = c.mean();
        c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 9_999.0
    }).sum();
    assert!((e.sum() - total).abs() < 1e-9 * total);
}

#[test]
fn pca_ignores_row_order() {
    let mut rng = Rng::new(2);
    let x = Matrix::from_fn(50, 4, |_, j| sample_standard_normal(&mut rng) * (j + 1) as f64);
    let rev = Matrix::from_fn(50, 4, |i, j| x[(49 - i, j)]);
    let (a, b) = (pca(&x, 3).unwrap(), pca(&rev, 3).unwrap());
    assert!((a.loadings - b.loadings).amax() < 1e-10);
    assert!((a.explained - b.explained).amax() < 1e-10);
    assert!((a.mean - b.mean).amax() < 1e-12);
}

/// Trim rule restated directly: leading ceil(frames / 10) frames, then any
/// all-zero frames at the end.
fn summary_oracle(features: &[Vec<f64>], annotations: &[[f64; 2]]) -> (Vec<f64>, [f64; 2]) {
    let frames = features.len();
    let start = (frames + 9) / 10;
    let mut end = frames;
    while end > start && features[end - 1].iter().all(|v| *v == 0.0) {
        end -= 1;
    }
    let kept = (end - start) as f64;
    let cols = features[0].len();
    let f = (0..cols).map(|j| features[start..end].iter().map(|r| r[j]).sum::<f64>() / kept).collect();
    let a = [0, 1].map(|k| annotations[start..end].iter().map(|r| r[k]).sum::<f64>() / kept);
    (f, a)
}

proptest! {
    #[test]
    fn song_summary_matches_direct_average(
        frames in 10usize..60,
        zeros in 0usize..5,
        seed in any::<u64>(),
    ) {
        let mut rng = Rng::new(seed);
        let features: Vec<Vec<f64>> = (0..frames)
            .map(|i| if i >= frames - zeros.min(frames - 2) { vec![0.0; 3] } else { (0..3).map(|_| sample_standard_normal(&mut rng)).collect() })
            .collect();
        let annotations: Vec<[f64; 2]> = (0..frames)
            .map(|_| [0, 1].map(|_| sample_standard_normal(&mut rng).tanh()))
            .collect();
        let series = SongSeries {
            song_id: "s".into(),
            feature_frames: Matrix::from_fn(frames, 3, |i, j| features[i][j]),
            annotation_frames: Matrix::from_fn(frames, 2, |i, k| annotations[i][k]),
        };
        let got = preprocess_song(&series).unwrap();
        let (f, a) = summary_oracle(&features, &annotations);
        for j in 0..3 {
            prop_assert!((got.features[j] - f[j]).abs() < 1e-12);
        }
        prop_assert!((got.av[0] - a[0]).abs() < 1e-12 && (got.av[1] - a[1]).abs() < 1e-12);
    }

    #[test]
    fn splits_partition_the_rows(n in 2usize..300, frac in 0.05f64..0.95, seed in any::<u64>()) {
        let s = Split::by_fraction(n, frac, seed).unwrap();
        let mut all: Vec<usize> = s.train_idx.iter().chain(&s.test_idx).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(s.clone(), Split::by_fraction(n, frac, seed).unwrap());
    }
}

#[test]
fn dataset_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = Rng::new(3);
    let x = Matrix::from_fn(12, 5, |_, _| sample_standard_normal(&mut rng) / 3.0);
    let y = Matrix::from_fn(12, 2, |_, _| sample_standard_normal(&mut rng).tanh());
    let ids = (0..12).map(|i| format!("song{i}")).collect();
    let data = Dataset::new(x, y, ids).unwrap().with_pca(Some(3)).unwrap().with_split(Split::by_count(12, 8, 4, 9).unwrap()).unwrap();
    let path = dir.path().join("d.csv");
    write_dataset(&path, &data).unwrap();
    assert_eq!(read_dataset(&path).unwrap(), data);
}
