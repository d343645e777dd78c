use proptest::prelude::*;
use sparse_bayes::evaluation::{interval_hits, r_squared, region_hits, rmse};

fn data() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..40).prop_flat_map(|n| (prop::collection::vec(-10.0f64..10.0, n), prop::collection::vec(-10.0f64..10.0, n)))
}

proptest! {
    #[test]
    fn r_squared_is_affine_invariant((y, f) in data(), scale in 0.1f64..10.0, shift in -5.0f64..5.0) {
        prop_assume!(y.iter().any(|v| (v - y[0]).abs() > 1e-3));
        let t = |v: &[f64]| v.iter().map(|x| scale * x + shift).collect::<Vec<_>>();
        let (a, b) = (r_squared(&y, &f).unwrap(), r_squared(&t(&y), &t(&f)).unwrap());
        prop_assert!((a - b).abs() < 1e-8 * a.abs().max(1.0));
        prop_assert!(a <= 1.0);
        let r = rmse(&y, &f).unwrap();
        prop_assert!((rmse(&t(&y), &t(&f)).unwrap() - scale * r).abs() < 1e-9 * r.max(1.0));
    }

    #[test]
    fn shrinking_predictions_towards_truth_never_hurts((y, f) in data(), w in 0.0f64..1.0) {
        prop_assume!(y.iter().any(|v| (v - y[0]).abs() > 1e-3));
        let closer: Vec<f64> = y.iter().zip(&f).map(|(a, b)| a + w * (b - a)).collect();
        prop_assert!(rmse(&y, &closer).unwrap() <= rmse(&y, &f).unwrap() + 1e-12);
        prop_assert!(r_squared(&y, &closer).unwrap() >= r_squared(&y, &f).unwrap() - 1e-12);
    }

    #[test]
    fn wider_intervals_hit_at_least_as_often((y, c) in data(), half in 0.0f64..5.0, extra in 0.0f64..5.0) {
        let narrow: Vec<_> = c.iter().map(|m| (m - half, m + half)).collect();
        let wide: Vec<_> = c.iter().map(|m| (m - half - extra, m + half + extra)).collect();
        prop_assert!(interval_hits(&y, &wide).unwrap() >= interval_hits(&y, &narrow).unwrap());
    }

    #[test]
    fn region_hits_match_brute_force(pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, -1.0f64..1.0, 0.0f64..1.5), 1..50)) {
        let truth: Vec<[f64; 2]> = pts.iter().map(|p| [p.0, p.1]).collect();
        let regions: Vec<[(f64, f64); 2]> = pts.iter().map(|p| [(p.2 - p.3, p.2 + p.3), (-p.3, p.3)]).collect();
        let brute = truth
            .iter()
            .zip(&regions)
            .filter(|(t, r)| r[0].0 <= t[0] && t[0] <= r[0].1 && r[1].0 <= t[1] && t[1] <= r[1].1)
            .count();
        prop_assert_eq!(region_hits(&truth, &regions).unwrap(), brute);
        // a region hit requires a hit on both axes
        let a: Vec<f64> = truth.iter().map(|t| t[0]).collect();
        let ia: Vec<_> = regions.iter().map(|r| r[0]).collect();
        prop_assert!(brute <= interval_hits(&a, &ia).unwrap());
    }
}
