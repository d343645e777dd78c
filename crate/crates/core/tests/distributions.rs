use sparse_bayes::distributions::{
    sample_gig, sample_wishart, wishart_inv_kron_moment, GigParams, Rng,
};
use sparse_bayes::matrix_ops::kron;
use sparse_bayes::stats::{mean, variance};
use sparse_bayes::{Matrix, SpdMatrix};
use statrs::distribution::{ChiSquared, ContinuousCDF, Gamma, InverseGamma};

/// One-sample Kolmogorov-Smirnov statistic against `cdf`.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

/// 0.1% critical value of the KS statistic.
fn ks_critical(n: usize) -> f64 {
    1.95 / (n as f64).sqrt()
}

fn gig_draws(order: f64, a: f64, b: f64, n: usize, seed: u64) -> Vec<f64> {
    let params = GigParams::new(order, a, b).unwrap();
    let mut rng = Rng::new(seed);
    (0..n).map(|_| sample_gig(&params, &mut rng).unwrap()).collect()
}

#[test]
fn gig_minus_half_is_inverse_gaussian() {
    // GIG(-1/2, a, b) is inverse Gaussian with mean sqrt(b/a) and shape b.
    for &(a, b) in &[(1.0, 1.0), (4.0, 0.25), (0.01, 9.0)] {
        let xs = gig_draws(-0.5, a, b, 50_000, 11);
        let mu: f64 = (b / a).sqrt();
        let var = mu.powi(3) / b;
        let se = (var / xs.len() as f64).sqrt();
        assert!((mean(&xs) - mu).abs() < 4.0 * se, "a={a} b={b}: mean {} vs {mu}", mean(&xs));
        // closed-form inverse Gaussian CDF
        let cdf = |x: f64| {
            let n = statrs::distribution::Normal::new(0.0, 1.0).unwrap();
            let s = (b / x).sqrt();
            n.cdf(s * (x / mu - 1.0)) + (2.0 * b / mu).exp() * n.cdf(-s * (x / mu + 1.0))
        };
        let d = ks_statistic(xs, cdf);
        assert!(d < ks_critical(50_000), "a={a} b={b}: KS {d}");
    }
}

#[test]
fn gig_limits_are_gamma_and_inverse_gamma() {
    // b -> 0 with order > 0 gives Gamma(order, rate a/2); a -> 0 with order < 0
    // gives InvGamma(-order, scale b/2).
    let xs = gig_draws(1.7, 3.0, 1e-12, 20_000, 12);
    let g = Gamma::new(1.7, 1.5).unwrap();
    assert!(ks_statistic(xs, |x| g.cdf(x)) < ks_critical(20_000));
    let xs = gig_draws(-2.5, 1e-12, 4.0, 20_000, 13);
    let ig = InverseGamma::new(2.5, 2.0).unwrap();
    assert!(ks_statistic(xs, |x| ig.cdf(x)) < ks_critical(20_000));
}

#[test]
fn gig_scaling_property() {
    // c X ~ GIG(order, a / c, b c) when X ~ GIG(order, a, b)
    let c = 3.0;
    let base: Vec<f64> = gig_draws(0.3, 2.0, 5.0, 40_000, 14).into_iter().map(|x| c * x).collect();
    let scaled = gig_draws(0.3, 2.0 / c, 5.0 * c, 40_000, 15);
    let (m1, m2) = (mean(&base), mean(&scaled));
    let se = ((variance(&base) + variance(&scaled)) / 40_000.0).sqrt();
    assert!((m1 - m2).abs() < 4.0 * se, "{m1} vs {m2}");
}

#[test]
fn one_dimensional_wishart_is_scaled_chi_squared() {
    let mut rng = Rng::new(21);
    let (scale, dof) = (2.5, 4.3);
    let s = SpdMatrix::from_diagonal(&[scale]).unwrap();
    let xs: Vec<f64> = (0..20_000).map(|_| sample_wishart(&s, dof, &mut rng).unwrap().as_matrix()[(0, 0)] / scale).collect();
    let chi = ChiSquared::new(dof).unwrap();
    let d = ks_statistic(xs, |x| chi.cdf(x));
    assert!(d < ks_critical(20_000), "KS {d}");
}

#[test]
fn wishart_mean_and_inverse_kron_moment_by_simulation() {
    let v = SpdMatrix::new(Matrix::from_row_slice(2, 2, &[0.8, 0.3, 0.3, 0.5])).unwrap();
    let dof = 7.0;
    let mut rng = Rng::new(22);
    let n = 200_000;
    let mut sum_k = Matrix::zeros(2, 2);
    let mut sum = Matrix::zeros(4, 4);
    let mut sum_sq = Matrix::zeros(4, 4);
    for _ in 0..n {
        let k = sample_wishart(&v, dof, &mut rng).unwrap();
        let prod = kron(k.inverse().as_matrix(), k.as_matrix());
        sum_k += k.as_matrix();
        sum_sq += prod.component_mul(&prod);
        sum += prod;
    }
    let nf = n as f64;
    assert!((sum_k / nf - v.as_matrix() * dof).amax() < 0.05);
    let mc = &sum / nf;
    let exact = wishart_inv_kron_moment(&v, dof).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let se = ((sum_sq[(i, j)] / nf - mc[(i, j)].powi(2)) / nf).sqrt();
            assert!((mc[(i, j)] - exact[(i, j)]).abs() < 4.0 * se + 1e-12, "({i},{j}): {} vs {}", mc[(i, j)], exact[(i, j)]);
        }
    }
}
