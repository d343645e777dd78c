use sparse_bayes::distributions::{sample_standard_normal, sample_wishart, Rng};
use sparse_bayes::mard::{
    expected_q_quadform, fit_mard_with, mixed_moments, predict_mard_form, sample_predictive, DofUpdate, MardHyper, MardOptions,
    MardPosterior, MixedMomentIndexing, PredictiveForm,
};
use sparse_bayes::matrix_ops::{kron, vec};
use sparse_bayes::stats::{mean, variance};
use sparse_bayes::{Matrix, SpdMatrix, Vector};

fn posterior(n: usize, seed: u64) -> (MardPosterior<f64>, Matrix<f64>, Matrix<f64>) {
    let mut rng = Rng::new(seed);
    let x = Matrix::from_fn(n, 3, |_, _| sample_standard_normal(&mut rng));
    let b = Matrix::from_row_slice(3, 2, &[1.0, 0.4, 0.0, -0.6, 0.0, 0.0]);
    let noise = Matrix::from_fn(n, 2, |_, _| sample_standard_normal(&mut rng));
    let mix = Matrix::from_row_slice(2, 2, &[0.8, 0.0, 0.5, 0.6]);
    let y = &x * b + noise * mix.transpose();
    let opts = MardOptions { tol: 1e-8, intercept: false, ..MardOptions::default() };
    (fit_mard_with(&x, &y, &MardHyper::default(), &opts).unwrap(), x, y)
}

/// Draws `(K, B)` from the fitted joint: `K ~ Wishart(nu*, V*)`, then
/// `vec(B) ~ N(vec(B*), K^-1 ⊗ M*^-1)` built densely.
fn draw_joint(post: &MardPosterior<f64>, rng: &mut Rng) -> (SpdMatrix<f64>, Matrix<f64>) {
    let k = sample_wishart(&post.v_star, post.nu_star, rng).unwrap();
    let cov = kron(k.inverse().as_matrix(), post.m_star.inverse().as_matrix());
    let z = Vector::from_fn(cov.nrows(), |_, _| sample_standard_normal(rng));
    let l = cov.cholesky().unwrap().l();
    let b = &post.beta_star + l * z;
    (k, Matrix::from_column_slice(post.dim(), 2, b.as_slice()))
}

#[test]
fn degrees_of_freedom_follow_the_selected_rule() {
    let (post, x, y) = posterior(40, 1);
    assert_eq!(post.nu_star, 2.0 + 40.0 + 3.0);
    let opts = MardOptions { intercept: false, dof_update: DofUpdate::Conjugate, ..MardOptions::default() };
    let conj = fit_mard_with(&x, &y, &MardHyper::default(), &opts).unwrap();
    assert_eq!(conj.nu_star, 2.0 + 40.0);
}

#[test]
fn quadratic_form_expectation_matches_simulation() {
    let (post, _, _) = posterior(30, 2);
    let m_inv = post.m_star.inverse();
    let mut rng = Rng::new(3);
    let n = 100_000;
    let draws: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let (k, b) = draw_joint(&post, &mut rng);
            (0..3).map(|j| k.quad_form(&b.row(j).transpose())).collect()
        })
        .collect();
    for j in 0..3 {
        let col: Vec<f64> = draws.iter().map(|d| d[j]).collect();
        let se = (variance(&col) / n as f64).sqrt();
        let exact = expected_q_quadform(&post, j).unwrap();
        // b_j | K ~ N(b*_j, (M*^-1)_jj K^-1), so E[b_j^T K b_j] = nu* b*^T V* b* + 2 (M*^-1)_jj
        let row = post.b_star().row(j).transpose();
        let closed = post.nu_star * post.v_star.quad_form(&row) + 2.0 * m_inv.as_matrix()[(j, j)];
        assert!((exact - closed).abs() < 1e-10 * closed.max(1.0));
        assert!((mean(&col) - exact).abs() < 4.0 * se, "row {j}: {} vs {exact}", mean(&col));
    }
}

#[test]
fn mixed_moments_match_simulation_only_with_exact_indexing() {
    let v = SpdMatrix::new(Matrix::from_row_slice(2, 2, &[0.05, -0.02, -0.02, 0.04])).unwrap();
    let nu = 9.0;
    let mut rng = Rng::new(9);
    let n = 200_000;
    let mut sum = Matrix::<f64>::zeros(2, 2);
    let mut sum_sq = Matrix::<f64>::zeros(2, 2);
    for _ in 0..n {
        let k = sample_wishart(&v, nu, &mut rng).unwrap();
        let prod = k.as_matrix().component_mul(k.inverse().as_matrix());
        sum_sq += prod.component_mul(&prod);
        sum += prod;
    }
    let mc = &sum / n as f64;
    let se = (sum_sq / n as f64 - mc.component_mul(&mc)).map(|x| (x / n as f64).sqrt());
    let exact = mixed_moments(&v, nu, MixedMomentIndexing::Exact).unwrap();
    let listed = mixed_moments(&v, nu, MixedMomentIndexing::LeadingBlock).unwrap();
    let z = |m: &Matrix<f64>| (m - &mc).component_div(&se).amax();
    assert!(z(&exact) < 4.0, "exact: {exact} vs {mc}");
    assert!(z(&listed) > 10.0, "listed: {listed} vs {mc}");
}

fn moments(samples: &[[f64; 2]]) -> ([f64; 2], [f64; 3]) {
    let a: Vec<f64> = samples.iter().map(|s| s[0]).collect();
    let v: Vec<f64> = samples.iter().map(|s| s[1]).collect();
    let (ma, mv) = (mean(&a), mean(&v));
    let cross = samples.iter().map(|s| (s[0] - ma) * (s[1] - mv)).sum::<f64>() / (samples.len() - 1) as f64;
    ([ma, mv], [variance(&a), variance(&v), cross])
}

#[test]
fn factored_sampler_matches_dense_construction() {
    let (post, _, _) = posterior(25, 4);
    let x_new = Vector::from_column_slice(&[0.5, 1.5, -2.0]);
    let n = 200_000;
    let mut rng = Rng::new(5);
    let dense: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let (k, b) = draw_joint(&post, &mut rng);
            let lk = k.inverse().cholesky_factor();
            let e = &lk * Vector::from_fn(2, |_, _| sample_standard_normal(&mut rng));
            let y = b.transpose() * &x_new + e;
            [y[0], y[1]]
        })
        .collect();
    let factored = sample_predictive(&post, &x_new, n, &mut Rng::new(6)).unwrap();
    let (m1, c1) = moments(&dense);
    let (m2, c2) = moments(&factored);
    for k in 0..2 {
        let se = ((c1[k] + c2[k]) / n as f64).sqrt();
        assert!((m1[k] - m2[k]).abs() < 4.0 * se, "mean {k}: {} vs {}", m1[k], m2[k]);
    }
    for k in 0..3 {
        assert!((c1[k] - c2[k]).abs() < 0.03 * c1[0].max(c1[1]), "cov {k}: {} vs {}", c1[k], c2[k]);
    }
    // matches the vec form of the mean as well
    let mean_b = post.b_star().transpose() * &x_new;
    assert!((vec(&Matrix::from_column_slice(2, 1, &m2)) - mean_b).amax() < 0.05);
}

#[test]
fn closed_form_predictive_agrees_with_sampling_and_alternative_does_not() {
    let (post, _, _) = posterior(20, 7);
    let x_new = Vector::from_column_slice(&[2.0, -1.0, 1.0]);
    let draws = sample_predictive(&post, &x_new, 300_000, &mut Rng::new(8)).unwrap();
    let (_, cov) = moments(&draws);
    let check = |form: PredictiveForm| {
        let c = predict_mard_form(&post, &x_new, form).unwrap().covariance().unwrap().into_inner();
        [(c[(0, 0)], cov[0]), (c[(1, 1)], cov[1]), (c[(0, 1)], cov[2])]
            .iter()
            .map(|(want, got)| (got - want).abs() / want.abs().max(cov[0]))
            .fold(0.0, f64::max)
    };
    let derived = check(PredictiveForm::Derived);
    let alternative = check(PredictiveForm::ReciprocalInflation);
    assert!(derived < 0.03, "derived form off by {derived}");
    assert!(alternative > 0.2, "alternative form unexpectedly close: {alternative}");
}
