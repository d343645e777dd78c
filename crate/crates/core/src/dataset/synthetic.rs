use rand::seq::index::sample;

use super::Dataset;
use crate::distributions::{sample_standard_normal, sample_uniform, Rng};
use crate::error::{Error, Result};
use crate::matrix_ops::{Matrix, SpdMatrix};

/// Generated data together with the coefficients that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub dataset: Dataset,
    /// p x m.
    pub b_true: Matrix<f64>,
    /// Rows of `b_true` that are nonzero, ascending.
    pub support: Vec<usize>,
}

/// `Y = X B + E` with standard normal `X`, rows of `E` drawn from
/// `N(0, noise_cov)` and `k_nonzero` shared nonzero rows of `B`, each entry
/// uniform on `[-2, -0.5] ∪ [0.5, 2]`.
pub fn synthetic_dataset(
    n: usize,
    p: usize,
    k_nonzero: usize,
    noise_cov: &SpdMatrix<f64>,
    seed: u64,
) -> Result<SyntheticData> {
    if n == 0 || p == 0 {
        return Err(Error::Parameter(format!("need n, p >= 1, got n = {n}, p = {p}")));
    }
    if k_nonzero > p {
        return Err(Error::Parameter(format!("k_nonzero = {k_nonzero} exceeds p = {p}")));
    }
    let m = noise_cov.dim();
    let mut rng = Rng::new(seed);
    let mut support = sample(&mut rng, p, k_nonzero).into_vec();
    support.sort_unstable();
    let mut b_true = Matrix::zeros(p, m);
    for &j in &support {
        for r in 0..m {
            let magnitude = 0.5 + 1.5 * sample_uniform(&mut rng);
            let sign = if sample_uniform(&mut rng) < 0.5 { -1.0 } else { 1.0 };
            b_true[(j, r)] = sign * magnitude;
        }
    }
    let x = Matrix::from_fn(n, p, |_, _| sample_standard_normal(&mut rng));
    let z = Matrix::from_fn(n, m, |_, _| sample_standard_normal(&mut rng));
    let e = z * noise_cov.cholesky_factor().transpose();
    let y = &x * &b_true + e;
    let ids = (0..n).map(|i| format!("syn{i}")).collect();
    let mut dataset = Dataset::new(x, y, ids)?;
    if m != 2 {
        dataset.response_names = (1..=m).map(|j| format!("y{j}")).collect();
    }
    Ok(SyntheticData { dataset, b_true, support })
}
