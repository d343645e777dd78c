use super::{sample_standard_normal, Rng};
use crate::error::{Error, Result};
use crate::matrix_ops::{Matrix, SpdMatrix, Vector};
use crate::scalar::Real;

fn standard_normal_vector<T: Real>(n: usize, rng: &mut Rng) -> Vector<T> {
    Vector::from_iterator(n, (0..n).map(|_| T::lit(sample_standard_normal(rng))))
}

/// Draws from `Normal(mean, precision^-1)`.
pub fn sample_mvn_precision<T: Real>(
    mean: &Vector<T>,
    precision: &SpdMatrix<T>,
    rng: &mut Rng,
) -> Result<Vector<T>> {
    if mean.len() != precision.dim() {
        return Err(Error::Dimension(format!(
            "mean has length {} but precision is {}x{}",
            mean.len(),
            precision.dim(),
            precision.dim()
        )));
    }
    // precision = L L^T, so L^-T z has covariance precision^-1.
    let l = precision.cholesky_factor();
    let z = standard_normal_vector::<T>(mean.len(), rng);
    let offset = l
        .transpose()
        .solve_upper_triangular(&z)
        .ok_or_else(|| Error::Singular("precision Cholesky factor".into()))?;
    Ok(mean + offset)
}

/// Draws `mean + factor * z` with `z` standard normal; `factor factor^T` is the covariance.
pub fn sample_mvn_covariance_factor<T: Real>(
    mean: &Vector<T>,
    factor: &Matrix<T>,
    rng: &mut Rng,
) -> Result<Vector<T>> {
    if factor.nrows() != mean.len() {
        return Err(Error::Dimension("covariance factor rows must match the mean".into()));
    }
    let z = standard_normal_vector::<T>(factor.ncols(), rng);
    Ok(mean + factor * z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empirical_cov(xs: &[Vector<f64>]) -> (Vector<f64>, Matrix<f64>) {
        let n = xs.len() as f64;
        let d = xs[0].len();
        let mean = xs.iter().fold(Vector::zeros(d), |a, x| a + x) / n;
        let mut c = Matrix::zeros(d, d);
        for x in xs {
            let r = x - &mean;
            c += &r * r.transpose();
        }
        (mean, c / (n - 1.0))
    }

    fn check(mean: [f64; 2], prec: [f64; 4], cov: [f64; 4]) {
        let mut rng = Rng::new(21);
        let p = SpdMatrix::new(Matrix::from_row_slice(2, 2, &prec)).unwrap();
        let mu = Vector::from_column_slice(&mean);
        let n = 100_000;
        let xs: Vec<_> = (0..n).map(|_| sample_mvn_precision(&mu, &p, &mut rng).unwrap()).collect();
        let (m, c) = empirical_cov(&xs);
        let want = Matrix::from_row_slice(2, 2, &cov);
        for i in 0..2 {
            let se = (want[(i, i)] / n as f64).sqrt();
            assert!((m[i] - mu[i]).abs() < 3.0 * se);
            for j in 0..2 {
                // Var of a sample covariance entry is (s_ii s_jj + s_ij^2) / n.
                let se = ((want[(i, i)] * want[(j, j)] + want[(i, j)].powi(2)) / n as f64).sqrt();
                assert!((c[(i, j)] - want[(i, j)]).abs() < 3.0 * se, "{c} vs {want}");
            }
        }
    }

    #[test]
    fn identity_precision() {
        check([0.0, 0.0], [1., 0., 0., 1.], [1., 0., 0., 1.]);
    }

    #[test]
    fn diagonal_precision() {
        check([1.0, 2.0], [4., 0., 0., 0.25], [0.25, 0., 0., 4.]);
    }

    #[test]
    fn correlated_precision() {
        let inv = Matrix::from_row_slice(2, 2, &[2., 1., 1., 2.]).try_inverse().unwrap();
        check([0.0, 0.0], [2., 1., 1., 2.], [inv[(0, 0)], inv[(0, 1)], inv[(1, 0)], inv[(1, 1)]]);
        assert!((inv[(0, 1)] + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let p = SpdMatrix::<f64>::identity(3);
        assert!(sample_mvn_precision(&Vector::zeros(2), &p, &mut Rng::new(0)).is_err());
    }
}
