use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_ops::{Matrix, Vector};

/// Principal components fitted on column-centred data.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaFit {
    /// n x k, mutually orthogonal columns.
    pub scores: Matrix<f64>,
    /// p x k, orthonormal columns.
    pub loadings: Matrix<f64>,
    /// Variance along each component (divisor n - 1), non-increasing.
    pub explained: Vector<f64>,
    pub mean: Vector<f64>,
}

/// The part of a fit needed to project new rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pca {
    #[serde(with = "crate::io::vector_serde")]
    pub mean: Vector<f64>,
    #[serde(with = "crate::io::matrix_serde")]
    pub loadings: Matrix<f64>,
    #[serde(with = "crate::io::vector_serde")]
    pub explained: Vector<f64>,
}

impl PcaFit {
    pub fn model(&self) -> Pca {
        Pca { mean: self.mean.clone(), loadings: self.loadings.clone(), explained: self.explained.clone() }
    }
}

impl Pca {
    pub fn transform(&self, x: &Matrix<f64>) -> Result<Matrix<f64>> {
        if x.ncols() != self.mean.len() {
            return Err(Error::Dimension(format!("expected {} columns, got {}", self.mean.len(), x.ncols())));
        }
        Ok(center(x, &self.mean) * &self.loadings)
    }
}

fn center(x: &Matrix<f64>, mean: &Vector<f64>) -> Matrix<f64> {
    Matrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] - mean[j])
}

/// PCA through the SVD of the centred matrix. Component signs are fixed so
/// the largest-magnitude loading of each component is positive.
pub fn pca(x: &Matrix<f64>, n_components: usize) -> Result<PcaFit> {
    let (n, p) = x.shape();
    if n < 2 || p == 0 {
        return Err(Error::EmptyData(format!("PCA needs at least 2 rows and 1 column, got {n}x{p}")));
    }
    if n_components == 0 || n_components > n.min(p) {
        return Err(Error::Parameter(format!(
            "n_components must be in 1..={}, got {n_components}",
            n.min(p)
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { variable: "PCA input".into() });
    }
    let mean = x.row_mean().transpose();
    let xc = center(x, &mean);
    let scale = xc.amax();
    if scale == 0.0 {
        return Err(Error::Degenerate("every column is constant".into()));
    }
    let svd = xc.clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Singular("SVD did not converge".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut loadings = Matrix::zeros(p, n_components);
    let mut explained = Vector::zeros(n_components);
    for (k, &src) in order.iter().take(n_components).enumerate() {
        let mut col = v_t.row(src).transpose();
        let pivot = col.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if pivot < 0.0 {
            col.neg_mut();
        }
        loadings.set_column(k, &col);
        let s = svd.singular_values[src];
        explained[k] = s * s / (n - 1) as f64;
    }
    let scores = &xc * &loadings;
    Ok(PcaFit { scores, loadings, explained, mean })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_standard_normal, Rng};

    #[test]
    fn line_is_one_component() {
        let x = Matrix::from_fn(20, 2, |i, j| (i as f64) * if j == 0 { 1.0 } else { -2.0 });
        let fit = pca(&x, 2).unwrap();
        assert!(fit.explained[1] < 1e-20 * fit.explained[0].max(1.0) + 1e-12);
        let total: f64 = fit.explained.sum();
        assert!((fit.explained[0] / total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scores_are_orthogonal_and_reconstruct() {
        let mut rng = Rng::new(3);
        let x = Matrix::from_fn(40, 5, |_, j| sample_standard_normal(&mut rng) * (j + 1) as f64 + 7.0);
        let fit = pca(&x, 5).unwrap();
        let g = fit.scores.transpose() * &fit.scores;
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert!(g[(i, j)].abs() < 1e-8 * g.amax());
                }
            }
        }
        assert!(fit.explained.as_slice().windows(2).all(|w| w[0] >= w[1]));
        let back = &fit.scores * fit.loadings.transpose();
        let xc = center(&x, &fit.mean);
        assert!((back - xc).amax() < 1e-8);
        assert_eq!(fit.model().transform(&x).unwrap(), fit.scores);
    }

    #[test]
    fn constant_input_is_degenerate() {
        let x = Matrix::from_element(5, 3, 2.5);
        assert!(matches!(pca(&x, 1), Err(Error::Degenerate(_))));
        assert!(matches!(pca(&Matrix::zeros(5, 3), 4), Err(Error::Parameter(_))));
    }
}
