use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_ops::{Matrix, Vector};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LassoFit<T: Real = f64> {
    pub beta0: T,
    #[serde(with = "crate::io::vector_serde")]
    pub beta: Vector<T>,
    pub sweeps: usize,
    /// Duality gap of the final iterate.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinateDescentOptions {
    /// Stop once the largest coefficient change in a sweep is below `tol`
    /// (relative to the largest coefficient magnitude, floored at 1).
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for CoordinateDescentOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_sweeps: 100_000 }
    }
}

/// Minimizes `sum_i (y_i - beta0 - x_i^T beta)^2 + lambda * sum_j |beta_j|`
/// by cyclic coordinate descent. The intercept is unpenalized.
pub fn classical_lasso<T: Real>(x: &Matrix<T>, y: &Vector<T>, lambda: T) -> Result<LassoFit<T>> {
    classical_lasso_with(x, y, lambda, &CoordinateDescentOptions::default())
}

pub fn classical_lasso_with<T: Real>(
    x: &Matrix<T>,
    y: &Vector<T>,
    lambda: T,
    opts: &CoordinateDescentOptions,
) -> Result<LassoFit<T>> {
    let (n, p) = x.shape();
    if n == 0 || p == 0 {
        return Err(Error::EmptyData(format!("design is {n}x{p}")));
    }
    if y.len() != n {
        return Err(Error::Dimension(format!("x has {n} rows but y has {} entries", y.len())));
    }
    let lambda = lambda.as_f64();
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Parameter(format!("lambda must be non-negative, got {lambda}")));
    }

    // Centering removes the unpenalized intercept from the problem.
    let xf = x.map(|v| v.as_f64());
    let yf = y.map(|v| v.as_f64());
    let x_mean: Vec<f64> = (0..p).map(|j| xf.column(j).mean()).collect();
    let y_mean = yf.mean();
    let mut xc = xf.clone();
    for j in 0..p {
        xc.column_mut(j).add_scalar_mut(-x_mean[j]);
    }
    let yc = yf.add_scalar(-y_mean);
    let col_sq: Vec<f64> = (0..p).map(|j| xc.column(j).norm_squared()).collect();

    let mut beta = Vector::<f64>::zeros(p);
    let mut resid = yc.clone();
    let half = 0.5 * lambda;
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut max_change: f64 = 0.0;
        for j in 0..p {
            if col_sq[j] == 0.0 {
                continue;
            }
            let col = xc.column(j);
            let old = beta[j];
            let rho = col.dot(&resid) + col_sq[j] * old;
            let new = soft_threshold(rho, half) / col_sq[j];
            if new != old {
                resid.axpy(old - new, &col, 1.0);
                beta[j] = new;
                max_change = max_change.max((new - old).abs());
            }
        }
        let scale = beta.amax().max(1.0);
        if max_change <= opts.tol * scale {
            converged = true;
            break;
        }
    }

    let gap = duality_gap(&xc, &yc, &beta, &resid, lambda);
    if !converged {
        return Err(Error::Convergence { iterations: sweeps, gap });
    }
    let beta0 = y_mean - x_mean.iter().zip(beta.iter()).map(|(m, b)| m * b).sum::<f64>();
    Ok(LassoFit {
        beta0: T::lit(beta0),
        beta: beta.map(T::lit),
        sweeps,
        gap,
    })
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Primal minus dual objective at a feasibly rescaled residual.
fn duality_gap(x: &Matrix<f64>, y: &Vector<f64>, beta: &Vector<f64>, resid: &Vector<f64>, lambda: f64) -> f64 {
    let primal = resid.norm_squared() + lambda * beta.lp_norm(1);
    let corr = (x.transpose() * resid).amax();
    let s = if corr > 0.0 { (0.5 * lambda / corr).min(1.0) } else { 1.0 };
    let theta = resid * s;
    let dual = y.norm_squared() - (y - theta).norm_squared();
    (primal - dual).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_standard_normal, Rng};

    fn problem(n: usize, p: usize, seed: u64) -> (Matrix<f64>, Vector<f64>) {
        let mut rng = Rng::new(seed);
        let x = Matrix::from_fn(n, p, |_, _| sample_standard_normal(&mut rng));
        let truth = Vector::from_fn(p, |j, _| if j % 2 == 0 { 1.5 } else { 0.0 });
        let y = &x * truth + Vector::from_fn(n, |_, _| 2.0 + 0.3 * sample_standard_normal(&mut rng));
        (x, y)
    }

    #[test]
    fn zero_penalty_is_least_squares() {
        let (x, y) = problem(40, 4, 1);
        let fit = classical_lasso(&x, &y, 0.0).unwrap();
        // Normal equations with an explicit intercept column.
        let mut xa = Matrix::from_element(40, 5, 1.0);
        xa.view_mut((0, 1), (40, 4)).copy_from(&x);
        let ols = (xa.transpose() * &xa).try_inverse().unwrap() * xa.transpose() * &y;
        assert!((fit.beta0 - ols[0]).abs() < 1e-8);
        for j in 0..4 {
            assert!((fit.beta[j] - ols[j + 1]).abs() < 1e-8);
        }
    }

    #[test]
    fn huge_penalty_shrinks_to_mean() {
        let (x, y) = problem(30, 3, 2);
        let fit = classical_lasso(&x, &y, 1e9).unwrap();
        assert!(fit.beta.iter().all(|b| *b == 0.0));
        assert!((fit.beta0 - y.mean()).abs() < 1e-12);
    }

    #[test]
    fn optimality_conditions_hold() {
        let (x, y) = problem(50, 10, 3);
        let lambda = 20.0;
        let fit = classical_lasso(&x, &y, lambda).unwrap();
        let r = &y - &x * &fit.beta - Vector::from_element(50, fit.beta0);
        assert!(r.sum().abs() < 1e-8);
        let g = x.transpose() * r * 2.0;
        for j in 0..10 {
            if fit.beta[j] != 0.0 {
                assert!((g[j] - lambda * fit.beta[j].signum()).abs() < 1e-6);
            } else {
                assert!(g[j].abs() <= lambda + 1e-6);
            }
        }
        assert!(fit.gap < 1e-6, "{}", fit.gap);
    }

    #[test]
    fn reports_non_convergence() {
        let (x, y) = problem(50, 10, 4);
        let opts = CoordinateDescentOptions { tol: 0.0, max_sweeps: 2 };
        match classical_lasso_with(&x, &y, 1.0, &opts) {
            Err(Error::Convergence { iterations, gap }) => {
                assert_eq!(iterations, 2);
                assert!(gap >= 0.0);
            }
            other => panic!("{other:?}"),
        }
        assert!(classical_lasso(&x, &y, -1.0).is_err());
    }
}
