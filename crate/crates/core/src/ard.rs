//! Variational ARD for a single response.
//!
//! ```text
//! y_i | beta, tau      ~ N(x_i^T beta, 1 / tau)
//! beta | tau, alpha    ~ N(0, (tau diag(alpha))^-1)
//! tau                  ~ Gamma(a0, b0)
//! alpha_j              ~ Gamma(c0, d0)
//! ```
//!
//! The mean-field family is `q(beta, tau) q(alpha)` with
//! `q(beta | tau) = N(beta*, (tau V*^-1)^-1)`, `q(tau) = Gamma(a*, b*)` and
//! `q(alpha_j) = Gamma(c*_j, d*_j)`. Every update is closed form.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};

use crate::distributions::student_t_interval;
use crate::error::{Error, Result};
use crate::matrix_ops::{spd_inverse, Matrix, SpdMatrix, Vector};
use crate::scalar::Real;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Relevance precision given to the prepended intercept column.
pub const INTERCEPT_PRECISION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ArdHyper<T: Real = f64> {
    pub a0: T,
    pub b0: T,
    pub c0: T,
    pub d0: T,
}

impl<T: Real> Default for ArdHyper<T> {
    fn default() -> Self {
        let v = T::lit(0.01);
        Self { a0: v, b0: v, c0: v, d0: v }
    }
}

impl<T: Real> ArdHyper<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a0", self.a0), ("b0", self.b0), ("c0", self.c0), ("d0", self.d0)] {
            if !(v > T::zero()) || !v.is_finite_value() {
                return Err(Error::Parameter(format!("hyperparameter {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArdOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Prepend a constant column whose relevance precision is pinned to
    /// [`INTERCEPT_PRECISION`].
    pub intercept: bool,
    /// Starting `d*` (defaults to `d0` for every coefficient).
    #[serde(default)]
    pub init_d: Option<Vec<f64>>,
}

impl Default for ArdOptions {
    fn default() -> Self {
        Self { tol: 1e-3, max_iter: 1_000, intercept: false, init_d: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ArdPosterior<T: Real = f64> {
    #[serde(with = "crate::io::vector_serde")]
    pub beta_star: Vector<T>,
    #[serde(with = "crate::io::spd_serde")]
    pub v_star_inv: SpdMatrix<T>,
    pub a_star: T,
    pub b_star: T,
    #[serde(with = "crate::io::vector_serde")]
    pub c_star: Vector<T>,
    #[serde(with = "crate::io::vector_serde")]
    pub d_star: Vector<T>,
    pub elbo_trace: Vec<f64>,
    pub intercept: bool,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Real> ArdPosterior<T> {
    /// Number of coefficients including the intercept column, if any.
    pub fn dim(&self) -> usize {
        self.beta_star.len()
    }

    /// Number of input features expected by [`predict_ard`].
    pub fn n_features(&self) -> usize {
        self.dim() - usize::from(self.intercept)
    }

    /// Posterior mean of each relevance precision, `c*_j / d*_j`.
    pub fn expected_alpha(&self) -> Vector<T> {
        self.c_star.component_div(&self.d_star)
    }

    pub fn expected_tau(&self) -> T {
        self.a_star / self.b_star
    }

    pub fn v_star(&self) -> SpdMatrix<T> {
        self.v_star_inv.inverse()
    }

    /// Slope coefficients without the intercept.
    pub fn slopes(&self) -> Vector<T> {
        let off = usize::from(self.intercept);
        self.beta_star.rows(off, self.dim() - off).into_owned()
    }

    pub fn intercept_value(&self) -> T {
        if self.intercept {
            self.beta_star[0]
        } else {
            T::zero()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.dim();
        if self.v_star_inv.dim() != p || self.c_star.len() != p || self.d_star.len() != p {
            return Err(Error::Dimension("posterior blocks disagree on dimension".into()));
        }
        if !(self.a_star > T::zero() && self.b_star > T::zero()) {
            return Err(Error::Consistency("a* and b* must be positive".into()));
        }
        if self.c_star.iter().chain(self.d_star.iter()).any(|v| !(*v > T::zero())) {
            return Err(Error::Consistency("c* and d* must be positive".into()));
        }
        Ok(())
    }
}

/// Design with an optional leading column of ones.
pub fn augment<T: Real>(x: &Matrix<T>, intercept: bool) -> Matrix<T> {
    if !intercept {
        return x.clone();
    }
    let (n, p) = x.shape();
    let mut out = Matrix::from_element(n, p + 1, T::one());
    out.view_mut((0, 1), (n, p)).copy_from(x);
    out
}

struct Problem<T: Real> {
    x: Matrix<T>,
    y: Vector<T>,
    xtx: Matrix<T>,
    xty: Vector<T>,
    intercept: bool,
}

impl<T: Real> Problem<T> {
    fn new(x: &Matrix<T>, y: &Vector<T>, intercept: bool) -> Result<Self> {
        let (n, p) = x.shape();
        if n == 0 || p == 0 {
            return Err(Error::EmptyData(format!("design is {n}x{p}")));
        }
        if y.len() != n {
            return Err(Error::Dimension(format!("x has {n} rows but y has {} entries", y.len())));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite { variable: "input data".into() });
        }
        let x = augment(x, intercept);
        let xt = x.transpose();
        Ok(Self { xtx: &xt * &x, xty: &xt * y, x, y: y.clone(), intercept })
    }

    fn n(&self) -> usize {
        self.x.nrows()
    }

    fn p(&self) -> usize {
        self.x.ncols()
    }
}

/// `E[alpha]`, with the intercept's precision pinned.
fn alpha_mean<T: Real>(c: &Vector<T>, d: &Vector<T>, intercept: bool) -> Vector<T> {
    let mut a = c.component_div(d);
    if intercept {
        a[0] = T::lit(INTERCEPT_PRECISION);
    }
    a
}

/// One CAVI sweep: `q(beta, tau)` given `E[alpha]`, then `q(alpha)`.
fn sweep<T: Real>(
    prob: &Problem<T>,
    hyper: &ArdHyper<T>,
    a_star: T,
    c_star: &Vector<T>,
    d_star: &Vector<T>,
) -> Result<(Vector<T>, SpdMatrix<T>, T, Vector<T>)> {
    let alpha = alpha_mean(c_star, d_star, prob.intercept);
    let mut prec = prob.xtx.clone();
    for j in 0..prob.p() {
        prec[(j, j)] += alpha[j];
    }
    let v_star_inv = SpdMatrix::new(prec)
        .map_err(|e| Error::Singular(format!("V*^-1 is not positive definite: {e}")))?;
    let chol = v_star_inv.cholesky();
    let beta = chol.solve(&prob.xty);
    // y^T y - beta^T V*^-1 beta, written as a sum of squares so it cannot go negative.
    let resid = &prob.y - &prob.x * &beta;
    let quad = resid.dot(&resid)
        + beta.iter().zip(alpha.iter()).fold(T::zero(), |s, (b, a)| s + *a * *b * *b);
    let half = T::lit(0.5);
    let b_star = hyper.b0 + half * quad;
    if !(b_star > T::zero()) || !b_star.is_finite_value() {
        return Err(Error::Consistency(format!("b* left the positive reals: {b_star}")));
    }
    let v_diag = chol.inverse().diagonal();
    let e_tau = a_star / b_star;
    let d_new = Vector::from_fn(prob.p(), |j, _| hyper.d0 + half * (v_diag[j] + beta[j] * beta[j] * e_tau));
    if d_new.iter().any(|v| !v.is_finite_value()) {
        return Err(Error::NonFinite { variable: "d*".into() });
    }
    Ok((beta, v_star_inv, b_star, d_new))
}

fn relative_change<T: Real>(old: &Vector<T>, new: &Vector<T>) -> f64 {
    old.iter().zip(new.iter()).fold(0.0, |m: f64, (o, n)| {
        let (o, n) = (o.as_f64(), n.as_f64());
        m.max((n - o).abs() / o.abs().max(1.0))
    })
}

/// Runs CAVI until both the ELBO change and the largest relative parameter
/// change fall below `tol`, or `max_iter` sweeps have been made.
pub fn fit_ard<T: Real>(
    x: &Matrix<T>,
    y: &Vector<T>,
    hyper: &ArdHyper<T>,
    tol: f64,
    max_iter: usize,
) -> Result<ArdPosterior<T>> {
    fit_ard_with(x, y, hyper, &ArdOptions { tol, max_iter, ..ArdOptions::default() })
}

pub fn fit_ard_with<T: Real>(
    x: &Matrix<T>,
    y: &Vector<T>,
    hyper: &ArdHyper<T>,
    opts: &ArdOptions,
) -> Result<ArdPosterior<T>> {
    hyper.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if opts.max_iter == 0 {
        return Err(Error::Parameter("max_iter must be at least 1".into()));
    }
    let prob = Problem::new(x, y, opts.intercept)?;
    let p = prob.p();
    let half = T::lit(0.5);
    let a_star = hyper.a0 + half * T::lit(prob.n() as f64);
    let c_star = Vector::from_element(p, hyper.c0 + half);
    let mut d_star = match &opts.init_d {
        None => Vector::from_element(p, hyper.d0),
        Some(d) => {
            if d.len() != p || d.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::Parameter(format!("init_d must hold {p} positive values")));
            }
            Vector::from_iterator(p, d.iter().map(|v| T::lit(*v)))
        }
    };

    let mut trace = Vec::new();
    let mut state = None;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        let (beta, v_star_inv, b_star, d_new) = sweep(&prob, hyper, a_star, &c_star, &d_star)?;
        let post = ArdPosterior {
            beta_star: beta,
            v_star_inv,
            a_star,
            b_star,
            c_star: c_star.clone(),
            d_star: d_new,
            elbo_trace: Vec::new(),
            intercept: opts.intercept,
            iterations,
            converged: false,
        };
        let elbo = elbo_on(&post, &prob, hyper)?;
        if let Some(&prev) = trace.last() {
            let slack = 1e-8 * f64::max(1.0, f64::abs(prev));
            if elbo < prev - slack {
                return Err(Error::Consistency(format!(
                    "ELBO decreased from {prev} to {elbo} at iteration {iterations}"
                )));
            }
        }
        let delta = trace.last().map(|&prev: &f64| (elbo - prev).abs());
        trace.push(elbo);
        let param_change = match &state {
            None => f64::INFINITY,
            Some(old) => {
                let old: &ArdPosterior<T> = old;
                relative_change(&old.beta_star, &post.beta_star)
                    .max(relative_change(&old.d_star, &post.d_star))
                    .max((post.b_star - old.b_star).as_f64().abs() / old.b_star.as_f64().max(1.0))
            }
        };
        d_star = post.d_star.clone();
        state = Some(post);
        if matches!(delta, Some(d) if d < opts.tol) && param_change < opts.tol {
            converged = true;
            break;
        }
    }
    let mut post = state.expect("at least one sweep ran");
    post.elbo_trace = trace;
    post.converged = converged;
    post.iterations = iterations;
    Ok(post)
}

/// Applies one more CAVI sweep to an existing posterior.
pub fn refine_ard<T: Real>(
    posterior: &ArdPosterior<T>,
    x: &Matrix<T>,
    y: &Vector<T>,
    hyper: &ArdHyper<T>,
) -> Result<ArdPosterior<T>> {
    let prob = Problem::new(x, y, posterior.intercept)?;
    if prob.p() != posterior.dim() {
        return Err(Error::Dimension("posterior and design disagree on dimension".into()));
    }
    let (beta, v_star_inv, b_star, d_star) =
        sweep(&prob, hyper, posterior.a_star, &posterior.c_star, &posterior.d_star)?;
    let mut next = ArdPosterior {
        beta_star: beta,
        v_star_inv,
        b_star,
        d_star,
        iterations: posterior.iterations + 1,
        ..posterior.clone()
    };
    next.elbo_trace.push(elbo_on(&next, &prob, hyper)?);
    Ok(next)
}

/// Evidence lower bound `E_q[log p(y, beta, tau, alpha)] - E_q[log q]`.
pub fn elbo_ard<T: Real>(
    posterior: &ArdPosterior<T>,
    x: &Matrix<T>,
    y: &Vector<T>,
    hyper: &ArdHyper<T>,
) -> Result<f64> {
    posterior.validate()?;
    let prob = Problem::new(x, y, posterior.intercept)?;
    if prob.p() != posterior.dim() {
        return Err(Error::Dimension("posterior and design disagree on dimension".into()));
    }
    elbo_on(posterior, &prob, hyper)
}

fn elbo_on<T: Real>(post: &ArdPosterior<T>, prob: &Problem<T>, hyper: &ArdHyper<T>) -> Result<f64> {
    let n = prob.n() as f64;
    let p = prob.p();
    let (a, b) = (post.a_star.as_f64(), post.b_star.as_f64());
    let e_tau = a / b;
    let e_ln_tau = digamma(a) - b.ln();
    let sigma = spd_inverse(post.v_star_inv.as_matrix(), "V*^-1")?;
    let ln_det_sigma = -post.v_star_inv.log_det().as_f64();
    let m = &post.beta_star;

    let resid = &prob.y - &prob.x * m;
    let tr_xtx_sigma = prob.xtx.component_mul(&sigma).sum().as_f64();
    let mut total = 0.5 * n * e_ln_tau - 0.5 * n * LN_2PI
        - 0.5 * (e_tau * resid.dot(&resid).as_f64() + tr_xtx_sigma);

    let (a0, b0, c0, d0) = (hyper.a0.as_f64(), hyper.b0.as_f64(), hyper.c0.as_f64(), hyper.d0.as_f64());
    // p(beta | tau, alpha) and the entropy of q(beta | tau): the p/2 E[ln tau]
    // terms cancel.
    total += -0.5 * p as f64 * LN_2PI + 0.5 * p as f64 * (1.0 + LN_2PI) + 0.5 * ln_det_sigma;
    for j in 0..p {
        let (e_alpha, e_ln_alpha) = if post.intercept && j == 0 {
            (INTERCEPT_PRECISION, INTERCEPT_PRECISION.ln())
        } else {
            let (c, d) = (post.c_star[j].as_f64(), post.d_star[j].as_f64());
            // E[ln p(alpha_j)] + H[q(alpha_j)]
            total += c0 * d0.ln() - ln_gamma(c0) + (c0 - 1.0) * (digamma(c) - d.ln()) - d0 * c / d;
            total += gamma_entropy(c, d);
            (c / d, digamma(c) - d.ln())
        };
        let mj = m[j].as_f64();
        total += 0.5 * e_ln_alpha - 0.5 * e_alpha * (e_tau * mj * mj + sigma[(j, j)].as_f64());
    }
    // E[ln p(tau)] + H[q(tau)]
    total += a0 * b0.ln() - ln_gamma(a0) + (a0 - 1.0) * e_ln_tau - b0 * e_tau;
    total += gamma_entropy(a, b);
    if !total.is_finite() {
        return Err(Error::NonFinite { variable: "ELBO".into() });
    }
    Ok(total)
}

/// Entropy of a shape/rate Gamma.
fn gamma_entropy(shape: f64, rate: f64) -> f64 {
    shape - rate.ln() + ln_gamma(shape) + (1.0 - shape) * digamma(shape)
}

/// Univariate Student-t with `scale` on the standard-deviation scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudentT {
    pub location: f64,
    pub scale: f64,
    pub dof: f64,
}

impl StudentT {
    /// `dof / (dof - 2) * scale^2`, defined for `dof > 2`.
    pub fn variance(&self) -> Result<f64> {
        if self.dof <= 2.0 {
            return Err(Error::MomentUndefined(format!("t variance needs dof > 2, got {}", self.dof)));
        }
        Ok(self.scale * self.scale * self.dof / (self.dof - 2.0))
    }

    /// Precision parameter `1 / scale^2`.
    pub fn precision(&self) -> f64 {
        1.0 / (self.scale * self.scale)
    }

    pub fn interval(&self, level: f64) -> Result<(f64, f64)> {
        student_t_interval(self.location, self.scale, self.dof, level)
    }
}

/// Predictive for a new input `x_new` (features only; the intercept column
/// is added automatically): location `beta*^T x`, `2 a*` degrees of freedom
/// and precision `a* / (b* (1 + x^T V* x))`.
pub fn predict_ard<T: Real>(posterior: &ArdPosterior<T>, x_new: &Vector<T>) -> Result<StudentT> {
    let v_star = posterior.v_star();
    predict_with(posterior, &v_star, x_new)
}

/// Predictions for every row of `x`, sharing one inversion of `V*^-1`.
pub fn predict_ard_rows<T: Real>(posterior: &ArdPosterior<T>, x: &Matrix<T>) -> Result<Vec<StudentT>> {
    let v_star = posterior.v_star();
    (0..x.nrows())
        .map(|i| predict_with(posterior, &v_star, &x.row(i).transpose()))
        .collect()
}

fn predict_with<T: Real>(posterior: &ArdPosterior<T>, v_star: &SpdMatrix<T>, x_new: &Vector<T>) -> Result<StudentT> {
    if x_new.len() != posterior.n_features() {
        return Err(Error::Dimension(format!(
            "x has {} entries, model expects {}",
            x_new.len(),
            posterior.n_features()
        )));
    }
    let x = if posterior.intercept {
        Vector::from_iterator(x_new.len() + 1, std::iter::once(T::one()).chain(x_new.iter().copied()))
    } else {
        x_new.clone()
    };
    let location = posterior.beta_star.dot(&x).as_f64();
    let spread = 1.0 + v_star.quad_form(&x).as_f64();
    let scale = (spread * posterior.b_star.as_f64() / posterior.a_star.as_f64()).sqrt();
    Ok(StudentT { location, scale, dof: 2.0 * posterior.a_star.as_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_standard_normal, Rng};

    fn problem(n: usize, p: usize, seed: u64) -> (Matrix<f64>, Vector<f64>) {
        let mut rng = Rng::new(seed);
        let x = Matrix::from_fn(n, p, |_, _| sample_standard_normal(&mut rng));
        let w = Vector::from_fn(p, |j, _| if j < 2 { 1.0 + j as f64 } else { 0.0 });
        let y = &x * w + Vector::from_fn(n, |_, _| 0.5 * sample_standard_normal(&mut rng));
        (x, y)
    }

    #[test]
    fn fixed_shape_parameters() {
        let (x, y) = problem(100, 3, 1);
        let post = fit_ard(&x, &y, &ArdHyper::default(), 1e-3, 100).unwrap();
        assert!((post.a_star - 50.01).abs() < 1e-12);
        assert!(post.c_star.iter().all(|c| (c - 0.51).abs() < 1e-12));
    }

    #[test]
    fn zero_response_fixed_point() {
        let (x, _) = problem(30, 3, 2);
        let y = Vector::zeros(30);
        let h = ArdHyper::default();
        let post = fit_ard(&x, &y, &h, 1e-6, 500).unwrap();
        assert!(post.beta_star.amax() < 1e-12);
        let v = post.v_star();
        for j in 0..3 {
            assert!((post.d_star[j] - (h.d0 + 0.5 * v.as_matrix()[(j, j)])).abs() < 1e-10);
        }
        assert!((post.b_star - h.b0).abs() < 1e-14);
    }

    #[test]
    fn elbo_is_monotone_and_recomputable() {
        let (x, y) = problem(60, 8, 3);
        let h = ArdHyper::default();
        let post = fit_ard(&x, &y, &h, 1e-8, 300).unwrap();
        for w in post.elbo_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-8 * w[0].abs().max(1.0));
        }
        let again = elbo_ard(&post, &x, &y, &h).unwrap();
        assert!((again - post.elbo_trace.last().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn prediction_at_origin_and_dof() {
        let (x, y) = problem(100, 3, 4);
        let post = fit_ard(&x, &y, &ArdHyper::default(), 1e-3, 100).unwrap();
        let t = predict_ard(&post, &Vector::zeros(3)).unwrap();
        assert_eq!(t.location, 0.0);
        assert!((t.dof - 100.02).abs() < 1e-12);
    }

    #[test]
    fn intercept_column_is_nearly_unpenalized() {
        let (x, y) = problem(200, 2, 5);
        let y = y.add_scalar(7.0);
        let opts = ArdOptions { intercept: true, tol: 1e-6, ..ArdOptions::default() };
        let post = fit_ard_with(&x, &y, &ArdHyper::default(), &opts).unwrap();
        assert!((post.intercept_value() - 7.0).abs() < 0.15, "{}", post.intercept_value());
        assert_eq!(post.n_features(), 2);
        let t = predict_ard(&post, &Vector::zeros(2)).unwrap();
        assert!((t.location - post.intercept_value()).abs() < 1e-12);
    }

    #[test]
    fn input_validation() {
        let (x, y) = problem(10, 2, 6);
        assert!(fit_ard(&x, &y, &ArdHyper::default(), 0.0, 10).is_err());
        assert!(fit_ard(&x, &Vector::zeros(3), &ArdHyper::default(), 1e-3, 10).is_err());
        let bad = ArdHyper { a0: -1.0, ..ArdHyper::default() };
        assert!(fit_ard(&x, &y, &bad, 1e-3, 10).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let (x, y) = problem(20, 2, 7);
        let post = fit_ard(&x, &y, &ArdHyper::default(), 1e-3, 50).unwrap();
        let s = serde_json::to_string(&post).unwrap();
        let back: ArdPosterior<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back.beta_star, post.beta_star);
        assert_eq!(back.elbo_trace, post.elbo_trace);
    }
}
