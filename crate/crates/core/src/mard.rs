//! Variational ARD for two correlated responses.
//!
//! ```text
//! Y = X B + E,   rows of E ~ N(0, K^-1)
//! vec(B) | K, alpha ~ N(0, (K ⊗ Δ)^-1),   Δ = diag(alpha)
//! K ~ Wishart(nu0, V0)                      E[K] = nu0 V0
//! alpha_j ~ Gamma(c, d)
//! ```
//!
//! The variational family is `q(B, K) prod_j q(alpha_j)` with
//! `q(vec(B) | K) = N(vec(B*), (K ⊗ M*)^-1)`, `q(K) = Wishart(nu*, V*)` and
//! `q(alpha_j) = Gamma(c*, d*_j)`.

use serde::{Deserialize, Serialize};

use crate::ard::{augment, INTERCEPT_PRECISION};
use crate::distributions::{
    sample_standard_normal, sample_wishart, wishart_inv_kron_moment, MvtParams, Rng,
};
use crate::error::{Error, Result};
use crate::matrix_ops::{spd_inverse, vec, woodbury_inverse, Matrix, SpdMatrix, Vector};
use crate::scalar::Real;
use crate::stats::equal_tail_interval;

/// Number of responses the moment formulas are specialized to.
pub const RESPONSES: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MardHyper<T: Real = f64> {
    #[serde(with = "crate::io::spd_serde")]
    pub v0: SpdMatrix<T>,
    pub nu0: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> Default for MardHyper<T> {
    fn default() -> Self {
        Self { v0: SpdMatrix::identity(RESPONSES), nu0: T::lit(2.0), c: T::lit(0.01), d: T::lit(0.01) }
    }
}

impl<T: Real> MardHyper<T> {
    pub fn validate(&self) -> Result<()> {
        if self.v0.dim() != RESPONSES {
            return Err(Error::Parameter(format!("V0 must be {RESPONSES}x{RESPONSES}")));
        }
        if !(self.nu0 > T::lit((RESPONSES - 1) as f64)) {
            return Err(Error::Parameter(format!("nu0 must exceed {}, got {}", RESPONSES - 1, self.nu0)));
        }
        for (name, v) in [("c", self.c), ("d", self.d)] {
            if !(v > T::zero()) || !v.is_finite_value() {
                return Err(Error::Parameter(format!("hyperparameter {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// How the Wishart degrees of freedom are updated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DofUpdate {
    /// `nu* = nu0 + n + p`.
    #[default]
    CountCoefficients,
    /// `nu* = nu0 + n`: the `|K|^(p/2)` factors of the coefficient prior and of
    /// the normalizer of `q(B | K)` cancel.
    Conjugate,
}

/// Which entries of `E[K^-1 ⊗ K]` feed the mixed terms of the `d*` update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixedMomentIndexing {
    /// `E[K_rs (K^-1)_rs]` read from entry `(r d + r, s d + s)` (zero-based);
    /// for two responses these are entries 11, 14 and 44.
    #[default]
    Exact,
    /// Entries 11, 12 and 22 of the leading block. Disagrees with
    /// simulation; kept for comparison.
    LeadingBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MardOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Prepend a constant column whose relevance precision is pinned.
    #[serde(default)]
    pub intercept: bool,
    #[serde(default)]
    pub dof_update: DofUpdate,
    #[serde(default)]
    pub mixed_moments: MixedMomentIndexing,
}

impl Default for MardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            max_iter: 1_000,
            intercept: false,
            dof_update: DofUpdate::default(),
            mixed_moments: MixedMomentIndexing::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MardPosterior<T: Real = f64> {
    /// `vec(B*)`: the first `p` entries belong to the first response.
    #[serde(with = "crate::io::vector_serde")]
    pub beta_star: Vector<T>,
    #[serde(with = "crate::io::spd_serde")]
    pub m_star: SpdMatrix<T>,
    #[serde(with = "crate::io::spd_serde")]
    pub v_star: SpdMatrix<T>,
    pub nu_star: T,
    pub c_star: T,
    #[serde(with = "crate::io::vector_serde")]
    pub d_star: Vector<T>,
    /// Diagonal of `Δ*`.
    #[serde(with = "crate::io::vector_serde")]
    pub delta_star: Vector<T>,
    pub intercept: bool,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default)]
    pub mixed_moments: MixedMomentIndexing,
}

impl<T: Real> MardPosterior<T> {
    /// Coefficients per design column, including the intercept column if any.
    pub fn dim(&self) -> usize {
        self.m_star.dim()
    }

    pub fn n_features(&self) -> usize {
        self.dim() - usize::from(self.intercept)
    }

    /// `B*` as a `p x 2` matrix.
    pub fn b_star(&self) -> Matrix<T> {
        Matrix::from_column_slice(self.dim(), RESPONSES, self.beta_star.as_slice())
    }

    /// Slopes (without intercept) as a `p x 2` matrix.
    pub fn slopes(&self) -> Matrix<T> {
        let off = usize::from(self.intercept);
        self.b_star().rows(off, self.dim() - off).into_owned()
    }

    /// `E[K] = nu* V*`.
    pub fn expected_precision(&self) -> Matrix<T> {
        self.v_star.as_matrix() * self.nu_star
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.dim();
        if self.beta_star.len() != RESPONSES * p || self.d_star.len() != p || self.delta_star.len() != p {
            return Err(Error::Dimension("posterior blocks disagree on dimension".into()));
        }
        if self.v_star.dim() != RESPONSES {
            return Err(Error::Dimension("V* must be 2x2".into()));
        }
        if self.d_star.iter().any(|v| !(*v > T::zero())) || self.beta_star.iter().any(|v| !v.is_finite_value()) {
            return Err(Error::Consistency("d* must be positive and beta* finite".into()));
        }
        Ok(())
    }

    fn with_intercept(&self, x_new: &Vector<T>) -> Result<Vector<T>> {
        if x_new.len() != self.n_features() {
            return Err(Error::Dimension(format!(
                "x has {} entries, model expects {}",
                x_new.len(),
                self.n_features()
            )));
        }
        Ok(if self.intercept {
            Vector::from_iterator(x_new.len() + 1, std::iter::once(T::one()).chain(x_new.iter().copied()))
        } else {
            x_new.clone()
        })
    }
}

/// `E[b_j^T K b_j]` for coefficient row `j`, i.e. `E[beta^T Q beta] / alpha_j`.
///
/// Combines `E[K] = nu* V*` for the mean part with the mixed moments
/// `E[K_rs (K^-1)_rs]` of the Wishart for the covariance part.
pub fn expected_q_quadform<T: Real>(posterior: &MardPosterior<T>, j: usize) -> Result<T> {
    if j >= posterior.dim() {
        return Err(Error::Parameter(format!("coefficient index {j} out of range")));
    }
    let m_inv = posterior.m_star.inverse();
    let mixed = mixed_moments(&posterior.v_star, posterior.nu_star, posterior.mixed_moments)?;
    Ok(quadform_from(&posterior.b_star(), &posterior.v_star, posterior.nu_star, &mixed, m_inv.as_matrix()[(j, j)], j))
}

/// `E[K_rs (K^-1)_rs]` for `r, s` in `0..2`.
pub fn mixed_moments<T: Real>(v_star: &SpdMatrix<T>, nu_star: T, indexing: MixedMomentIndexing) -> Result<Matrix<T>> {
    let kron_moment = wishart_inv_kron_moment(v_star, nu_star)?;
    let d = RESPONSES;
    Ok(Matrix::from_fn(d, d, |r, s| match indexing {
        MixedMomentIndexing::Exact => kron_moment[(r * d + r, s * d + s)],
        MixedMomentIndexing::LeadingBlock => {
            // 11, 12 (mixed) and 22 in one-based notation.
            let (i, k) = match (r, s) {
                (0, 0) => (0, 0),
                (1, 1) => (1, 1),
                _ => (0, 1),
            };
            kron_moment[(i, k)]
        }
    }))
}

fn quadform_from<T: Real>(b: &Matrix<T>, v_star: &SpdMatrix<T>, nu: T, mixed: &Matrix<T>, m_inv_jj: T, j: usize) -> T {
    let row = b.row(j).transpose();
    let mean_part = v_star.quad_form(&row) * nu;
    let cov_part = mixed.iter().fold(T::zero(), |s, v| s + *v) * m_inv_jj;
    mean_part + cov_part
}

struct Problem<T: Real> {
    x: Matrix<T>,
    xty: Matrix<T>,
    xtx: SpdMatrix<T>,
    /// `V0^-1 + S^T S` with `S = Y - X B_ols`.
    base_scale_inv: Matrix<T>,
    b_ols: Matrix<T>,
}

impl<T: Real> Problem<T> {
    fn new(x: &Matrix<T>, y: &Matrix<T>, hyper: &MardHyper<T>, intercept: bool) -> Result<Self> {
        let (n, p0) = x.shape();
        if n == 0 || p0 == 0 {
            return Err(Error::EmptyData(format!("design is {n}x{p0}")));
        }
        if y.ncols() != RESPONSES {
            return Err(Error::Unsupported(format!(
                "MARD handles exactly {RESPONSES} responses, got {}",
                y.ncols()
            )));
        }
        if y.nrows() != n {
            return Err(Error::Dimension(format!("x has {n} rows but y has {}", y.nrows())));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite { variable: "input data".into() });
        }
        let x = augment(x, intercept);
        let p = x.ncols();
        if n < p {
            return Err(Error::Unsupported(format!(
                "MARD needs at least as many observations as coefficients (n = {n}, p = {p}); \
                 reduce the feature count (e.g. fewer principal components) or use ARD"
            )));
        }
        let xt = x.transpose();
        let xtx = SpdMatrix::new(&xt * &x)
            .map_err(|_| Error::Singular("X^T X is singular; the design has collinear columns".into()))?;
        let xty = &xt * y;
        let b_ols = xtx.solve(&xty);
        let s = y - &x * &b_ols;
        let base_scale_inv = hyper.v0.inverse().into_inner() + s.transpose() * s;
        Ok(Self { x, xty, xtx, base_scale_inv, b_ols })
    }

    fn p(&self) -> usize {
        self.x.ncols()
    }
}

fn delta_from<T: Real>(c_star: T, d_star: &Vector<T>, intercept: bool) -> Vector<T> {
    let mut delta = d_star.map(|d| c_star / d);
    if intercept {
        delta[0] = T::lit(INTERCEPT_PRECISION);
    }
    delta
}

/// One coordinate sweep from the current `Δ*`.
fn sweep<T: Real>(
    prob: &Problem<T>,
    hyper: &MardHyper<T>,
    nu_star: T,
    c_star: T,
    delta: &Vector<T>,
    indexing: MixedMomentIndexing,
) -> Result<(Matrix<T>, SpdMatrix<T>, SpdMatrix<T>, Vector<T>)> {
    let p = prob.p();
    let mut m = prob.xtx.as_matrix().clone();
    for j in 0..p {
        m[(j, j)] += delta[j];
    }
    let m_star = SpdMatrix::new(m).map_err(|e| Error::Singular(format!("M* = X^T X + Δ*: {e}")))?;
    let b_star = m_star.solve(&prob.xty);

    // (Δ*^-1 + (X^T X)^-1)^-1 from Δ* and X^T X directly.
    let delta_spd = SpdMatrix::from_diagonal(delta.as_slice())?;
    let shrink = woodbury_inverse(&delta_spd, &prob.xtx)?;
    let scale_inv = &prob.base_scale_inv + prob.b_ols.transpose() * shrink.as_matrix() * &prob.b_ols;
    let v_star_inv = SpdMatrix::new(scale_inv)
        .map_err(|e| Error::Consistency(format!("V*^-1 lost definiteness: {e}")))?;
    let v_star = v_star_inv.inverse();

    let mixed = mixed_moments(&v_star, nu_star, indexing)?;
    let m_inv = m_star.inverse();
    let half = T::lit(0.5);
    let mut d_star = Vector::zeros(p);
    for j in 0..p {
        let q = quadform_from(&b_star, &v_star, nu_star, &mixed, m_inv.as_matrix()[(j, j)], j);
        d_star[j] = hyper.d + half * q;
    }
    if d_star.iter().any(|v| !(*v > T::zero()) || !v.is_finite_value()) {
        return Err(Error::NonFinite { variable: "d*".into() });
    }
    let _ = c_star;
    Ok((b_star, m_star, v_star, d_star))
}

fn max_relative_change<T: Real>(old: &[T], new: &[T]) -> f64 {
    old.iter().zip(new).fold(0.0, |m: f64, (o, n)| {
        let (o, n) = (o.as_f64(), n.as_f64());
        m.max((n - o).abs() / o.abs().max(1.0))
    })
}

pub fn fit_mard<T: Real>(
    x: &Matrix<T>,
    y: &Matrix<T>,
    hyper: &MardHyper<T>,
    tol: f64,
    max_iter: usize,
) -> Result<MardPosterior<T>> {
    fit_mard_with(x, y, hyper, &MardOptions { tol, max_iter, ..MardOptions::default() })
}

/// Iterates the coordinate updates until the largest relative change in
/// `B*`, `V*` and `d*` falls below `tol`.
pub fn fit_mard_with<T: Real>(
    x: &Matrix<T>,
    y: &Matrix<T>,
    hyper: &MardHyper<T>,
    opts: &MardOptions,
) -> Result<MardPosterior<T>> {
    hyper.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if opts.max_iter == 0 {
        return Err(Error::Parameter("max_iter must be at least 1".into()));
    }
    let prob = Problem::new(x, y, hyper, opts.intercept)?;
    let (n, p) = (prob.x.nrows(), prob.p());
    let c_star = hyper.c + T::one();
    let nu_star = match opts.dof_update {
        DofUpdate::CountCoefficients => hyper.nu0 + T::lit((n + p) as f64),
        DofUpdate::Conjugate => hyper.nu0 + T::lit(n as f64),
    };
    let mut delta = delta_from(c_star, &Vector::from_element(p, hyper.d), opts.intercept);

    let mut post: Option<MardPosterior<T>> = None;
    let mut converged = false;
    for it in 0..opts.max_iter {
        let iterations = it + 1;
        let (b_star, m_star, v_star, d_star) = sweep(&prob, hyper, nu_star, c_star, &delta, opts.mixed_moments)?;
        let next = MardPosterior {
            beta_star: vec(&b_star),
            m_star,
            v_star,
            nu_star,
            c_star,
            delta_star: delta_from(c_star, &d_star, opts.intercept),
            d_star,
            intercept: opts.intercept,
            iterations,
            converged: false,
            mixed_moments: opts.mixed_moments,
        };
        let change = post.as_ref().map_or(f64::INFINITY, |old| change_between(old, &next));
        delta = next.delta_star.clone();
        post = Some(next);
        if change < opts.tol {
            converged = true;
            break;
        }
    }
    let mut post = post.expect("at least one sweep ran");
    post.converged = converged;
    Ok(post)
}

/// Largest relative change across `beta*`, `V*` and `d*`.
pub fn change_between<T: Real>(old: &MardPosterior<T>, new: &MardPosterior<T>) -> f64 {
    max_relative_change(old.beta_star.as_slice(), new.beta_star.as_slice())
        .max(max_relative_change(old.v_star.as_matrix().as_slice(), new.v_star.as_matrix().as_slice()))
        .max(max_relative_change(old.d_star.as_slice(), new.d_star.as_slice()))
}

/// Applies one more coordinate sweep to an existing posterior.
pub fn refine_mard<T: Real>(
    posterior: &MardPosterior<T>,
    x: &Matrix<T>,
    y: &Matrix<T>,
    hyper: &MardHyper<T>,
) -> Result<MardPosterior<T>> {
    let prob = Problem::new(x, y, hyper, posterior.intercept)?;
    if prob.p() != posterior.dim() {
        return Err(Error::Dimension("posterior and design disagree on dimension".into()));
    }
    let (b_star, m_star, v_star, d_star) = sweep(
        &prob,
        hyper,
        posterior.nu_star,
        posterior.c_star,
        &posterior.delta_star,
        posterior.mixed_moments,
    )?;
    Ok(MardPosterior {
        beta_star: vec(&b_star),
        m_star,
        v_star,
        delta_star: delta_from(posterior.c_star, &d_star, posterior.intercept),
        d_star,
        iterations: posterior.iterations + 1,
        ..posterior.clone()
    })
}

/// Closed form used for the predictive scale matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictiveForm {
    /// Scale `phi V*^-1 / (nu* - 1)` with `phi = 1 + x^T M*^-1 x`.
    #[default]
    Derived,
    /// Scale `V*^-1 / ((1 + x^T M* x)(nu* - 1))`: the inflation factor uses
    /// `M*` instead of its inverse and divides. Fails the sampling check;
    /// kept for comparison.
    ReciprocalInflation,
}

/// Multivariate-t predictive for `x_new` (features only).
pub fn predict_mard<T: Real>(posterior: &MardPosterior<T>, x_new: &Vector<T>) -> Result<MvtParams<T>> {
    predict_mard_form(posterior, x_new, PredictiveForm::Derived)
}

pub fn predict_mard_form<T: Real>(
    posterior: &MardPosterior<T>,
    x_new: &Vector<T>,
    form: PredictiveForm,
) -> Result<MvtParams<T>> {
    let x = posterior.with_intercept(x_new)?;
    let dof = posterior.nu_star - T::lit((RESPONSES - 1) as f64);
    if !(dof > T::zero()) {
        return Err(Error::Parameter(format!("predictive dof must be positive, got {dof}")));
    }
    let location = posterior.b_star().transpose() * &x;
    let v_inv = posterior.v_star.inverse().into_inner();
    let factor = match form {
        PredictiveForm::Derived => (T::one() + x.dot(&posterior.m_star.solve_vec(&x))) / dof,
        PredictiveForm::ReciprocalInflation => T::one() / ((T::one() + posterior.m_star.quad_form(&x)) * dof),
    };
    MvtParams::new(dof, location, SpdMatrix::new(v_inv * factor)?)
}

/// Draws from the predictive by ancestral sampling: `K ~ Wishart(nu*, V*)`,
/// `vec(B) | K ~ N(beta*, (K ⊗ M*)^-1)`, `y | B, K ~ N(B^T x, K^-1)`.
#[derive(Debug, Clone)]
pub struct PredictiveSampler<T: Real> {
    posterior: MardPosterior<T>,
    /// Lower Cholesky factor of `M*`.
    m_chol: Matrix<T>,
}

impl<T: Real> PredictiveSampler<T> {
    pub fn new(posterior: &MardPosterior<T>) -> Self {
        Self { m_chol: posterior.m_star.cholesky_factor(), posterior: posterior.clone() }
    }

    /// `n_draws` response pairs at `x_new`.
    pub fn sample(&self, x_new: &Vector<T>, n_draws: usize, rng: &mut Rng) -> Result<Vec<[f64; 2]>> {
        let x = self.posterior.with_intercept(x_new)?;
        let p = x.len();
        let mean = self.posterior.b_star().transpose() * &x;
        // With M* = L L^T, A = L^-T satisfies A A^T = M*^-1, and B^T x depends on
        // the matrix-normal draw Z only through u = A^T x = L^-1 x.
        let u = self
            .m_chol
            .solve_lower_triangular(&x)
            .ok_or_else(|| Error::Singular("Cholesky factor of M*".into()))?;
        let u: Vec<f64> = u.iter().map(|v| v.as_f64()).collect();
        let mut out = Vec::with_capacity(n_draws);
        for _ in 0..n_draws {
            let k = sample_wishart(&self.posterior.v_star, self.posterior.nu_star, rng)?;
            let lk = k.cholesky_factor();
            // C = L_K^-T has C C^T = K^-1.
            let mut z = [0.0f64; 2];
            for zr in z.iter_mut() {
                let mut acc = 0.0;
                for uk in u.iter().take(p) {
                    acc += uk * sample_standard_normal(rng);
                }
                // coefficient noise plus observation noise, both with covariance ∝ K^-1
                *zr = acc + sample_standard_normal(rng);
            }
            let zt = Vector::from_iterator(2, z.iter().map(|v| T::lit(*v)));
            let noise = lk
                .transpose()
                .solve_upper_triangular(&zt)
                .ok_or_else(|| Error::Singular("Cholesky factor of K".into()))?;
            let y = &mean + noise;
            out.push([y[0].as_f64(), y[1].as_f64()]);
        }
        Ok(out)
    }
}

pub fn sample_predictive<T: Real>(
    posterior: &MardPosterior<T>,
    x_new: &Vector<T>,
    n_draws: usize,
    rng: &mut Rng,
) -> Result<Vec<[f64; 2]>> {
    PredictiveSampler::new(posterior).sample(x_new, n_draws, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibleRegion {
    pub a_interval: (f64, f64),
    pub v_interval: (f64, f64),
}

impl CredibleRegion {
    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.a_interval.0 + self.a_interval.1),
            0.5 * (self.v_interval.0 + self.v_interval.1),
        )
    }

    pub fn contains(&self, a: f64, v: f64) -> bool {
        self.a_interval.0 <= a && a <= self.a_interval.1 && self.v_interval.0 <= v && v <= self.v_interval.1
    }

    pub fn area(&self) -> f64 {
        (self.a_interval.1 - self.a_interval.0) * (self.v_interval.1 - self.v_interval.0)
    }
}

/// Cartesian product of the per-coordinate equal-tail intervals.
pub fn credible_region(samples: &[[f64; 2]], level: f64) -> Result<CredibleRegion> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Parameter(format!("level must be in (0,1), got {level}")));
    }
    if samples.len() < 100 {
        return Err(Error::Parameter(format!(
            "a credible region needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    let a: Vec<f64> = samples.iter().map(|s| s[0]).collect();
    let v: Vec<f64> = samples.iter().map(|s| s[1]).collect();
    Ok(CredibleRegion { a_interval: equal_tail_interval(&a, level)?, v_interval: equal_tail_interval(&v, level)? })
}

/// Region from the closed-form marginals of a bivariate t predictive.
pub fn analytic_region<T: Real>(pred: &MvtParams<T>, level: f64) -> Result<CredibleRegion> {
    let s = pred.scale.as_matrix();
    let dof = pred.dof.as_f64();
    let a = crate::distributions::student_t_interval(pred.location[0].as_f64(), s[(0, 0)].as_f64().sqrt(), dof, level)?;
    let v = crate::distributions::student_t_interval(pred.location[1].as_f64(), s[(1, 1)].as_f64().sqrt(), dof, level)?;
    Ok(CredibleRegion { a_interval: a, v_interval: v })
}

/// Direct sum-of-squares form of `V*^-1`, used to cross-check the Woodbury route:
/// `V0^-1 + (Y - X B*)^T (Y - X B*) + B*^T Δ* B*`.
pub fn scale_inverse_direct<T: Real>(
    x: &Matrix<T>,
    y: &Matrix<T>,
    hyper: &MardHyper<T>,
    b_star: &Matrix<T>,
    delta: &Vector<T>,
) -> Result<Matrix<T>> {
    let r = y - x * b_star;
    let db = Matrix::from_fn(b_star.nrows(), b_star.ncols(), |i, j| delta[i] * b_star[(i, j)]);
    Ok(spd_inverse(hyper.v0.as_matrix(), "V0")? + r.transpose() * r + b_star.transpose() * db)
}
