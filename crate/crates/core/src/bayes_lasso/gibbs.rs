use serde::{Deserialize, Serialize};

use crate::distributions::{sample_gamma, sample_gig, sample_inv_gamma, sample_normal, GigParams, Rng};
use crate::error::{Error, Result};
use crate::matrix_ops::{Matrix, Vector};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LassoHyper<T: Real = f64> {
    /// Inverse-Gamma shape for sigma2.
    pub a: T,
    /// Inverse-Gamma scale for sigma2.
    pub b: T,
    /// Gamma shape for lambda.
    pub c: T,
    /// Gamma rate for lambda.
    pub d: T,
}

impl<T: Real> Default for LassoHyper<T> {
    fn default() -> Self {
        let v = T::lit(0.01);
        Self { a: v, b: v, c: v, d: v }
    }
}

impl<T: Real> LassoHyper<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            if !(v > T::zero()) || !v.is_finite_value() {
                return Err(Error::Parameter(format!("hyperparameter {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GibbsState<T: Real = f64> {
    pub beta0: T,
    #[serde(with = "crate::io::vector_serde")]
    pub beta: Vector<T>,
    pub sigma2: T,
    pub lambda: T,
    #[serde(with = "crate::io::vector_serde")]
    pub gamma: Vector<T>,
}

impl<T: Real> GibbsState<T> {
    /// Starting point: intercept at mean(y), zero slopes, sigma2 at the
    /// sample variance of y, unit lambda and unit scales.
    pub fn initial(y: &Vector<T>, p: usize) -> Self {
        let n = y.len();
        let ys: Vec<f64> = y.iter().map(|v| v.as_f64()).collect();
        let mean = if n > 0 { crate::stats::mean(&ys) } else { 0.0 };
        let var = if n > 1 { crate::stats::variance(&ys) } else { 1.0 };
        Self {
            beta0: T::lit(mean),
            beta: Vector::zeros(p),
            sigma2: T::lit(if var > 1e-8 { var } else { 1.0 }),
            lambda: T::one(),
            gamma: Vector::from_element(p, T::one()),
        }
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta.len() != self.gamma.len() {
            return Err(Error::Dimension("beta and gamma lengths differ".into()));
        }
        if !(self.sigma2 > T::zero()) {
            return Err(Error::Parameter(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if !(self.lambda > T::zero()) {
            return Err(Error::Parameter(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.gamma.iter().any(|g| !(*g > T::zero())) {
            return Err(Error::Parameter("every gamma_j must be positive".into()));
        }
        Ok(())
    }
}

/// One block of the systematic scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Block {
    Intercept,
    Variance,
    Penalty,
    Coefficients,
    Scales,
}

impl Block {
    pub const ALL: [Block; 5] = [
        Block::Intercept,
        Block::Variance,
        Block::Penalty,
        Block::Coefficients,
        Block::Scales,
    ];
}

/// Scan order and optional frozen blocks (a frozen block keeps its value).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsConfig {
    pub order: Vec<Block>,
    pub frozen: Vec<Block>,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        Self { order: Block::ALL.to_vec(), frozen: Vec::new() }
    }
}

impl GibbsConfig {
    pub fn validate(&self) -> Result<()> {
        let mut seen = self.order.clone();
        seen.sort_by_key(|b| *b as u8);
        seen.dedup();
        if seen.len() != Block::ALL.len() || self.order.len() != Block::ALL.len() {
            return Err(Error::Parameter(
                "scan order must list every block exactly once".into(),
            ));
        }
        Ok(())
    }

    pub fn with_frozen(mut self, blocks: &[Block]) -> Self {
        self.frozen.extend_from_slice(blocks);
        self
    }
}

fn check_problem<T: Real>(state: &GibbsState<T>, x: &Matrix<T>, y: &Vector<T>) -> Result<()> {
    let (n, p) = x.shape();
    if n == 0 || p == 0 {
        return Err(Error::EmptyData(format!("design is {n}x{p}")));
    }
    if y.len() != n {
        return Err(Error::Dimension(format!("x has {n} rows but y has {} entries", y.len())));
    }
    if state.p() != p {
        return Err(Error::Dimension(format!("state has {} coefficients, design has {p}", state.p())));
    }
    Ok(())
}

fn finite(v: f64, variable: impl Into<String>) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { variable: variable.into() })
    }
}

/// Per-sweep quantities that depend only on the data.
struct Workspace {
    col_sq: Vec<f64>,
}

impl Workspace {
    fn new<T: Real>(x: &Matrix<T>) -> Self {
        let col_sq = x
            .column_iter()
            .map(|c| c.iter().map(|v| v.as_f64().powi(2)).sum())
            .collect();
        Self { col_sq }
    }
}

fn sweep<T: Real>(
    state: &mut GibbsState<T>,
    x: &Matrix<T>,
    y: &Vector<T>,
    hyper: &LassoHyper<T>,
    config: &GibbsConfig,
    ws: &Workspace,
    rng: &mut Rng,
) -> Result<()> {
    let (n, p) = x.shape();
    let nf = n as f64;
    // Residual y - beta0 - X beta, kept current through the coefficient updates.
    let mut resid: Vec<f64> = (y - x * &state.beta)
        .iter()
        .map(|v| v.as_f64() - state.beta0.as_f64())
        .collect();

    for block in &config.order {
        if config.frozen.contains(block) {
            continue;
        }
        match block {
            Block::Intercept => {
                let old = state.beta0.as_f64();
                let mean = resid.iter().sum::<f64>() / nf + old;
                let var = state.sigma2.as_f64() / nf;
                let new = finite(sample_normal(finite(mean, "beta0")?, finite(var, "beta0")?, rng)?, "beta0")?;
                resid.iter_mut().for_each(|r| *r += old - new);
                state.beta0 = T::lit(new);
            }
            Block::Variance => {
                let ssr: f64 = resid.iter().map(|r| r * r).sum();
                let shape = hyper.a.as_f64() + 0.5 * nf;
                let scale = finite(hyper.b.as_f64() + 0.5 * ssr, "sigma2")?;
                state.sigma2 = T::lit(finite(sample_inv_gamma(shape, scale, rng)?, "sigma2")?);
            }
            Block::Penalty => {
                let shape = hyper.c.as_f64() + p as f64;
                let gsum: f64 = state.gamma.iter().map(|g| g.as_f64()).sum();
                let rate = finite(hyper.d.as_f64() + 0.5 * gsum, "lambda")?;
                state.lambda = T::lit(finite(sample_gamma(shape, rate, rng)?, "lambda")?);
            }
            Block::Coefficients => {
                let sigma2 = state.sigma2.as_f64();
                for j in 0..p {
                    let col = x.column(j);
                    let old = state.beta[j].as_f64();
                    let mut xr = 0.0;
                    for (i, r) in resid.iter().enumerate() {
                        xr += col[i].as_f64() * (r + col[i].as_f64() * old);
                    }
                    let var = 1.0 / (1.0 / state.gamma[j].as_f64() + ws.col_sq[j] / sigma2);
                    let mean = var / sigma2 * xr;
                    let name = || format!("beta_{}", j + 1);
                    let new = finite(sample_normal(finite(mean, name())?, finite(var, name())?, rng)?, name())?;
                    let delta = new - old;
                    for (i, r) in resid.iter_mut().enumerate() {
                        *r -= col[i].as_f64() * delta;
                    }
                    state.beta[j] = T::lit(new);
                }
            }
            Block::Scales => {
                let lambda = state.lambda.as_f64();
                for j in 0..p {
                    // beta_j^2 can underflow to zero; the GIG needs b > 0.
                    let b = state.beta[j].as_f64().powi(2).max(f64::MIN_POSITIVE);
                    let params = GigParams::new(0.5, lambda, b)
                        .map_err(|_| Error::NonFinite { variable: format!("gamma_{}", j + 1) })?;
                    let g: f64 = sample_gig(&params, rng)?;
                    state.gamma[j] = T::lit(finite(g, format!("gamma_{}", j + 1))?);
                }
            }
        }
    }
    Ok(())
}

/// One full Gibbs sweep in the default order
/// intercept, sigma2, lambda, coefficients, scales.
pub fn gibbs_step<T: Real>(
    state: &GibbsState<T>,
    x: &Matrix<T>,
    y: &Vector<T>,
    hyper: &LassoHyper<T>,
    rng: &mut Rng,
) -> Result<GibbsState<T>> {
    gibbs_step_with(state, x, y, hyper, &GibbsConfig::default(), rng)
}

pub fn gibbs_step_with<T: Real>(
    state: &GibbsState<T>,
    x: &Matrix<T>,
    y: &Vector<T>,
    hyper: &LassoHyper<T>,
    config: &GibbsConfig,
    rng: &mut Rng,
) -> Result<GibbsState<T>> {
    hyper.validate()?;
    config.validate()?;
    check_problem(state, x, y)?;
    state.validate()?;
    let mut next = state.clone();
    sweep(&mut next, x, y, hyper, config, &Workspace::new(x), rng)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig<T: Real = f64> {
    pub iters: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    #[serde(default)]
    pub gibbs: GibbsConfig,
    #[serde(default, bound = "")]
    pub init: Option<GibbsState<T>>,
}

impl<T: Real> ChainConfig<T> {
    pub fn new(iters: usize, burn_in: usize, thin: usize, seed: u64) -> Self {
        Self { iters, burn_in, thin, seed, gibbs: GibbsConfig::default(), init: None }
    }

    pub fn kept_count(&self) -> usize {
        (self.iters - self.burn_in) / self.thin
    }
}

impl<T: Real> Default for ChainConfig<T> {
    fn default() -> Self {
        Self::new(10_000, 1_000, 25, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ChainOutput<T: Real = f64> {
    pub draws: Vec<GibbsState<T>>,
    pub iters: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl<T: Real> ChainOutput<T> {
    pub fn p(&self) -> usize {
        self.draws.first().map_or(0, |s| s.p())
    }

    /// Trace of one scalar field across kept draws.
    pub fn trace(&self, f: impl Fn(&GibbsState<T>) -> T) -> Vec<f64> {
        self.draws.iter().map(|s| f(s).as_f64()).collect()
    }
}

pub fn run_chain<T: Real>(
    x: &Matrix<T>,
    y: &Vector<T>,
    hyper: &LassoHyper<T>,
    iters: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
) -> Result<ChainOutput<T>> {
    run_chain_with(x, y, hyper, &ChainConfig::new(iters, burn_in, thin, seed), &mut Rng::new(seed))
}

/// Runs `iters` sweeps and keeps every `thin`-th state after `burn_in`.
pub fn run_chain_with<T: Real>(
    x: &Matrix<T>,
    y: &Vector<T>,
    hyper: &LassoHyper<T>,
    config: &ChainConfig<T>,
    rng: &mut Rng,
) -> Result<ChainOutput<T>> {
    let (n, p) = x.shape();
    if n == 0 || p == 0 {
        return Err(Error::EmptyData(format!("design is {n}x{p}")));
    }
    if config.iters <= config.burn_in {
        return Err(Error::Parameter(format!(
            "iterations ({}) must exceed burn-in ({})",
            config.iters, config.burn_in
        )));
    }
    if config.thin == 0 {
        return Err(Error::Parameter("thin must be at least 1".into()));
    }
    hyper.validate()?;
    config.gibbs.validate()?;
    let mut state = config.init.clone().unwrap_or_else(|| GibbsState::initial(y, p));
    check_problem(&state, x, y)?;
    state.validate()?;

    let ws = Workspace::new(x);
    let mut draws = Vec::with_capacity(config.kept_count());
    for it in 1..=config.iters {
        sweep(&mut state, x, y, hyper, &config.gibbs, &ws, rng)?;
        if it > config.burn_in && (it - config.burn_in) % config.thin == 0 {
            draws.push(state.clone());
        }
    }
    Ok(ChainOutput {
        draws,
        iters: config.iters,
        burn_in: config.burn_in,
        thin: config.thin,
        seed: config.seed,
    })
}

/// Independent chains on split streams of `config.seed`, run on separate threads.
pub fn run_chains<T: Real>(
    x: &Matrix<T>,
    y: &Vector<T>,
    hyper: &LassoHyper<T>,
    config: &ChainConfig<T>,
    chains: usize,
) -> Result<Vec<ChainOutput<T>>> {
    let root = Rng::new(config.seed);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains)
            .map(|c| {
                let mut rng = root.split(c as u64);
                scope.spawn(move || run_chain_with(x, y, hyper, config, &mut rng))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect()
    })
}
