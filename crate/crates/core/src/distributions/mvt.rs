use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use statrs::function::gamma::ln_gamma;

use super::{sample_chi_squared, sample_standard_normal, Rng};
use crate::error::{Error, Result};
use crate::matrix_ops::{SpdMatrix, Vector};
use crate::scalar::Real;

/// Multivariate Student-t. `scale` is the scale matrix (not a precision);
/// the covariance is `dof / (dof - 2) * scale` when `dof > 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MvtParams<T: Real = f64> {
    pub dof: T,
    #[serde(with = "crate::io::vector_serde")]
    pub location: Vector<T>,
    #[serde(with = "crate::io::spd_serde")]
    pub scale: SpdMatrix<T>,
}

impl<T: Real> MvtParams<T> {
    pub fn new(dof: T, location: Vector<T>, scale: SpdMatrix<T>) -> Result<Self> {
        if !(dof > T::zero()) || !dof.is_finite_value() {
            return Err(Error::Parameter(format!("t dof must be positive, got {dof}")));
        }
        if location.len() != scale.dim() {
            return Err(Error::Parameter(format!(
                "location has length {} but scale is {}x{}",
                location.len(),
                scale.dim(),
                scale.dim()
            )));
        }
        Ok(Self { dof, location, scale })
    }

    pub fn dim(&self) -> usize {
        self.location.len()
    }

    /// `dof / (dof - 2) * scale`, defined for `dof > 2`.
    pub fn covariance(&self) -> Result<SpdMatrix<T>> {
        let two = T::lit(2.0);
        if !(self.dof > two) {
            return Err(Error::MomentUndefined(format!(
                "t covariance needs dof > 2, got {}",
                self.dof
            )));
        }
        let f = self.dof / (self.dof - two);
        SpdMatrix::new(self.scale.as_matrix() * f)
    }
}

pub fn mvt_logpdf<T: Real>(params: &MvtParams<T>, x: &Vector<T>) -> Result<T> {
    let d = params.dim();
    if x.len() != d {
        return Err(Error::Parameter(format!("point has length {} but t has dim {d}", x.len())));
    }
    let nu = params.dof.as_f64();
    let df = d as f64;
    let r = x - &params.location;
    let maha = r.dot(&params.scale.solve_vec(&r)).as_f64();
    let logdet = params.scale.log_det().as_f64();
    let v = ln_gamma(0.5 * (nu + df)) - ln_gamma(0.5 * nu)
        - 0.5 * df * (nu * std::f64::consts::PI).ln()
        - 0.5 * logdet
        - 0.5 * (nu + df) * (maha / nu).ln_1p();
    Ok(T::lit(v))
}

/// Normal/chi-square mixture: `location + L z / sqrt(w / dof)`.
pub fn sample_mvt<T: Real>(params: &MvtParams<T>, rng: &mut Rng) -> Result<Vector<T>> {
    let d = params.dim();
    let z = Vector::<T>::from_iterator(d, (0..d).map(|_| T::lit(sample_standard_normal(rng))));
    let w = sample_chi_squared(params.dof.as_f64(), rng)?;
    let f = T::lit((params.dof.as_f64() / w).sqrt());
    Ok(&params.location + params.scale.cholesky_factor() * z * f)
}

const LARGE_DOF: f64 = 1e4;

/// Quantile of the standard Student-t with `dof` degrees of freedom.
pub fn student_t_quantile(dof: f64, prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Parameter(format!("probability must be in (0,1), got {prob}")));
    }
    if !(dof > 0.0) {
        return Err(Error::Parameter(format!("t dof must be positive, got {dof}")));
    }
    if dof > LARGE_DOF {
        // statrs loses accuracy here; the expansion error is O(dof^-3).
        let z = Normal::standard().inverse_cdf(prob);
        let (z3, z5) = (z.powi(3), z.powi(5));
        return Ok(z + (z3 + z) / (4.0 * dof) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * dof * dof));
    }
    let t = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(t.inverse_cdf(prob))
}

/// Equal-tail interval of a location/scale Student-t at `level`.
pub fn student_t_interval(location: f64, scale: f64, dof: f64, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Parameter(format!("level must be in (0,1), got {level}")));
    }
    let q = student_t_quantile(dof, 0.5 + 0.5 * level)?;
    Ok((location - q * scale, location + q * scale))
}
