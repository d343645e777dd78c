use super::{sample_chi_squared, sample_standard_normal, Rng};
use crate::error::{Error, Result};
use crate::matrix_ops::{commutation_matrix, kron, symmetrize, vec, Matrix, SpdMatrix};
use crate::scalar::Real;

/// Draws `K ~ Wishart(dof, scale)` with `E[K] = dof * scale`.
///
/// Bartlett construction: `K = L A A^T L^T` with `scale = L L^T`, `A` lower
/// triangular, `A_ii = sqrt(chi2(dof - i))` (zero-based `i`) and standard
/// normal entries below the diagonal.
pub fn sample_wishart<T: Real>(scale: &SpdMatrix<T>, dof: T, rng: &mut Rng) -> Result<SpdMatrix<T>> {
    let d = scale.dim();
    let nu = dof.as_f64();
    if !(nu > (d as f64) - 1.0) || !nu.is_finite() {
        return Err(Error::Parameter(format!(
            "Wishart dof must exceed dim - 1 = {}, got {nu}",
            d - 1
        )));
    }
    let mut a = Matrix::<T>::zeros(d, d);
    for i in 0..d {
        a[(i, i)] = T::lit(sample_chi_squared(nu - i as f64, rng)?.sqrt());
        for j in 0..i {
            a[(i, j)] = T::lit(sample_standard_normal(rng));
        }
    }
    let la = scale.cholesky_factor() * a;
    let k = symmetrize(&(&la * la.transpose()));
    SpdMatrix::new(k).map_err(|e| Error::Singular(format!("Wishart draw: {e}")))
}

/// `E[K^-1 ⊗ K]` for `K ~ Wishart(dof, scale)` of dimension `d`:
///
/// `(dof V^-1 ⊗ V - vec(I) vec(I)^T - G) / (dof - d - 1)`,
///
/// with `G` the `d^2 x d^2` commutation matrix. Requires `dof > d + 1`.
pub fn wishart_inv_kron_moment<T: Real>(scale: &SpdMatrix<T>, dof: T) -> Result<Matrix<T>> {
    let d = scale.dim();
    let denom = dof - T::lit((d + 1) as f64);
    if !(denom > T::zero()) {
        return Err(Error::MomentUndefined(format!(
            "E[K^-1 ⊗ K] needs dof > {}, got {dof}",
            d + 1
        )));
    }
    let v = scale.as_matrix();
    let v_inv = scale.inverse().into_inner();
    let vi = vec(&Matrix::<T>::identity(d, d));
    let g = commutation_matrix::<T>(d, d)?;
    let out = kron(&v_inv, v) * dof - &vi * vi.transpose() - g;
    Ok(out / denom)
}
