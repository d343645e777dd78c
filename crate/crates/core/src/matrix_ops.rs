//! Dense structured linear algebra: Kronecker products, column-major
//! vectorization, commutation matrices, and Woodbury inversion.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub type Matrix<T = f64> = DMatrix<T>;
pub type Vector<T = f64> = DVector<T>;

/// Relative tolerance used when validating symmetry of SPD inputs.
pub fn symmetry_tolerance<T: Real>() -> T {
    let floor: T = lit(1e-10);
    let scaled = T::eps() * lit(64.0);
    if scaled > floor {
        scaled
    } else {
        floor
    }
}

/// Largest absolute entry, or zero for an empty matrix.
pub fn max_abs<T: Real>(m: &Matrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &v| {
        let a = v.abs();
        if a > acc {
            a
        } else {
            acc
        }
    })
}

/// Kronecker product: block `(i, j)` of the result is `a[i, j] * b`.
pub fn kron<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = Matrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == T::zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Stacks the columns of `a` on top of one another.
pub fn vec<T: Real>(a: &Matrix<T>) -> Vector<T> {
    // nalgebra storage is column-major, so the raw slice is already vec(a).
    Vector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec`]: reshapes a column-major vector into `rows x cols`.
pub fn unvec<T: Real>(v: &Vector<T>, rows: usize, cols: usize) -> Result<Matrix<T>> {
    if v.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "cannot reshape vector of length {} into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(Matrix::from_column_slice(rows, cols, v.as_slice()))
}

/// The `pq x pq` permutation `G` with `G vec(A) = vec(A^T)` for every `p x q` matrix `A`.
///
/// Built as the sum over `(i, j)` of `H_ij ⊗ H_ij^T`, where `H_ij` is the
/// `p x q` unit matrix with a one at `(i, j)`.
pub fn commutation_matrix<T: Real>(p: usize, q: usize) -> Result<Matrix<T>> {
    if p == 0 || q == 0 {
        return Err(Error::Parameter(format!(
            "commutation matrix needs p, q >= 1 (got {p}, {q})"
        )));
    }
    let mut g = Matrix::zeros(p * q, p * q);
    // vec(A)[j*p + i] = A[i, j]; vec(A^T)[i*q + j] = A[i, j].
    for i in 0..p {
        for j in 0..q {
            g[(i * q + j, j * p + i)] = T::one();
        }
    }
    Ok(g)
}

/// Square matrix that passed a symmetry check and a Cholesky factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix<T: Real = f64> {
    inner: Matrix<T>,
}

impl<T: Real> SpdMatrix<T> {
    /// Validates and wraps `m`. The stored matrix is exactly symmetrized.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        let (r, c) = m.shape();
        if r != c || r == 0 {
            return Err(Error::NotSpd(format!("expected a non-empty square matrix, got {r}x{c}")));
        }
        if m.iter().any(|v| !v.is_finite_value()) {
            return Err(Error::NotSpd("matrix has non-finite entries".into()));
        }
        let scale = max_abs(&m);
        let tol = symmetry_tolerance::<T>() * scale;
        for i in 0..r {
            for j in (i + 1)..r {
                if (m[(i, j)] - m[(j, i)]).abs() > tol {
                    return Err(Error::NotSpd(format!(
                        "asymmetric entries at ({i},{j}): {} vs {}",
                        m[(i, j)],
                        m[(j, i)]
                    )));
                }
            }
        }
        let sym = symmetrize(&m);
        if sym.clone().cholesky().is_none() {
            return Err(Error::NotSpd("Cholesky factorization failed".into()));
        }
        Ok(Self { inner: sym })
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: Matrix::identity(n, n) }
    }

    /// Diagonal matrix from strictly positive entries.
    pub fn from_diagonal(d: &[T]) -> Result<Self> {
        if d.iter().any(|&v| v <= T::zero() || !v.is_finite_value()) {
            return Err(Error::NotSpd("diagonal entries must be positive and finite".into()));
        }
        Ok(Self { inner: Matrix::from_diagonal(&Vector::from_column_slice(d)) })
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.inner
    }

    pub fn into_inner(self) -> Matrix<T> {
        self.inner
    }

    pub fn cholesky(&self) -> Cholesky<T, Dyn> {
        self.inner
            .clone()
            .cholesky()
            .expect("SpdMatrix invariant guarantees a Cholesky factor")
    }

    /// Lower-triangular Cholesky factor `L` with `L L^T = self`.
    pub fn cholesky_factor(&self) -> Matrix<T> {
        self.cholesky().l()
    }

    pub fn inverse(&self) -> SpdMatrix<T> {
        let inv = self.cholesky().inverse();
        SpdMatrix { inner: symmetrize(&inv) }
    }

    pub fn log_det(&self) -> T {
        let l = self.cholesky().l();
        let two: T = lit(2.0);
        (0..l.nrows()).fold(T::zero(), |acc, i| acc + two * l[(i, i)].ln())
    }

    pub fn solve(&self, b: &Matrix<T>) -> Matrix<T> {
        self.cholesky().solve(b)
    }

    pub fn solve_vec(&self, b: &Vector<T>) -> Vector<T> {
        self.cholesky().solve(b)
    }

    /// `x^T self x`.
    pub fn quad_form(&self, x: &Vector<T>) -> T {
        x.dot(&(&self.inner * x))
    }
}

/// `(m + m^T) / 2`.
pub fn symmetrize<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    let half: T = lit(0.5);
    (m + m.transpose()) * half
}

/// Inverse of a symmetric positive definite matrix given as a raw matrix.
pub fn spd_inverse<T: Real>(m: &Matrix<T>, what: &str) -> Result<Matrix<T>> {
    let chol = symmetrize(m)
        .cholesky()
        .ok_or_else(|| Error::Singular(format!("{what} is not positive definite")))?;
    Ok(symmetrize(&chol.inverse()))
}

/// `(A + C)^{-1}` computed from `A^{-1}` and `C^{-1}` via the Woodbury identity
/// with `U = V = I`:
///
/// `(A + C)^{-1} = A^{-1} - A^{-1} (C^{-1} + A^{-1})^{-1} A^{-1}`.
pub fn woodbury_inverse<T: Real>(a_inv: &SpdMatrix<T>, c_inv: &SpdMatrix<T>) -> Result<SpdMatrix<T>> {
    if a_inv.dim() != c_inv.dim() {
        return Err(Error::Dimension(format!(
            "woodbury operands have dimensions {} and {}",
            a_inv.dim(),
            c_inv.dim()
        )));
    }
    let ai = a_inv.as_matrix();
    let inner = ai + c_inv.as_matrix();
    let inner_inv = symmetrize(&inner)
        .cholesky()
        .ok_or_else(|| Error::Singular("Woodbury inner term C^-1 + A^-1".into()))?
        .inverse();
    let out = ai - ai * inner_inv * ai;
    SpdMatrix::new(symmetrize(&out))
        .map_err(|e| Error::Singular(format!("Woodbury result lost definiteness: {e}")))
}

/// Trace of a square matrix.
pub fn trace<T: Real>(m: &Matrix<T>) -> T {
    m.diagonal().iter().fold(T::zero(), |a, &b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, data: &[f64]) -> Matrix {
        Matrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn kron_identity_blocks() {
        let out = kron(&Matrix::<f64>::identity(2, 2), &Matrix::identity(3, 3));
        assert_eq!(out, Matrix::identity(6, 6));
    }

    #[test]
    fn kron_with_scalar_block() {
        let out = kron(&m(2, 2, &[1., 2., 3., 4.]), &m(1, 1, &[5.]));
        assert_eq!(out, m(2, 2, &[5., 10., 15., 20.]));
    }

    #[test]
    fn vec_is_column_major() {
        let v = vec(&m(2, 2, &[1., 2., 3., 4.]));
        assert_eq!(v.as_slice(), &[1., 3., 2., 4.]);
        assert_eq!(vec(&Matrix::<f64>::zeros(2, 2)).as_slice(), &[0.; 4]);
        assert_eq!(unvec(&v, 2, 2).unwrap(), m(2, 2, &[1., 2., 3., 4.]));
        assert!(unvec(&v, 3, 2).is_err());
    }

    #[test]
    fn commutation_small_cases() {
        assert_eq!(commutation_matrix::<f64>(1, 1).unwrap(), m(1, 1, &[1.]));
        let g = commutation_matrix::<f64>(2, 2).unwrap();
        let out = g * vec(&m(2, 2, &[1., 2., 3., 4.]));
        assert_eq!(out.as_slice(), &[1., 2., 3., 4.]);
        assert!(commutation_matrix::<f64>(0, 3).is_err());
    }

    #[test]
    fn woodbury_identity_cases() {
        let i2 = SpdMatrix::<f64>::identity(2);
        let half = woodbury_inverse(&i2, &i2).unwrap();
        assert!((half.as_matrix() - Matrix::<f64>::identity(2, 2) * 0.5).abs().max() < 1e-15);

        let a_inv = SpdMatrix::from_diagonal(&[1.0, 0.5]).unwrap();
        let c_inv = SpdMatrix::from_diagonal(&[1.0, 1.0]).unwrap();
        let out: SpdMatrix<f64> = woodbury_inverse(&a_inv, &c_inv).unwrap();
        assert!((out.as_matrix()[(0, 0)] - 0.5).abs() < 1e-14);
        assert!((out.as_matrix()[(1, 1)] - 1.0 / 3.0).abs() < 1e-14);
        assert!(out.as_matrix()[(0, 1)].abs() < 1e-15);

        let bad = SpdMatrix::<f64>::identity(3);
        assert!(matches!(woodbury_inverse(&i2, &bad), Err(Error::Dimension(_))));
    }

    #[test]
    fn spd_validation() {
        assert!(SpdMatrix::new(m(2, 2, &[2., 1., 1., 2.])).is_ok());
        assert!(matches!(SpdMatrix::new(m(2, 2, &[1., 2., 2., 1.])), Err(Error::NotSpd(_))));
        assert!(matches!(SpdMatrix::new(m(2, 2, &[2., 1., 0., 2.])), Err(Error::NotSpd(_))));
        assert!(SpdMatrix::new(m(2, 3, &[1.; 6])).is_err());
        let s = SpdMatrix::new(m(2, 2, &[4., 0., 0., 9.])).unwrap();
        assert!((s.log_det() - 36f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let a = Matrix::<f32>::from_row_slice(2, 2, &[1., 2., 3., 4.]);
        let g = commutation_matrix::<f32>(2, 2).unwrap();
        assert_eq!((g * vec(&a)).as_slice(), vec(&a.transpose()).as_slice());
        let i = SpdMatrix::<f32>::identity(2);
        let w = woodbury_inverse(&i, &i).unwrap();
        assert!((w.as_matrix()[(1, 1)] - 0.5).abs() < 1e-6);
    }
}
