//! Dense complex linear algebra: arithmetic, norms, spectral decomposition of
//! normal matrices, resolvents and seeded random generation.

mod hermitian;
mod lu;
mod matrix;
pub mod random;
mod schur;
mod svd;
pub mod vector;

use serde::{Deserialize, Serialize};

pub use hermitian::HermitianEigen;
pub use lu::{resolvent_unchecked, Lu};
pub use matrix::{commutator, Matrix};
pub use random::{random_matrix, MatrixKind};
pub use schur::{eigenvalues, Schur};
pub use svd::Svd;
pub use vector::UnitVector;

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;

/// Default relative tolerance for algebraic identities.
pub const DEFAULT_TOL: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest singular value.
pub fn operator_norm(m: &Matrix) -> Result<f64> {
    m.require_finite()?;
    Ok(Svd::new(m).s[0])
}

/// Sum of singular values.
pub fn trace_norm(m: &Matrix) -> Result<f64> {
    m.require_finite()?;
    Ok(Svd::new(m).s.iter().sum())
}

/// Infallible operator norm for matrices already known to be finite.
#[inline]
pub(crate) fn opnorm(m: &Matrix) -> f64 {
    Svd::new(m).s[0]
}

/// `||a* a - a a*||`.
pub fn normality_defect(a: &Matrix) -> f64 {
    opnorm(&(&a.adjoint_mul(a) - &a.matmul(&a.adjoint())))
}

/// Eigenvalues and a unitary eigenbasis of a normal matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    #[serde(with = "vector::complex_vec")]
    pub eigenvalues: Vec<C64>,
    /// Columns are orthonormal eigenvectors.
    pub basis: Matrix,
    /// `||a U - U D||`.
    pub residual: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(lambda)) U*`.
    pub fn apply(&self, f: impl Fn(C64) -> C64) -> Matrix {
        let values: Vec<C64> = self.eigenvalues.iter().map(|&z| f(z)).collect();
        self.basis.matmul(&Matrix::from_diag(&values)).matmul(&self.basis.adjoint())
    }

    pub fn reconstruct(&self) -> Matrix {
        self.apply(|z| z)
    }

    /// Expresses `b` in the eigenbasis: `U* b U`.
    pub fn to_eigenbasis(&self, b: &Matrix) -> Matrix {
        self.basis.adjoint_mul(b).matmul(&self.basis)
    }

    pub fn from_eigenbasis(&self, b: &Matrix) -> Matrix {
        self.basis.matmul(b).matmul(&self.basis.adjoint())
    }
}

/// Lexicographic order on `(re, im)`.
pub fn lex_cmp(x: &C64, y: &C64) -> std::cmp::Ordering {
    x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
}

/// Spectral decomposition of a normal matrix via complex Schur triangularization.
///
/// Rejects inputs with `||a*a - aa*|| > tol ||a||^2`, and inputs whose Schur
/// factor is not diagonal to `10 tol ||a||`.
pub fn eig_normal(a: &Matrix, tol: f64) -> Result<SpectralDecomposition> {
    let n = a.require_square()?;
    a.require_finite()?;
    let norm = opnorm(a);
    let defect = normality_defect(a);
    if defect > tol * norm * norm {
        return Err(Error::Normality { defect });
    }
    let schur = Schur::new(a)?;
    let mut order: Vec<usize> = (0..n).collect();
    let diag = schur.t.diag();
    order.sort_by(|&i, &j| lex_cmp(&diag[i], &diag[j]));
    let eigenvalues: Vec<C64> = order.iter().map(|&i| diag[i]).collect();
    let basis = Matrix::from_fn(n, n, |i, k| schur.q[(i, order[k])]);
    let au = a.matmul(&basis);
    let ud = basis.matmul(&Matrix::from_diag(&eigenvalues));
    let residual = opnorm(&(&au - &ud));
    if residual > 10.0 * tol * norm.max(f64::MIN_POSITIVE) && residual > 1e-14 {
        return Err(Error::Normality { defect: defect.max(residual * residual) });
    }
    Ok(SpectralDecomposition { eigenvalues, basis, residual })
}

/// `f(a)` for a normal matrix through its spectral decomposition.
pub fn apply_function_spectral(a: &Matrix, f: impl Fn(C64) -> C64, tol: f64) -> Result<Matrix> {
    Ok(eig_normal(a, tol)?.apply(f))
}

/// `(zeta I - a)^{-1}`, refusing points within `eps_min` of the spectrum
/// (measured by the smallest singular value of `zeta I - a`).
pub fn resolvent(a: &Matrix, zeta: C64, eps_min: f64) -> Result<Matrix> {
    a.require_square()?;
    a.require_finite()?;
    let m = a.scale_real(-1.0).shift(zeta);
    let s = Svd::new(&m);
    let smin = *s.s.last().unwrap();
    if smin <= eps_min || smin == 0.0 {
        return Err(Error::Resolvent { distance: smin });
    }
    let lu = Lu::new(&m)?;
    let r = lu.inverse();
    if !r.is_finite() {
        return Err(Error::Resolvent { distance: smin });
    }
    Ok(r)
}
