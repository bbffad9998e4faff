//! Divided-difference matrices and two-sided estimates of Schur multiplier
//! norms `||M||_S = sup ||M o X|| / ||X||`.

pub(crate) mod ascent;
mod factor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{opnorm, random, trace_norm, vector, Matrix, Svd, C64};
use ascent::{zero_on, LinearMap, RatioProblem};
pub use factor::Factorization;

/// Largest dimension accepted by the certified upper bound.
pub const MAX_CERTIFIED_DIM: usize = 64;
pub const DEFAULT_RESTARTS: usize = 20;

/// `Lambda(f; lambda)` with its defining data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchurMatrix {
    #[serde(with = "vector::complex_vec")]
    pub points: Vec<C64>,
    #[serde(with = "vector::complex_vec")]
    pub values: Vec<C64>,
    pub entries: Matrix,
}

/// `(f(l_i) - f(l_j)) / (l_i - l_j)`, and 0 where `l_i = l_j`.
pub fn divided_difference_from_values(points: &[C64], values: &[C64]) -> Result<SchurMatrix> {
    if points.is_empty() {
        return Err(Error::Input("no points".into()));
    }
    if points.len() != values.len() {
        return Err(Error::shape(format!("{} values", points.len()), format!("{} values", values.len())));
    }
    if values.iter().chain(points).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Input("non-finite point or function value".into()));
    }
    let n = points.len();
    let entries = Matrix::from_fn(n, n, |i, j| {
        let d = points[i] - points[j];
        if d == C64::new(0.0, 0.0) {
            C64::new(0.0, 0.0)
        } else {
            (values[i] - values[j]) / d
        }
    });
    Ok(SchurMatrix { points: points.to_vec(), values: values.to_vec(), entries })
}

pub fn divided_difference_matrix(f: impl Fn(C64) -> C64, points: &[C64]) -> Result<SchurMatrix> {
    let values: Vec<C64> = points.iter().map(|&z| f(z)).collect();
    divided_difference_from_values(points, &values)
}

/// Entrywise product `m o x`.
pub fn schur_apply(m: &Matrix, x: &Matrix) -> Result<Matrix> {
    m.require_same_shape(x)?;
    Ok(m.hadamard(x))
}

/// Two-sided estimate of a multiplier norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    /// Unit-norm matrix with `||M o witness|| = lower`.
    pub witness: Matrix,
    pub certificate: Factorization,
    /// Set when the bracket is wider than requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl NormBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        self.lower - slack <= value && value <= self.upper + slack
    }

    /// Re-derives both ends from the stored witness and certificate.
    pub fn verify(&self, m: &Matrix, free: Option<&[bool]>) -> bool {
        let n = m.rows();
        let w = &self.witness;
        if w.rows() != n || w.cols() != n {
            return false;
        }
        if let Some(f) = free {
            if (0..n * n).any(|k| f[k] && w.data()[k] != C64::new(0.0, 0.0)) {
                return false;
            }
        }
        let achieved = opnorm(&m.hadamard(w));
        let wn = opnorm(w);
        achieved >= self.lower * wn - 1e-9
            && self.certificate.verify(m, free)
            && self.certificate.bound() <= self.upper + 1e-12
            && self.lower <= self.upper + 1e-6
    }
}

/// One run of the monotone ascent `X <- Q P*`, where `W^T = P S Q*` and
/// `W_ij = conj(u_i) m_ij v_j` is built from the top singular pair of `m o X`.
fn polar_ascent(m: &Matrix, x0: Matrix) -> (f64, Matrix) {
    let ratio = |x: &Matrix| {
        let xn = opnorm(x);
        if xn > 0.0 { opnorm(&m.hadamard(x)) / xn } else { 0.0 }
    };
    let mut x = x0;
    let mut val = ratio(&x);
    for _ in 0..500 {
        let svd = Svd::new(&m.hadamard(&x));
        let (_, u, v) = svd.top();
        let w = Matrix::from_fn(m.rows(), m.cols(), |i, j| u[i].conj() * m[(i, j)] * v[j]);
        let p = Svd::new(&w.transpose());
        let next = p.v.matmul(&p.u.adjoint());
        let nv = ratio(&next);
        if nv <= val * (1.0 + 1e-15) {
            if nv > val {
                x = next;
                val = nv;
            }
            break;
        }
        x = next;
        val = nv;
    }
    (val, x)
}

fn argmax_entry(m: &Matrix, free: Option<&[bool]>) -> (usize, usize) {
    let n = m.cols();
    let mut best = (0, 0, -1.0);
    for (k, z) in m.data().iter().enumerate() {
        if free.is_some_and(|f| f[k]) {
            continue;
        }
        if z.norm() > best.2 {
            best = (k / n, k % n, z.norm());
        }
    }
    (best.0, best.1)
}

fn unit_entry(n: usize, i: usize, j: usize) -> Matrix {
    let mut e = Matrix::zeros(n, n);
    e[(i, j)] = C64::new(1.0, 0.0);
    e
}

/// Lower bound and witness by seeded restarts of the polar ascent.
pub fn schur_norm_lower(m: &Matrix, seed: u64, restarts: usize) -> Result<(f64, Matrix)> {
    let n = m.require_square()?;
    m.require_finite()?;
    let (i, j) = argmax_entry(m, None);
    let mut starts = vec![unit_entry(n, i, j), Matrix::identity(n)];
    for k in 0..restarts {
        starts.push(random::unitary(n, &mut random::sub_rng(seed, k as u64)));
    }
    let mut best = (0.0, unit_entry(n, i, j));
    for x0 in starts {
        let (v, x) = polar_ascent(m, x0);
        if v > best.0 {
            best = (v, x);
        }
    }
    let (_, x) = best;
    let xn = opnorm(&x);
    let x = if xn > 0.0 { x.scale_real(1.0 / xn) } else { x };
    Ok((opnorm(&m.hadamard(&x)), x))
}

/// Certified upper bound with its factorization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpperBound {
    pub upper: f64,
    pub certificate: Factorization,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

fn require_certifiable(m: &Matrix) -> Result<usize> {
    let n = m.require_square()?;
    m.require_finite()?;
    if n > MAX_CERTIFIED_DIM {
        return Err(Error::Input(format!("dimension {n} exceeds {MAX_CERTIFIED_DIM} for certification")));
    }
    Ok(n)
}

fn upper_towards(m: &Matrix, free: Option<&[bool]>, lower: f64, tol: f64) -> Result<UpperBound> {
    let s = factor::factorization_upper(m, free, lower + 0.1 * tol, 400)?;
    let warning = (s.upper - lower > tol)
        .then(|| format!("factorization search stalled {:.3e} above the lower bound", s.upper - lower));
    Ok(UpperBound { upper: s.upper, certificate: s.certificate, warning })
}

/// Upper bound from an optimized factorization `m_ij = <u_i, v_j>`.
pub fn schur_norm_upper(m: &Matrix, tol: f64) -> Result<UpperBound> {
    require_certifiable(m)?;
    let (lower, _) = schur_norm_lower(m, 0, 5)?;
    upper_towards(m, None, lower, tol)
}

/// Lower and upper bounds for the full multiplier norm.
pub fn schur_norm_bracket(m: &Matrix, seed: u64, restarts: usize, tol: f64) -> Result<NormBracket> {
    require_certifiable(m)?;
    let (lower, witness) = schur_norm_lower(m, seed, restarts)?;
    let up = upper_towards(m, None, lower, tol)?;
    Ok(NormBracket { lower, upper: up.upper, witness, certificate: up.certificate, warning: up.warning })
}

/// Norm of `X -> m o X` restricted to matrices vanishing where `free` is set.
///
/// The lower bound comes from projected ascent inside that subspace. The
/// upper bound is a factorization of `m` after re-choosing the free entries,
/// which is valid because the free entries never meet a nonzero entry of `X`.
pub fn masked_bracket(m: &Matrix, free: &[bool], seed: u64, restarts: usize, tol: f64) -> Result<NormBracket> {
    let n = require_certifiable(m)?;
    if free.len() != n * n {
        return Err(Error::shape(format!("mask of length {}", n * n), format!("length {}", free.len())));
    }
    if free.iter().all(|&f| f) {
        let witness = Matrix::zeros(n, n);
        let certificate = factor::factorization_upper(&Matrix::zeros(n, n), None, 0.0, 0)?.certificate;
        let certificate = Factorization { target: m.clone(), ..certificate };
        return Ok(NormBracket { lower: 0.0, upper: 0.0, witness, certificate, warning: None });
    }
    let problem = RatioProblem {
        den: LinearMap::identity(),
        num: LinearMap::hadamard(m),
        proj: Box::new(zero_on(free, n)),
        floor: 0.0,
    };
    let (i, j) = argmax_entry(m, Some(free));
    let mut starts = vec![unit_entry(n, i, j)];
    if !free[j * n + i] {
        starts.push(&unit_entry(n, i, j) + &unit_entry(n, j, i));
    }
    for k in 0..restarts {
        let mut r = random::sub_rng(seed, k as u64);
        starts.push(random::gaussian_matrix(n, n, &mut r));
    }
    let mut best = (0.0, starts[0].clone());
    for x0 in starts {
        let (v, x) = problem.ascend(&x0, 200);
        if v > best.0 {
            best = (v, x);
        }
    }
    let (lower, x) = best;
    let xn = opnorm(&x);
    let witness = if xn > 0.0 { x.scale_real(1.0 / xn) } else { x };
    let up = upper_towards(m, Some(free), lower, tol)?;
    Ok(NormBracket { lower, upper: up.upper, witness, certificate: up.certificate, warning: up.warning })
}

pub fn diagonal_mask(n: usize) -> Vec<bool> {
    (0..n * n).map(|k| k / n == k % n).collect()
}

/// Multiplier norm on zero-diagonal matrices. Requires a zero diagonal.
pub fn restricted_offdiag_norm(m: &Matrix, seed: u64) -> Result<NormBracket> {
    restricted_offdiag_bracket(m, seed, 10, 1e-4)
}

pub fn restricted_offdiag_bracket(m: &Matrix, seed: u64, restarts: usize, tol: f64) -> Result<NormBracket> {
    let n = m.require_square()?;
    if m.diag().iter().any(|z| *z != C64::new(0.0, 0.0)) {
        return Err(Error::Input("restricted norm needs a zero diagonal".into()));
    }
    masked_bracket(m, &diagonal_mask(n), seed, restarts, tol)
}

/// `sup ||m o X||_1 / ||X||_1` by alternating ascent over rank-one `X = xi eta^T`,
/// which reduces to maximizing `||D_xi m D_eta||_1` over unit vectors.
pub fn trace_norm_multiplier(m: &Matrix, seed: u64, restarts: usize) -> Result<f64> {
    let n = m.require_square()?;
    m.require_finite()?;
    let scaled = |xi: &[C64], eta: &[C64]| Matrix::from_fn(n, n, |i, j| xi[i] * m[(i, j)] * eta[j]);
    let polar = |a: &Matrix| Svd::new(a).polar();
    let uniform = vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let mut starts = vec![(uniform.clone(), uniform)];
    for k in 0..restarts {
        let mut r = random::sub_rng(seed, k as u64);
        starts.push((random::unit_vector(n, &mut r), random::unit_vector(n, &mut r)));
    }
    let mut best: f64 = 0.0;
    for (mut xi, mut eta) in starts {
        let mut val = trace_norm(&scaled(&xi, &eta))?;
        for _ in 0..2000 {
            let w = polar(&scaled(&xi, &eta));
            let c: Vec<C64> = (0..n).map(|i| (0..n).map(|j| w[(i, j)].conj() * m[(i, j)] * eta[j]).sum()).collect();
            let Some(nx) = vector::normalized(&c.iter().map(|z| z.conj()).collect::<Vec<_>>()) else { break };
            xi = nx;
            let w = polar(&scaled(&xi, &eta));
            let c: Vec<C64> = (0..n).map(|j| (0..n).map(|i| w[(i, j)].conj() * m[(i, j)] * xi[i]).sum()).collect();
            let Some(ne) = vector::normalized(&c.iter().map(|z| z.conj()).collect::<Vec<_>>()) else { break };
            eta = ne;
            let nv = trace_norm(&scaled(&xi, &eta))?;
            if nv <= val * (1.0 + 1e-14) {
                val = val.max(nv);
                break;
            }
            val = nv;
        }
        best = best.max(val);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Duality {
    pub op_norm_of_transpose: f64,
    pub trace_norm_multiplier: f64,
}

impl Duality {
    pub fn difference(&self) -> f64 {
        (self.op_norm_of_transpose - self.trace_norm_multiplier).abs()
    }
}

/// Compares the trace-norm multiplier norm of `m` with the operator-norm
/// multiplier norm of `m^T`, each from its own ascent.
pub fn transpose_duality_check(m: &Matrix, seed: u64) -> Result<Duality> {
    let n = m.require_square()?;
    if n > 8 {
        return Err(Error::Input(format!("duality check limited to n <= 8, got {n}")));
    }
    let (op, _) = schur_norm_lower(&m.transpose(), seed, DEFAULT_RESTARTS)?;
    let tr = trace_norm_multiplier(m, seed ^ 0x5eed, DEFAULT_RESTARTS)?;
    Ok(Duality { op_norm_of_transpose: op, trace_norm_multiplier: tr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn reals(x: &[f64]) -> Vec<C64> {
        x.iter().map(|&r| c64(r, 0.0)).collect()
    }

    fn ones(n: usize) -> Matrix {
        Matrix::from_fn(n, n, |_, _| c64(1.0, 0.0))
    }

    #[test]
    fn divided_differences() {
        let pts = reals(&[0.0, 1.0, 2.0]);
        let id = divided_difference_matrix(|z| z, &pts).unwrap();
        let expect = Matrix::from_fn(3, 3, |i, j| c64(if i == j { 0.0 } else { 1.0 }, 0.0));
        assert!((&id.entries - &expect).max_abs() < 1e-15);
        let c = divided_difference_matrix(|_| c64(3.0, 1.0), &pts).unwrap();
        assert_eq!(c.entries.max_abs(), 0.0);
        let sq = divided_difference_matrix(|z| z * z, &pts).unwrap();
        let expect = Matrix::from_real_rows(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 3.0], &[2.0, 3.0, 0.0]]);
        assert!((&sq.entries - &expect).max_abs() < 1e-15);
        assert!(divided_difference_matrix(|_| c64(f64::NAN, 0.0), &pts).is_err());
        assert!(divided_difference_matrix(|z| z, &[]).is_err());
    }

    #[test]
    fn repeated_points_give_zero() {
        let pts = reals(&[1.0, 1.0, 2.0]);
        let s = divided_difference_matrix(|z| z * z, &pts).unwrap();
        assert_eq!(s.entries[(0, 1)], c64(0.0, 0.0));
        assert_eq!(s.entries[(0, 2)], c64(3.0, 0.0));
    }

    #[test]
    fn apply_examples() {
        let x = crate::linalg::random_matrix(3, crate::linalg::MatrixKind::General, 1);
        assert_eq!(schur_apply(&ones(3), &x).unwrap(), x);
        assert_eq!(schur_apply(&Matrix::zeros(3, 3), &x).unwrap().max_abs(), 0.0);
        let d = schur_apply(&Matrix::identity(3), &x).unwrap();
        assert_eq!(d, Matrix::from_diag(&x.diag()));
        assert!(schur_apply(&ones(2), &x).is_err());
    }

    #[test]
    fn lower_examples() {
        let (v, w) = schur_norm_lower(&ones(3), 1, 5).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!((opnorm(&w) - 1.0).abs() < 1e-12);
        let (v, _) = schur_norm_lower(&Matrix::identity(4), 1, 5).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let l = Matrix::from_real_rows(&[&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]]);
        let (v, _) = schur_norm_lower(&l, 1, 5).unwrap();
        assert!(v >= 4.0 - 1e-12);
    }

    #[test]
    fn upper_examples() {
        let u = schur_norm_upper(&ones(4), 1e-4).unwrap();
        assert!(u.upper <= 1.0 + 1e-4, "{}", u.upper);
        let x = reals(&[1.0, -2.0, 0.5]);
        let y = reals(&[0.25, 3.0, -1.0]);
        let r1 = Matrix::outer(&x, &y);
        let u = schur_norm_upper(&r1, 1e-6).unwrap();
        assert!(u.upper <= 2.0 * 3.0 + 1e-6, "{}", u.upper);
    }

    #[test]
    fn bracket_for_sum_matrix() {
        let l = Matrix::from_real_rows(&[&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]]);
        let b = schur_norm_bracket(&l, 7, 10, 1e-3).unwrap();
        assert!(b.contains(4.0, 1e-9) && b.width() <= 1e-3, "{b:?}");
        assert!(b.verify(&l, None));
    }

    #[test]
    fn restricted_examples() {
        let offdiag = Matrix::from_fn(4, 4, |i, j| c64(if i == j { 0.0 } else { 1.0 }, 0.0));
        let r = restricted_offdiag_norm(&offdiag, 3).unwrap();
        assert!((r.lower - 1.0).abs() < 1e-9 && r.upper <= 1.0 + 1e-4, "{r:?}");
        let z = restricted_offdiag_norm(&Matrix::zeros(3, 3), 3).unwrap();
        assert_eq!((z.lower, z.upper), (0.0, 0.0));
        assert!(matches!(restricted_offdiag_norm(&Matrix::identity(2), 0), Err(Error::Input(_))));
    }

    #[test]
    fn restricted_square_divided_difference() {
        let pts = reals(&[0.0, 1.0, 2.0]);
        let s = divided_difference_matrix(|z| z * z, &pts).unwrap();
        let r = restricted_offdiag_norm(&s.entries, 0).unwrap();
        assert!(r.lower >= 3.0 - 1e-9 && r.upper <= 4.0, "{r:?}");
        assert!(r.verify(&s.entries, Some(&diagonal_mask(3))));
    }

    #[test]
    fn duality_examples() {
        let l = Matrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -1.0]]);
        let d = transpose_duality_check(&l, 0).unwrap();
        assert!(d.difference() < 1e-6);
        let mut e = Matrix::zeros(3, 3);
        e[(0, 1)] = c64(1.0, 0.0);
        let d = transpose_duality_check(&e, 0).unwrap();
        assert!((d.op_norm_of_transpose - 1.0).abs() < 1e-12);
        assert!((d.trace_norm_multiplier - 1.0).abs() < 1e-12);
    }
}
