//! Commutator inequalities `||[b,x]|| <= kappa ||[a,x]||`: lower estimates by
//! ascent, exact constants for normal `a`, amplification and the structure
//! of pairs with equal commutator norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_normal, opnorm, random, Matrix, Schur, C64};
use crate::schur::ascent::{LinearMap, RatioProblem};
use crate::schur::{divided_difference_from_values, masked_bracket, schur_norm_bracket, NormBracket, SchurMatrix};

/// Relative size below which `||[a,x]||` is treated as zero.
pub const DENOMINATOR_FLOOR: f64 = 1e-8;
pub const EQUALITY_RESTARTS: usize = 50;
pub const MAX_AMPLIFIED_DIM: usize = 256;
const ASCENT_ITERS: usize = 150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaMethod {
    Random,
    Ascent,
    ExactNormal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub lower: f64,
    pub witness: Matrix,
    pub method: KappaMethod,
    pub samples_used: usize,
}

impl KappaEstimate {
    /// The witness attains the recorded ratio, up to the rounding error of
    /// forming the two commutators. Near the denominator floor that error is
    /// far larger than the ratio's own last digits.
    pub fn verify(&self, a: &Matrix, b: &Matrix) -> bool {
        let x = &self.witness;
        let round = |m: &Matrix| 4.0 * m.rows() as f64 * f64::EPSILON * m.frobenius_norm() * x.frobenius_norm();
        let da = opnorm(&(&a.matmul(x) - &x.matmul(a)));
        let db = opnorm(&(&b.matmul(x) - &x.matmul(b)));
        da > round(a) && db + round(b) >= self.lower * (1.0 - 1e-9) * (da - round(a))
    }
}

fn centered(a: &Matrix) -> Matrix {
    let n = a.rows() as f64;
    a.shift(-a.trace() / n)
}

fn ratio_problem<'a>(a: &'a Matrix, b: &'a Matrix) -> RatioProblem<'a> {
    let scale = opnorm(&centered(a));
    RatioProblem {
        den: LinearMap::derivation(a),
        num: LinearMap::derivation(b),
        proj: Box::new(|x: &Matrix| x.clone()),
        floor: DENOMINATOR_FLOOR * scale,
    }
}

fn check_pair(a: &Matrix, b: &Matrix) -> Result<usize> {
    let n = a.require_square()?;
    a.require_same_shape(b)?;
    a.require_finite()?;
    b.require_finite()?;
    Ok(n)
}

/// Best ratio `||[b,x]|| / ||[a,x]||` found by ascent from seeded random
/// starts and from matrix units in a Schur basis of `a`.
pub fn kappa_estimate(a: &Matrix, b: &Matrix, seed: u64, restarts: usize) -> Result<KappaEstimate> {
    let n = check_pair(a, b)?;
    let a0 = centered(a);
    if opnorm(&a0) <= 1e-14 * opnorm(a).max(1.0) {
        return Err(Error::Degenerate("a is scalar, so every [a,x] vanishes".into()));
    }
    let problem = ratio_problem(a, b);
    let mut starts = Vec::new();
    let q = Schur::new(a)?.q;
    for i in 0..n {
        for j in (i + 1)..n {
            let e = Matrix::from_fn(n, n, |r, c| {
                C64::new(if (r, c) == (i, j) || (r, c) == (j, i) { 1.0 } else { 0.0 }, 0.0)
            });
            starts.push(q.matmul(&e).matmul(&q.adjoint()));
        }
    }
    for k in 0..restarts {
        starts.push(random::gaussian_matrix(n, n, &mut random::sub_rng(seed, k as u64)));
    }
    let mut best: Option<(f64, Matrix)> = None;
    for x0 in &starts {
        let (v, x) = problem.ascend(x0, ASCENT_ITERS);
        if problem.exact(&x).is_some() && best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, x));
        }
    }
    let (lower, witness) = best.ok_or_else(|| Error::Convergence("no start left the kernel of d_a".into()))?;
    Ok(KappaEstimate { lower, witness, method: KappaMethod::Ascent, samples_used: starts.len() })
}

/// Exact constant for normal `a` and `b = f(a)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KappaExact {
    /// `Lambda(f; lambda)` on the eigenvalues of `a`, zeroed within clusters.
    pub schur: SchurMatrix,
    /// Bracket for the restricted multiplier norm, which equals kappa.
    pub bracket: NormBracket,
    /// Eigenvalue cluster index of each basis vector.
    pub clusters: Vec<usize>,
}

impl KappaExact {
    pub fn free_mask(&self) -> Vec<bool> {
        let n = self.clusters.len();
        (0..n * n).map(|k| self.clusters[k / n] == self.clusters[k % n]).collect()
    }
}

/// Single-linkage groups of points closer than `gap`, labelled in order of appearance.
fn clusters(points: &[C64], gap: f64) -> Vec<usize> {
    let n = points.len();
    let mut id: Vec<usize> = (0..n).collect();
    fn root(id: &mut [usize], mut i: usize) -> usize {
        while id[i] != i {
            id[i] = id[id[i]];
            i = id[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i] - points[j]).norm() <= gap {
                let (ri, rj) = (root(&mut id, i), root(&mut id, j));
                id[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| root(&mut id, i)).collect();
    let mut labels: Vec<usize> = Vec::new();
    roots
        .iter()
        .map(|r| match labels.iter().position(|x| x == r) {
            Some(k) => k,
            None => {
                labels.push(*r);
                labels.len() - 1
            }
        })
        .collect()
}

/// Reads `f` off the eigenbasis of `a` and computes the optimal constant as
/// the multiplier norm of `Lambda(f; lambda)` on matrices vanishing inside
/// eigenvalue clusters.
pub fn kappa_exact_normal(a: &Matrix, b: &Matrix, tol: f64) -> Result<KappaExact> {
    check_pair(a, b)?;
    let na = opnorm(a);
    let nb = opnorm(b);
    let scale = (na * nb).max(f64::MIN_POSITIVE);
    let defect = opnorm(&(&a.matmul(b) - &b.matmul(a)));
    let spec = eig_normal(a, tol)?;
    if defect > tol * scale.max(1.0) {
        return Err(Error::Commute { defect });
    }
    let lambda = spec.eigenvalues.clone();
    let bt = spec.to_eigenbasis(b);
    let n = lambda.len();
    let cl = clusters(&lambda, tol * na.max(1.0));
    let mut values = bt.diag();
    let btol = tol * nb.max(1.0);
    for c in 0..=cl.iter().copied().max().unwrap_or(0) {
        let idx: Vec<usize> = (0..n).filter(|&i| cl[i] == c).collect();
        let mean = idx.iter().map(|&i| values[i]).sum::<C64>() / idx.len() as f64;
        for &i in &idx {
            for &j in &idx {
                let expect = if i == j { mean } else { C64::new(0.0, 0.0) };
                if (bt[(i, j)] - expect).norm() > btol {
                    return Err(Error::Function(format!(
                        "b is not scalar on the eigenspace of {:.6}",
                        lambda[i]
                    )));
                }
            }
        }
        for &i in &idx {
            values[i] = mean;
        }
    }
    let mut schur = divided_difference_from_values(&lambda, &values)?;
    for i in 0..n {
        for j in 0..n {
            if cl[i] == cl[j] {
                schur.entries[(i, j)] = C64::new(0.0, 0.0);
            }
        }
    }
    let free: Vec<bool> = (0..n * n).map(|k| cl[k / n] == cl[k % n]).collect();
    let bracket = masked_bracket(&schur.entries, &free, 0, 10, tol)?;
    Ok(KappaExact { schur, bracket, clusters: cl })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplifiedReport {
    pub copies: usize,
    pub worst_ratio: f64,
    pub witness: Matrix,
    pub samples: usize,
    /// Reference constant the ratio is compared against.
    pub kappa: f64,
}

impl AmplifiedReport {
    pub fn excess(&self) -> f64 {
        self.worst_ratio - self.kappa
    }
}

/// Worst sampled ratio for the `copies`-fold amplifications `a (+) ... (+) a`
/// and `b (+) ... (+) b` acting on block matrices, refined by ascent from the
/// best sample.
pub fn amplified_check(
    a: &Matrix,
    b: &Matrix,
    kappa: f64,
    copies: usize,
    seed: u64,
    samples: usize,
) -> Result<AmplifiedReport> {
    let n = check_pair(a, b)?;
    if copies == 0 || copies * n > MAX_AMPLIFIED_DIM {
        return Err(Error::Input(format!("amplified size {} outside 1..={MAX_AMPLIFIED_DIM}", copies * n)));
    }
    let (aa, bb) = (a.amplify(copies), b.amplify(copies));
    let m = copies * n;
    let problem = ratio_problem(&aa, &bb);
    let mut r = random::rng(seed);
    let mut best: Option<(f64, Matrix)> = None;
    for _ in 0..samples.max(1) {
        let x = random::gaussian_matrix(m, m, &mut r);
        if let Some(v) = problem.exact(&x) {
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, x));
            }
        }
    }
    let (mut worst, mut witness) =
        best.ok_or_else(|| Error::Degenerate("every sample commutes with the amplified a".into()))?;
    let (v, x) = problem.ascend(&witness, ASCENT_ITERS);
    if v > worst && problem.exact(&x).is_some() {
        worst = v;
        witness = x;
    }
    Ok(AmplifiedReport { copies, worst_ratio: worst, witness, samples: samples.max(1), kappa })
}

/// Outcome of the search for the structure behind equal commutator norms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum EqualityStructure {
    /// `b = sigma a + lambda` with `|sigma| = 1`.
    Rotation {
        #[serde(with = "crate::linalg::vector::complex")]
        sigma: C64,
        #[serde(with = "crate::linalg::vector::complex")]
        lambda: C64,
        residual: f64,
    },
    /// `a = alpha u* + lambda`, `b = beta u + mu` with `u` unitary, `|alpha| = |beta|`.
    Unitary {
        #[serde(with = "crate::linalg::vector::complex")]
        alpha: C64,
        #[serde(with = "crate::linalg::vector::complex")]
        beta: C64,
        #[serde(with = "crate::linalg::vector::complex")]
        lambda: C64,
        #[serde(with = "crate::linalg::vector::complex")]
        mu: C64,
        unitary: Matrix,
        residual: f64,
    },
    Inconclusive {
        rotation_residual: f64,
        #[serde(with = "crate::linalg::vector::unbounded")]
        unitary_residual: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EqualityVerdict {
    pub kappa_ab: f64,
    pub kappa_ba: f64,
    pub structure: EqualityStructure,
}

/// Unimodular least-squares fit `b ~ sigma a + lambda`; returns the residual in operator norm.
fn fit_rotation(a: &Matrix, b: &Matrix) -> (C64, C64, f64) {
    let n = a.rows() as f64;
    let (a0, b0) = (centered(a), centered(b));
    let raw = b0.inner(&a0) / a0.inner(&a0).re;
    let sigma = if raw.norm() > 0.0 { raw / raw.norm() } else { C64::new(1.0, 0.0) };
    let lambda = (b.trace() - sigma * a.trace()) / n;
    let resid = opnorm(&(b - &a.scale(sigma).shift(lambda)));
    (sigma, lambda, resid)
}

/// Solves the real 3x3 system `g t = r`, or `None` when singular.
fn solve3(g: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(g);
    let scale = g.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs())).powi(3);
    if d.abs() <= 1e-12 * scale {
        return None;
    }
    let mut t = [0.0; 3];
    for (k, tk) in t.iter_mut().enumerate() {
        let mut m = g;
        for i in 0..3 {
            m[i][k] = r[i];
        }
        *tk = det(m) / d;
    }
    Some(t)
}

/// Candidate centers `lambda` making `(a - lambda)*(a - lambda)` scalar: the
/// eigenvalue mean and the least-squares solution of
/// `a*a = x (a + a*) + y i(a* - a) + d I`.
fn unitary_centers(a: &Matrix) -> Vec<C64> {
    let n = a.rows();
    let mut out = vec![a.trace() / n as f64];
    let h = [a + &a.adjoint(), (&a.adjoint() - a).scale(C64::new(0.0, 1.0)), Matrix::identity(n)];
    let t = a.adjoint_mul(a);
    let mut g = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = h[i].inner(&h[j]).re;
        }
        r[i] = t.inner(&h[i]).re;
    }
    if let Some([x, y, _]) = solve3(g, r) {
        out.push(C64::new(x, y));
    }
    out
}

/// Tries `a = alpha u* + lambda`, `b = beta u + mu` with `alpha > 0`.
fn fit_unitary(a: &Matrix, b: &Matrix) -> Option<(C64, C64, C64, C64, Matrix, f64)> {
    let n = a.rows();
    let id = Matrix::identity(n);
    let mut best: Option<(C64, C64, C64, C64, Matrix, f64)> = None;
    for lambda in unitary_centers(a) {
        let a0 = a.shift(-lambda);
        let c = a0.adjoint_mul(&a0).trace().re / n as f64;
        if c <= 0.0 {
            continue;
        }
        let alpha = c.sqrt();
        let u = a0.adjoint().scale_real(1.0 / alpha);
        let unitarity = opnorm(&(&u.adjoint_mul(&u) - &id));
        // b ~ beta u + mu by least squares in (beta, mu)
        let (uu, ui, ii) = (u.inner(&u), u.inner(&id), n as f64);
        let (bu, bi) = (b.inner(&u), b.inner(&id));
        let det = uu * ii - ui * ui.conj();
        if det.norm() <= 1e-14 * uu.norm() * ii {
            continue;
        }
        let beta = (bu * ii - bi * ui.conj()) / det;
        let mu = (bi * uu - bu * ui) / det;
        let fit = opnorm(&(b - &u.scale(beta).shift(mu)));
        let modulus = (beta.norm() - alpha).abs();
        let resid = fit.max(unitarity * alpha).max(modulus);
        if best.as_ref().is_none_or(|x| resid < x.5) {
            best = Some((C64::new(alpha, 0.0), beta, lambda, mu, u, resid));
        }
    }
    best
}

/// Classifies a pair with `||[a,x]|| = ||[b,x]||` for all `x`, checked by
/// requiring both kappa estimates within `tol` of 1.
pub fn equality_structure_recover(a: &Matrix, b: &Matrix, seed: u64, tol: f64) -> Result<EqualityVerdict> {
    check_pair(a, b)?;
    let kappa_ab = kappa_estimate(a, b, seed, EQUALITY_RESTARTS)?.lower;
    let kappa_ba = kappa_estimate(b, a, seed.wrapping_add(1), EQUALITY_RESTARTS)?.lower;
    if (kappa_ab - 1.0).abs() > tol || (kappa_ba - 1.0).abs() > tol {
        return Err(Error::Precondition { kappa_ab, kappa_ba });
    }
    let scale = opnorm(b).max(opnorm(a)).max(f64::MIN_POSITIVE);
    let (sigma, lambda, rot) = fit_rotation(a, b);
    if rot <= tol * scale {
        let structure = EqualityStructure::Rotation { sigma, lambda, residual: rot };
        return Ok(EqualityVerdict { kappa_ab, kappa_ba, structure });
    }
    let structure = match fit_unitary(a, b) {
        Some((alpha, beta, lambda, mu, unitary, residual)) if residual <= tol * scale => {
            EqualityStructure::Unitary { alpha, beta, lambda, mu, unitary, residual }
        }
        other => EqualityStructure::Inconclusive {
            rotation_residual: rot,
            unitary_residual: other.map_or(f64::INFINITY, |x| x.5),
        },
    };
    Ok(EqualityVerdict { kappa_ab, kappa_ba, structure })
}

/// `Lambda(f; lambda)` for `b = f(a)` with brackets for its full norm and for kappa.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchurFunctionReport {
    pub schur: SchurMatrix,
    pub full: NormBracket,
    pub kappa: NormBracket,
}

impl SchurFunctionReport {
    /// Measured `||Lambda||_S / kappa`, using the lower full bound and upper kappa bound.
    pub fn factor(&self) -> Option<f64> {
        (self.kappa.upper > 0.0).then(|| self.full.lower / self.kappa.upper)
    }
}

/// Full multiplier norm of `Lambda(f; lambda)`, which never exceeds twice kappa.
pub fn schur_function_from_commutator(a: &Matrix, b: &Matrix, tol: f64) -> Result<SchurFunctionReport> {
    let exact = kappa_exact_normal(a, b, tol)?;
    let full = schur_norm_bracket(&exact.schur.entries, 0, 20, tol)?;
    if full.lower > 2.0 * exact.bracket.upper + tol {
        return Err(Error::Convergence(format!(
            "full norm {:.6} exceeds twice kappa {:.6}; brackets are unreliable",
            full.lower, exact.bracket.upper
        )));
    }
    Ok(SchurFunctionReport { schur: exact.schur, full, kappa: exact.bracket })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, random_matrix, MatrixKind};

    fn diag(x: &[f64]) -> Matrix {
        Matrix::from_real_diag(x)
    }

    #[test]
    fn estimate_trivial_pairs() {
        let a = random_matrix(3, MatrixKind::General, 2);
        let e = kappa_estimate(&a, &a, 0, 3).unwrap();
        assert!((e.lower - 1.0).abs() < 1e-12 && e.verify(&a, &a));
        let b = a.scale_real(3.0).shift(c64(2.0, 0.0));
        let e = kappa_estimate(&a, &b, 0, 3).unwrap();
        assert!((e.lower - 3.0).abs() < 1e-12);
        assert!(matches!(kappa_estimate(&Matrix::identity(3), &a, 0, 3), Err(Error::Degenerate(_))));
    }

    #[test]
    fn exact_square_on_three_points() {
        let a = diag(&[0.0, 1.0, 2.0]);
        let k = kappa_exact_normal(&a, &a.matmul(&a), 1e-4).unwrap();
        assert!((k.bracket.lower - 3.0).abs() < 1e-6 && k.bracket.upper <= 3.0 + 1e-4, "{:?}", k.bracket);
        let e = kappa_estimate(&a, &a.matmul(&a), 1, 10).unwrap();
        assert!((e.lower - 3.0).abs() < 1e-3, "{}", e.lower);
    }

    #[test]
    fn exact_identity_and_adjoint() {
        let a = Matrix::from_diag(&[c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0)]);
        let k = kappa_exact_normal(&a, &a, 1e-6).unwrap();
        assert!(k.bracket.contains(1.0, 1e-9));
        let k = kappa_exact_normal(&a, &a.adjoint(), 1e-4).unwrap();
        assert!(k.bracket.contains(1.0, 1e-6), "{:?}", k.bracket);
    }

    #[test]
    fn exact_errors() {
        let a = diag(&[0.0, 1.0]);
        let b = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(kappa_exact_normal(&a, &b, 1e-9), Err(Error::Commute { .. })));
        let a = diag(&[1.0, 1.0, 2.0]);
        let b = diag(&[0.0, 1.0, 2.0]);
        assert!(matches!(kappa_exact_normal(&a, &b, 1e-9), Err(Error::Function(_))));
        let n = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(kappa_exact_normal(&n, &n, 1e-9), Err(Error::Normality { .. })));
    }

    #[test]
    fn repeated_eigenvalue_with_consistent_b() {
        let a = diag(&[1.0, 1.0, 2.0]);
        let b = diag(&[5.0, 5.0, 7.0]);
        let k = kappa_exact_normal(&a, &b, 1e-6).unwrap();
        assert_eq!(k.clusters, vec![0, 0, 1]);
        assert!(k.bracket.contains(2.0, 1e-6), "{:?}", k.bracket);
    }

    #[test]
    fn scalar_b_gives_zero() {
        let a = diag(&[0.0, 1.0, 3.0]);
        let r = schur_function_from_commutator(&a, &Matrix::identity(3).scale_real(4.0), 1e-6).unwrap();
        assert_eq!((r.full.lower, r.full.upper), (0.0, 0.0));
        assert_eq!(r.schur.entries.max_abs(), 0.0);
    }

    #[test]
    fn amplification_of_identity_pair() {
        let a = random_matrix(2, MatrixKind::General, 4);
        let r = amplified_check(&a, &a, 1.0, 3, 0, 10).unwrap();
        assert!((r.worst_ratio - 1.0).abs() < 1e-9);
        assert!(amplified_check(&a, &a, 1.0, 129, 0, 1).is_err());
    }

    #[test]
    fn equality_cases() {
        let a = random_matrix(3, MatrixKind::General, 9);
        let sigma = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let b = a.scale(sigma).shift(c64(2.0, 0.0));
        let v = equality_structure_recover(&a, &b, 0, 1e-3).unwrap();
        match v.structure {
            EqualityStructure::Rotation { sigma: s, lambda, residual } => {
                assert!((s - sigma).norm() < 1e-9 && (lambda - c64(2.0, 0.0)).norm() < 1e-9 && residual < 1e-9);
            }
            s => panic!("{s:?}"),
        }
        let u = Matrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let v = equality_structure_recover(&u.adjoint(), &u, 0, 1e-3).unwrap();
        match v.structure {
            EqualityStructure::Unitary { alpha, beta, lambda, mu, residual, .. } => {
                assert!((alpha - 1.0).norm() < 1e-9 && (beta - 1.0).norm() < 1e-9);
                assert!(lambda.norm() < 1e-9 && mu.norm() < 1e-9 && residual < 1e-9);
            }
            s => panic!("{s:?}"),
        }
        let e = equality_structure_recover(&diag(&[0.0, 1.0, 2.0]), &diag(&[0.0, 1.0, 4.0]), 0, 1e-3);
        assert!(matches!(e, Err(Error::Precondition { .. })));
    }

    #[test]
    fn cluster_labels() {
        let p = [c64(0.0, 0.0), c64(1.0, 0.0), c64(1e-12, 0.0), c64(1.0, 1e-13)];
        assert_eq!(clusters(&p, 1e-9), vec![0, 1, 0, 1]);
    }
}
