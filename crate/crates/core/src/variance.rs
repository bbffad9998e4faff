//! Variance of an operator in a vector or density state, the 2x2 domination
//! test, extraction of the induced spectral function, and recovery of affine
//! structure from variance equality.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, eig_normal, opnorm, random, vector, HermitianEigen, Matrix, Schur, Svd, UnitVector, C64,
    DEFAULT_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub variance: f64,
    #[serde(with = "vector::complex")]
    pub mean: C64,
    pub second_moment: f64,
}

/// A vector state or a density matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateSpec {
    Vector(UnitVector),
    Density(Matrix),
}

const DENSITY_TOL: f64 = 1e-10;

impl StateSpec {
    pub fn dim(&self) -> usize {
        match self {
            StateSpec::Vector(v) => v.dim(),
            StateSpec::Density(r) => r.rows(),
        }
    }

    /// Checks positivity, trace and self-adjointness of a density.
    pub fn validate(&self) -> Result<()> {
        let StateSpec::Density(rho) = self else {
            return Ok(());
        };
        rho.require_square()?;
        rho.require_finite()?;
        if (rho - &rho.adjoint()).max_abs() > DENSITY_TOL {
            return Err(Error::Input("density is not Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::Input(format!("density trace {tr} is not 1")));
        }
        let min = HermitianEigen::new(rho).min();
        if min < -DENSITY_TOL {
            return Err(Error::Input(format!("density has negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn vector(entries: &[C64]) -> Result<Self> {
        Ok(StateSpec::Vector(UnitVector::from_nonzero(entries)?))
    }

    /// The maximally mixed state `I/n`.
    pub fn tracial(n: usize) -> Self {
        StateSpec::Density(Matrix::identity(n).scale_real(1.0 / n as f64))
    }
}

fn require_dim(a: &Matrix, n: usize) -> Result<()> {
    if a.rows() != n {
        return Err(Error::shape(format!("dimension {}", a.rows()), format!("dimension {n}")));
    }
    Ok(())
}

/// `D_xi(a) = (||a xi||^2 ||xi||^2 - |<a xi, xi>|^2) / ||xi||^4`.
///
/// Evaluated as the squared distance from `a xi/||xi||` to the line through
/// `xi`, which is never negative.
pub fn variance(a: &Matrix, xi: &[C64]) -> Result<VarianceReport> {
    a.require_square()?;
    a.require_finite()?;
    require_dim(a, xi.len())?;
    let n2 = vector::norm_sqr(xi);
    if n2 == 0.0 || !n2.is_finite() {
        return Err(Error::Input("variance needs a nonzero finite vector".into()));
    }
    Ok(variance_unchecked(a, xi, n2))
}

fn variance_unchecked(a: &Matrix, xi: &[C64], n2: f64) -> VarianceReport {
    let ax = a.mul_vec(xi);
    let mean = vector::dot(&ax, xi) / n2;
    let second_moment = vector::norm_sqr(&ax) / n2;
    let mut r = ax;
    vector::axpy(&mut r, -mean, xi);
    VarianceReport { variance: vector::norm_sqr(&r) / n2, mean, second_moment }
}

/// Variance of a unit vector; no validation.
#[inline]
pub(crate) fn dvar(a: &Matrix, xi: &[C64]) -> f64 {
    variance_unchecked(a, xi, 1.0).variance
}

/// `omega(a* a) - |omega(a)|^2` for a vector or density state.
pub fn variance_state(a: &Matrix, omega: &StateSpec) -> Result<VarianceReport> {
    omega.validate()?;
    match omega {
        StateSpec::Vector(v) => variance(a, v.as_slice()),
        StateSpec::Density(rho) => {
            a.require_square()?;
            a.require_finite()?;
            require_dim(a, rho.rows())?;
            let mean = rho.matmul(a).trace();
            let second_moment = rho.matmul(&a.adjoint_mul(a)).trace().re.max(0.0);
            let c = a.shift(-mean);
            let variance = rho.matmul(&c.adjoint_mul(&c)).trace().re.max(0.0);
            Ok(VarianceReport { variance, mean, second_moment })
        }
    }
}

/// `(||[a, xi xi*]||^2, D_xi(a))`.
///
/// The left side is `max(D_xi(a), D_xi(a*))`, so the two agree exactly when
/// `||a xi|| >= ||a* xi||`, for instance for normal `a`.
pub fn rank_one_commutator_check(a: &Matrix, xi: &UnitVector) -> Result<(f64, f64)> {
    a.require_square()?;
    a.require_finite()?;
    require_dim(a, xi.dim())?;
    let p = Matrix::outer(xi.as_slice(), xi.as_slice());
    let lhs = opnorm(&linalg::commutator(a, &p)?).powi(2);
    Ok((lhs, dvar(a, xi.as_slice())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationGap {
    pub gap: f64,
    pub bound: f64,
}

/// `|D(b) - D(a)|` against `2 ||b - a|| (||a|| + ||b||)`.
pub fn perturbation_gap(a: &Matrix, b: &Matrix, omega: &StateSpec) -> Result<PerturbationGap> {
    a.require_same_shape(b)?;
    let da = variance_state(a, omega)?.variance;
    let db = variance_state(b, omega)?.variance;
    let bound = 2.0 * opnorm(&(b - a)) * (opnorm(a) + opnorm(b));
    Ok(PerturbationGap { gap: (db - da).abs(), bound })
}

/// Wirtinger gradient of `D_xi(a)` at a unit vector.
fn dvar_grad(a: &Matrix, xi: &[C64]) -> Vec<C64> {
    let ax = a.mul_vec(xi);
    let m = vector::dot(&ax, xi);
    let mut g = a.adjoint().mul_vec(&ax);
    let asx = a.adjoint().mul_vec(xi);
    vector::axpy(&mut g, -m.conj(), &ax);
    vector::axpy(&mut g, -m, &asx);
    g
}

/// Ascent on the unit sphere for `D_xi(b) - D_xi(a)` from a starting vector.
fn ascend_gap(a: &Matrix, b: &Matrix, start: Vec<C64>, iters: usize) -> (Vec<C64>, f64) {
    let gap = |x: &[C64]| dvar(b, x) - dvar(a, x);
    let mut x = start;
    let mut fx = gap(&x);
    let scale = (opnorm(a) + opnorm(b)).powi(2).max(f64::MIN_POSITIVE);
    let mut step = 0.5 / scale;
    for _ in 0..iters {
        let mut g = dvar_grad(b, &x);
        let ga = dvar_grad(a, &x);
        vector::axpy(&mut g, C64::new(-1.0, 0.0), &ga);
        let radial = vector::dot(&g, &x);
        vector::axpy(&mut g, -radial, &x);
        if vector::norm(&g) < 1e-14 * scale {
            break;
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut y = x.clone();
            vector::axpy(&mut y, C64::new(step, 0.0), &g);
            let y = vector::normalized(&y).unwrap_or_else(|| x.clone());
            let fy = gap(&y);
            if fy > fx {
                x = y;
                fx = fy;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, fx)
}

/// Searches for a unit vector maximizing `D_xi(b) - D_xi(a)`.
///
/// Random starts (plus basis vectors and, in dimension 2, a coarse sphere
/// grid) are each refined by projected gradient ascent.
pub fn max_variance_gap(a: &Matrix, b: &Matrix, seed: u64, restarts: usize) -> Result<(UnitVector, f64)> {
    a.require_same_shape(b)?;
    a.require_square()?;
    a.require_finite()?;
    b.require_finite()?;
    let n = a.rows();
    let gap = |x: &[C64]| dvar(b, x) - dvar(a, x);
    let mut starts: Vec<Vec<C64>> = (0..n).map(|k| UnitVector::basis(n, k).into_inner()).collect();
    if n == 2 {
        starts.extend(sphere_grid2(12, 24));
    }
    let mut best: Option<(Vec<C64>, f64)> = None;
    let mut consider = |x: Vec<C64>, fx: f64| {
        if best.as_ref().is_none_or(|(_, fb)| fx > *fb) {
            best = Some((x, fx));
        }
    };
    // Keep the few best deterministic starts for refinement.
    let mut scored: Vec<(f64, Vec<C64>)> = starts.into_iter().map(|x| (gap(&x), x)).collect();
    scored.sort_by(|p, q| q.0.total_cmp(&p.0));
    scored.truncate(4);
    for (_, x) in scored {
        let (y, fy) = ascend_gap(a, b, x, 200);
        consider(y, fy);
    }
    for k in 0..restarts {
        let mut r = random::sub_rng(seed, k as u64);
        let x = random::unit_vector(n, &mut r);
        let (y, fy) = ascend_gap(a, b, x, 200);
        consider(y, fy);
    }
    let (x, fx) = best.expect("at least one start");
    Ok((UnitVector::from_nonzero(&x)?, fx))
}

/// Unit vectors `(cos t, e^{i phi} sin t)` on a regular grid.
fn sphere_grid2(nt: usize, nphi: usize) -> Vec<Vec<C64>> {
    let mut out = Vec::with_capacity((nt + 1) * nphi);
    for i in 0..=nt {
        let t = std::f64::consts::FRAC_PI_2 * i as f64 / nt as f64;
        for j in 0..nphi {
            let phi = std::f64::consts::TAU * j as f64 / nphi as f64;
            out.push(vec![C64::new(t.cos(), 0.0), C64::from_polar(t.sin(), phi)]);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Decision {
    /// `b = theta a + tau`.
    Affine {
        #[serde(with = "vector::complex")]
        theta: C64,
        #[serde(with = "vector::complex")]
        tau: C64,
        residual: f64,
    },
    /// `D_xi(b) - D_xi(a) = gap > 0` at the witness.
    Violation { witness: UnitVector, gap: f64 },
}

/// Witness gap required before a 2x2 pair is declared non-dominated.
pub const MIN_WITNESS_GAP: f64 = 1e-6;

/// Decides whether `D_xi(b) <= D_xi(a)` for all unit `xi` in `C^2`.
///
/// Takes an eigenvector `e2` of `a` and completes it to an orthonormal basis
/// `(e1, e2)`. In that basis `a - alpha2` has vanishing second column
/// `(p, q)^T` and, when `e2` is also an eigenvector of `b`, so does
/// `b - beta2` with `(r, s)^T`. For `xi = x1 e1 + x2 e2`,
/// `D_xi(a) = |x1|^2 |q x1 - p x2|^2`, so domination is positivity of the
/// 2x2 Hermitian matrix `M = conj(u) u^T - conj(t) t^T` with `u = (q, -p)`,
/// `t = (s, -r)`. Positivity forces `t = theta u` with `|theta| <= 1`.
/// Otherwise the negative eigenvector of `M`, refined by ascent, is the
/// witness.
pub fn two_by_two_decide(a: &Matrix, b: &Matrix, tol: f64) -> Result<Decision> {
    for m in [a, b] {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::shape("2x2", format!("{}x{}", m.rows(), m.cols())));
        }
        m.require_finite()?;
    }
    let scale = (opnorm(a) + opnorm(b)).max(1.0);
    let tol_sq = tol * scale * scale;

    let schur = Schur::new(a)?;
    let e2 = schur.q.column(0);
    let e1 = schur.q.column(1);
    let basis = schur.q.clone();
    let change = |m: &Matrix| {
        // Reorder so the eigenvector is the second basis vector.
        let t = basis.adjoint_mul(m).matmul(&basis);
        Matrix::from_rows(&[vec![t[(1, 1)], t[(1, 0)]], vec![t[(0, 1)], t[(0, 0)]]])
    };
    let ap = change(a);
    let bp = change(b);
    let alpha2 = ap[(1, 1)];
    let beta2 = bp[(1, 1)];
    let to_original = |w: &[C64]| -> Vec<C64> {
        let mut v = vector::scale(&e1, w[0]);
        vector::axpy(&mut v, w[1], &e2);
        v
    };

    let d_e2 = dvar(b, &e2);
    let mut candidates: Vec<Vec<C64>> = vec![e2.clone()];
    if d_e2 <= tol_sq {
        let u = [ap[(1, 0)], -(ap[(0, 0)] - alpha2)];
        let t = [bp[(1, 0)], -(bp[(0, 0)] - beta2)];
        let m = Matrix::from_fn(2, 2, |i, j| u[i].conj() * u[j] - t[i].conj() * t[j]);
        let eig = HermitianEigen::new(&m);
        if eig.min() >= -tol_sq {
            let uu = vector::norm_sqr(&u);
            let theta = if uu > tol_sq { vector::dot(&t, &u) / uu } else { C64::new(0.0, 0.0) };
            let tau = beta2 - theta * alpha2;
            let residual = opnorm(&(&(b - &a.scale(theta)).shift(-tau)));
            if residual <= tol * scale && theta.norm() <= 1.0 + tol {
                return Ok(Decision::Affine { theta, tau, residual });
            }
        }
        candidates.push(to_original(&eig.vectors.column(0)));
    }

    let mut best: Option<(Vec<C64>, f64)> = None;
    for x in candidates {
        let (y, fy) = ascend_gap(a, b, x, 300);
        if best.as_ref().is_none_or(|(_, fb)| fy > *fb) {
            best = Some((y, fy));
        }
    }
    let (bx, bgap) = best.unwrap();
    if bgap < MIN_WITNESS_GAP {
        let (w, g) = max_variance_gap(a, b, 0x2b2, 8)?;
        if g > bgap {
            return Ok(Decision::Violation { witness: w, gap: g });
        }
    }
    Ok(Decision::Violation { witness: UnitVector::from_nonzero(&bx)?, gap: bgap })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    /// `<b xi, xi>` for a unit eigenvector `xi` of `a` at the given point.
    #[serde(with = "vector::complex")]
    pub value: C64,
    /// Deviation of `b` compressed to the eigenspace from `value * I`.
    pub spread: f64,
    pub multiplicity: usize,
}

/// Reads off `f(alpha)` for the function induced by variance domination.
pub fn extract_function(a: &Matrix, b: &Matrix, alpha: C64, tol: f64) -> Result<Extraction> {
    a.require_same_shape(b)?;
    let n = a.require_square()?;
    a.require_finite()?;
    b.require_finite()?;
    let scale = opnorm(a).max(1.0);
    let svd = Svd::new(&a.shift(-alpha));
    let k0 = svd.s.iter().position(|&s| s <= tol * scale);
    let Some(k0) = k0 else {
        return Err(Error::Spectrum(format!(
            "{alpha} is not an eigenvalue (distance {:.3e})",
            svd.s[n - 1]
        )));
    };
    let vecs: Vec<Vec<C64>> = (k0..n).map(|k| svd.v.column(k)).collect();
    let bscale = opnorm(b).max(1.0);
    for v in &vecs {
        let db = dvar(b, v);
        if db > tol * bscale * bscale {
            return Err(Error::Domination(format!(
                "D_xi(b) = {db:.3e} > D_xi(a) ~ 0 on an eigenvector at {alpha}"
            )));
        }
    }
    let k = vecs.len();
    let comp = Matrix::from_fn(k, k, |i, j| vector::dot(&b.mul_vec(&vecs[j]), &vecs[i]));
    let value = comp.trace() / k as f64;
    let spread = comp.shift(-value).max_abs();
    if spread > tol * bscale {
        return Err(Error::Function(format!("b is not scalar on the eigenspace at {alpha} (spread {spread:.3e})")));
    }
    Ok(Extraction { value, spread, multiplicity: k })
}

/// `(alpha, f(alpha))` over the distinct eigenvalues of `a`.
pub fn extract_on_spectrum(a: &Matrix, b: &Matrix, tol: f64) -> Result<Vec<(C64, C64)>> {
    let mut ev = linalg::eigenvalues(a)?;
    ev.sort_by(linalg::lex_cmp);
    let scale = opnorm(a).max(1.0);
    let mut distinct: Vec<C64> = Vec::new();
    for z in ev {
        if distinct.iter().all(|w| (w - z).norm() > 1e3 * tol * scale) {
            distinct.push(z);
        }
    }
    distinct.into_iter().map(|z| Ok((z, extract_function(a, b, z, tol)?.value))).collect()
}

/// Largest `|f(x) - f(y)| / |x - y|` over pairs of distinct points.
pub fn pairwise_lipschitz(points: &[(C64, C64)]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, (x, fx)) in points.iter().enumerate() {
        for (y, fy) in &points[i + 1..] {
            let d = (x - y).norm();
            if d > 0.0 {
                worst = worst.max((fx - fy).norm() / d);
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureCase {
    AffineOfA,
    AffineOfAStar,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureVerdict {
    pub case: StructureCase,
    #[serde(with = "vector::complex")]
    pub alpha: C64,
    #[serde(with = "vector::complex")]
    pub beta: C64,
    #[serde(with = "vector::unbounded")]
    pub residual: f64,
    /// Largest sampled `|D_xi(b) - D_xi(a)|`.
    pub worst_gap: f64,
    pub witness: Option<UnitVector>,
}

struct Fit {
    alpha: C64,
    beta: C64,
    raw_modulus: f64,
    residual: f64,
}

/// Least-squares `b ~ alpha c + beta` with `|alpha|` projected to 1.
fn unimodular_fit(c: &Matrix, b: &Matrix) -> Fit {
    let n = c.rows() as f64;
    let c0 = c.shift(-c.trace() / n);
    let b0 = b.shift(-b.trace() / n);
    let cc = c0.frobenius_norm().powi(2);
    let (alpha, raw_modulus) = if cc == 0.0 {
        (C64::new(1.0, 0.0), 1.0)
    } else {
        let raw = b0.inner(&c0) / cc;
        let m = raw.norm();
        (if m > 0.0 { raw / m } else { C64::new(1.0, 0.0) }, m)
    };
    let beta = (b - &c.scale(alpha)).trace() / n;
    let residual = opnorm(&(b - &c.scale(alpha)).shift(-beta));
    Fit { alpha, beta, raw_modulus, residual }
}

/// Classifies `b` as `alpha a + beta` or `alpha a* + beta` (`|alpha| = 1`) when
/// the two operators have equal variance in every sampled vector state.
pub fn variance_equal_recover(
    a: &Matrix,
    b: &Matrix,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<StructureVerdict> {
    a.require_same_shape(b)?;
    let n = a.require_square()?;
    a.require_finite()?;
    b.require_finite()?;
    let scale = opnorm(a).max(opnorm(b)).max(1.0);
    let mut r = random::rng(seed);
    let mut worst = (0.0f64, UnitVector::basis(n, 0));
    let probe = |x: Vec<C64>, worst: &mut (f64, UnitVector)| {
        let g = (dvar(b, &x) - dvar(a, &x)).abs();
        if g > worst.0 {
            *worst = (g, UnitVector::from_nonzero(&x).expect("unit"));
        }
    };
    for k in 0..n {
        probe(UnitVector::basis(n, k).into_inner(), &mut worst);
    }
    for _ in 0..samples {
        let x = random::unit_vector(n, &mut r);
        probe(x, &mut worst);
    }
    let indeterminate = |residual: f64, worst: (f64, UnitVector), witness: bool| StructureVerdict {
        case: StructureCase::Indeterminate,
        alpha: C64::new(0.0, 0.0),
        beta: C64::new(0.0, 0.0),
        residual,
        worst_gap: worst.0,
        witness: witness.then_some(worst.1),
    };
    if worst.0 > tol * scale * scale {
        return Ok(indeterminate(f64::INFINITY, worst, true));
    }

    let accept = |f: &Fit| f.residual <= tol * scale && (f.raw_modulus - 1.0).abs() <= tol.sqrt().max(tol);
    let fa = unimodular_fit(a, b);
    if accept(&fa) {
        return Ok(StructureVerdict {
            case: StructureCase::AffineOfA,
            alpha: fa.alpha,
            beta: fa.beta,
            residual: fa.residual,
            worst_gap: worst.0,
            witness: None,
        });
    }
    let defect = linalg::normality_defect(a);
    let fs = unimodular_fit(&a.adjoint(), b);
    if accept(&fs) && defect <= tol * scale * scale {
        return Ok(StructureVerdict {
            case: StructureCase::AffineOfAStar,
            alpha: fs.alpha,
            beta: fs.beta,
            residual: fs.residual.max(defect),
            worst_gap: worst.0,
            witness: None,
        });
    }
    Ok(indeterminate(fa.residual.min(fs.residual.max(defect)), worst, false))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LipschitzVarianceReport {
    /// `max D_xi(f(a)) / D_xi(a)` over the samples, `0/0 = 0`.
    pub worst_ratio: f64,
    /// `L^2`, the bound the ratio may not exceed.
    pub bound: f64,
    /// Largest `|f(x) - f(y)| / |x - y|` on the spectrum.
    pub spectral_lipschitz: f64,
    pub samples: usize,
}

/// Compares `D_xi(f(a))` with `D_xi(a)` for normal `a` and `L`-Lipschitz `f`.
pub fn lipschitz_variance_bound(
    a: &Matrix,
    f: impl Fn(C64) -> C64,
    lipschitz: f64,
    samples: usize,
    seed: u64,
) -> Result<LipschitzVarianceReport> {
    let n = a.require_square()?;
    let e = eig_normal(a, DEFAULT_TOL)?;
    let fv: Vec<C64> = e.eigenvalues.iter().map(|&z| f(z)).collect();
    if fv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Input("function value is not finite".into()));
    }
    let pts: Vec<(C64, C64)> = e.eigenvalues.iter().copied().zip(fv.iter().copied()).collect();
    let spectral_lipschitz = pairwise_lipschitz(&pts);
    for i in 0..n {
        for j in i + 1..n {
            let d = (e.eigenvalues[i] - e.eigenvalues[j]).norm();
            let df = (fv[i] - fv[j]).norm();
            if df > lipschitz * d + 1e-12 * (1.0 + df) {
                return Err(Error::Lipschitz { i, j, ratio: if d > 0.0 { df / d } else { f64::INFINITY } });
            }
        }
    }
    let b = e.basis.matmul(&Matrix::from_diag(&fv)).matmul(&e.basis.adjoint());
    let floor = 1e-13 * opnorm(a).powi(2).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    let mut eval = |x: &[C64]| {
        let da = dvar(a, x);
        if da > floor {
            worst = worst.max(dvar(&b, x) / da);
        }
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in i + 1..n {
            let mut x = vector::scale(&e.basis.column(i), C64::new(s, 0.0));
            vector::axpy(&mut x, C64::new(s, 0.0), &e.basis.column(j));
            eval(&x);
        }
    }
    let mut r = random::rng(seed);
    for _ in 0..samples {
        let x = random::unit_vector(n, &mut r);
        eval(&x);
        // Occasionally concentrate near a pair of eigenvectors.
        if n >= 2 && r.random_bool(0.25) {
            let i = r.random_range(0..n);
            let j = (i + 1 + r.random_range(0..n - 1)) % n;
            let t: f64 = r.random_range(0.05..std::f64::consts::FRAC_PI_2 - 0.05);
            let mut y = vector::scale(&e.basis.column(i), C64::new(t.cos(), 0.0));
            vector::axpy(&mut y, C64::new(t.sin(), 0.0), &e.basis.column(j));
            eval(&y);
        }
    }
    Ok(LipschitzVarianceReport { worst_ratio: worst, bound: lipschitz * lipschitz, spectral_lipschitz, samples })
}
