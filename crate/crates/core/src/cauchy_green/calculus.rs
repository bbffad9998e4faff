//! Quadrature of `g(a) = -(1/pi) int dbar g(z) (z - a)^{-1} dm(z)` and of the
//! intertwining map `T(x) = -(1/pi) int dbar g(z) (z - a)^{-1} x (z - a)^{-1} dm(z)`,
//! together with the integral `sup_l int |dbar g| |z - l|^{-2} dm`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::extension::ExtensionFunction;
use super::grid::PlanarGrid;
use super::KSet;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, opnorm, random, resolvent_unchecked, Matrix, C64};

/// Linear map on `n x n` matrices stored as `T(x)_ij = sum_kl K[(i,j),(k,l)] x_kl`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntertwiningMap {
    pub n: usize,
    pub kernel: Matrix,
}

impl IntertwiningMap {
    pub fn zero(n: usize) -> Self {
        Self { n, kernel: Matrix::zeros(n * n, n * n) }
    }

    /// Adds `c r x r`.
    pub(crate) fn accumulate(&mut self, c: C64, r: &Matrix) {
        let n = self.n;
        let k = self.kernel.data_mut();
        for i in 0..n {
            for j in 0..n {
                let row = (i * n + j) * n * n;
                for kk in 0..n {
                    let cik = c * r[(i, kk)];
                    for l in 0..n {
                        k[row + kk * n + l] += cik * r[(l, j)];
                    }
                }
            }
        }
    }

    pub(crate) fn scale(&mut self, c: C64) {
        self.kernel = self.kernel.scale(c);
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.rows() != self.n || x.cols() != self.n {
            return Err(Error::shape(format!("{0}x{0}", self.n), format!("{}x{}", x.rows(), x.cols())));
        }
        let v = self.kernel.mul_vec(x.data());
        Matrix::new(self.n, self.n, v)
    }
}

/// Quadrature of `g(a)` and of the intertwining map in one pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CgQuadrature {
    pub value: Matrix,
    pub map: IntertwiningMap,
    pub step: f64,
    pub cells: usize,
    /// Area of cells dropped next to the spectrum.
    pub excluded_area: f64,
}

fn check_spectrum(a: &Matrix, k: &KSet) -> Result<Vec<C64>> {
    let eig = eigenvalues(a)?;
    let tol = 1e-9 * opnorm(a).max(1.0);
    if let Some(z) = eig.iter().find(|z| !k.contains(**z, tol)) {
        return Err(Error::Spectrum(format!("eigenvalue {z:.6} lies outside {k}")));
    }
    Ok(eig)
}

/// Runs the quadrature over `grid`, dropping cells within `2 step` of the spectrum.
pub fn cg_quadrature(a: &Matrix, ext: &ExtensionFunction, grid: &PlanarGrid) -> Result<CgQuadrature> {
    let n = a.require_square()?;
    a.require_finite()?;
    let eig = check_spectrum(a, &ext.k())?;
    let margin = 2.0 * grid.step;
    let grid = grid.clone().with_exclusion(eig, margin);
    let mut value = Matrix::zeros(n, n);
    let mut map = IntertwiningMap::zero(n);
    let mut cells = 0usize;
    let mut retained = 0.0;
    grid.for_each_cell(|z, w| {
        retained += w;
        let d = ext.dbar(z);
        if d == C64::new(0.0, 0.0) {
            return;
        }
        cells += 1;
        let r = resolvent_unchecked(a, z);
        let c = d * w;
        for (v, x) in value.data_mut().iter_mut().zip(r.data()) {
            *v += c * x;
        }
        map.accumulate(c, &r);
    });
    let s = C64::new(-1.0 / PI, 0.0);
    map.scale(s);
    let value = value.scale(s);
    if !value.is_finite() {
        return Err(Error::Resolvent { distance: margin });
    }
    Ok(CgQuadrature { value, map, step: grid.step, cells, excluded_area: grid.area() - retained })
}

pub fn cg_functional_calculus(a: &Matrix, ext: &ExtensionFunction, grid: &PlanarGrid) -> Result<Matrix> {
    Ok(cg_quadrature(a, ext, grid)?.value)
}

pub fn build_t(a: &Matrix, ext: &ExtensionFunction, grid: &PlanarGrid) -> Result<IntertwiningMap> {
    Ok(cg_quadrature(a, ext, grid)?.map)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntertwiningResiduals {
    /// `max ||[f(a), x] - [a, T(x)]|| / ||x||`.
    pub res1: f64,
    /// `max ||[f(a), x] - T([a, x])|| / ||x||`.
    pub res2: f64,
    pub samples: usize,
}

/// Residuals of `[f(a), x] = [a, T(x)] = T([a, x])` against a reference
/// `fa`, over `x = I`, `x = a` and seeded Gaussian samples.
pub fn verify_intertwine(
    a: &Matrix,
    fa: &Matrix,
    t: &IntertwiningMap,
    samples: usize,
    seed: u64,
) -> Result<IntertwiningResiduals> {
    let n = a.require_square()?;
    a.require_same_shape(fa)?;
    let comm = |p: &Matrix, q: &Matrix| &p.matmul(q) - &q.matmul(p);
    let mut xs = vec![Matrix::identity(n), a.clone()];
    let mut r = random::rng(seed);
    xs.extend((0..samples).map(|_| random::gaussian_matrix(n, n, &mut r)));
    let (mut res1, mut res2) = (0.0f64, 0.0f64);
    for x in &xs {
        let nx = opnorm(x);
        if nx == 0.0 {
            continue;
        }
        let target = comm(fa, x);
        let lhs1 = comm(a, &t.apply(x)?);
        let lhs2 = t.apply(&comm(a, x))?;
        res1 = res1.max(opnorm(&(&target - &lhs1)) / nx);
        res2 = res2.max(opnorm(&(&target - &lhs2)) / nx);
    }
    Ok(IntertwiningResiduals { res1, res2, samples: xs.len() })
}

/// `sup_l int density(z) |z - l|^{-2} dm(z)` over sampled `l` in `K`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KappaIntegral {
    pub value: f64,
    /// Geometric extrapolation of the remaining refinement increments.
    pub refinement_error: f64,
    #[serde(with = "crate::linalg::vector::complex")]
    pub argmax: C64,
    /// Maximum over `l` at each refinement depth.
    pub by_depth: Vec<f64>,
}

/// Ratio of successive refinement increments treated as non-saturating.
pub const DIVERGENCE_RATIO: f64 = 0.95;

/// Quadrature of the kappa integral for a density vanishing on `K`, with
/// `levels` dyadic refinements toward each sampled `l`.
pub fn kappa_integral_density(
    density: impl Fn(C64) -> f64,
    k: &KSet,
    grid: &PlanarGrid,
    levels: usize,
    samples: usize,
) -> Result<KappaIntegral> {
    if levels < 2 {
        return Err(Error::Input("at least two refinement levels are needed".into()));
    }
    let lambdas = k.sample(samples);
    let mut by_depth = vec![f64::NEG_INFINITY; levels + 1];
    let mut best: Option<(f64, f64, C64)> = None;
    for l in lambdas {
        let v = grid.integrate_by_depth(|z| density(z) / (z - l).norm_sqr(), &[l], levels);
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Divergence(format!("non-finite integrand near {l}")));
        }
        let d1 = v[levels - 1] - v[levels - 2];
        let d2 = v[levels] - v[levels - 1];
        let scale = v[levels].abs().max(f64::MIN_POSITIVE);
        if d2 > 1e-9 * scale && d2 >= DIVERGENCE_RATIO * d1 {
            return Err(Error::Divergence(format!(
                "refinement increments at {l} do not shrink: {d1:.3e} then {d2:.3e}"
            )));
        }
        let err = if d1 > 0.0 && d2 > 0.0 {
            let q = d2 / d1;
            d2 * q / (1.0 - q)
        } else {
            d2.abs()
        };
        for (b, x) in by_depth.iter_mut().zip(&v) {
            *b = b.max(*x);
        }
        if best.is_none_or(|(bv, _, _)| v[levels] > bv) {
            best = Some((v[levels], err, l));
        }
    }
    let (value, refinement_error, argmax) = best.ok_or_else(|| Error::Input("K has no sample points".into()))?;
    Ok(KappaIntegral { value, refinement_error, argmax, by_depth })
}

/// The kappa integral of an extension, split into the two terms of `dbar(chi g0)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtensionKappa {
    pub total: KappaIntegral,
    /// Contribution of `chi dbar g0`.
    pub mollified: KappaIntegral,
    /// Contribution of `g0 dbar chi` on the cutoff band.
    pub cutoff: KappaIntegral,
}

pub fn kappa_integral(
    ext: &ExtensionFunction,
    grid: &PlanarGrid,
    levels: usize,
    samples: usize,
) -> Result<ExtensionKappa> {
    let k = ext.k();
    let total = kappa_integral_density(|z| ext.dbar(z).norm(), &k, grid, levels, samples)?;
    let mollified = kappa_integral_density(|z| ext.dbar_parts(z).0.norm(), &k, grid, levels, samples)?;
    let cutoff = kappa_integral_density(|z| ext.dbar_parts(z).1.norm(), &k, grid, levels, samples)?;
    Ok(ExtensionKappa { total, mollified, cutoff })
}

/// Hölder envelope `|dbar g| <= beta dist(., K)^alpha` checked on grid cells,
/// and the resulting bound `2 pi beta R^alpha / alpha`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HolderEnvelope {
    pub alpha: f64,
    pub beta: f64,
    /// Radius of discs about points of `K` covering the support.
    pub radius: f64,
    pub bound: f64,
}

pub fn holder_envelope(
    density: impl Fn(C64) -> f64,
    k: &KSet,
    support: [f64; 4],
    grid: &PlanarGrid,
    alpha: f64,
) -> Result<HolderEnvelope> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Input(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let mut beta: f64 = 0.0;
    grid.for_each_cell(|z, _| {
        let v = density(z);
        if v > 0.0 {
            beta = beta.max(v / k.distance(z).powf(alpha));
        }
    });
    let radius = k.covering_radius(support);
    Ok(HolderEnvelope { alpha, beta, radius, bound: 2.0 * PI * beta * radius.powf(alpha) / alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy_green::{CompactRealFunction, MollifierConfig};
    use crate::linalg::c64;

    fn square() -> ExtensionFunction {
        ExtensionFunction::new(CompactRealFunction::truncated_square(1e-4).unwrap(), MollifierConfig::default()).unwrap()
    }

    #[test]
    fn kernel_application() {
        let r = Matrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let mut t = IntertwiningMap::zero(2);
        t.accumulate(c64(0.0, 1.0), &r);
        let x = Matrix::from_real_rows(&[&[0.5, -1.0], &[2.0, 0.0]]);
        let direct = r.matmul(&x).matmul(&r).scale(c64(0.0, 1.0));
        assert!((&t.apply(&x).unwrap() - &direct).max_abs() < 1e-14);
        assert!(t.apply(&Matrix::identity(3)).is_err());
    }

    #[test]
    fn scalar_point_is_f_at_zero() {
        let e = square();
        let a = Matrix::zeros(1, 1);
        let q = cg_quadrature(&a, &e, &e.grid(0.02).unwrap()).unwrap();
        assert!(q.value[(0, 0)].norm() < 2e-3, "{}", q.value[(0, 0)]);
        // T(x) = f'(a) x for scalar a
        let a = Matrix::from_real_diag(&[0.3]);
        let q = cg_quadrature(&a, &e, &e.grid(0.02).unwrap()).unwrap();
        assert!((q.map.kernel[(0, 0)] - 0.6).norm() < 5e-3, "{}", q.map.kernel[(0, 0)]);
        assert!((q.value[(0, 0)] - 0.09).norm() < 5e-3);
    }

    #[test]
    fn spectrum_outside_k_is_rejected() {
        let e = square();
        let a = Matrix::from_diag(&[c64(0.0, 0.5)]);
        assert!(matches!(cg_functional_calculus(&a, &e, &e.grid(0.05).unwrap()), Err(Error::Spectrum(_))));
        let a = Matrix::from_real_diag(&[3.0]);
        assert!(matches!(build_t(&a, &e, &e.grid(0.05).unwrap()), Err(Error::Spectrum(_))));
    }

    #[test]
    fn synthetic_kappa_integral() {
        let k = KSet::Points(vec![c64(0.0, 0.0)]);
        let grid = PlanarGrid::new((-1.0, 1.0), (-1.0, 1.0), 0.02).unwrap();
        let dens = |z: C64| if z.norm() <= 1.0 { z.norm() } else { 0.0 };
        let v = kappa_integral_density(dens, &k, &grid, 4, 1).unwrap();
        assert!((v.value / (2.0 * PI) - 1.0).abs() < 0.02, "{v:?}");
        assert!(matches!(
            kappa_integral_density(|z| if z.norm() <= 1.0 { 1.0 } else { 0.0 }, &k, &grid, 4, 1),
            Err(Error::Divergence(_))
        ));
        let zero = kappa_integral_density(|_| 0.0, &k, &grid, 3, 1).unwrap();
        assert_eq!(zero.value, 0.0);
    }
}
