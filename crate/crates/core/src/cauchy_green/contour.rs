//! Trapezoidal contour quadrature for `f_r(a)` and
//! `T_r(x) = (1/2 pi i) int f(r z) (z - a)^{-1} x (z - a)^{-1} dz` on a circle
//! between the spectrum and the unit circle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::calculus::IntertwiningMap;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, opnorm, random, resolvent_unchecked, Matrix, C64};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscContour {
    pub r: f64,
    pub radius: f64,
    pub nodes: usize,
    /// Contour quadrature of `f(r a)`.
    pub f_r_a: Matrix,
    pub map: IntertwiningMap,
}

/// `sum_k c_k m^k` by Horner's rule.
pub fn power_series_at(coeffs: &[C64], m: &Matrix) -> Result<Matrix> {
    let n = m.require_square()?;
    let mut acc = Matrix::zeros(n, n);
    for &c in coeffs.iter().rev() {
        acc = acc.matmul(m).shift(c);
    }
    Ok(acc)
}

fn power_series(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Builds `T_r` for the polynomial `f` with coefficients `coeffs`, on the
/// circle of radius `(1 + rho) / 2` where `rho` is the spectral radius of `a`.
pub fn disc_contour_t(a: &Matrix, coeffs: &[C64], r: f64, nodes: usize) -> Result<DiscContour> {
    let n = a.require_square()?;
    a.require_finite()?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Input(format!("r must lie in (0, 1), got {r}")));
    }
    if nodes < 2 {
        return Err(Error::Input("at least two contour nodes are needed".into()));
    }
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Input("non-finite coefficient".into()));
    }
    let rho = eigenvalues(a)?.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let radius = (1.0 + rho) / 2.0;
    if rho >= radius {
        return Err(Error::Spectrum(format!("spectral radius {rho:.6} reaches the contour radius {radius:.6}")));
    }
    let mut f_r_a = Matrix::zeros(n, n);
    let mut map = IntertwiningMap::zero(n);
    for k in 0..nodes {
        let z = C64::from_polar(radius, 2.0 * PI * k as f64 / nodes as f64);
        // dz / (2 pi i) = z dtheta / 2 pi
        let c = power_series(coeffs, z * r) * z / nodes as f64;
        let res = resolvent_unchecked(a, z);
        for (v, x) in f_r_a.data_mut().iter_mut().zip(res.data()) {
            *v += c * x;
        }
        map.accumulate(c, &res);
    }
    Ok(DiscContour { r, radius, nodes, f_r_a, map })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ContourResiduals {
    /// `max ||[f_r(a), x] - [a, T_r(x)]|| / ||x||` with the quadrature `f_r(a)`.
    pub internal: f64,
    /// The same with `f_r(a)` replaced by the reference.
    pub reference: f64,
}

pub fn contour_residuals(
    dc: &DiscContour,
    a: &Matrix,
    reference: &Matrix,
    samples: usize,
    seed: u64,
) -> Result<ContourResiduals> {
    let n = a.require_square()?;
    a.require_same_shape(reference)?;
    let comm = |p: &Matrix, q: &Matrix| &p.matmul(q) - &q.matmul(p);
    let mut r = random::rng(seed);
    let (mut internal, mut refr) = (0.0f64, 0.0f64);
    for _ in 0..samples.max(1) {
        let x = random::gaussian_matrix(n, n, &mut r);
        let nx = opnorm(&x);
        let rhs = comm(a, &dc.map.apply(&x)?);
        internal = internal.max(opnorm(&(&comm(&dc.f_r_a, &x) - &rhs)) / nx);
        refr = refr.max(opnorm(&(&comm(reference, &x) - &rhs)) / nx);
    }
    Ok(ContourResiduals { internal, reference: refr })
}
