//! Functional calculus through the Cauchy-Green formula
//! `g(l) = -(1/pi) int dbar g(z) / (z - l) dm(z)` for extensions `g` of real
//! functions with `dbar g = 0` on the spectrum.

mod calculus;
mod class;
mod contour;
mod extension;
mod function;
mod grid;
mod mollifier;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{vector, C64};

pub use calculus::{
    build_t, cg_functional_calculus, cg_quadrature, holder_envelope, kappa_integral, kappa_integral_density,
    verify_intertwine, CgQuadrature, ExtensionKappa, HolderEnvelope, IntertwiningMap, IntertwiningResiduals,
    KappaIntegral, DIVERGENCE_RATIO,
};
pub use class::{class_membership, ClassInequality, FunctionClassSpec};
pub use contour::{contour_residuals, disc_contour_t, power_series_at, ContourResiduals, DiscContour};
pub use extension::{ExtensionBundle, ExtensionFunction};
pub use function::{besov_criterion, smoothstep, BesovReport, CompactRealFunction};
pub use grid::PlanarGrid;
pub use mollifier::{bump, bump_prime, normalization, MollifierConfig};

/// Compact set on which `dbar g` vanishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KSet {
    /// Real interval `[lo, hi]`.
    Interval { lo: f64, hi: f64 },
    Points(#[serde(with = "vector::complex_vec")] Vec<C64>),
}

impl KSet {
    pub fn distance(&self, z: C64) -> f64 {
        match self {
            KSet::Interval { lo, hi } => C64::new(z.re - z.re.clamp(*lo, *hi), z.im).norm(),
            KSet::Points(p) => p.iter().fold(f64::INFINITY, |m, q| m.min((z - q).norm())),
        }
    }

    pub fn contains(&self, z: C64, tol: f64) -> bool {
        self.distance(z) <= tol
    }

    /// `n` evenly spaced points of an interval, or all listed points.
    pub fn sample(&self, n: usize) -> Vec<C64> {
        match self {
            KSet::Interval { lo, hi } => {
                if n <= 1 {
                    return vec![C64::new(0.5 * (lo + hi), 0.0)];
                }
                (0..n).map(|i| C64::new(lo + (hi - lo) * i as f64 / (n - 1) as f64, 0.0)).collect()
            }
            KSet::Points(p) => p.clone(),
        }
    }

    /// Smallest `R` such that the disc of radius `R` about any point of the
    /// set contains the rectangle `[x0, x1] x [y0, y1]`.
    pub fn covering_radius(&self, rect: [f64; 4]) -> f64 {
        let corners = [
            C64::new(rect[0], rect[2]),
            C64::new(rect[0], rect[3]),
            C64::new(rect[1], rect[2]),
            C64::new(rect[1], rect[3]),
        ];
        let centres = match self {
            KSet::Interval { lo, hi } => vec![C64::new(*lo, 0.0), C64::new(*hi, 0.0)],
            KSet::Points(p) => p.clone(),
        };
        centres.iter().flat_map(|c| corners.iter().map(move |k| (k - c).norm())).fold(0.0, f64::max)
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KSet::Interval { lo, hi } => write!(f, "[{lo}, {hi}]"),
            KSet::Points(p) => write!(f, "{} points", p.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kset_geometry() {
        let k = KSet::Interval { lo: -1.0, hi: 1.0 };
        assert_eq!(k.distance(C64::new(0.5, -0.3)), 0.3);
        assert!((k.distance(C64::new(4.0, 4.0)) - 5.0).abs() < 1e-15);
        assert_eq!(k.sample(3), vec![C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!((k.covering_radius([-2.0, 2.0, -1.0, 1.0]) - 10f64.sqrt()).abs() < 1e-15);
        let p = KSet::Points(vec![C64::new(0.0, 0.0)]);
        assert_eq!(p.covering_radius([-1.0, 1.0, -1.0, 1.0]), 2f64.sqrt());
    }
}
