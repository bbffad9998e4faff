//! The extension `g = chi g0` of a compactly supported real function, with
//! `g0(x+iy) = f(x) + i y (phi_|y| * f')(x)` and
//! `2 dbar g0 = int (i sgn(y) + s) phi'(s) (f'(x - s|y|) - f'(x)) ds`.

use serde::{Deserialize, Serialize};

use super::function::CompactRealFunction;
use super::grid::PlanarGrid;
use super::mollifier::{MollifierConfig, Node};
use super::KSet;
use crate::error::{Error, Result};
use crate::linalg::{vector, C64};

#[derive(Debug, Clone)]
pub struct ExtensionFunction {
    f: CompactRealFunction,
    config: MollifierConfig,
    nodes: Vec<Node>,
}

/// Sampled extension for storage, with both evaluations of `dbar g`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtensionBundle {
    pub config: MollifierConfig,
    pub support_box: [f64; 4],
    pub k: KSet,
    pub step: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major in `ys`, then `xs`.
    #[serde(with = "vector::complex_vec")]
    pub g: Vec<C64>,
    #[serde(with = "vector::complex_vec")]
    pub dbar: Vec<C64>,
    /// Centered differences of the sampled `g`; zero on the lattice boundary.
    #[serde(with = "vector::complex_vec")]
    pub dbar_fd: Vec<C64>,
    /// `max |dbar - dbar_fd|` over interior lattice points.
    pub discrepancy: f64,
    /// `discrepancy / step`.
    pub discrepancy_constant: f64,
    /// `max |dbar g|` on the real axis.
    pub axis_max: f64,
    /// `max |g(x) - f(x)|` on the real axis.
    pub axis_mismatch: f64,
}

impl ExtensionFunction {
    pub fn new(f: CompactRealFunction, config: MollifierConfig) -> Result<Self> {
        config.validate()?;
        let nodes = config.nodes();
        Ok(Self { f, config, nodes })
    }

    pub fn function(&self) -> &CompactRealFunction {
        &self.f
    }

    pub fn config(&self) -> &MollifierConfig {
        &self.config
    }

    /// `[x0, x1, y0, y1]` containing the support of `g`.
    pub fn support_box(&self) -> [f64; 4] {
        let r = self.f.support_radius + 1.0;
        [-r, r, -1.0, 1.0]
    }

    /// The interval on which `dbar g` vanishes and `g = f`.
    pub fn k(&self) -> KSet {
        KSet::Interval { lo: -self.f.support_radius, hi: self.f.support_radius }
    }

    /// Uniform grid over the support box.
    pub fn grid(&self, step: f64) -> Result<PlanarGrid> {
        let [x0, x1, y0, y1] = self.support_box();
        PlanarGrid::new((x0, x1), (y0, y1), step)
    }

    /// `(g0, dbar g0)` at `x + iy`.
    fn parts0(&self, x: f64, y: f64) -> (C64, C64) {
        let fx = self.f.eval(x);
        if y == 0.0 {
            return (C64::new(fx, 0.0), C64::new(0.0, 0.0));
        }
        let (u, sg) = (y.abs(), y.signum());
        let d0 = self.f.eval_prime(x);
        let (mut conv, mut re, mut im) = (0.0, 0.0, 0.0);
        for n in &self.nodes {
            let v = self.f.eval_prime(x - n.s * u);
            conv += n.w_phi * v;
            let dv = n.w_dphi * (v - d0);
            re += n.s * dv;
            im += dv;
        }
        (C64::new(fx, y * conv), C64::new(0.5 * re, 0.5 * sg * im))
    }

    pub fn g(&self, z: C64) -> C64 {
        let chi = self.config.chi(z.im);
        if chi == 0.0 {
            return C64::new(0.0, 0.0);
        }
        self.parts0(z.re, z.im).0 * chi
    }

    /// `(chi dbar g0, g0 dbar chi)`, whose sum is `dbar g`.
    pub fn dbar_parts(&self, z: C64) -> (C64, C64) {
        let chi = self.config.chi(z.im);
        if chi == 0.0 {
            return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        }
        let (g0, d0) = self.parts0(z.re, z.im);
        let dchi = C64::new(0.0, 0.5 * self.config.chi_prime(z.im));
        (d0 * chi, g0 * dchi)
    }

    pub fn dbar(&self, z: C64) -> C64 {
        let (a, b) = self.dbar_parts(z);
        a + b
    }

    /// Samples `g` and `dbar g` on a lattice of spacing `step` and compares
    /// the formula for `dbar g` with centered differences.
    pub fn sample(&self, step: f64) -> Result<ExtensionBundle> {
        if step > self.config.delta / 4.0 {
            return Err(Error::Resolution(format!(
                "step {step} does not resolve the cutoff band (needs <= {})",
                self.config.delta / 4.0
            )));
        }
        if step < 4.0 * self.f.step {
            return Err(Error::Resolution(format!(
                "step {step} is below four function samples ({})",
                4.0 * self.f.step
            )));
        }
        let [x0, x1, y0, y1] = self.support_box();
        let nx = ((x1 - x0) / step).round() as usize + 1;
        let ny = ((y1 - y0) / step).round() as usize + 1;
        let xs: Vec<f64> = (0..nx).map(|i| x0 + i as f64 * step).collect();
        let ys: Vec<f64> = (0..ny).map(|j| y0 + j as f64 * step).collect();
        let mut g = Vec::with_capacity(nx * ny);
        let mut dbar = Vec::with_capacity(nx * ny);
        for &y in &ys {
            for &x in &xs {
                let z = C64::new(x, y);
                g.push(self.g(z));
                dbar.push(self.dbar(z));
            }
        }
        let mut dbar_fd = vec![C64::new(0.0, 0.0); nx * ny];
        let mut discrepancy: f64 = 0.0;
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let gx = (g[j * nx + i + 1] - g[j * nx + i - 1]) / (2.0 * step);
                let gy = (g[(j + 1) * nx + i] - g[(j - 1) * nx + i]) / (2.0 * step);
                let d = (gx + C64::new(0.0, 1.0) * gy) * 0.5;
                dbar_fd[j * nx + i] = d;
                discrepancy = discrepancy.max((d - dbar[j * nx + i]).norm());
            }
        }
        let mut axis_max: f64 = 0.0;
        let mut axis_mismatch: f64 = 0.0;
        for &x in &xs {
            let z = C64::new(x, 0.0);
            axis_max = axis_max.max(self.dbar(z).norm());
            axis_mismatch = axis_mismatch.max((self.g(z) - self.f.eval(x)).norm());
        }
        Ok(ExtensionBundle {
            config: self.config,
            support_box: self.support_box(),
            k: self.k(),
            step,
            xs,
            ys,
            g,
            dbar,
            dbar_fd,
            discrepancy,
            discrepancy_constant: discrepancy / step,
            axis_max,
            axis_mismatch,
        })
    }
}
