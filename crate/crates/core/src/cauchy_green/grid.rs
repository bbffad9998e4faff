//! Midpoint quadrature on a rectangle with dyadic refinement near chosen
//! points. Cells are produced on the fly in a fixed order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanarGrid {
    /// Lower-left corner, snapped to a multiple of `step`.
    pub origin: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    pub step: f64,
    /// Cells within twice their size of one of these points are split, up to `levels` times.
    #[serde(default, with = "crate::linalg::vector::complex_vec")]
    pub refine_points: Vec<C64>,
    #[serde(default)]
    pub levels: usize,
    /// Cells whose centre lies within `exclusion_margin` of one of these points are dropped.
    #[serde(default, with = "crate::linalg::vector::complex_vec")]
    pub exclusion: Vec<C64>,
    #[serde(default)]
    pub exclusion_margin: f64,
}

pub const MAX_CELLS: usize = 50_000_000;

impl PlanarGrid {
    /// Covers `[x0, x1] x [y0, y1]`, enlarged so that every edge is a multiple of `step`.
    pub fn new(x: (f64, f64), y: (f64, f64), step: f64) -> Result<Self> {
        if !(step > 0.0 && x.0 < x.1 && y.0 < y.1) || ![x.0, x.1, y.0, y.1].iter().all(|v| v.is_finite()) {
            return Err(Error::Input(format!("bad grid: x {x:?}, y {y:?}, step {step}")));
        }
        let near_int = |v: f64| (v - v.round()).abs() < 1e-6;
        let snap = |lo: f64, hi: f64| {
            let (a, b) = (lo / step, hi / step);
            let a = if near_int(a) { a.round() } else { a.floor() };
            let b = if near_int(b) { b.round() } else { b.ceil() };
            (a * step, (b - a).round() as usize)
        };
        let (ox, nx) = snap(x.0, x.1);
        let (oy, ny) = snap(y.0, y.1);
        if nx.saturating_mul(ny) > MAX_CELLS {
            return Err(Error::Input(format!("grid of {nx} x {ny} cells is too large")));
        }
        Ok(Self {
            origin: [ox, oy],
            nx,
            ny,
            step,
            refine_points: Vec::new(),
            levels: 0,
            exclusion: Vec::new(),
            exclusion_margin: 0.0,
        })
    }

    pub fn with_refinement(mut self, points: Vec<C64>, levels: usize) -> Self {
        self.refine_points = points;
        self.levels = levels;
        self
    }

    pub fn with_exclusion(mut self, points: Vec<C64>, margin: f64) -> Self {
        self.exclusion = points;
        self.exclusion_margin = margin;
        self
    }

    pub fn area(&self) -> f64 {
        (self.nx * self.ny) as f64 * self.step * self.step
    }

    fn base_center(&self, i: usize, j: usize) -> C64 {
        C64::new(
            self.origin[0] + (i as f64 + 0.5) * self.step,
            self.origin[1] + (j as f64 + 0.5) * self.step,
        )
    }

    fn excluded(&self, z: C64) -> bool {
        self.exclusion.iter().any(|p| (z - p).norm() < self.exclusion_margin)
    }

    fn near(points: &[C64], z: C64, size: f64) -> bool {
        points.iter().any(|p| (z - p).norm() < 2.0 * size)
    }

    /// Calls `f(center, area)` for every retained cell.
    pub fn for_each_cell(&self, mut f: impl FnMut(C64, f64)) {
        for j in 0..self.ny {
            for i in 0..self.nx {
                self.visit(self.base_center(i, j), self.step, self.levels, &mut f);
            }
        }
    }

    fn visit(&self, z: C64, size: f64, depth: usize, f: &mut impl FnMut(C64, f64)) {
        if depth > 0 && Self::near(&self.refine_points, z, size) {
            let q = size / 4.0;
            for (a, b) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
                self.visit(z + C64::new(a * q, b * q), size / 2.0, depth - 1, f);
            }
        } else if !self.excluded(z) {
            f(z, size * size);
        }
    }

    /// Total area of retained cells.
    pub fn retained_area(&self) -> f64 {
        let mut a = 0.0;
        self.for_each_cell(|_, w| a += w);
        a
    }

    /// Midpoint sums of `g` with refinement toward `refine` stopped after
    /// 0, 1, ..., `levels` levels. Entry `d` uses depth `d`.
    pub fn integrate_by_depth(&self, g: impl Fn(C64) -> f64, refine: &[C64], levels: usize) -> Vec<f64> {
        let mut out = vec![0.0; levels + 1];
        for j in 0..self.ny {
            for i in 0..self.nx {
                let v = self.depth_sums(self.base_center(i, j), self.step, 0, levels, refine, &g);
                out.iter_mut().zip(&v).for_each(|(o, x)| *o += x);
            }
        }
        out
    }

    fn depth_sums(
        &self,
        z: C64,
        size: f64,
        level: usize,
        levels: usize,
        refine: &[C64],
        g: &impl Fn(C64) -> f64,
    ) -> Vec<f64> {
        let here = if self.excluded(z) { 0.0 } else { g(z) * size * size };
        if level == levels || !Self::near(refine, z, size) {
            return vec![here; levels + 1 - level];
        }
        let q = size / 4.0;
        let mut below = vec![0.0; levels - level];
        for (a, b) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            let v = self.depth_sums(z + C64::new(a * q, b * q), size / 2.0, level + 1, levels, refine, g);
            below.iter_mut().zip(&v).for_each(|(o, x)| *o += x);
        }
        let mut out = Vec::with_capacity(levels + 1 - level);
        out.push(here);
        out.extend(below);
        out
    }
}
