//! Compactly supported real functions sampled on a uniform grid, and the
//! difference diagnostic `int_0^1 ||Delta_h f'||_inf / h dh`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `f` and `f'` on the uniform grid `x0 + k step`; both vanish off the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompactRealFunction {
    pub x0: f64,
    pub step: f64,
    pub values: Vec<f64>,
    pub fprime: Vec<f64>,
    /// False when `fprime` came from centered differences.
    pub fprime_analytic: bool,
    pub support_radius: f64,
}

/// Degree-5 smoothstep on `[0, 1]`, clamped outside.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

pub fn smoothstep_prime(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

impl CompactRealFunction {
    /// Samples `f` on `[-r, r]` padded by two steps. When `fprime` is absent
    /// it is replaced by centered differences.
    pub fn from_fn(
        f: impl Fn(f64) -> f64,
        fprime: Option<&dyn Fn(f64) -> f64>,
        support_radius: f64,
        step: f64,
    ) -> Result<Self> {
        if !(step > 0.0 && support_radius > 0.0 && step < support_radius) {
            return Err(Error::Input(format!("bad sampling: radius {support_radius}, step {step}")));
        }
        let half = (support_radius / step).ceil() as i64 + 2;
        let x0 = -(half as f64) * step;
        let xs: Vec<f64> = (0..=2 * half).map(|k| x0 + k as f64 * step).collect();
        let values: Vec<f64> = xs.iter().map(|&x| if x.abs() <= support_radius { f(x) } else { 0.0 }).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite function sample".into()));
        }
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let edge = f(support_radius).abs().max(f(-support_radius).abs());
        if edge > 1e-10 * scale {
            return Err(Error::Input(format!("f does not vanish at the support radius (|f| = {edge:.3e})")));
        }
        let (fprime, analytic) = match fprime {
            Some(d) => (xs.iter().map(|&x| if x.abs() <= support_radius { d(x) } else { 0.0 }).collect(), true),
            None => (centered_differences(&values, step), false),
        };
        Ok(Self { x0, step, values, fprime, fprime_analytic: analytic, support_radius })
    }

    /// `f(t) psi(t)` where `psi = 1` on `[-r_in, r_in]` and 0 beyond `r_out`.
    pub fn truncated(
        f: impl Fn(f64) -> f64,
        fprime: impl Fn(f64) -> f64,
        r_in: f64,
        r_out: f64,
        step: f64,
    ) -> Result<Self> {
        if !(0.0 < r_in && r_in < r_out) {
            return Err(Error::Input(format!("need 0 < r_in < r_out, got {r_in}, {r_out}")));
        }
        let w = r_out - r_in;
        let psi = |t: f64| 1.0 - smoothstep((t.abs() - r_in) / w);
        let dpsi = |t: f64| -smoothstep_prime((t.abs() - r_in) / w) / w * t.signum();
        let g = |t: f64| f(t) * psi(t);
        let dg = |t: f64| fprime(t) * psi(t) + f(t) * dpsi(t);
        Self::from_fn(g, Some(&dg), r_out, step)
    }

    /// `t^2` cut off smoothly between `|t| = 1` and `|t| = 2`.
    pub fn truncated_square(step: f64) -> Result<Self> {
        Self::truncated(|t| t * t, |t| 2.0 * t, 1.0, 2.0, step)
    }

    /// `t` cut off between `|t| = 1` and `|t| = 2`.
    pub fn truncated_linear(step: f64) -> Result<Self> {
        Self::truncated(|t| t, |_| 1.0, 1.0, 2.0, step)
    }

    /// `sgn(t)|t|^p / p` (so `f'(t) = |t|^{p-1}`), cut off between 1 and 2.
    pub fn truncated_cusp(p: f64, step: f64) -> Result<Self> {
        if p <= 1.0 {
            return Err(Error::Input(format!("cusp exponent must exceed 1, got {p}")));
        }
        Self::truncated(|t| t.signum() * t.abs().powf(p) / p, |t| t.abs().powf(p - 1.0), 1.0, 2.0, step)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.step
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let u = (x - self.x0) / self.step;
        if !(u >= 0.0) || u >= (self.len() - 1) as f64 {
            return None;
        }
        let k = u as usize;
        Some((k, u - k as f64))
    }

    /// Cubic Hermite interpolant of `(values, fprime)`.
    pub fn eval(&self, x: f64) -> f64 {
        let Some((k, t)) = self.locate(x) else { return 0.0 };
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (d0, d1) = (self.fprime[k] * self.step, self.fprime[k + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
    }

    /// Piecewise-linear interpolant of `fprime`.
    #[inline]
    pub fn eval_prime(&self, x: f64) -> f64 {
        match self.locate(x) {
            Some((k, t)) => self.fprime[k] + t * (self.fprime[k + 1] - self.fprime[k]),
            None => 0.0,
        }
    }

    /// `max_k |fprime_k - (f_{k+1} - f_{k-1}) / 2h|`.
    pub fn derivative_consistency(&self) -> f64 {
        let d = centered_differences(&self.values, self.step);
        d.iter().zip(&self.fprime).skip(1).take(self.len().saturating_sub(2)).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `||Delta_h f'||_inf` for `h = shift * step`.
    pub fn delta_sup(&self, shift: usize) -> f64 {
        let n = self.len();
        let at = |k: isize| if k < 0 || k as usize >= n { 0.0 } else { self.fprime[k as usize] };
        (0..(n + shift) as isize).fold(0.0, |m, k| m.max((at(k - shift as isize) - at(k)).abs()))
    }
}

fn centered_differences(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|k| {
            let lo = if k == 0 { 0.0 } else { v[k - 1] };
            let hi = if k + 1 == n { 0.0 } else { v[k + 1] };
            (hi - lo) / (2.0 * h)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BesovReport {
    /// `int_{h_min}^1 ||Delta_h f'||_inf / h dh`.
    pub integral: f64,
    /// Log-log slope of `||Delta_h f'||_inf` over the smallest two decades of `h`.
    pub tail_slope: f64,
    pub h: Vec<f64>,
    pub delta_norm: Vec<f64>,
}

impl BesovReport {
    /// A vanishing tail slope signals that the integral diverges as `h_min -> 0`.
    pub fn convergent(&self) -> bool {
        self.tail_slope > 0.05
    }
}

/// Trapezoidal quadrature in `ln h` on shifts spaced by `2^{1/8}`.
pub fn besov_criterion(f: &CompactRealFunction) -> BesovReport {
    let mut shifts: Vec<usize> = Vec::new();
    let max_shift = (1.0 / f.step).floor().max(1.0) as usize;
    let mut t = 1.0f64;
    while (t.round() as usize) <= max_shift {
        let k = t.round() as usize;
        if shifts.last() != Some(&k) {
            shifts.push(k);
        }
        t *= 2f64.powf(0.125);
    }
    let h: Vec<f64> = shifts.iter().map(|&k| k as f64 * f.step).collect();
    let delta_norm: Vec<f64> = shifts.iter().map(|&k| f.delta_sup(k)).collect();
    let integral = (1..h.len())
        .map(|i| 0.5 * (delta_norm[i] + delta_norm[i - 1]) * (h[i] / h[i - 1]).ln())
        .sum();
    let tail: Vec<(f64, f64)> = h
        .iter()
        .zip(&delta_norm)
        .filter(|(&hh, &d)| hh <= 100.0 * f.step && d > 0.0)
        .map(|(hh, d)| (hh.ln(), d.ln()))
        .collect();
    let tail_slope = slope(&tail);
    BesovReport { integral, tail_slope, h, delta_norm }
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
