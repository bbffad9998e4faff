//! The bump `phi(s) = exp(-1/(1-s^2)) / Z` on `(-1, 1)` and the cutoff `chi(y)`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::function::{smoothstep, smoothstep_prime};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifierConfig {
    /// `chi = 1` for `|y| <= delta`, `chi = 0` for `|y| >= 1`.
    pub delta: f64,
    /// Trapezoidal intervals on `[-1, 1]` for the `s` integrals.
    pub nodes: usize,
}

impl Default for MollifierConfig {
    fn default() -> Self {
        Self { delta: 0.25, nodes: 128 }
    }
}

fn raw_bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// `Z = int exp(-1/(1-s^2)) ds`.
pub fn normalization() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| {
        let n = 1 << 16;
        let h = 2.0 / n as f64;
        (1..n).map(|k| raw_bump(-1.0 + k as f64 * h)).sum::<f64>() * h
    })
}

pub fn bump(s: f64) -> f64 {
    raw_bump(s) / normalization()
}

pub fn bump_prime(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        return 0.0;
    }
    let q = 1.0 - s * s;
    bump(s) * (-2.0 * s / (q * q))
}

/// One trapezoidal node with the bump and its derivative precomputed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    pub s: f64,
    pub w_phi: f64,
    pub w_dphi: f64,
}

impl MollifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Input(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        let mass = self.bump_mass();
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::Input(format!(
                "{} mollifier nodes integrate phi to {mass:.12}; use more nodes",
                self.nodes
            )));
        }
        Ok(())
    }

    /// `int phi` by the configured trapezoidal rule.
    pub fn bump_mass(&self) -> f64 {
        self.nodes().iter().map(|n| n.w_phi).sum()
    }

    pub(crate) fn nodes(&self) -> Vec<Node> {
        let h = 2.0 / self.nodes.max(1) as f64;
        (1..self.nodes)
            .map(|k| {
                let s = -1.0 + k as f64 * h;
                Node { s, w_phi: h * bump(s), w_dphi: h * bump_prime(s) }
            })
            .filter(|n| n.w_phi != 0.0 || n.w_dphi != 0.0)
            .collect()
    }

    pub fn chi(&self, y: f64) -> f64 {
        1.0 - smoothstep((y.abs() - self.delta) / (1.0 - self.delta))
    }

    /// `d chi / dy`.
    pub fn chi_prime(&self, y: f64) -> f64 {
        let w = 1.0 - self.delta;
        -smoothstep_prime((y.abs() - self.delta) / w) / w * y.signum()
    }
}
