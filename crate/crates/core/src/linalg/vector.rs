use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// `<x, y> = sum x_i conj(y_i)`, linear in the first argument.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    norm_sqr(x).sqrt()
}

pub fn scale(x: &[C64], c: C64) -> Vec<C64> {
    x.iter().map(|&z| z * c).collect()
}

pub fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Unit-norm copy, or `None` for a zero vector.
pub fn normalized(x: &[C64]) -> Option<Vec<C64>> {
    let n = norm(x);
    if n == 0.0 || !n.is_finite() {
        None
    } else {
        Some(x.iter().map(|z| z / n).collect())
    }
}

/// Vector of Euclidean norm one (to 1e-12).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<C64>);

impl UnitVector {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Input("unit vector must be nonempty".into()));
        }
        let n = norm(&entries);
        if !n.is_finite() || (n - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::Input(format!("vector norm {n} is not 1")));
        }
        Ok(Self(entries))
    }

    /// Normalizes a nonzero vector.
    pub fn from_nonzero(entries: &[C64]) -> Result<Self> {
        normalized(entries)
            .map(Self)
            .ok_or_else(|| Error::Input("zero vector cannot be normalized".into()))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[k] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }
}

impl AsRef<[C64]> for UnitVector {
    fn as_ref(&self) -> &[C64] {
        &self.0
    }
}

impl Serialize for UnitVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw: Vec<[f64; 2]> = self.0.iter().map(|z| [z.re, z.im]).collect();
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        UnitVector::new(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for plain complex vectors as `[[re, im], ...]`.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

/// Serde adapter for a single complex number as `[re, im]`.
pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

/// Serde adapter for a residual that may be `+inf` (nothing was fitted);
/// JSON has no infinity, so it travels as `null`.
pub mod unbounded {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        x.is_finite().then_some(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
