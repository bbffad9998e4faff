//! Built-in scalar functions: `id`, `const(c)`, `square`, `abs`, `absPow(p)`
//! and `spline(path)`, the piecewise-linear interpolant of sampled values.

use std::fmt;
use std::path::{Path, PathBuf};

use oplab::cauchy_green::CompactRealFunction;
use oplab::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Sampled values `y_k = f(x_k)` with strictly increasing `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Samples {
    pub fn validate(&self) -> Result<()> {
        if self.x.len() < 2 || self.x.len() != self.y.len() {
            return Err(Error::Input(format!(
                "spline needs at least two (x, y) pairs of equal length, got {} and {}",
                self.x.len(),
                self.y.len()
            )));
        }
        if self.x.iter().chain(&self.y).any(|v| !v.is_finite()) {
            return Err(Error::Input("spline samples must be finite".into()));
        }
        if self.x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("spline abscissae must increase strictly".into()));
        }
        Ok(())
    }

    /// Linear interpolation, constant beyond the end points.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let k = self.x.partition_point(|&v| v <= t) - 1;
        let s = (t - self.x[k]) / (self.x[k + 1] - self.x[k]);
        self.y[k] + s * (self.y[k + 1] - self.y[k])
    }

    pub fn slope(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t < self.x[0] || t > self.x[n - 1] {
            return 0.0;
        }
        let k = (self.x.partition_point(|&v| v <= t).max(1) - 1).min(n - 2);
        (self.y[k + 1] - self.y[k]) / (self.x[k + 1] - self.x[k])
    }

    pub fn lipschitz(&self) -> f64 {
        (0..self.x.len() - 1).map(|k| ((self.y[k + 1] - self.y[k]) / (self.x[k + 1] - self.x[k])).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Id,
    Const(f64),
    Square,
    Abs,
    AbsPow(f64),
    Spline(PathBuf),
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Id => write!(f, "id"),
            FunctionSpec::Const(c) => write!(f, "const({c})"),
            FunctionSpec::Square => write!(f, "square"),
            FunctionSpec::Abs => write!(f, "abs"),
            FunctionSpec::AbsPow(p) => write!(f, "absPow({p})"),
            FunctionSpec::Spline(p) => write!(f, "spline({})", p.display()),
        }
    }
}

fn argument<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')').map(str::trim)
}

fn number(s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Input(format!("{what} needs a finite number, got {s:?}")))
}

impl FunctionSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "id" => return Ok(FunctionSpec::Id),
            "square" | "fsq" => return Ok(FunctionSpec::Square),
            "abs" => return Ok(FunctionSpec::Abs),
            _ => {}
        }
        if let Some(c) = argument(s, "const") {
            return Ok(FunctionSpec::Const(number(c, "const")?));
        }
        if let Some(p) = argument(s, "absPow") {
            let p = number(p, "absPow")?;
            if p <= 0.0 {
                return Err(Error::Input(format!("absPow exponent must be positive, got {p}")));
            }
            return Ok(FunctionSpec::AbsPow(p));
        }
        if let Some(p) = argument(s, "spline") {
            return Ok(FunctionSpec::Spline(PathBuf::from(p)));
        }
        Err(Error::Input(format!(
            "unknown function {s:?}; expected id, const(c), square, abs, absPow(p) or spline(path)"
        )))
    }

    pub fn spline_path(&self) -> Option<&Path> {
        match self {
            FunctionSpec::Spline(p) => Some(p),
            _ => None,
        }
    }

    /// Rewrites a relative spline path against `base`.
    pub fn rebased(&self, base: &Path) -> Self {
        match self {
            FunctionSpec::Spline(p) if p.is_relative() => FunctionSpec::Spline(base.join(p)),
            other => other.clone(),
        }
    }

    /// Binds the spline samples, if any, giving an evaluable function.
    pub fn bind<'a>(&'a self, samples: Option<&'a Samples>) -> Result<Bound<'a>> {
        if let FunctionSpec::Spline(p) = self {
            let s = samples.ok_or_else(|| Error::Input(format!("samples for {} were not loaded", p.display())))?;
            s.validate()?;
            return Ok(Bound { spec: self, samples: Some(s) });
        }
        Ok(Bound { spec: self, samples: None })
    }
}

pub struct Bound<'a> {
    spec: &'a FunctionSpec,
    samples: Option<&'a Samples>,
}

impl Bound<'_> {
    pub fn real(&self, t: f64) -> f64 {
        match self.spec {
            FunctionSpec::Id => t,
            FunctionSpec::Const(c) => *c,
            FunctionSpec::Square => t * t,
            FunctionSpec::Abs => t.abs(),
            FunctionSpec::AbsPow(p) => t.abs().powf(*p),
            FunctionSpec::Spline(_) => self.samples.map_or(0.0, |s| s.eval(t)),
        }
    }

    pub fn real_prime(&self, t: f64) -> f64 {
        match self.spec {
            FunctionSpec::Id => 1.0,
            FunctionSpec::Const(_) => 0.0,
            FunctionSpec::Square => 2.0 * t,
            FunctionSpec::Abs => t.signum() * f64::from(t != 0.0),
            FunctionSpec::AbsPow(p) => {
                if t == 0.0 {
                    if *p >= 1.0 { 0.0 } else { f64::INFINITY }
                } else {
                    p * t.abs().powf(p - 1.0) * t.signum()
                }
            }
            FunctionSpec::Spline(_) => self.samples.map_or(0.0, |s| s.slope(t)),
        }
    }

    /// Complex extension used on spectra: `z`, `c`, `z^2`, `|z|`, `|z|^p`;
    /// splines read the real part.
    pub fn complex(&self, z: C64) -> C64 {
        match self.spec {
            FunctionSpec::Id => z,
            FunctionSpec::Const(c) => C64::new(*c, 0.0),
            FunctionSpec::Square => z * z,
            FunctionSpec::Abs => C64::new(z.norm(), 0.0),
            FunctionSpec::AbsPow(p) => C64::new(z.norm().powf(*p), 0.0),
            FunctionSpec::Spline(_) => C64::new(self.real(z.re), 0.0),
        }
    }

    /// Lipschitz constant on the disc of radius `r`, when finite.
    pub fn lipschitz(&self, r: f64) -> Option<f64> {
        match self.spec {
            FunctionSpec::Id | FunctionSpec::Abs => Some(1.0),
            FunctionSpec::Const(_) => Some(0.0),
            FunctionSpec::Square => Some(2.0 * r),
            FunctionSpec::AbsPow(p) if *p >= 1.0 => Some(p * r.powf(p - 1.0)),
            FunctionSpec::AbsPow(_) => None,
            FunctionSpec::Spline(_) => self.samples.map(Samples::lipschitz),
        }
    }

    /// `f` cut off smoothly between `|t| = 1` and `|t| = 2`, sampled at `step`.
    pub fn compact(&self, step: f64) -> Result<CompactRealFunction> {
        CompactRealFunction::truncated(|t| self.real(t), |t| self.real_prime(t), 1.0, 2.0, step)
            .and_then(|f| {
                if f.fprime.iter().any(|d| !d.is_finite()) {
                    Err(Error::Input(format!("{} has an unbounded derivative", self.spec)))
                } else {
                    Ok(f)
                }
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_library() {
        assert_eq!(FunctionSpec::parse("fsq").unwrap(), FunctionSpec::Square);
        assert_eq!(FunctionSpec::parse("const(2.5)").unwrap(), FunctionSpec::Const(2.5));
        assert_eq!(FunctionSpec::parse("absPow( 1.5 )").unwrap(), FunctionSpec::AbsPow(1.5));
        assert_eq!(FunctionSpec::parse("spline(s.json)").unwrap(), FunctionSpec::Spline("s.json".into()));
        for bad in ["sin", "const(x)", "absPow(-1)", "absPow(1", "const(inf)"] {
            assert!(FunctionSpec::parse(bad).is_err(), "{bad}");
        }
        for s in ["id", "const(-1)", "square", "abs", "absPow(2.5)", "spline(a/b.json)"] {
            assert_eq!(FunctionSpec::parse(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn spline_interpolates_and_clamps() {
        let s = Samples { x: vec![-1.0, 0.0, 2.0], y: vec![1.0, 0.0, 1.0] };
        s.validate().unwrap();
        assert_eq!(s.eval(-0.5), 0.5);
        assert_eq!(s.eval(1.0), 0.5);
        assert_eq!(s.eval(5.0), 1.0);
        assert_eq!(s.lipschitz(), 1.0);
        assert_eq!(s.slope(-0.5), -1.0);
        assert!(Samples { x: vec![0.0, 0.0], y: vec![1.0, 2.0] }.validate().is_err());
    }

    #[test]
    fn derivatives_match_differences() {
        let specs = [FunctionSpec::Id, FunctionSpec::Square, FunctionSpec::Abs, FunctionSpec::AbsPow(2.5)];
        for spec in &specs {
            let f = spec.bind(None).unwrap();
            for t in [-0.7, 0.3, 1.2] {
                let h = 1e-6;
                let fd = (f.real(t + h) - f.real(t - h)) / (2.0 * h);
                assert!((fd - f.real_prime(t)).abs() < 1e-6, "{spec} at {t}");
            }
        }
    }

    #[test]
    fn compact_versions_agree_inside_the_unit_interval() {
        let f = FunctionSpec::Square.bind(None).unwrap();
        let c = f.compact(1e-3).unwrap();
        assert!((c.eval(0.5) - 0.25).abs() < 1e-9);
        assert_eq!(c.eval(2.5), 0.0);
        assert!(FunctionSpec::AbsPow(0.5).bind(None).unwrap().compact(1e-3).is_err());
    }
}
