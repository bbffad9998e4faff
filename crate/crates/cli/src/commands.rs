use std::path::PathBuf;

use clap::{Args, ValueEnum};
use oplab::cauchy_green::{
    besov_criterion, cg_quadrature, class_membership, contour_residuals, disc_contour_t, holder_envelope,
    kappa_integral, power_series_at, verify_intertwine, ExtensionFunction, MollifierConfig,
};
use oplab::commutator::{
    amplified_check, equality_structure_recover, kappa_estimate, kappa_exact_normal, AmplifiedReport,
    EqualityStructure, EqualityVerdict, KappaEstimate, KappaExact,
};
use oplab::linalg::{apply_function_spectral, operator_norm, DEFAULT_TOL};
use oplab::schur::{
    diagonal_mask, divided_difference_matrix, masked_bracket, restricted_offdiag_bracket, schur_norm_bracket,
    NormBracket,
};
use oplab::variance::{
    perturbation_gap, rank_one_commutator_check, two_by_two_decide, variance, variance_equal_recover,
    variance_state, Decision, StateSpec, StructureCase, StructureVerdict, MIN_WITNESS_GAP,
};
use oplab::{Error, Matrix, Result, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::funcs::FunctionSpec;
use crate::report::{read_json, Data, Output, Table};

/// A re-validation of something stored in a report.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub value: f64,
}

fn check(name: impl Into<String>, ok: bool, value: f64) -> Check {
    Check { name: name.into(), ok, value }
}

pub trait Command: Serialize + DeserializeOwned {
    const NAME: &'static str;

    /// Reads every file the command refers to.
    fn load(&self, data: &mut Data) -> Result<()>;

    /// Pure in `data` and `seed`.
    fn run(&self, data: &Data, seed: u64) -> Result<Output>;

    /// Re-validates the witnesses and certificates in `results`.
    fn checks(&self, _data: &Data, _results: &Value) -> Result<Vec<Check>> {
        Ok(Vec::new())
    }

    /// Extra files written next to the report.
    fn side_files(&self, _out: &Output) -> Vec<(PathBuf, Vec<u8>)> {
        Vec::new()
    }
}

fn opn(m: &Matrix) -> f64 {
    operator_norm(m).unwrap_or(f64::NAN)
}

fn value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn stored<T: DeserializeOwned>(results: &Value, key: &str) -> Result<T> {
    serde_json::from_value(results[key].clone()).map_err(|e| Error::Input(format!("stored {key}: {e}")))
}

fn load_matrix(data: &mut Data, key: &str, path: &PathBuf) -> Result<()> {
    let m: Matrix = read_json(path)?;
    data.matrices.insert(key.into(), m);
    Ok(())
}

fn load_pair(data: &mut Data, a: &PathBuf, b: &PathBuf) -> Result<()> {
    load_matrix(data, "a", a)?;
    load_matrix(data, "b", b)
}

fn load_function(data: &mut Data, spec: &str) -> Result<()> {
    let f = FunctionSpec::parse(spec)?;
    if let Some(p) = f.spline_path() {
        data.samples.insert(f.to_string(), read_json(p)?);
    }
    Ok(())
}

/// Parses `spec` and binds it to its samples; the closure sees the bound function.
fn with_function<T>(data: &Data, spec: &str, k: impl FnOnce(&crate::funcs::Bound) -> Result<T>) -> Result<T> {
    let f = FunctionSpec::parse(spec)?;
    let bound = f.bind(data.samples.get(&f.to_string()))?;
    k(&bound)
}

fn dvar(a: &Matrix, xi: &[C64]) -> Result<f64> {
    Ok(variance(a, xi)?.variance)
}

// ---------------------------------------------------------------- variance

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VarianceArgs {
    /// Matrix `a` (JSON).
    #[arg(long)]
    pub a: PathBuf,
    /// Second matrix; adds the perturbation gap against `a`.
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// State: `{"vector": [[re, im], ...]}` or `{"density": <matrix>}`. Defaults to `I/n`.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

impl Command for VarianceArgs {
    const NAME: &'static str = "variance";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_matrix(data, "a", &self.a)?;
        if let Some(b) = &self.b {
            load_matrix(data, "b", b)?;
        }
        if let Some(s) = &self.state {
            let st: StateSpec = read_json(s)?;
            data.states.insert("state".into(), st);
        }
        Ok(())
    }

    fn run(&self, data: &Data, _seed: u64) -> Result<Output> {
        let a = data.matrix("a")?;
        let n = a.require_square()?;
        let omega = data.states.get("state").cloned().unwrap_or_else(|| StateSpec::tracial(n));
        omega.validate()?;
        let v = variance_state(a, &omega)?;
        let mut results = json!({ "variance": v });
        let mut residuals = json!({});
        if let StateSpec::Vector(xi) = &omega {
            let (lhs, d) = rank_one_commutator_check(a, xi)?;
            let d_star = dvar(&a.adjoint(), xi.as_slice())?;
            results["rank_one"] = json!({ "commutator_norm_sq": lhs, "variance": d, "adjoint_variance": d_star });
            residuals["rank_one_defect"] = json!((lhs - d.max(d_star)).abs());
        }
        if data.matrices.contains_key("b") {
            let gap = perturbation_gap(a, data.matrix("b")?, &omega)?;
            results["perturbation"] = value(&gap);
            residuals["bound_slack"] = json!(gap.bound - gap.gap);
        }
        let warning = residuals["bound_slack"].as_f64().filter(|s| *s < 0.0).map(|s| format!("perturbation bound exceeded by {:.3e}", -s));
        Ok(Output::new(results, residuals).warn(warning))
    }
}

// ---------------------------------------------------------------- decide2x2

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Decide2x2Args {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

fn decision_checks(a: &Matrix, b: &Matrix, d: &Decision) -> Result<Vec<Check>> {
    Ok(match d {
        Decision::Affine { theta, tau, .. } => {
            let scale = opn(a).max(opn(b)).max(1.0);
            let fit = opn(&(b - &a.scale(*theta).shift(*tau))) / scale;
            vec![check("theta_modulus", theta.norm() <= 1.0 + 1e-9, theta.norm()), check("affine_fit", fit <= 1e-6, fit)]
        }
        Decision::Violation { witness, .. } => {
            let g = dvar(b, witness.as_slice())? - dvar(a, witness.as_slice())?;
            vec![check("witness_gap", g >= MIN_WITNESS_GAP, g)]
        }
    })
}

fn checks_value(cs: &[Check]) -> Value {
    Value::Object(cs.iter().map(|c| (c.name.clone(), json!(c.value))).collect())
}

impl Command for Decide2x2Args {
    const NAME: &'static str = "decide2x2";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_pair(data, &self.a, &self.b)
    }

    fn run(&self, data: &Data, _seed: u64) -> Result<Output> {
        let (a, b) = (data.matrix("a")?, data.matrix("b")?);
        let d = two_by_two_decide(a, b, self.tol)?;
        let cs = decision_checks(a, b, &d)?;
        Ok(Output::new(json!({ "decision": d }), checks_value(&cs)))
    }

    fn checks(&self, data: &Data, results: &Value) -> Result<Vec<Check>> {
        decision_checks(data.matrix("a")?, data.matrix("b")?, &stored(results, "decision")?)
    }
}

// ---------------------------------------------------------------- recover-th1

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RecoverTh1Args {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    /// Random vector states compared on top of the basis vectors.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

impl Command for RecoverTh1Args {
    const NAME: &'static str = "recover-th1";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_pair(data, &self.a, &self.b)
    }

    fn run(&self, data: &Data, seed: u64) -> Result<Output> {
        let v = variance_equal_recover(data.matrix("a")?, data.matrix("b")?, self.samples, seed, self.tol)?;
        let warning = (v.case == StructureCase::Indeterminate).then(|| match v.witness {
            Some(_) => format!("variances differ by {:.3e} at the stored witness", v.worst_gap),
            None => "equal variances but neither affine form fits".to_string(),
        });
        let residuals = json!({ "residual": v.residual, "worst_gap": v.worst_gap });
        Ok(Output::new(json!({ "verdict": v }), residuals).warn(warning))
    }

    fn checks(&self, data: &Data, results: &Value) -> Result<Vec<Check>> {
        let (a, b) = (data.matrix("a")?, data.matrix("b")?);
        let v: StructureVerdict = stored(results, "verdict")?;
        let scale = opn(a).max(opn(b)).max(1.0);
        let fit = |c: &Matrix| opn(&(b - &c.scale(v.alpha)).shift(-v.beta));
        Ok(match v.case {
            StructureCase::AffineOfA => {
                let r = fit(a);
                vec![check("affine_fit", r <= v.residual + 1e-12 * scale, r)]
            }
            StructureCase::AffineOfAStar => {
                let r = fit(&a.adjoint());
                vec![check("adjoint_fit", r <= v.residual + 1e-12 * scale, r)]
            }
            StructureCase::Indeterminate => match &v.witness {
                Some(w) => {
                    let g = (dvar(b, w.as_slice())? - dvar(a, w.as_slice())?).abs();
                    vec![check("witness_gap", (g - v.worst_gap).abs() <= 1e-9 * scale * scale, g)]
                }
                None => Vec::new(),
            },
        })
    }
}

// ---------------------------------------------------------------- extract-f

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExtractFArgs {
    /// Normal matrix `a`.
    #[arg(long)]
    pub a: PathBuf,
    /// `b`, expected to be a function of `a`.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Library function to compare the extracted values with.
    #[arg(long)]
    pub f: Option<String>,
    /// Lipschitz constant to test; defaults to the known one of `--f`.
    #[arg(long)]
    pub lipschitz: Option<f64>,
}

impl Command for ExtractFArgs {
    const NAME: &'static str = "extract-f";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_pair(data, &self.a, &self.b)?;
        if let Some(f) = &self.f {
            load_function(data, f)?;
        }
        Ok(())
    }

    fn run(&self, data: &Data, _seed: u64) -> Result<Output> {
        let pts = oplab::variance::extract_on_spectrum(data.matrix("a")?, data.matrix("b")?, self.tol)?;
        let empirical = oplab::variance::pairwise_lipschitz(&pts);
        let radius = pts.iter().map(|p| p.0.norm()).fold(0.0, f64::max);
        let (max_error, known) = match &self.f {
            Some(spec) => with_function(data, spec, |f| {
                let err = pts.iter().map(|(x, y)| (f.complex(*x) - y).norm()).fold(0.0, f64::max);
                Ok((Some(err), f.lipschitz(radius)))
            })?,
            None => (None, None),
        };
        let lip = self.lipschitz.or(known);
        let mut violations = 0usize;
        let mut excess: f64 = f64::NEG_INFINITY;
        if let Some(l) = lip {
            for i in 0..pts.len() {
                for j in 0..i {
                    let e = (pts[i].1 - pts[j].1).norm() - l * (pts[i].0 - pts[j].0).norm();
                    excess = excess.max(e);
                    if e > 1e-8 {
                        violations += 1;
                    }
                }
            }
        }
        let mut t = Table::new(&["alpha_re", "alpha_im", "f_re", "f_im"]);
        for (x, y) in &pts {
            t.push(vec![x.re, x.im, y.re, y.im]);
        }
        let points: Vec<Value> = pts.iter().map(|(x, y)| json!({ "alpha": [x.re, x.im], "value": [y.re, y.im] })).collect();
        let results = json!({ "points": points, "empirical_lipschitz": empirical, "lipschitz": lip, "violations": violations });
        let residuals = json!({ "max_error": max_error, "lipschitz_excess": lip.map(|_| excess.max(0.0)) });
        let warning = (violations > 0).then(|| format!("Lipschitz bound fails on {violations} eigenvalue pairs"));
        Ok(Output::new(results, residuals).warn(warning).with_table(t))
    }
}

// ---------------------------------------------------------------- schur-norm

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mask {
    /// Supremum over all `X`.
    Full,
    /// Supremum over `X` with zero diagonal.
    ZeroDiagonal,
    /// Norm of the off-diagonal part with a free diagonal in the factorization.
    Restricted,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SchurNormArgs {
    /// Multiplier matrix (JSON).
    #[arg(long, conflicts_with_all = ["points", "f"])]
    pub m: Option<PathBuf>,
    /// Points `[[re, im], ...]` for a divided-difference multiplier; needs `--f`.
    #[arg(long, requires = "f")]
    pub points: Option<PathBuf>,
    #[arg(long, requires = "points")]
    pub f: Option<String>,
    #[arg(long, default_value_t = oplab::schur::DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Target bracket width.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Mask::Full)]
    pub mask: Mask,
}

impl SchurNormArgs {
    fn free(&self, n: usize) -> Option<Vec<bool>> {
        (self.mask != Mask::Full).then(|| diagonal_mask(n))
    }
}

impl Command for SchurNormArgs {
    const NAME: &'static str = "schur-norm";

    fn load(&self, data: &mut Data) -> Result<()> {
        match (&self.m, &self.points, &self.f) {
            (Some(m), _, _) => load_matrix(data, "m", m),
            (None, Some(p), Some(f)) => {
                data.points.insert("points".into(), read_json(p)?);
                load_function(data, f)
            }
            _ => Err(Error::Input("give --m, or --points with --f".into())),
        }
    }

    fn run(&self, data: &Data, seed: u64) -> Result<Output> {
        let (m, derived) = match data.matrices.get("m") {
            Some(m) => (m.clone(), false),
            None => {
                let pts = &data.points.get("points").ok_or_else(|| Error::Input("points missing".into()))?.0;
                let spec = self.f.as_deref().unwrap_or_default();
                (with_function(data, spec, |f| divided_difference_matrix(|z| f.complex(z), pts))?.entries, true)
            }
        };
        let n = m.require_square()?;
        let b = match self.mask {
            Mask::Full => schur_norm_bracket(&m, seed, self.restarts, self.tol)?,
            Mask::ZeroDiagonal => masked_bracket(&m, &diagonal_mask(n), seed, self.restarts, self.tol)?,
            Mask::Restricted => restricted_offdiag_bracket(&m, seed, self.restarts, self.tol)?,
        };
        let mut results = json!({ "bracket": b });
        if derived {
            results["matrix"] = value(&m);
        }
        let residuals = json!({ "width": b.width(), "certificate_deviation": b.certificate.deviation() });
        Ok(Output::new(results, residuals).warn(b.warning.clone()))
    }

    fn checks(&self, data: &Data, results: &Value) -> Result<Vec<Check>> {
        let m: Matrix = match data.matrices.get("m") {
            Some(m) => m.clone(),
            None => stored(results, "matrix")?,
        };
        let b: NormBracket = stored(results, "bracket")?;
        let free = self.free(m.rows());
        let wn = opn(&b.witness);
        let ratio = if wn > 0.0 { opn(&m.hadamard(&b.witness)) / wn } else { 0.0 };
        let mut out = vec![
            check("bracket", b.verify(&m, free.as_deref()), b.width()),
            check("witness_ratio", ratio >= b.lower * (1.0 - 1e-9) - 1e-12, ratio),
        ];
        if let Some(free) = &free {
            let leak = b.witness.data().iter().zip(free).filter(|(_, f)| **f).map(|(z, _)| z.norm()).fold(0.0, f64::max);
            out.push(check("witness_support", leak == 0.0 || self.mask == Mask::Restricted, leak));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------- kappa

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KappaArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Also write the witness matrix here.
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

impl Command for KappaArgs {
    const NAME: &'static str = "kappa";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_pair(data, &self.a, &self.b)
    }

    fn run(&self, data: &Data, seed: u64) -> Result<Output> {
        let (a, b) = (data.matrix("a")?, data.matrix("b")?);
        let k = kappa_estimate(a, b, seed, self.restarts)?;
        let da = opn(&(&a.matmul(&k.witness) - &k.witness.matmul(a)));
        let db = opn(&(&b.matmul(&k.witness) - &k.witness.matmul(b)));
        let results = json!({
            "lower": k.lower,
            "estimate": k,
            "witness_path": self.witness.as_ref().map(|p| p.display().to_string()),
        });
        Ok(Output::new(results, json!({ "witness_ratio_error": (db / da - k.lower).abs() })))
    }

    fn checks(&self, data: &Data, results: &Value) -> Result<Vec<Check>> {
        let k: KappaEstimate = stored(results, "estimate")?;
        Ok(vec![check("witness", k.verify(data.matrix("a")?, data.matrix("b")?), k.lower)])
    }

    fn side_files(&self, out: &Output) -> Vec<(PathBuf, Vec<u8>)> {
        let Some(p) = &self.witness else { return Vec::new() };
        let w = &out.results["estimate"]["witness"];
        vec![(p.clone(), serde_json::to_vec_pretty(w).expect("json"))]
    }
}

// ---------------------------------------------------------------- kappa-exact

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KappaExactArgs {
    /// Normal matrix `a`.
    #[arg(long)]
    pub a: PathBuf,
    /// Normal `b` commuting with `a`.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

impl Command for KappaExactArgs {
    const NAME: &'static str = "kappa-exact";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_pair(data, &self.a, &self.b)
    }

    fn run(&self, data: &Data, _seed: u64) -> Result<Output> {
        let k = kappa_exact_normal(data.matrix("a")?, data.matrix("b")?, self.tol)?;
        let residuals = json!({ "width": k.bracket.width(), "certificate_deviation": k.bracket.certificate.deviation() });
        let warning = k.bracket.warning.clone();
        Ok(Output::new(json!({ "kappa": k }), residuals).warn(warning))
    }

    fn checks(&self, _data: &Data, results: &Value) -> Result<Vec<Check>> {
        let k: KappaExact = stored(results, "kappa")?;
        let ok = k.bracket.verify(&k.schur.entries, Some(&k.free_mask()));
        Ok(vec![check("bracket", ok, k.bracket.width())])
    }
}

// ---------------------------------------------------------------- recover-th42

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RecoverTh42Args {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

impl Command for RecoverTh42Args {
    const NAME: &'static str = "recover-th42";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_pair(data, &self.a, &self.b)
    }

    fn run(&self, data: &Data, seed: u64) -> Result<Output> {
        let v = equality_structure_recover(data.matrix("a")?, data.matrix("b")?, seed, self.tol)?;
        let (residual, warning) = match &v.structure {
            EqualityStructure::Rotation { residual, .. } | EqualityStructure::Unitary { residual, .. } => (*residual, None),
            EqualityStructure::Inconclusive { rotation_residual, unitary_residual } => (
                rotation_residual.min(*unitary_residual),
                Some("equal commutator norms but neither structure fits".to_string()),
            ),
        };
        let residuals = json!({ "residual": residual, "kappa_ab_excess": v.kappa_ab - 1.0, "kappa_ba_excess": v.kappa_ba - 1.0 });
        Ok(Output::new(json!({ "verdict": v }), residuals).warn(warning))
    }

    fn checks(&self, data: &Data, results: &Value) -> Result<Vec<Check>> {
        let (a, b) = (data.matrix("a")?, data.matrix("b")?);
        let v: EqualityVerdict = stored(results, "verdict")?;
        let scale = opn(a).max(opn(b)).max(1.0);
        Ok(match &v.structure {
            EqualityStructure::Rotation { sigma, lambda, residual } => {
                let r = opn(&(b - &a.scale(*sigma).shift(*lambda)));
                vec![check("rotation_fit", r <= residual + 1e-12 * scale, r)]
            }
            EqualityStructure::Unitary { alpha, beta, lambda, mu, unitary, residual } => {
                let id = Matrix::identity(unitary.rows());
                let defect = opn(&(&unitary.adjoint_mul(unitary) - &id));
                let fa = opn(&(a - &unitary.adjoint().scale(*alpha).shift(*lambda)));
                let fb = opn(&(b - &unitary.scale(*beta).shift(*mu)));
                let tol = residual + 1e-9 * scale;
                vec![
                    check("unitarity", defect * alpha.norm() <= tol, defect),
                    check("a_fit", fa <= tol, fa),
                    check("b_fit", fb <= tol, fb),
                ]
            }
            EqualityStructure::Inconclusive { .. } => Vec::new(),
        })
    }
}

// ---------------------------------------------------------------- amplify

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AmplifyArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    /// Reference constant; computed exactly for commuting normal pairs otherwise.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub copies: Vec<usize>,
    #[arg(long, default_value_t = 30)]
    pub samples: usize,
}

fn amplified_ratio(a: &Matrix, b: &Matrix, r: &AmplifiedReport) -> f64 {
    let (aa, bb) = (a.amplify(r.copies), b.amplify(r.copies));
    let w = &r.witness;
    opn(&(&bb.matmul(w) - &w.matmul(&bb))) / opn(&(&aa.matmul(w) - &w.matmul(&aa)))
}

impl Command for AmplifyArgs {
    const NAME: &'static str = "amplify";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_pair(data, &self.a, &self.b)
    }

    fn run(&self, data: &Data, seed: u64) -> Result<Output> {
        let (a, b) = (data.matrix("a")?, data.matrix("b")?);
        let mut warnings = Vec::new();
        let (kappa, source) = match self.kappa {
            Some(k) => (k, "given"),
            None => match kappa_exact_normal(a, b, 1e-6) {
                Ok(k) => (k.bracket.upper, "exact"),
                Err(_) => {
                    warnings.push("reference constant is a lower estimate; excesses may be spurious".to_string());
                    (kappa_estimate(a, b, seed, 20)?.lower, "estimate")
                }
            },
        };
        let mut t = Table::new(&["copies", "worst_ratio", "kappa"]);
        let mut reports = Vec::new();
        let mut excess: f64 = f64::NEG_INFINITY;
        for (k, &c) in self.copies.iter().enumerate() {
            let r = amplified_check(a, b, kappa, c, seed.wrapping_add(k as u64), self.samples)?;
            t.push(vec![c as f64, r.worst_ratio, kappa]);
            excess = excess.max(r.excess());
            reports.push(r);
        }
        if excess > 1e-6 * kappa.max(1.0) {
            warnings.push(format!("amplified ratio exceeds the constant by {excess:.3e}"));
        }
        let results = json!({ "kappa": kappa, "kappa_source": source, "reports": reports });
        let mut out = Output::new(results, json!({ "max_excess": excess })).with_table(t);
        out.warnings = warnings;
        Ok(out)
    }

    fn checks(&self, data: &Data, results: &Value) -> Result<Vec<Check>> {
        let (a, b) = (data.matrix("a")?, data.matrix("b")?);
        let reports: Vec<AmplifiedReport> = stored(results, "reports")?;
        Ok(reports
            .iter()
            .map(|r| {
                let x = amplified_ratio(a, b, r);
                check(format!("witness_{}", r.copies), (x - r.worst_ratio).abs() <= 1e-9 * r.worst_ratio.max(1.0), x)
            })
            .collect())
    }
}

// ---------------------------------------------------------------- Cauchy-Green

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExtensionOpts {
    /// Library function: id, const(c), square, abs, absPow(p), spline(path).
    #[arg(long)]
    pub f: String,
    /// Sampling step of the compactly supported `f`.
    #[arg(long, default_value_t = 1e-3)]
    pub fstep: f64,
    /// Inner radius of the vertical cutoff.
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Quadrature nodes of the mollifier.
    #[arg(long, default_value_t = 128)]
    pub nodes: usize,
}

impl ExtensionOpts {
    fn extension(&self, data: &Data) -> Result<ExtensionFunction> {
        let f = with_function(data, &self.f, |f| f.compact(self.fstep))?;
        ExtensionFunction::new(f, MollifierConfig { delta: self.delta, nodes: self.nodes })
    }
}

/// `f(a)` from the spectral decomposition, the oracle for the quadrature.
fn spectral_oracle(a: &Matrix, ext: &ExtensionFunction) -> Result<Matrix> {
    apply_function_spectral(a, |z| C64::new(ext.function().eval(z.re), 0.0), DEFAULT_TOL)
}

fn orders(h: &[f64], e: &[f64]) -> Vec<f64> {
    (1..h.len()).map(|k| (e[k - 1] / e[k]).ln() / (h[k - 1] / h[k]).ln()).collect()
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub ext: ExtensionOpts,
    /// Lattice spacing of the sampled extension.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
}

impl Command for ExtendArgs {
    const NAME: &'static str = "extend";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_function(data, &self.ext.f)
    }

    fn run(&self, data: &Data, _seed: u64) -> Result<Output> {
        let ext = self.ext.extension(data)?;
        let s = ext.sample(self.step)?;
        let mut t = Table::new(&["x", "y", "g_re", "g_im", "dbar_re", "dbar_im", "dbar_fd_re", "dbar_fd_im"]);
        let nx = s.xs.len();
        for (j, &y) in s.ys.iter().enumerate() {
            for (i, &x) in s.xs.iter().enumerate() {
                let k = j * nx + i;
                t.push(vec![x, y, s.g[k].re, s.g[k].im, s.dbar[k].re, s.dbar[k].im, s.dbar_fd[k].re, s.dbar_fd[k].im]);
            }
        }
        let results = json!({
            "config": s.config,
            "support_box": s.support_box,
            "k": s.k,
            "step": s.step,
            "lattice": [s.xs.len(), s.ys.len()],
        });
        let residuals = json!({
            "dbar_discrepancy": s.discrepancy,
            "discrepancy_over_step": s.discrepancy_constant,
            "axis_dbar_max": s.axis_max,
            "axis_mismatch": s.axis_mismatch,
        });
        Ok(Output::new(results, residuals).with_table(t))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KappaIntegralArgs {
    #[command(flatten)]
    pub ext: ExtensionOpts,
    /// Base grid step of the planar quadrature.
    #[arg(long, default_value_t = 0.02)]
    pub h: f64,
    /// Refinement depth near the sup point.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// Candidate points of `K` per unit length.
    #[arg(long, default_value_t = 2)]
    pub samples: usize,
    /// Hölder exponent of the envelope `|dbar g| <= beta dist^alpha`.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

impl Command for KappaIntegralArgs {
    const NAME: &'static str = "kappa-integral";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_function(data, &self.ext.f)
    }

    fn run(&self, data: &Data, _seed: u64) -> Result<Output> {
        let ext = self.ext.extension(data)?;
        let grid = ext.grid(self.h)?;
        let k = kappa_integral(&ext, &grid, self.levels, self.samples)?;
        let env = holder_envelope(|z| ext.dbar(z).norm(), &ext.k(), ext.support_box(), &grid, self.alpha)?;
        let slack = env.bound + k.total.refinement_error - k.total.value;
        let mut t = Table::new(&["depth", "total", "mollified", "cutoff"]);
        for d in 0..k.total.by_depth.len() {
            let at = |v: &[f64]| v.get(d).copied().unwrap_or(f64::NAN);
            t.push(vec![d as f64, k.total.by_depth[d], at(&k.mollified.by_depth), at(&k.cutoff.by_depth)]);
        }
        let warning = (slack < 0.0).then(|| format!("kappa integral exceeds the Hölder envelope by {:.3e}", -slack));
        let residuals = json!({ "refinement_error": k.total.refinement_error, "envelope_slack": slack });
        Ok(Output::new(json!({ "kappa": k, "envelope": env }), residuals).warn(warning).with_table(t))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CgCalcArgs {
    /// Normal matrix with real spectrum in `[-1, 1]`.
    #[arg(long)]
    pub a: PathBuf,
    #[command(flatten)]
    pub ext: ExtensionOpts,
    /// Grid steps, coarse to fine.
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.01")]
    pub h: Vec<f64>,
}

impl Command for CgCalcArgs {
    const NAME: &'static str = "cg-calc";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_matrix(data, "a", &self.a)?;
        load_function(data, &self.ext.f)
    }

    fn run(&self, data: &Data, _seed: u64) -> Result<Output> {
        let a = data.matrix("a")?;
        let ext = self.ext.extension(data)?;
        let oracle = spectral_oracle(a, &ext)?;
        let mut t = Table::new(&["h", "error"]);
        let (mut runs, mut errs) = (Vec::new(), Vec::new());
        for &h in &self.h {
            let q = cg_quadrature(a, &ext, &ext.grid(h)?)?;
            let e = opn(&(&q.value - &oracle));
            t.push(vec![h, e]);
            errs.push(e);
            runs.push(json!({ "h": h, "cells": q.cells, "excluded_area": q.excluded_area, "value": q.value, "error": e }));
        }
        let ord = orders(&self.h, &errs);
        let warning = ord.iter().any(|o| !(*o > 0.0)).then(|| "error does not decrease under refinement".to_string());
        let results = json!({ "oracle": oracle, "runs": runs, "orders": ord });
        Ok(Output::new(results, json!({ "errors": errs })).warn(warning).with_table(t))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TfaVerifyArgs {
    /// Normal matrix with real spectrum in `[-1, 1]`.
    #[arg(long)]
    pub a: PathBuf,
    #[command(flatten)]
    pub ext: ExtensionOpts,
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    pub h: Vec<f64>,
    /// Random test matrices `x`.
    #[arg(long, default_value_t = 4)]
    pub samples: usize,
}

impl Command for TfaVerifyArgs {
    const NAME: &'static str = "tfa-verify";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_matrix(data, "a", &self.a)?;
        load_function(data, &self.ext.f)
    }

    fn run(&self, data: &Data, seed: u64) -> Result<Output> {
        let a = data.matrix("a")?;
        let ext = self.ext.extension(data)?;
        let fa = spectral_oracle(a, &ext)?;
        let mut t = Table::new(&["h", "res1", "res2"]);
        let mut runs = Vec::new();
        for &h in &self.h {
            let q = cg_quadrature(a, &ext, &ext.grid(h)?)?;
            let r = verify_intertwine(a, &fa, &q.map, self.samples, seed)?;
            t.push(vec![h, r.res1, r.res2]);
            runs.push(json!({ "h": h, "residuals": r, "calculus_error": opn(&(&q.value - &fa)) }));
        }
        let residuals = json!({
            "res1": runs.iter().map(|r| r["residuals"]["res1"].clone()).collect::<Vec<_>>(),
            "res2": runs.iter().map(|r| r["residuals"]["res2"].clone()).collect::<Vec<_>>(),
        });
        Ok(Output::new(json!({ "runs": runs }), residuals).with_table(t))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ContourTfaArgs {
    /// Matrix with spectrum in the open unit disc.
    #[arg(long)]
    pub a: PathBuf,
    /// Real power-series coefficients `c0, c1, ...`.
    #[arg(long, value_delimiter = ',', default_value = "0,0,1")]
    pub coeffs: Vec<f64>,
    /// Dilation `r < 1`.
    #[arg(long, default_value_t = 0.9)]
    pub r: f64,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128")]
    pub nodes: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    pub samples: usize,
}

impl Command for ContourTfaArgs {
    const NAME: &'static str = "contour-tfa";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_matrix(data, "a", &self.a)
    }

    fn run(&self, data: &Data, seed: u64) -> Result<Output> {
        let a = data.matrix("a")?;
        let coeffs: Vec<C64> = self.coeffs.iter().map(|&c| C64::new(c, 0.0)).collect();
        let reference = power_series_at(&coeffs, &a.scale_real(self.r))?;
        let mut t = Table::new(&["nodes", "internal", "reference"]);
        let mut runs = Vec::new();
        for &n in &self.nodes {
            let dc = disc_contour_t(a, &coeffs, self.r, n)?;
            let res = contour_residuals(&dc, a, &reference, self.samples, seed)?;
            t.push(vec![n as f64, res.internal, res.reference]);
            runs.push(json!({ "nodes": n, "radius": dc.radius, "residuals": res }));
        }
        let last = runs.last().map(|r| r["residuals"].clone()).unwrap_or(Value::Null);
        Ok(Output::new(json!({ "f_ra": reference, "runs": runs }), json!({ "finest": last })).with_table(t))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BesovArgs {
    /// Library function: id, const(c), square, abs, absPow(p), spline(path).
    #[arg(long)]
    pub f: String,
    #[arg(long, default_value_t = 1e-3)]
    pub fstep: f64,
    /// Also scan the Hölder class of `f'` with this exponent on `[-1, 1]`.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Pair budget for the class scan.
    #[arg(long, default_value_t = 5000)]
    pub budget: usize,
}

impl Command for BesovArgs {
    const NAME: &'static str = "besov";

    fn load(&self, data: &mut Data) -> Result<()> {
        load_function(data, &self.f)
    }

    fn run(&self, data: &Data, seed: u64) -> Result<Output> {
        let (report, class) = with_function(data, &self.f, |f| {
            let report = besov_criterion(&f.compact(self.fstep)?);
            let class = match self.alpha {
                Some(alpha) => {
                    let x: Vec<f64> = (0..=400).map(|i| -1.0 + i as f64 / 200.0).collect();
                    let y: Vec<f64> = x.iter().map(|&t| f.real(t)).collect();
                    Some(class_membership(&x, &y, alpha, self.budget, seed)?)
                }
                None => None,
            };
            Ok((report, class))
        })?;
        let mut t = Table::new(&["h", "delta_norm"]);
        for (h, d) in report.h.iter().zip(&report.delta_norm) {
            t.push(vec![*h, *d]);
        }
        let mut warnings = Vec::new();
        if !report.convergent() {
            warnings.push(format!("tail slope {:.3} does not give a convergent integral", report.tail_slope));
        }
        if class.as_ref().is_some_and(|c| c.diverging) {
            warnings.push("class constant grows under sampling refinement".to_string());
        }
        let residuals = json!({ "tail_slope": report.tail_slope });
        let mut out = Output::new(json!({ "besov": report, "class": class }), residuals).with_table(t);
        out.warnings = warnings;
        Ok(out)
    }
}
