use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use oplab::linalg::vector::complex_vec;
use oplab::{Error, Matrix, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::funcs::Samples;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::DimensionMismatch { .. } => EXIT_INPUT,
        Error::Derivative(_) | Error::Resolution(_) | Error::Divergence(_) | Error::Convergence(_) => EXIT_CONVERGENCE,
        _ => EXIT_PRECONDITION,
    }
}

/// Machine-readable error line for stderr.
pub fn error_json(e: &Error) -> String {
    serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": exit_code(e) } })
        .to_string()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Points(#[serde(with = "complex_vec")] pub Vec<C64>);

/// Everything a command reads from disk, embedded in its report so the run
/// can be replayed without the original files.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Data {
    #[serde(default)]
    pub matrices: BTreeMap<String, Matrix>,
    #[serde(default)]
    pub points: BTreeMap<String, Points>,
    #[serde(default)]
    pub samples: BTreeMap<String, Samples>,
    #[serde(default)]
    pub states: BTreeMap<String, oplab::variance::StateSpec>,
}

impl Data {
    pub fn matrix(&self, key: &str) -> oplab::Result<&Matrix> {
        self.matrices.get(key).ok_or_else(|| Error::Input(format!("matrix {key:?} missing from the inputs")))
    }
}

/// CSV table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| format!("{v:e}")))?;
        }
        Ok(w.into_inner()?)
    }
}

/// What a command produces before it is wrapped into a report.
#[derive(Debug, Clone)]
pub struct Output {
    pub results: Value,
    pub residuals: Value,
    pub warnings: Vec<String>,
    pub table: Option<Table>,
}

impl Output {
    pub fn new(results: Value, residuals: Value) -> Self {
        Self { results, residuals, warnings: Vec::new(), table: None }
    }

    pub fn warn(mut self, w: Option<String>) -> Self {
        self.warnings.extend(w);
        self
    }

    pub fn with_table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub args: Value,
    pub data: Data,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub timestamp: String,
    pub seed: u64,
    pub inputs: Inputs,
    pub results: Value,
    pub residuals: Value,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_data: Option<String>,
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> oplab::Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}
