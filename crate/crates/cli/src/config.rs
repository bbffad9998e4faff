//! `run --config`: a JSON experiment description turned into an ordinary
//! command line, so defaults and validation live in one place.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use oplab::{Error, Result};
use serde::Deserialize;
use serde_json::Value;

use crate::funcs::FunctionSpec;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: String,
    #[serde(default)]
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub strict: bool,
    /// Matrix and sample files by option name, plus `f` for a library function.
    #[serde(default)]
    pub inputs: BTreeMap<String, String>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub grid: BTreeMap<String, Value>,
    /// Any remaining subcommand options.
    #[serde(default)]
    pub options: BTreeMap<String, Value>,
}

fn rebase(base: &Path, p: &Path) -> PathBuf {
    if p.is_relative() {
        base.join(p)
    } else {
        p.to_path_buf()
    }
}

fn option_value(key: &str, v: &Value) -> Result<Option<String>> {
    Ok(Some(match v {
        Value::Bool(true) => return Ok(None),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(|x| match x {
                Value::Number(n) => Ok(n.to_string()),
                Value::String(s) => Ok(s.clone()),
                _ => Err(Error::Input(format!("option {key}: list entries must be numbers or strings"))),
            })
            .collect::<Result<Vec<_>>>()?
            .join(","),
        _ => return Err(Error::Input(format!("option {key}: unsupported value {v}"))),
    }))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        crate::report::read_json(path)
    }

    /// The equivalent argument vector, with every path made relative to
    /// `base` (the directory holding the config file).
    pub fn argv(&self, base: &Path) -> Result<Vec<String>> {
        if matches!(self.subcommand.as_str(), "run" | "verify") {
            return Err(Error::Input(format!("subcommand {:?} cannot be run from a config", self.subcommand)));
        }
        let mut argv = vec!["oplab".to_string(), "--seed".into(), self.seed.to_string()];
        argv.push("--out".into());
        argv.push(rebase(base, &self.output).display().to_string());
        if let Some(c) = &self.csv {
            argv.push("--csv".into());
            argv.push(rebase(base, c).display().to_string());
        }
        if self.strict {
            argv.push("--strict".into());
        }
        argv.push(self.subcommand.clone());

        let mut seen = std::collections::BTreeSet::new();
        let mut push = |argv: &mut Vec<String>, key: &str, val: Option<String>| -> Result<()> {
            if !seen.insert(key.to_string()) {
                return Err(Error::Input(format!("option {key} given twice")));
            }
            argv.push(format!("--{}", key.replace('_', "-")));
            argv.extend(val);
            Ok(())
        };
        for (k, v) in &self.inputs {
            let resolved = if k == "f" {
                FunctionSpec::parse(v)?.rebased(base).to_string()
            } else {
                rebase(base, Path::new(v)).display().to_string()
            };
            push(&mut argv, k, Some(resolved))?;
        }
        for (k, v) in &self.tolerances {
            push(&mut argv, k, Some(v.to_string()))?;
        }
        for (k, v) in self.grid.iter().chain(&self.options) {
            if *v == Value::Bool(false) {
                continue;
            }
            push(&mut argv, k, option_value(k, v)?)?;
        }
        Ok(argv)
    }
}
