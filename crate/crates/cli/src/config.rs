//! Experiment configuration: a TOML file whose `[params]` table uses the
//! subcommand's long flag names, overridden by flags given on the command
//! line.
//!
//! ```toml
//! experiment = "gowers"   # optional; must match the subcommand
//! seed = 7
//! out = "runs/u2"         # writes runs/u2.csv and runs/u2.json
//! threads = 4
//!
//! [limits]                # any of the core work limits
//! max_work = 100000000
//!
//! [params]
//! N = "8,16,32"           # lists may be strings or arrays
//! s = 3
//! f = "char:k=3"
//! ```

use std::path::{Path, PathBuf};

use ergolab::Limits;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub limits: Option<Limits>,
    #[serde(default)]
    pub params: toml::Table,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved settings shared by all subcommands.
#[derive(Debug, Clone, Serialize)]
pub struct Runtime {
    pub seed: u64,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub limits: Limits,
}

/// Overlays the non-default flag values of `cli` onto the file parameters
/// and deserializes the result. File keys may use `_` in place of `-`.
pub fn merge<T>(file: &toml::Table, cli: &T) -> Result<(T, Value)>
where
    T: Serialize + DeserializeOwned,
{
    let mut merged: Map<String, Value> = match serde_json::to_value(file).map_err(|e| CliError::Config(e.to_string()))? {
        Value::Object(m) => m.into_iter().map(|(k, v)| (k.replace('_', "-"), v)).collect(),
        _ => Map::new(),
    };
    if let Value::Object(flags) = serde_json::to_value(cli).map_err(|e| CliError::Config(e.to_string()))? {
        for (k, v) in flags {
            match v {
                Value::Null | Value::Bool(false) => {}
                v => {
                    merged.insert(k, v);
                }
            }
        }
    }
    let value = Value::Object(merged);
    let parsed = serde_json::from_value(value.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((parsed, value))
}

/// Accepts a string, a number or an array and renders it as the textual
/// list format used on the command line.
pub fn de_text<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<String>, D::Error> {
    fn render(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Array(items) => items.iter().map(render).collect::<Vec<_>>().join(","),
            other => other.to_string(),
        }
    }
    let v = Option::<Value>::deserialize(d)?;
    Ok(v.filter(|v| !v.is_null()).map(|v| render(&v)))
}
