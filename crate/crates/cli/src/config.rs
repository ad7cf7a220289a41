//! Run configuration: a TOML file merged with command-line overrides.
//!
//! A config file looks like
//!
//! ```toml
//! experiment = "modes"
//! output = "runs/modes"
//! seed = 0
//!
//! [parameters]
//! N = 50
//! d = 0.3
//! pol = "parallel"
//! ```
//!
//! Flags win over file values. Lengths given as `d` are in units of `λ0`;
//! everything else follows `k0 = Γ0 = 1`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use toml::Value;

use crate::error::{CliError, Result};
use crate::experiments::Experiment;

/// Value type of a parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Int,
    Float,
    Choice(&'static [&'static str]),
    IntList,
    FloatList,
}

impl Kind {
    pub fn describe(&self) -> String {
        match self {
            Kind::Int => "integer".into(),
            Kind::Float => "number".into(),
            Kind::Choice(c) => format!("one of {}", c.join("|")),
            Kind::IntList => "list of integers".into(),
            Kind::FloatList => "list of numbers".into(),
        }
    }
}

/// One key of an experiment schema; `default` is a TOML literal.
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

/// Validated parameter values, keyed by name.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    fn get(&self, name: &str) -> &Value {
        // Resolution fills every schema key, and experiments only ask for their own.
        self.0
            .get(name)
            .unwrap_or_else(|| panic!("parameter `{name}` missing from the schema"))
    }

    pub fn int(&self, name: &str) -> usize {
        self.get(name)
            .as_integer()
            .map(|v| v as usize)
            .expect("validated integer")
    }

    pub fn float(&self, name: &str) -> f64 {
        self.get(name).as_float().expect("validated number")
    }

    pub fn text(&self, name: &str) -> &str {
        self.get(name).as_str().expect("validated choice")
    }

    pub fn ints(&self, name: &str) -> Vec<usize> {
        let list = self.get(name).as_array().expect("validated list");
        list.iter()
            .map(|v| v.as_integer().expect("validated integer") as usize)
            .collect()
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        let list = self.get(name).as_array().expect("validated list");
        list.iter()
            .map(|v| v.as_float().expect("validated number"))
            .collect()
    }

    /// Replaces one value, checked against the schema of `experiment`.
    pub fn set(&mut self, experiment: Experiment, name: &str, value: Value) -> Result<()> {
        let key = lookup(experiment, name)?;
        self.0.insert(name.to_string(), coerce(&key, value)?);
        Ok(())
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub parameters: Params,
    pub output: PathBuf,
    /// Reserved; every algorithm here is deterministic.
    pub seed: u64,
}

/// Raw settings from the command line, before merging.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub experiment: Option<String>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    /// `(key, text)` pairs; text is read as a TOML value, or as a bare string.
    pub parameters: Vec<(String, String)>,
}

fn lookup(experiment: Experiment, name: &str) -> Result<Key> {
    experiment
        .schema()
        .iter()
        .find(|k| k.name == name)
        .copied()
        .ok_or_else(|| {
            let known: Vec<&str> = experiment.schema().iter().map(|k| k.name).collect();
            CliError::schema(format!(
                "parameters.{name}: not a key of `{}` (expected one of: {})",
                experiment.name(),
                known.join(", ")
            ))
        })
}

fn coerce(key: &Key, value: Value) -> Result<Value> {
    let bad = |v: &Value| {
        CliError::schema(format!(
            "parameters.{}: expected {}, got `{v}`",
            key.name,
            key.kind.describe()
        ))
    };
    let int = |v: &Value| match v {
        Value::Integer(i) if *i >= 0 => Ok(Value::Integer(*i)),
        _ => Err(bad(v)),
    };
    let float = |v: &Value| match v {
        Value::Integer(i) => Ok(Value::Float(*i as f64)),
        Value::Float(f) if f.is_finite() => Ok(Value::Float(*f)),
        _ => Err(bad(v)),
    };
    match key.kind {
        Kind::Int => int(&value),
        Kind::Float => float(&value),
        Kind::Choice(options) => match &value {
            Value::String(s) if options.contains(&s.as_str()) => Ok(value),
            _ => Err(bad(&value)),
        },
        Kind::IntList | Kind::FloatList => {
            let items = value.as_array().ok_or_else(|| bad(&value))?;
            if items.is_empty() {
                return Err(CliError::schema(format!(
                    "parameters.{}: list must not be empty",
                    key.name
                )));
            }
            let list = if key.kind == Kind::IntList {
                items.iter().map(int).collect::<Result<_>>()?
            } else {
                items.iter().map(float).collect::<Result<_>>()?
            };
            Ok(Value::Array(list))
        }
    }
}

/// Reads a command-line value: TOML syntax when it parses, else a bare string.
pub fn parse_flag_value(text: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {text}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(text.to_string()))
}

/// Loads a config file into a table.
pub fn read_file(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::schema(format!("config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::schema(format!("config {}: {e}", path.display())))
}

/// Merges defaults, file values and overrides (in that order) and validates
/// the result. Nothing touches the filesystem except reading `file`.
pub fn resolve(file: Option<toml::Table>, overrides: Overrides) -> Result<RunConfig> {
    let mut file = file.unwrap_or_default();
    let take_str = |t: &mut toml::Table, k: &str| -> Result<Option<String>> {
        match t.remove(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(CliError::schema(format!(
                "{k}: expected a string, got `{v}`"
            ))),
        }
    };
    let file_experiment = take_str(&mut file, "experiment")?;
    let file_output = take_str(&mut file, "output")?;
    let file_seed = match file.remove("seed") {
        None => None,
        Some(Value::Integer(s)) if s >= 0 => Some(s as u64),
        Some(v) => {
            return Err(CliError::schema(format!(
                "seed: expected a non-negative integer, got `{v}`"
            )))
        }
    };
    let file_params = match file.remove("parameters") {
        None => toml::Table::new(),
        Some(Value::Table(t)) => t,
        Some(v) => {
            return Err(CliError::schema(format!(
                "parameters: expected a table, got `{v}`"
            )))
        }
    };
    if let Some(k) = file.keys().next() {
        return Err(CliError::schema(format!(
            "{k}: unknown top-level key (expected experiment, output, seed, parameters)"
        )));
    }

    let name = overrides.experiment.or(file_experiment).ok_or_else(|| {
        CliError::schema("experiment: required (use --experiment or the config file)")
    })?;
    let experiment: Experiment = name.parse()?;

    let mut params = Params(BTreeMap::new());
    for key in experiment.schema() {
        let v = parse_flag_value(key.default);
        params.0.insert(
            key.name.to_string(),
            coerce(key, v).expect("schema defaults are valid"),
        );
    }
    for (k, v) in file_params {
        params.set(experiment, &k, v)?;
    }
    for (k, text) in overrides.parameters {
        params.set(experiment, &k, parse_flag_value(&text))?;
    }
    experiment.validate(&params)?;

    let output = overrides
        .output
        .or(file_output.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("runs/{}", experiment.name())));
    Ok(RunConfig {
        experiment,
        parameters: params,
        output,
        seed: overrides.seed.or(file_seed).unwrap_or(0),
    })
}
