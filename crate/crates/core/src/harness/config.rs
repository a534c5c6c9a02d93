//! TOML run configuration.
//!
//! Top-level keys and sections are the scenario fields (`band`, `fiber`, `mod`, ...). The extra
//! sections `sweep`, `figure3`, `figure4` and `power` configure the individual commands. Every
//! key is optional; missing ones keep their defaults.

use serde::Serialize;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use super::figures::{Figure3Spec, Figure4Spec};
use super::scenario::{FronthaulScenario, Seeds};
use super::sweep::SweepSpec;
use crate::error::{Error, Result};
use crate::powermodel::PowerParams;

const COMMAND_SECTIONS: [&str; 4] = ["sweep", "figure3", "figure4", "power"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: FronthaulScenario,
    pub sweep: SweepSpec,
    pub figure3: Figure3Spec,
    pub figure4: Figure4Spec,
    pub power: PowerParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: FronthaulScenario::default(),
            sweep: SweepSpec::default(),
            figure3: Figure3Spec::default(),
            figure4: Figure4Spec::default(),
            power: PowerParams::shipped_default(),
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

fn to_table<T: Serialize>(v: &T) -> Result<Table> {
    Table::try_from(v).map_err(config_err)
}

fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Parse `value` as a TOML literal, falling back to a bare string.
fn parse_value(value: &str) -> Value {
    format!("v = {value}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_string()))
}

/// Apply a `dotted.key=value` override.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key '{key}'")));
    }
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut node = table;
    for p in parents {
        let entry = node.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("'{p}' in '{key}' is not a section")))?;
    }
    node.insert(last.to_string(), parse_value(value.trim()));
    Ok(())
}

impl RunConfig {
    /// Defaults, then `text`, then each override in order.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let user: Table = text.parse().map_err(config_err)?;
        let defaults = RunConfig::default();
        let mut scenario = to_table(&defaults.scenario)?;
        for s in COMMAND_SECTIONS {
            let t = match s {
                "sweep" => to_table(&defaults.sweep)?,
                "figure3" => to_table(&defaults.figure3)?,
                "figure4" => to_table(&defaults.figure4)?,
                _ => to_table(&defaults.power)?,
            };
            scenario.insert(s.to_string(), Value::Table(t));
        }
        merge(&mut scenario, user);
        for o in overrides {
            apply_override(&mut scenario, o)?;
        }
        let mut section = |name: &str| scenario.remove(name).unwrap_or_else(|| Value::Table(Table::new()));
        let sweep = section("sweep").try_into().map_err(config_err)?;
        let figure3 = section("figure3").try_into().map_err(config_err)?;
        let figure4 = section("figure4").try_into().map_err(config_err)?;
        let power: PowerParams = section("power").try_into().map_err(config_err)?;
        let scenario: FronthaulScenario = Value::Table(scenario).try_into().map_err(config_err)?;
        power.validate()?;
        Ok(Self {
            scenario,
            sweep,
            figure3,
            figure4,
            power,
        })
    }

    pub fn load(path: Option<&std::path::Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml(&text, overrides)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.scenario.seeds = Seeds::all(seed);
        self
    }

    /// Hex SHA-256 of the canonical JSON of the whole configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
