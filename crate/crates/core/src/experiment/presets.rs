use serde::Deserialize;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

macro_rules! embedded {
    ($dir:literal: $($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/", $dir, "/", $name, ".toml")))),*]
    };
}

const PRESETS: &[(&str, &str)] = embedded!("presets":
    "hm8", "hm12", "hm16",
    "tfim1_8", "tfim1_12", "tfim1_16",
    "tfim2_8", "tfim2_12", "tfim2_16",
    "bhm8", "bhm16",
    "tfim2_12_acc",
);

const SUITES: &[(&str, &str)] = embedded!("suites":
    "hm12_compare",
    "tfim1_12_compare",
    "tfim2_12_compare",
    "init_state_study",
    "shots_study",
    "blocks_bp_study",
);

/// Benchmark-table presets that train in minutes on one core.
pub const TABLE2_DESK: &[&str] = &["hm8", "tfim1_8", "tfim2_8", "bhm8"];
/// Remaining benchmark-table presets (12 and 16 qubits).
pub const TABLE2_FULL: &[&str] = &["hm12", "tfim1_12", "tfim2_12", "hm16", "tfim1_16", "tfim2_16", "bhm16"];

pub fn table2_presets(full: bool) -> Vec<&'static str> {
    let mut v = TABLE2_DESK.to_vec();
    if full {
        v.extend_from_slice(TABLE2_FULL);
    }
    v
}

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn suite_names() -> impl Iterator<Item = &'static str> {
    SUITES.iter().map(|(n, _)| *n)
}

pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let src = preset_source(name).ok_or_else(|| {
        Error::Config(format!(
            "unknown preset `{name}`; available: {}",
            preset_names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    ExperimentConfig::from_toml_str(src)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    note: Option<String>,
    base: toml::Table,
    #[serde(rename = "variant")]
    variants: Vec<toml::Table>,
}

/// A named group of configs whose outputs are compared with each other.
#[derive(Clone, Debug, PartialEq)]
pub struct Suite {
    pub name: String,
    pub description: String,
    pub variants: Vec<ExperimentConfig>,
}

/// Recursively overlays `top` onto `base`: tables merge, everything else
/// (including arrays) is replaced.
pub fn merge_tables(base: &mut toml::Table, top: &toml::Table) {
    for (k, v) in top {
        match (base.get_mut(k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => merge_tables(b, t),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

pub fn parse_suite(text: &str) -> Result<Suite> {
    let file: SuiteFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if file.variants.is_empty() {
        return Err(Error::Config(format!("suite `{}` has no variants", file.name)));
    }
    let mut variants = Vec::with_capacity(file.variants.len());
    for v in &file.variants {
        let mut t = file.base.clone();
        if let Some(note) = &file.note {
            t.entry("note").or_insert_with(|| toml::Value::String(note.clone()));
        }
        merge_tables(&mut t, v);
        let text = toml::to_string(&t).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = ExperimentConfig::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("suite `{}` variant: {e}", file.name)))?;
        if variants.iter().any(|c: &ExperimentConfig| c.name == cfg.name) {
            return Err(Error::Config(format!("suite `{}` repeats variant `{}`", file.name, cfg.name)));
        }
        variants.push(cfg);
    }
    Ok(Suite {
        name: file.name,
        description: file.description,
        variants,
    })
}

pub fn suite(name: &str) -> Result<Suite> {
    let src = SUITES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s).ok_or_else(|| {
        Error::Config(format!(
            "unknown suite `{name}`; available: {}",
            suite_names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    parse_suite(src)
}
