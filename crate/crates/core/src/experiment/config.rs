use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ansatz::{matched_blocks, AnsatzFamily, HsaMode, InitScheme};
use crate::error::{Error, Result};
use crate::hamiltonians::ModelSpec;
use crate::optimize::{AdamConfig, GradientMethod, StepSchedule};
use crate::statevec::ReferenceState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzConfig {
    pub family: AnsatzFamily,
    /// Explicit block count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    /// Block count matched to the CX budget of an EHA with this many blocks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_eha_blocks: Option<usize>,
    #[serde(default)]
    pub hsa_mode: HsaMode,
}

impl AnsatzConfig {
    pub fn resolve_blocks(&self, num_qubits: usize) -> Result<usize> {
        match (self.blocks, self.matched_eha_blocks) {
            (Some(b), None) => Ok(b),
            (None, Some(l)) => Ok(matched_blocks(l, num_qubits)?.for_family(self.family)),
            _ => Err(Error::Config(
                "ansatz needs exactly one of `blocks` or `matched_eha_blocks`".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyOperator {
    NumberOp,
    #[serde(alias = "S_z")]
    SZ,
}

impl PenaltyOperator {
    pub fn name(self) -> &'static str {
        match self {
            PenaltyOperator::NumberOp => "number_op",
            PenaltyOperator::SZ => "s_z",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyConfig {
    pub operator: PenaltyOperator,
    pub target: f64,
    pub beta: f64,
}

/// Reference values a run is compared against in reports.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublishedRow {
    pub label: String,
    pub ground_energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_best: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_best: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_std: Option<f64>,
}

fn default_realizations() -> usize {
    10
}

fn default_entropy_base() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub model: ModelSpec,
    pub ansatz: AnsatzConfig,
    /// Defaults to the family's protocol initialization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitScheme>,
    pub schedule: StepSchedule,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Shots per Pauli term; absent means exact expectations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<PenaltyConfig>,
    /// Defaults to the family's usual reference state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_state: Option<ReferenceState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub optimizer: AdamConfig,
    #[serde(default)]
    pub gradient: GradientMethod,
    #[serde(default = "default_entropy_base")]
    pub entropy_base: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published: Option<PublishedRow>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative external-model paths resolve against
    /// the file's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(dir) = path.parent() {
            cfg.model.resolve_paths(dir);
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Structural checks that need no model construction.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("invalid experiment name `{}`", self.name));
        }
        if self.realizations == 0 {
            return bad("realizations must be >= 1".into());
        }
        if self.shots == Some(0) {
            return bad("shots must be >= 1".into());
        }
        if let Some(p) = &self.penalty {
            if !(p.beta >= 0.0) || !p.target.is_finite() {
                return bad(format!("invalid penalty beta={} target={}", p.beta, p.target));
            }
        }
        if !(self.entropy_base > 0.0 && self.entropy_base != 1.0 && self.entropy_base.is_finite()) {
            return bad(format!("invalid entropy_base {}", self.entropy_base));
        }
        if self.shots.is_some() && self.gradient == GradientMethod::Adjoint {
            return bad("adjoint gradients need exact expectations; drop `shots` or use parameter_shift".into());
        }
        self.optimizer.validate()?;
        match (self.ansatz.blocks, self.ansatz.matched_eha_blocks) {
            (Some(0), _) | (_, Some(0)) => bad("block counts must be >= 1".into()),
            (Some(_), None) | (None, Some(_)) => Ok(()),
            _ => bad("ansatz needs exactly one of `blocks` or `matched_eha_blocks`".into()),
        }
    }

    pub fn init_scheme(&self) -> InitScheme {
        self.init.unwrap_or_else(|| self.ansatz.family.default_init())
    }

    pub fn reference(&self) -> ReferenceState {
        self.reference_state
            .clone()
            .unwrap_or_else(|| self.ansatz.family.default_reference())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HM8: &str = r#"
name = "hm8"
realizations = 2
master_seed = 7

[model]
family = "hm"
sites = 8

[ansatz]
family = "eha"
blocks = 14

[[schedule]]
step_size = 0.01
iterations = 1000
"#;

    #[test]
    fn parses_minimal_config() {
        let c = ExperimentConfig::from_toml_str(HM8).unwrap();
        assert_eq!(c.schedule.total_iterations(), 1000);
        assert_eq!(c.init_scheme(), InitScheme::UniformPi);
        assert_eq!(c.reference(), ReferenceState::AllZero);
        assert_eq!(c.optimizer, AdamConfig::default());
        let back = ExperimentConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(ExperimentConfig::from_toml_str(&HM8.replace("realizations = 2", "realizations = 0")).is_err());
        assert!(ExperimentConfig::from_toml_str(&HM8.replace("blocks = 14", "blocks = 14\nmatched_eha_blocks = 2")).is_err());
        assert!(ExperimentConfig::from_toml_str(&HM8.replace("sites = 8", "sites = 8\ncolour = 1")).is_err());
        assert!(ExperimentConfig::from_toml_str(&HM8.replace("step_size = 0.01", "step_size = -1.0")).is_err());
        assert!(ExperimentConfig::from_toml_str("name = 3").is_err());
    }

    #[test]
    fn matched_blocks_resolve() {
        let a = AnsatzConfig {
            family: AnsatzFamily::CxRing,
            blocks: None,
            matched_eha_blocks: Some(10),
            hsa_mode: HsaMode::default(),
        };
        assert_eq!(a.resolve_blocks(12).unwrap(), 55);
    }

    #[test]
    fn penalty_and_reference_forms() {
        let text = format!(
            "reference_state = {{ basis_string = \"01010101\" }}\n{HM8}\n[penalty]\noperator = \"S_z\"\ntarget = 0.0\nbeta = 100.0\n"
        );
        let c = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(c.penalty.unwrap().operator, PenaltyOperator::SZ);
        assert_eq!(c.reference(), ReferenceState::BasisString("01010101".into()));
    }
}
