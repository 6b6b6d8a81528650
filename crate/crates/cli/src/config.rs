//! Run configuration: JSON with a `model` tag and a parameter block named
//! after the model.
//!
//! ```json
//! {
//!   "model": "multiplicative",
//!   "multiplicative": { "phi": "7/6", "alpha": 0 },
//!   "p": [0, "1/2", "1/2", 1],
//!   "seed": 7,
//!   "steps": 20000
//! }
//! ```
//!
//! Numbers may be JSON numbers or strings such as `"7/6"` or `"0.9"`; both
//! are read as exact decimals or fractions.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use competing_types::analysis::thresholds::Parameter;
use competing_types::analysis::zeros::ZeroSearch;
use competing_types::experiments::Engine;
use competing_types::sim::{InitialGraph, SimConfig};
use competing_types::{parse_rational, FitnessModel, ModelKind, Rational, TypeAssignment};

use crate::CliError;

/// A number written as a JSON number or as a string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Number(serde_json::Number),
    Text(String),
}

impl Num {
    pub fn exact(&self) -> Result<Rational, CliError> {
        let text = match self {
            Num::Number(n) => n.to_string(),
            Num::Text(s) => s.clone(),
        };
        parse_rational(&text).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlainBlock {
    pub alpha: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplicativeBlock {
    pub phi: Num,
    #[serde(default = "zero")]
    pub alpha: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdditiveBlock {
    pub alpha_red: Num,
    pub alpha_blue: Num,
}

fn zero() -> Num {
    Num::Number(0.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub parameter: Parameter,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Explicit grid; replaces `from`/`to`/`step`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plain: Option<PlainBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicative: Option<MultiplicativeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub additive: Option<AdditiveBlock>,
    /// `p_0, ..., p_m`.
    pub p: Vec<Num>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub record_at: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialGraph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_invariants: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    /// Include every run's terminal statistic in the ensemble JSON.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_run_terminals: Option<bool>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<ZeroSearch>,
    /// Write an SVG of the competition function (analyze).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<bool>,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_STEPS: u64 = 20_000;
pub const DEFAULT_RUNS: u64 = 500;

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub format: Option<Format>,
}

impl Config {
    /// Reads a config file, or the `config` echoed inside a run manifest.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let value = match value.get("manifest_version") {
            Some(_) => value
                .get("config")
                .cloned()
                .ok_or_else(|| CliError::Config("manifest has no config".into()))?,
            None => value,
        };
        let cfg: Config =
            serde_json::from_value(value).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.fitness_exact()?;
        cfg.type_assignment_exact()?;
        Ok(cfg)
    }

    /// Flags win over config values, which win over defaults.
    pub fn apply(&mut self, o: &Overrides) {
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.out.is_some() {
            self.out = o.out.clone();
        }
        if o.threads.is_some() {
            self.threads = o.threads;
        }
        if o.format.is_some() {
            self.format = o.format;
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn type_assignment_exact(&self) -> Result<TypeAssignment<Rational>, CliError> {
        let p = self.p.iter().map(Num::exact).collect::<Result<Vec<_>, _>>()?;
        TypeAssignment::new(p).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn fitness_exact(&self) -> Result<FitnessModel<Rational>, CliError> {
        let missing = |name: &str| CliError::Config(format!("model {name:?} needs a \"{name}\" parameter block"));
        let fm = match self.model {
            ModelKind::Plain => {
                let b = self.plain.as_ref().ok_or_else(|| missing("plain"))?;
                FitnessModel::Plain { alpha: b.alpha.exact()? }
            }
            ModelKind::Multiplicative => {
                let b = self.multiplicative.as_ref().ok_or_else(|| missing("multiplicative"))?;
                FitnessModel::Multiplicative {
                    phi: b.phi.exact()?,
                    alpha: b.alpha.exact()?,
                }
            }
            ModelKind::Additive => {
                let b = self.additive.as_ref().ok_or_else(|| missing("additive"))?;
                FitnessModel::Additive {
                    alpha_red: b.alpha_red.exact()?,
                    alpha_blue: b.alpha_blue.exact()?,
                }
            }
        };
        let others = [
            (ModelKind::Plain, self.plain.is_some()),
            (ModelKind::Multiplicative, self.multiplicative.is_some()),
            (ModelKind::Additive, self.additive.is_some()),
        ];
        if let Some((k, _)) = others.iter().find(|(k, present)| *present && *k != self.model) {
            return Err(CliError::Config(format!(
                "parameter block for {k:?} given but model is {:?}",
                self.model
            )));
        }
        fm.validate(self.p.len().saturating_sub(1))
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(fm)
    }

    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        let ta = self.type_assignment_exact()?.to_f64();
        let fm = self.fitness_exact()?.to_f64();
        let mut cfg = SimConfig::new(ta, fm, self.steps.unwrap_or(DEFAULT_STEPS), self.seed());
        cfg.initial = self.initial.clone();
        cfg.record_every = self.record_every.unwrap_or(0);
        cfg.record_at = self.record_at.clone();
        cfg.check_invariants = self.check_invariants.unwrap_or(true);
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn search(&self) -> ZeroSearch {
        self.search.unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> Config {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn numbers_and_fractions_are_exact() {
        let c = parse(r#"{"model":"multiplicative","multiplicative":{"phi":"7/6"},"p":[0,"1/2",0.5,1]}"#);
        let ta = c.type_assignment_exact().unwrap();
        assert_eq!(ta.p()[1], ta.p()[2]);
        assert!(matches!(c.fitness_exact().unwrap(), FitnessModel::Multiplicative { .. }));
    }

    #[test]
    fn block_must_match_tag() {
        let c = parse(r#"{"model":"additive","plain":{"alpha":0},"p":[0,1]}"#);
        assert!(c.fitness_exact().is_err());
        let c = parse(r#"{"model":"plain","plain":{"alpha":0},"additive":{"alpha_red":0,"alpha_blue":1},"p":[0,1]}"#);
        assert!(c.fitness_exact().is_err());
    }

    #[test]
    fn flags_override_config() {
        let mut c = parse(r#"{"model":"plain","plain":{"alpha":0},"p":[0,1],"seed":5,"format":"json","threads":2}"#);
        c.apply(&Overrides {
            seed: Some(9),
            format: None,
            ..Default::default()
        });
        assert_eq!(c.seed(), 9);
        assert_eq!(c.format(), Format::Json);
        assert_eq!(c.threads, Some(2));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<Config>(r#"{"model":"plain","plain":{"alpha":0},"p":[0,1],"sead":3}"#).is_err());
    }
}
