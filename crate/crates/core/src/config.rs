//! Run configuration: one TOML file per run.
//!
//! Unknown keys are rejected with their full path. Every physical
//! parameter must be given explicitly; only numerical knobs (substeps,
//! sponge, probe sizes) have defaults. The configuration hash is the
//! SHA-256 of the canonical TOML form, so comments, key order and number
//! spelling do not change it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::output::RunMeta;
use crate::scenarios::{BeamSplitterParams, CauchyParams, EprParams, ScenarioError, Settings};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed TOML: {0}")]
    Syntax(String),
    #[error("at `{path}`: {message}")]
    Key { path: String, message: String },
    #[error("scenario `{scenario}` needs a [{section}] section")]
    MissingSection { scenario: &'static str, section: &'static str },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    BeamSplitter,
    Epr,
    CauchyRecord,
}

/// Bisection target for the beam-splitter barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneSpec {
    pub target: f64,
    #[serde(default = "default_tune_tol")]
    pub tolerance: f64,
}

fn default_tune_tol() -> f64 {
    0.005
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run_id: String,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub beam_splitter: Option<BeamSplitterParams>,
    /// When present the barrier amplitude is tuned before the run and the
    /// configured amplitude is only recorded.
    #[serde(default)]
    pub tune: Option<TuneSpec>,
    #[serde(default)]
    pub epr: Option<EprParams>,
    /// Settings of run A; run B flips `b`.
    #[serde(default)]
    pub settings: Option<Settings>,
    #[serde(default)]
    pub cauchy: Option<CauchyParams>,
}

/// A parsed configuration with its canonical hash.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub hash: String,
    /// Seed given on the command line, if any; it replaces `config.seed`.
    pub seed_override: Option<u64>,
}

impl LoadedConfig {
    pub fn seed(&self) -> u64 {
        self.seed_override.unwrap_or(self.config.seed)
    }

    pub fn meta(&self) -> RunMeta {
        RunMeta::new(self.config.run_id.clone(), self.seed(), self.hash.clone())
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed_override = seed;
        self
    }
}

/// SHA-256 (hex) of the canonical form: parsed, then re-serialized with
/// sorted keys.
pub fn canonical_hash(text: &str) -> Result<String, ConfigError> {
    let v: toml::Table = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let canon = toml::to_string(&v).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(canon.as_bytes())))
}

pub fn parse_config_str(text: &str) -> Result<LoadedConfig, ConfigError> {
    let hash = canonical_hash(text)?;
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Key {
        path: e.path().to_string(),
        message: e.inner().message().to_string(),
    })?;
    validate(&config)?;
    Ok(LoadedConfig { config, hash, seed_override: None })
}

pub fn parse_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config_str(&text)
}

fn scenario_err(section: &str) -> impl Fn(ScenarioError) -> ConfigError + '_ {
    move |e| ConfigError::Invalid(format!("[{section}] {e}"))
}

fn validate(c: &RunConfig) -> Result<(), ConfigError> {
    if c.run_id.is_empty() || c.run_id.contains([',', ';', '\n']) {
        return Err(ConfigError::Invalid(format!("run_id {:?} must be non-empty without , ; or newlines", c.run_id)));
    }
    match c.scenario {
        ScenarioKind::BeamSplitter => {
            let p = c.beam_splitter.as_ref().ok_or(ConfigError::MissingSection {
                scenario: "beam_splitter",
                section: "beam_splitter",
            })?;
            p.validate().map_err(scenario_err("beam_splitter"))?;
            if let Some(t) = c.tune {
                if !(t.target > 0.0 && t.target < 1.0 && t.tolerance > 0.0) {
                    return Err(ConfigError::Invalid(format!("[tune] needs 0 < target < 1 and tolerance > 0, got {t:?}")));
                }
            }
        }
        ScenarioKind::Epr => {
            let p = c.epr.as_ref().ok_or(ConfigError::MissingSection { scenario: "epr", section: "epr" })?;
            p.validate().map_err(scenario_err("epr"))?;
            if c.settings.is_none() {
                return Err(ConfigError::MissingSection { scenario: "epr", section: "settings" });
            }
        }
        ScenarioKind::CauchyRecord => {
            let p = c.cauchy.as_ref().ok_or(ConfigError::MissingSection { scenario: "cauchy_record", section: "cauchy" })?;
            p.validate().map_err(scenario_err("cauchy"))?;
        }
    }
    Ok(())
}
