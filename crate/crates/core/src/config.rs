//! TOML experiment configuration.
//!
//! ```toml
//! [env]
//! S = -2.0
//! L = 2.0
//!
//! [intensity]
//! model = "sinusoidal(1.5, 0.3, 1.0)"
//!
//! [experiment]
//! policy = "ilu"
//! T = 5000
//! replications = 500
//! seed = 42
//!
//! [output]
//! directory = "out"
//! ```
//!
//! Unknown keys are rejected. Individual keys can be overridden with
//! `section.key=value` strings before deserialization.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::harness::{ExperimentConfig, Policy};
use crate::intensity::{EnvironmentParams, Family, IntensityModel};
use crate::oracle::Tolerances;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub env: EnvSection,
    pub intensity: IntensitySection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub mse: MseSection,
    #[serde(default)]
    pub brute: BruteSection,
    #[serde(default)]
    pub simulate: SimulateSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSection {
    #[serde(rename = "S")]
    pub street_start: f64,
    #[serde(rename = "L")]
    pub class_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensitySection {
    /// Family expression, e.g. `constant(1.0)` or `tanh_ramp(1.5, 0.3, 0.0, 1.0)`.
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub policy: String,
    #[serde(rename = "T")]
    pub rounds: u64,
    pub replications: u64,
    pub seed: u64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            policy: "ilu".into(),
            rounds: 1000,
            replications: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSection {
    pub quad_tol: f64,
    pub root_tol: f64,
    pub tail_tol: f64,
    pub indifference_tol: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            quad_tol: t.quad_tol,
            root_tol: t.root_tol,
            tail_tol: t.tail_tol,
            indifference_tol: t.indifference_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    /// Also write per-round, per-replication `rounds.csv` from `run`.
    pub rounds: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            rounds: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MseSection {
    pub n_values: Vec<u64>,
    pub replications: u64,
}

impl Default for MseSection {
    fn default() -> Self {
        Self {
            n_values: vec![10, 100, 1000],
            replications: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BruteSection {
    pub grid_step: f64,
    pub paths: u64,
}

impl Default for BruteSection {
    fn default() -> Self {
        Self {
            grid_step: 1e-2,
            paths: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub threshold: f64,
    pub rounds: u64,
    pub replications: u64,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            threshold: 0.0,
            rounds: 10,
            replications: 1,
        }
    }
}

fn parse_override(entry: &str) -> Result<(String, String, toml::Value)> {
    let (key, raw) = entry
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{entry}`: expected section.key=value")))?;
    let (section, field) = key
        .trim()
        .split_once('.')
        .ok_or_else(|| Error::Config(format!("override `{entry}`: key must be section.key")))?;
    let raw = raw.trim();
    // Parse as a TOML value; anything that is not one is taken as a string.
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    Ok((section.to_string(), field.to_string(), value))
}

impl ConfigFile {
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        if overrides.is_empty() {
            // Direct deserialization keeps source spans in error messages.
            let cfg: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
            cfg.check()?;
            return Ok(cfg);
        }
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        for entry in overrides {
            let (section, field, value) = parse_override(entry)?;
            let entry = table
                .entry(section.clone())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            match entry {
                toml::Value::Table(t) => {
                    t.insert(field, value);
                }
                _ => return Err(Error::Config(format!("override: `{section}` is not a section"))),
            }
        }
        let cfg: ConfigFile = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, overrides).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn check(&self) -> Result<()> {
        self.tolerances()?;
        self.policy()?;
        Ok(())
    }

    pub fn tolerances(&self) -> Result<Tolerances> {
        let t = Tolerances {
            quad_tol: self.tolerances.quad_tol,
            root_tol: self.tolerances.root_tol,
            tail_tol: self.tolerances.tail_tol,
            indifference_tol: self.tolerances.indifference_tol,
        };
        t.check().map_err(|e| Error::Config(e.to_string()))?;
        Ok(t)
    }

    pub fn policy(&self) -> Result<Policy> {
        self.experiment.policy.parse()
    }

    /// Environment with the non-empty-class check applied.
    pub fn env(&self) -> Result<EnvironmentParams> {
        EnvironmentParams::new(self.env.street_start, self.env.class_bound)
    }

    pub fn family(&self) -> Result<Family> {
        self.intensity.model.parse()
    }

    /// The intensity model, not yet class-validated.
    pub fn model(&self) -> Result<IntensityModel> {
        IntensityModel::new(self.family()?, self.env()?)?.with_quad_tol(self.tolerances.quad_tol)
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            model: self.model()?,
            tolerances: self.tolerances()?,
            rounds: self.experiment.rounds,
            replications: self.experiment.replications,
            master_seed: self.experiment.seed,
            policy: self.policy()?,
        })
    }

    pub fn output_dir(&self) -> &Path {
        &self.output.directory
    }
}
