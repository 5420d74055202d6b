//! Experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lsd_core::blocks::EnumerationCaps;
use lsd_core::{Arm, Noise, Regime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("field `{field}`: {message}")]
    Field {
        field: &'static str,
        message: String,
    },
}

fn field(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        message: message.into(),
    }
}

/// A learner selection as written on the command line or in a config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgoSpec {
    Isi,
    CombUcb1,
    OracleGreedy,
    /// Calibration permutation, 0-based internally, written 1-based.
    Cs(Vec<Arm>),
}

impl FromStr for AlgoSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "isi" => Ok(AlgoSpec::Isi),
            "combucb1" => Ok(AlgoSpec::CombUcb1),
            "oracle_greedy" | "greedy" => Ok(AlgoSpec::OracleGreedy),
            other => {
                let Some(perm) = other.strip_prefix("cs:") else {
                    return Err(format!("unknown algorithm `{other}`"));
                };
                let arms = perm
                    .split(['-', ','])
                    .map(|x| match x.trim().parse::<usize>() {
                        Ok(a) if a >= 1 => Ok(a - 1),
                        _ => Err(format!(
                            "bad arm `{x}` in `{other}`, arms are numbered from 1"
                        )),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(AlgoSpec::Cs(arms))
            }
        }
    }
}

impl fmt::Display for AlgoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgoSpec::Isi => write!(f, "isi"),
            AlgoSpec::CombUcb1 => write!(f, "combucb1"),
            AlgoSpec::OracleGreedy => write!(f, "oracle_greedy"),
            AlgoSpec::Cs(perm) => {
                let p: Vec<String> = perm.iter().map(|a| (a + 1).to_string()).collect();
                write!(f, "cs:{}", p.join("-"))
            }
        }
    }
}

impl Serialize for AlgoSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AlgoSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn parse_algos(list: &str) -> Result<Vec<AlgoSpec>, String> {
    list.split([' ', ';', '+'])
        .flat_map(split_top_level)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse())
        .collect()
}

/// Splits on commas that are not inside a `cs:` permutation.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for part in s.split(',') {
        let continues_cs = out.last().is_some_and(|l| l.starts_with("cs:"))
            && part.trim().parse::<usize>().is_ok();
        if continues_cs {
            let last = out.last_mut().unwrap();
            last.push(',');
            last.push_str(part.trim());
        } else {
            out.push(part.trim().to_string());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: Option<PathBuf>,
    pub horizon: usize,
    pub block_size: usize,
    pub alpha: f64,
    pub algos: Vec<AlgoSpec>,
    pub reps: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Defaults to the regime of the instance.
    pub regime: Option<Regime>,
    pub caps: EnumerationCaps,
    /// Share environment randomness across algorithms within a repetition.
    pub paired: bool,
    pub noise: Noise,
    pub write_trace: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            instance: None,
            horizon: 40_000,
            block_size: 3,
            alpha: 1.5,
            algos: vec![AlgoSpec::Isi, AlgoSpec::CombUcb1, AlgoSpec::OracleGreedy],
            reps: 10,
            seed: 0,
            out: PathBuf::from("out"),
            regime: None,
            caps: EnumerationCaps::default(),
            paired: false,
            noise: Noise::Bernoulli,
            write_trace: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.into(),
            source,
        })?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.into(),
            source,
        })?;
        // Instance paths are relative to the config file.
        if let (Some(inst), Some(dir)) = (&cfg.instance, path.parent()) {
            if inst.is_relative() {
                cfg.instance = Some(dir.join(inst));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.block_size == 0 {
            return Err(field("block_size", "must be at least 1"));
        }
        if self.block_size + 1 > self.horizon {
            return Err(field(
                "horizon",
                format!("{} is shorter than block_size + 1", self.horizon),
            ));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(field("alpha", format!("{} must be positive", self.alpha)));
        }
        if self.reps == 0 {
            return Err(field("reps", "must be at least 1"));
        }
        if self.algos.is_empty() {
            return Err(field("algos", "no algorithm selected"));
        }
        Ok(())
    }
}
