//! Experiment configuration, read from TOML.
//!
//! ```toml
//! data = "data/Telco-Customer-Churn.csv"
//! out = "results"
//! seeds = [0, 1, 2, 3, 4]
//! pca_dims = [5, 10, 15, 23]
//!
//! [split]
//! train_fraction = 0.8
//!
//! [[encoding]]
//! method = "displacement"
//! fock_dim = 30
//!
//! [[model]]
//! kind = "knn"
//! k = 5
//! ```
//!
//! Every key other than `kind` and `name` in a `[[model]]` table is a
//! hyperparameter; see [`crate::learners::ModelSpec`].

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::HarnessError;
use crate::encoders::{EncoderConfig, EncodingMethod, InputScaling};
use crate::learners::{ModelKind, ModelSpec, Params};
use crate::pipeline::{BlankPolicy, LoadOptions, SplitSpec, DEFAULT_DROP_PROFILE};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    data: Option<PathBuf>,
    out: Option<PathBuf>,
    seeds: Option<Vec<u64>>,
    pca_dims: Option<Vec<usize>>,
    workers: Option<usize>,
    timings: Option<bool>,
    #[serde(default)]
    preprocess: RawPreprocess,
    #[serde(default)]
    split: RawSplit,
    #[serde(default)]
    encoding: Vec<RawEncoding>,
    #[serde(default)]
    model: Vec<RawModel>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPreprocess {
    drop: Option<Vec<String>>,
    blank_total_charges: Option<String>,
    undersample: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSplit {
    train_fraction: Option<f64>,
    stratified: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEncoding {
    method: String,
    name: Option<String>,
    fock_dim: Option<usize>,
    probs_per_mode: Option<usize>,
    iqp_block: Option<usize>,
    input_scaling: Option<String>,
    alpha_clamp: Option<f64>,
    r_clamp: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct RawModel {
    kind: String,
    name: Option<String>,
    #[serde(flatten)]
    params: BTreeMap<String, toml::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedEncoder {
    pub name: String,
    pub config: EncoderConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelEntry {
    Supported { name: String, spec: ModelSpec },
    Unsupported { name: String, kind: ModelKind },
}

impl ModelEntry {
    pub fn name(&self) -> &str {
        match self {
            Self::Supported { name, .. } | Self::Unsupported { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessSpec {
    pub drop: Vec<String>,
    pub load: LoadOptions,
    pub undersample: bool,
}

impl Default for PreprocessSpec {
    fn default() -> Self {
        Self {
            drop: DEFAULT_DROP_PROFILE.iter().map(|s| s.to_string()).collect(),
            load: LoadOptions::default(),
            undersample: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data: Option<PathBuf>,
    pub out: PathBuf,
    pub seeds: Vec<u64>,
    pub pca_dims: Vec<usize>,
    /// 0 means one worker per available core.
    pub workers: usize,
    /// When false, every duration is written as 0 so that reruns produce
    /// identical files.
    pub timings: bool,
    pub preprocess: PreprocessSpec,
    pub split: SplitSpec,
    pub encodings: Vec<NamedEncoder>,
    pub models: Vec<ModelEntry>,
}

pub const DEFAULT_PCA_DIMS: [usize; 4] = [5, 10, 15, 23];

fn cfg_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn param_value(model: &str, key: &str, v: &toml::Value) -> Result<f64, HarnessError> {
    match v {
        toml::Value::Integer(i) => Ok(*i as f64),
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Boolean(b) => Ok(f64::from(u8::from(*b))),
        other => Err(cfg_err(format!(
            "model {model}: parameter '{key}' must be a number or boolean, got {other}"
        ))),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        let preprocess = PreprocessSpec {
            drop: raw
                .preprocess
                .drop
                .unwrap_or_else(|| PreprocessSpec::default().drop),
            load: LoadOptions {
                blank_total_charges: match raw.preprocess.blank_total_charges {
                    Some(s) => s.parse::<BlankPolicy>().map_err(|e| cfg_err(e.to_string()))?,
                    None => BlankPolicy::DropRow,
                },
            },
            undersample: raw.preprocess.undersample.unwrap_or(true),
        };
        let split = SplitSpec::new(
            raw.split.train_fraction.unwrap_or(0.8),
            0,
            raw.split.stratified.unwrap_or(true),
        )
        .map_err(|e| cfg_err(e.to_string()))?;

        let mut encodings = Vec::new();
        for e in raw.encoding {
            let method: EncodingMethod = e
                .method
                .parse()
                .map_err(|e: crate::encoders::EncodeError| cfg_err(e.to_string()))?;
            let mut c = EncoderConfig::new(method);
            if let Some(v) = e.fock_dim {
                c.fock_dim = v;
            }
            if let Some(v) = e.probs_per_mode {
                c.probs_per_mode = v;
            }
            if let Some(v) = e.iqp_block {
                c.iqp_block = v;
            }
            if let Some(s) = e.input_scaling {
                c.input_scaling = s.parse::<InputScaling>().map_err(|e| cfg_err(e.to_string()))?;
            }
            if let Some(v) = e.alpha_clamp {
                c.alpha_clamp = v;
            }
            if let Some(v) = e.r_clamp {
                c.r_clamp = v;
            }
            c.validate().map_err(|e| cfg_err(e.to_string()))?;
            encodings.push(NamedEncoder {
                name: e.name.unwrap_or_else(|| method.name().to_string()),
                config: c,
            });
        }

        let mut models = Vec::new();
        for m in raw.model {
            let kind: ModelKind = m
                .kind
                .parse()
                .map_err(|e: crate::learners::LearnError| cfg_err(e.to_string()))?;
            let name = m.name.unwrap_or_else(|| kind.name().to_string());
            if !kind.is_supported() {
                models.push(ModelEntry::Unsupported { name, kind });
                continue;
            }
            let params: Params = m
                .params
                .iter()
                .map(|(k, v)| Ok((k.clone(), param_value(&name, k, v)?)))
                .collect::<Result<_, HarnessError>>()?;
            let spec = ModelSpec::new(kind, params, 0)
                .map_err(|e| cfg_err(format!("model {name}: {e}")))?;
            models.push(ModelEntry::Supported { name, spec });
        }

        let cfg = Self {
            data: raw.data,
            out: raw.out.unwrap_or_else(|| PathBuf::from("results")),
            seeds: raw.seeds.unwrap_or_else(|| vec![0]),
            pca_dims: raw.pca_dims.unwrap_or_else(|| DEFAULT_PCA_DIMS.to_vec()),
            workers: raw.workers.unwrap_or(0),
            timings: raw.timings.unwrap_or(true),
            preprocess,
            split,
            encodings,
            models,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Checks the grid axes. Dimension limits that depend on the data are
    /// checked by [`super::run_grid`] before any cell runs.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seeds.is_empty() {
            return Err(cfg_err("seeds must not be empty"));
        }
        if self.pca_dims.is_empty() {
            return Err(cfg_err("pca_dims must not be empty"));
        }
        if self.pca_dims.contains(&0) {
            return Err(cfg_err("pca_dims entries must be positive"));
        }
        if self.encodings.is_empty() {
            return Err(cfg_err("at least one [[encoding]] is required"));
        }
        if self.models.is_empty() {
            return Err(cfg_err("at least one [[model]] is required"));
        }
        for (what, names) in [
            ("encoding", self.encodings.iter().map(|e| e.name.as_str()).collect::<Vec<_>>()),
            ("model", self.models.iter().map(ModelEntry::name).collect()),
        ] {
            let mut seen = BTreeSet::new();
            if let Some(dup) = names.iter().find(|n| !seen.insert(**n)) {
                return Err(cfg_err(format!("duplicate {what} name '{dup}'")));
            }
        }
        let mut dims = self.pca_dims.clone();
        dims.sort_unstable();
        dims.dedup();
        if dims.len() != self.pca_dims.len() {
            return Err(cfg_err("pca_dims contains duplicates"));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            return Err(cfg_err("seeds contains duplicates"));
        }
        Ok(())
    }

    /// Names of configured models that are not implemented.
    pub fn unsupported_models(&self) -> Vec<String> {
        self.models
            .iter()
            .filter(|m| matches!(m, ModelEntry::Unsupported { .. }))
            .map(|m| m.name().to_string())
            .collect()
    }
}
