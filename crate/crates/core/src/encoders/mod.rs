//! Quantum feature maps and their flattening into classical feature vectors.
//!
//! Displacement and squeezing act on one mode per feature and emit the first
//! `K` photon-number probabilities of each mode. IQP groups consecutive
//! features into blocks of qubits and emits every computational-basis
//! probability of each block.

mod cv;
mod iqp;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

pub use cv::{
    displace_vacuum, displace_vacuum_expm, squeeze_vacuum, DisplacementParams, SqueezeParams,
    DEFAULT_ALPHA_CLAMP, DEFAULT_R_CLAMP,
};
pub use iqp::{
    iqp_encode, iqp_phase_terms, iqp_phases, IqpPhaseVector, QubitStateVector, MAX_IQP_QUBITS,
};

use crate::data::FeatureMatrix;
use crate::fock::FockError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("encoder domain error: {0}")]
    Domain(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite input at feature {0}")]
    NonFinite(usize),
    #[error("invalid encoder configuration: {0}")]
    Config(String),
    #[error("row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: Box<EncodeError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncodingMethod {
    Classical,
    Iqp,
    Displacement,
    Squeezing,
}

impl EncodingMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Classical => "classical",
            Self::Iqp => "iqp",
            Self::Displacement => "displacement",
            Self::Squeezing => "squeezing",
        }
    }
}

impl fmt::Display for EncodingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EncodingMethod {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "classical" | "classical-passthrough" | "passthrough" => Ok(Self::Classical),
            "iqp" => Ok(Self::Iqp),
            "displacement" => Ok(Self::Displacement),
            "squeezing" => Ok(Self::Squeezing),
            other => Err(EncodeError::Config(format!("unknown encoding '{other}'"))),
        }
    }
}

/// How raw features are mapped into the encoder's domain before encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputScaling {
    Identity,
    /// Per-column min-max to `[0, 1]` using training statistics; values
    /// outside the training range are clipped to the interval.
    MinMax,
}

impl FromStr for InputScaling {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "none" => Ok(Self::Identity),
            "minmax" | "min-max" => Ok(Self::MinMax),
            other => Err(EncodeError::Config(format!("unknown input scaling '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderConfig {
    pub method: EncodingMethod,
    pub fock_dim: usize,
    /// Photon-number probabilities emitted per feature.
    pub probs_per_mode: usize,
    /// Qubits per IQP block.
    pub iqp_block: usize,
    pub input_scaling: InputScaling,
    pub alpha_clamp: f64,
    pub r_clamp: f64,
}

impl EncoderConfig {
    /// Defaults: truncation 30 for displacement and 60 for squeezing, five
    /// probabilities per mode, two-qubit IQP blocks, min-max scaling for the
    /// quantum methods.
    pub fn new(method: EncodingMethod) -> Self {
        let fock_dim = match method {
            EncodingMethod::Squeezing => 60,
            _ => 30,
        };
        let input_scaling = match method {
            EncodingMethod::Classical => InputScaling::Identity,
            _ => InputScaling::MinMax,
        };
        Self {
            method,
            fock_dim,
            probs_per_mode: 5,
            iqp_block: 2,
            input_scaling,
            alpha_clamp: DEFAULT_ALPHA_CLAMP,
            r_clamp: DEFAULT_R_CLAMP,
        }
    }

    pub fn validate(&self) -> Result<(), EncodeError> {
        if self.fock_dim < 2 {
            return Err(EncodeError::Config(format!(
                "fock_dim {} is below 2",
                self.fock_dim
            )));
        }
        if self.probs_per_mode == 0 || self.probs_per_mode > self.fock_dim {
            return Err(EncodeError::Config(format!(
                "probs_per_mode {} must lie in 1..={}",
                self.probs_per_mode, self.fock_dim
            )));
        }
        if !(1..=MAX_IQP_QUBITS).contains(&self.iqp_block) {
            return Err(EncodeError::Config(format!(
                "iqp_block {} outside 1..={MAX_IQP_QUBITS}",
                self.iqp_block
            )));
        }
        if !(self.alpha_clamp > 0.0 && self.r_clamp > 0.0) {
            return Err(EncodeError::Config("clamps must be positive".into()));
        }
        Ok(())
    }

    /// Width of an encoded row for `input_width` raw features.
    pub fn output_width(&self, input_width: usize) -> usize {
        match self.method {
            EncodingMethod::Classical => input_width,
            EncodingMethod::Displacement | EncodingMethod::Squeezing => {
                input_width * self.probs_per_mode
            }
            EncodingMethod::Iqp => input_width.div_ceil(self.iqp_block) << self.iqp_block,
        }
    }

    /// Upper bound on the probability mass beyond the first `K` Fock states
    /// for any admissible input.
    pub fn tail_bound(&self) -> f64 {
        let k = self.probs_per_mode;
        match self.method {
            EncodingMethod::Displacement => {
                let lambda = self.alpha_clamp * self.alpha_clamp;
                let mut term = (-lambda).exp();
                let mut head = 0.0;
                for n in 0..k {
                    head += term;
                    term *= lambda / (n + 1) as f64;
                }
                (1.0 - head).max(0.0)
            }
            EncodingMethod::Squeezing => {
                let r = self.r_clamp;
                let t2 = r.tanh().powi(2);
                let mut coeff = 1.0 / r.cosh();
                let mut head = 0.0;
                let mut n = 0;
                while 2 * n < k {
                    head += coeff;
                    coeff *= t2 * ((2 * n + 1) as f64) / ((2 * n + 2) as f64);
                    n += 1;
                }
                (1.0 - head).max(0.0)
            }
            _ => 0.0,
        }
    }
}

/// Encodes one feature vector. Input scaling is not applied here.
pub fn encode_row(x: &[f64], cfg: &EncoderConfig) -> Result<Vec<f64>, EncodeError> {
    cfg.validate()?;
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(EncodeError::NonFinite(i));
    }
    match cfg.method {
        EncodingMethod::Classical => Ok(x.to_vec()),
        EncodingMethod::Displacement => {
            let mut out = Vec::with_capacity(x.len() * cfg.probs_per_mode);
            for &v in x {
                let p = DisplacementParams::real(v).with_clamp(cfg.alpha_clamp);
                let probs = displace_vacuum(p, cfg.fock_dim)?.probabilities();
                out.extend_from_slice(&probs[..cfg.probs_per_mode]);
            }
            Ok(out)
        }
        EncodingMethod::Squeezing => {
            let mut out = Vec::with_capacity(x.len() * cfg.probs_per_mode);
            for &v in x {
                let p = SqueezeParams::real(v)?.with_clamp(cfg.r_clamp);
                let probs = squeeze_vacuum(p, cfg.fock_dim)?.probabilities();
                out.extend_from_slice(&probs[..cfg.probs_per_mode]);
            }
            Ok(out)
        }
        EncodingMethod::Iqp => {
            let b = cfg.iqp_block;
            let mut out = Vec::with_capacity(cfg.output_width(x.len()));
            for chunk in x.chunks(b) {
                let mut block = chunk.to_vec();
                block.resize(b, 0.0);
                out.extend(iqp_encode(&block, b)?.probabilities());
            }
            Ok(out)
        }
    }
}

fn output_names(input: &[String], cfg: &EncoderConfig) -> Vec<String> {
    match cfg.method {
        EncodingMethod::Classical => input.to_vec(),
        EncodingMethod::Displacement | EncodingMethod::Squeezing => input
            .iter()
            .flat_map(|name| (0..cfg.probs_per_mode).map(move |k| format!("{name}_p{k}")))
            .collect(),
        EncodingMethod::Iqp => {
            let b = cfg.iqp_block;
            (0..input.len().div_ceil(b))
                .flat_map(|blk| {
                    (0..1usize << b).map(move |z| format!("iqp{blk}_{z:0width$b}", width = b))
                })
                .collect()
        }
    }
}

/// Encodes every row of `x`.
///
/// Rows are processed in parallel; the output is identical to a sequential
/// pass. The first failing row (by index) is reported.
pub fn encode_matrix(x: &FeatureMatrix, cfg: &EncoderConfig) -> Result<FeatureMatrix, EncodeError> {
    cfg.validate()?;
    if cfg.method == EncodingMethod::Classical {
        if let Some(i) = x.values().iter().position(|v| !v.is_finite()) {
            let cols = x.cols().max(1);
            return Err(EncodeError::Row {
                row: i / cols,
                source: Box::new(EncodeError::NonFinite(i % cols)),
            });
        }
        return Ok(x.clone());
    }
    let encoded: Vec<Result<Vec<f64>, EncodeError>> = (0..x.rows())
        .into_par_iter()
        .map(|i| encode_row(x.row(i), cfg))
        .collect();
    let width = cfg.output_width(x.cols());
    let mut values = Vec::with_capacity(x.rows() * width);
    for (row, r) in encoded.into_iter().enumerate() {
        let r = r.map_err(|e| EncodeError::Row {
            row,
            source: Box::new(e),
        })?;
        values.extend(r);
    }
    FeatureMatrix::new(x.rows(), width, values, output_names(x.names(), cfg))
        .map_err(|e| EncodeError::Shape(e.to_string()))
}

/// Column-wise input scaling fitted on a training matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct InputScaler {
    rule: InputScaling,
    mins: Vec<f64>,
    ranges: Vec<f64>,
}

impl InputScaler {
    pub fn fit(train: &FeatureMatrix, rule: InputScaling) -> Self {
        let mut mins = vec![f64::INFINITY; train.cols()];
        let mut maxs = vec![f64::NEG_INFINITY; train.cols()];
        for row in train.row_iter() {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        let ranges = mins.iter().zip(&maxs).map(|(lo, hi)| hi - lo).collect();
        Self { rule, mins, ranges }
    }

    pub fn rule(&self) -> InputScaling {
        self.rule
    }

    pub fn mins(&self) -> &[f64] {
        &self.mins
    }

    pub fn ranges(&self) -> &[f64] {
        &self.ranges
    }

    pub fn transform(&self, x: &FeatureMatrix) -> Result<FeatureMatrix, EncodeError> {
        if x.cols() != self.mins.len() {
            return Err(EncodeError::Shape(format!(
                "scaler fitted on {} columns, got {}",
                self.mins.len(),
                x.cols()
            )));
        }
        if self.rule == InputScaling::Identity {
            return Ok(x.clone());
        }
        let cols = x.cols();
        let values = x
            .values()
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let j = k % cols;
                if self.ranges[j] > 0.0 {
                    ((v - self.mins[j]) / self.ranges[j]).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect();
        FeatureMatrix::new(x.rows(), cols, values, x.names().to_vec())
            .map_err(|e| EncodeError::Shape(e.to_string()))
    }
}
