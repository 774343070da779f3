//! Tabular ingestion and preprocessing: churn CSV loading, column drops,
//! one-hot encoding, multicollinearity diagnostics, class balancing,
//! standardization, PCA and train/test splitting.

mod dataset;
mod onehot;
mod pca;
mod sampling;
mod stats;
pub mod synthetic;

use std::fmt;

use thiserror::Error;

pub use dataset::{
    load_churn_csv, load_churn_reader, BlankPolicy, Column, ColumnData, LabeledDataset,
    LoadOptions, LoadReport, DEFAULT_DROP_PROFILE, TELCO_CATEGORICAL, TELCO_COLUMNS,
    TELCO_NUMERIC,
};
pub use onehot::{one_hot, OneHotEncoder, OneHotReport};
pub use pca::{cumulative, elbow_index, pca_fit, pca_transform, PcaModel, Standardizer};
pub use sampling::{split_indices, train_test_split, undersample, undersample_indices, SplitSpec};
pub use stats::{pearson_corr, vif_scores, CorrelationReport, VifReport, VIF_CAP};

use crate::data::DataError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("I/O error: {0}")]
    Io(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("data error at row {row}: {message}")]
    Data { row: usize, message: String },
    #[error("class balance error: {0}")]
    Balance(String),
    #[error("split error: {0}")]
    Split(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl From<DataError> for PipelineError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Shape(s) => Self::Shape(s),
            DataError::NonFinite { row, col } => Self::Data {
                row,
                message: format!("non-finite value in column {col}"),
            },
        }
    }
}

/// Summary of the drop and encoding steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformReport {
    pub rows: usize,
    pub class_counts: (usize, usize),
    pub dropped: Vec<String>,
    /// Pairwise correlations between the numeric columns present before drops.
    pub numeric_correlations: Vec<(String, String, f64)>,
    /// VIFs of label-encoded raw columns before and after the drops.
    pub vif_before: Option<VifReport>,
    pub vif_after: Option<VifReport>,
    pub categories: Vec<(String, Vec<String>)>,
    pub encoded_width: usize,
    pub unseen: OneHotReport,
}

impl fmt::Display for TransformReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows: {}", self.rows)?;
        writeln!(
            f,
            "class balance: {} positive / {} negative",
            self.class_counts.0, self.class_counts.1
        )?;
        writeln!(f, "\nnumeric correlations:")?;
        for (a, b, r) in &self.numeric_correlations {
            writeln!(f, "  {a} ~ {b}: {r:.4}")?;
        }
        for (title, vif) in [
            ("VIF before drops", &self.vif_before),
            ("VIF after drops", &self.vif_after),
        ] {
            if let Some(v) = vif {
                writeln!(f, "\n{title}:")?;
                for ((name, score), deg) in v.names.iter().zip(&v.scores).zip(&v.degenerate) {
                    let flag = if *deg { " (constant)" } else { "" };
                    writeln!(f, "  {name:<18} {score:>10.3}{flag}")?;
                }
            }
        }
        writeln!(f, "\ndropped: {}", self.dropped.join(", "))?;
        writeln!(f, "\ncategories:")?;
        for (col, cats) in &self.categories {
            writeln!(f, "  {col}: {}", cats.join(" | "))?;
        }
        writeln!(f, "\nencoded width: {}", self.encoded_width)?;
        write!(f, "{}", self.unseen)
    }
}

/// Applies the column drops and one-hot encodes every remaining categorical
/// column. The returned dataset is entirely numeric.
pub fn preprocess(
    ds: &LabeledDataset,
    drop: &[impl AsRef<str>],
) -> Result<(LabeledDataset, TransformReport), PipelineError> {
    let numeric_names: Vec<&str> = ds
        .columns()
        .iter()
        .filter(|c| matches!(c.data, ColumnData::Numeric(_)))
        .map(|c| c.name.as_str())
        .collect();
    let mut numeric_correlations = Vec::new();
    if ds.rows() >= 2 && numeric_names.len() >= 2 {
        let numeric = ds.to_feature_matrix_subset(&numeric_names)?;
        let corr = pearson_corr(&numeric)?;
        for i in 0..numeric_names.len() {
            for j in i + 1..numeric_names.len() {
                numeric_correlations.push((
                    numeric_names[i].to_string(),
                    numeric_names[j].to_string(),
                    corr.get(i, j),
                ));
            }
        }
    }
    let vif = |d: &LabeledDataset| {
        (d.columns().len() >= 2 && d.rows() > 2)
            .then(|| vif_scores(&d.label_encoded()).ok())
            .flatten()
    };
    let vif_before = vif(ds);
    let kept = ds.drop_columns(drop)?;
    let vif_after = vif(&kept);

    let categorical: Vec<String> = kept
        .columns()
        .iter()
        .filter(|c| matches!(c.data, ColumnData::Categorical(_)))
        .map(|c| c.name.clone())
        .collect();
    let encoder = OneHotEncoder::fit(&kept, &categorical)?;
    let (encoded, unseen) = encoder.transform(&kept)?;
    let report = TransformReport {
        rows: ds.rows(),
        class_counts: ds.class_counts(),
        dropped: drop.iter().map(|s| s.as_ref().to_string()).collect(),
        numeric_correlations,
        vif_before,
        vif_after,
        categories: encoder.categories().to_vec(),
        encoded_width: encoded.columns().len(),
        unseen,
    };
    Ok((encoded, report))
}

impl LabeledDataset {
    /// Named numeric columns as a matrix.
    pub fn to_feature_matrix_subset(
        &self,
        names: &[&str],
    ) -> Result<crate::data::FeatureMatrix, PipelineError> {
        let cols: Vec<&[f64]> = names
            .iter()
            .map(|n| self.numeric(n))
            .collect::<Result<_, _>>()?;
        let n = self.rows();
        let mut values = Vec::with_capacity(n * cols.len());
        for i in 0..n {
            values.extend(cols.iter().map(|c| c[i]));
        }
        Ok(crate::data::FeatureMatrix::new(
            n,
            cols.len(),
            values,
            names.iter().map(|s| s.to_string()).collect(),
        )?)
    }
}
