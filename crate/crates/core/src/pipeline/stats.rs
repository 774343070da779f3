//! Multicollinearity diagnostics.

use super::PipelineError;
use crate::data::FeatureMatrix;
use crate::linalg::projection_r2;

/// Upper bound reported for variance inflation factors.
pub const VIF_CAP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct VifReport {
    pub names: Vec<String>,
    pub scores: Vec<f64>,
    /// Constant columns; their score is reported at the cap.
    pub degenerate: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub names: Vec<String>,
    /// Row-major `cols x cols` Pearson correlations.
    pub matrix: Vec<f64>,
    /// Zero-variance columns; their off-diagonal correlations are 0.
    pub zero_variance: Vec<bool>,
}

impl CorrelationReport {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.names.len() + j]
    }

    pub fn by_name(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        Some(self.get(i, j))
    }
}

fn centered_columns(x: &FeatureMatrix) -> Vec<Vec<f64>> {
    (0..x.cols())
        .map(|j| {
            let col = x.column(j);
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            col.into_iter().map(|v| v - mean).collect()
        })
        .collect()
}

fn is_constant(col: &[f64], scale: f64) -> bool {
    let ss: f64 = col.iter().map(|v| v * v).sum();
    ss.sqrt() <= 1e-12 * scale.max(1.0)
}

/// `1 / (1 - R²_j)` where `R²_j` comes from regressing column `j` (with an
/// intercept) on every other column.
pub fn vif_scores(x: &FeatureMatrix) -> Result<VifReport, PipelineError> {
    if x.cols() < 2 {
        return Err(PipelineError::Degenerate(format!(
            "VIF needs at least 2 columns, got {}",
            x.cols()
        )));
    }
    if x.rows() < 2 {
        return Err(PipelineError::Degenerate("VIF needs at least 2 rows".into()));
    }
    let cols = centered_columns(x);
    let scale = x.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let degenerate: Vec<bool> = cols.iter().map(|c| is_constant(c, scale)).collect();
    let scores = (0..cols.len())
        .map(|j| {
            if degenerate[j] {
                return VIF_CAP;
            }
            let others: Vec<Vec<f64>> = cols
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, c)| c.clone())
                .collect();
            let r2 = projection_r2(&cols[j], &others);
            if r2 >= 1.0 {
                VIF_CAP
            } else {
                (1.0 / (1.0 - r2)).min(VIF_CAP)
            }
        })
        .collect();
    Ok(VifReport {
        names: x.names().to_vec(),
        scores,
        degenerate,
    })
}

pub fn pearson_corr(x: &FeatureMatrix) -> Result<CorrelationReport, PipelineError> {
    if x.rows() < 2 {
        return Err(PipelineError::Degenerate(
            "correlation needs at least 2 rows".into(),
        ));
    }
    let cols = centered_columns(x);
    let scale = x.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero_variance: Vec<bool> = cols.iter().map(|c| is_constant(c, scale)).collect();
    let norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let d = cols.len();
    let mut matrix = vec![0.0; d * d];
    for i in 0..d {
        matrix[i * d + i] = 1.0;
        for j in i + 1..d {
            let r = if zero_variance[i] || zero_variance[j] {
                0.0
            } else {
                let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0)
            };
            matrix[i * d + j] = r;
            matrix[j * d + i] = r;
        }
    }
    Ok(CorrelationReport {
        names: x.names().to_vec(),
        matrix,
        zero_variance,
    })
}
