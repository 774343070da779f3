//! Z-score standardization, principal components from the sample covariance
//! and elbow detection on the explained-variance curve.

use super::PipelineError;
use crate::data::FeatureMatrix;
use crate::linalg::symmetric_eigen;

/// Per-column z-scoring fitted on a training matrix. Constant columns are
/// centered but not rescaled.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &FeatureMatrix) -> Self {
        let n = x.rows().max(1) as f64;
        let means: Vec<f64> = (0..x.cols())
            .map(|j| x.column(j).iter().sum::<f64>() / n)
            .collect();
        let stds = (0..x.cols())
            .map(|j| {
                let var = x.column(j).iter().map(|v| (v - means[j]).powi(2)).sum::<f64>() / n;
                let sd = var.sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { means, stds }
    }

    pub fn transform(&self, x: &FeatureMatrix) -> Result<FeatureMatrix, PipelineError> {
        if x.cols() != self.means.len() {
            return Err(PipelineError::Shape(format!(
                "standardizer fitted on {} columns, got {}",
                self.means.len(),
                x.cols()
            )));
        }
        let cols = x.cols();
        let values = x
            .values()
            .iter()
            .enumerate()
            .map(|(k, v)| (v - self.means[k % cols]) / self.stds[k % cols])
            .collect();
        Ok(FeatureMatrix::new(x.rows(), cols, values, x.names().to_vec())?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Unit component vectors, one per row, by descending eigenvalue.
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    /// Ratios for every component of the fitted data, not only the kept ones.
    pub full_variance_ratio: Vec<f64>,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Maps projected rows back to the input space.
    pub fn inverse_transform(&self, z: &FeatureMatrix) -> Result<FeatureMatrix, PipelineError> {
        if z.cols() != self.components.len() {
            return Err(PipelineError::Shape(format!(
                "{} scores for {} components",
                z.cols(),
                self.components.len()
            )));
        }
        let d = self.mean.len();
        let mut values = Vec::with_capacity(z.rows() * d);
        for row in z.row_iter() {
            let mut out = self.mean.clone();
            for (score, comp) in row.iter().zip(&self.components) {
                out.iter_mut().zip(comp).for_each(|(o, c)| *o += score * c);
            }
            values.extend(out);
        }
        let names = (0..d).map(|j| format!("x{j}")).collect();
        Ok(FeatureMatrix::new(z.rows(), d, values, names)?)
    }
}

/// Principal components of the sample covariance of `x`.
///
/// Each component is signed so that its largest-magnitude entry is positive.
/// Rank-deficient directions carry ratios of (numerically) zero.
pub fn pca_fit(x: &FeatureMatrix, n_components: usize) -> Result<PcaModel, PipelineError> {
    let (n, d) = (x.rows(), x.cols());
    if n < 2 || d == 0 {
        return Err(PipelineError::Degenerate(format!(
            "PCA needs at least 2 rows and 1 column, got {n}x{d}"
        )));
    }
    if n_components == 0 || n_components > n.min(d) {
        return Err(PipelineError::Config(format!(
            "n_components {n_components} must lie in 1..={}",
            n.min(d)
        )));
    }
    x.check_finite()?;
    let mean: Vec<f64> = (0..d)
        .map(|j| x.column(j).iter().sum::<f64>() / n as f64)
        .collect();
    let mut cov = vec![0.0; d * d];
    for row in x.row_iter() {
        let c: Vec<f64> = row.iter().zip(&mean).map(|(v, m)| v - m).collect();
        for i in 0..d {
            if c[i] == 0.0 {
                continue;
            }
            for j in i..d {
                cov[i * d + j] += c[i] * c[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[i * d + j] /= (n - 1) as f64;
            cov[j * d + i] = cov[i * d + j];
        }
    }

    let (values, vectors) = symmetric_eigen(&cov, d);
    let values: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
    let total: f64 = values.iter().sum();
    let full_variance_ratio: Vec<f64> = if total > 0.0 {
        values.iter().map(|v| v / total).collect()
    } else {
        vec![0.0; d]
    };
    let components = (0..n_components)
        .map(|k| {
            let mut v = vectors[k * d..(k + 1) * d].to_vec();
            let pivot = v
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
                .map_or(0, |(i, _)| i);
            if v[pivot] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    Ok(PcaModel {
        mean,
        components,
        explained_variance: values[..n_components].to_vec(),
        explained_variance_ratio: full_variance_ratio[..n_components].to_vec(),
        full_variance_ratio,
    })
}

/// Projects centered rows of `x` onto the model's components.
pub fn pca_transform(model: &PcaModel, x: &FeatureMatrix) -> Result<FeatureMatrix, PipelineError> {
    if x.cols() != model.mean.len() {
        return Err(PipelineError::Shape(format!(
            "PCA fitted on {} columns, got {}",
            model.mean.len(),
            x.cols()
        )));
    }
    let k = model.components.len();
    let mut values = Vec::with_capacity(x.rows() * k);
    for row in x.row_iter() {
        let c: Vec<f64> = row.iter().zip(&model.mean).map(|(v, m)| v - m).collect();
        values.extend(
            model
                .components
                .iter()
                .map(|comp| comp.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>()),
        );
    }
    let names = (1..=k).map(|i| format!("pc{i}")).collect();
    Ok(FeatureMatrix::new(x.rows(), k, values, names)?)
}

/// Running sum of `ratios`.
pub fn cumulative(ratios: &[f64]) -> Vec<f64> {
    ratios
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r;
            Some(*acc)
        })
        .collect()
}

/// Index (0-based) of the point on the cumulative explained-variance curve
/// farthest from the chord joining its first and last points. Distances
/// within 1e-12 of the maximum count as ties and resolve to the smaller
/// index.
pub fn elbow_index(ratios: &[f64]) -> Result<usize, PipelineError> {
    if ratios.len() < 3 {
        return Err(PipelineError::Degenerate(format!(
            "elbow needs at least 3 ratios, got {}",
            ratios.len()
        )));
    }
    let cum = cumulative(ratios);
    let last = cum.len() - 1;
    let (x0, y0) = (0.0, cum[0]);
    let (x1, y1) = (last as f64, cum[last]);
    let (dx, dy) = (x1 - x0, y1 - y0);
    let len = (dx * dx + dy * dy).sqrt();
    let dist: Vec<f64> = cum
        .iter()
        .enumerate()
        .map(|(i, &y)| (dy * (i as f64 - x0) - dx * (y - y0)).abs() / len)
        .collect();
    let best = dist.iter().copied().fold(0.0, f64::max);
    Ok(dist
        .iter()
        .position(|&d| d >= best - 1e-12)
        .expect("non-empty"))
}
