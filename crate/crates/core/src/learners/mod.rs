//! Binary classifiers implemented from scratch, plus the evaluation metrics.
//!
//! Labels are `u8` values in `{0, 1}`. Every model exposes a score that
//! increases with confidence in class 1; labels are the scores thresholded
//! at 0.5. Margin models (SVMs, AdaBoost) pass their decision value through
//! the logistic function.

mod knn;
mod logreg;
mod metrics;
mod spec;
mod svm;
mod tree;

use thiserror::Error;

use crate::data::{DataError, FeatureMatrix};

pub use knn::KnnModel;
pub use logreg::{logreg_objective, LogisticModel};
pub use metrics::{metrics, roc_auc, Confusion, MetricBundle, Undefined};
pub use spec::{Hyperparams, Kernel, ModelKind, ModelSpec, Params, TreeParams};
pub use svm::SvmModel;
pub use tree::{AdaBoostModel, DecisionTree, ForestModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error("invalid hyperparameters: {0}")]
    Config(String),
    #[error("training error: {0}")]
    Training(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("model {0} is not implemented")]
    Unsupported(String),
}

impl From<DataError> for LearnError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Shape(s) => Self::Shape(s),
            e @ DataError::NonFinite { .. } => Self::Data(e.to_string()),
        }
    }
}

pub(crate) fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// A fitted classifier. Immutable; safe to share across threads.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    LogReg(LogisticModel),
    Knn(KnnModel),
    Svm(SvmModel),
    Tree(DecisionTree),
    Forest(ForestModel),
    AdaBoost(AdaBoostModel),
}

impl TrainedModel {
    pub fn width(&self) -> usize {
        match self {
            Self::LogReg(m) => m.weights.len(),
            Self::Knn(m) => m.width(),
            Self::Svm(m) => m.width(),
            Self::Tree(m) => m.width(),
            Self::Forest(m) => m.width(),
            Self::AdaBoost(m) => m.width(),
        }
    }

    fn check(&self, x: &FeatureMatrix) -> Result<(), LearnError> {
        if x.cols() != self.width() {
            return Err(LearnError::Shape(format!(
                "model trained on {} features, got {}",
                self.width(),
                x.cols()
            )));
        }
        x.check_finite()?;
        Ok(())
    }

    /// Class-1 scores in [0, 1].
    pub fn predict_score(&self, x: &FeatureMatrix) -> Result<Vec<f64>, LearnError> {
        self.check(x)?;
        Ok(match self {
            Self::LogReg(m) => x.row_iter().map(|r| m.probability(r)).collect(),
            Self::Knn(m) => m.scores(x),
            Self::Svm(m) => x.row_iter().map(|r| logistic(m.decision(r))).collect(),
            Self::Tree(m) => x.row_iter().map(|r| m.score(r)).collect(),
            Self::Forest(m) => x.row_iter().map(|r| m.score(r)).collect(),
            Self::AdaBoost(m) => x.row_iter().map(|r| logistic(m.decision(r))).collect(),
        })
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<u8>, LearnError> {
        Ok(self
            .predict_score(x)?
            .into_iter()
            .map(|s| u8::from(s >= 0.5))
            .collect())
    }
}

fn check_training(x: &FeatureMatrix, y: &[u8], need_both: bool) -> Result<(), LearnError> {
    if x.rows() != y.len() {
        return Err(LearnError::Shape(format!(
            "{} rows but {} labels",
            x.rows(),
            y.len()
        )));
    }
    if x.rows() == 0 {
        return Err(LearnError::Training("no training rows".into()));
    }
    if let Some(i) = y.iter().position(|&l| l > 1) {
        return Err(LearnError::Data(format!("label {} at row {i} is not 0 or 1", y[i])));
    }
    x.check_finite()?;
    if need_both {
        let pos = y.iter().filter(|&&l| l == 1).count();
        if pos == 0 || pos == y.len() {
            return Err(LearnError::Training(format!(
                "training labels contain a single class ({} rows)",
                y.len()
            )));
        }
    }
    Ok(())
}

/// Trains the model described by `spec`. Deterministic for a given seed.
pub fn fit(spec: &ModelSpec, x: &FeatureMatrix, y: &[u8]) -> Result<TrainedModel, LearnError> {
    let hp = spec.hyperparams();
    check_training(x, y, !matches!(hp, Hyperparams::Knn { .. }))?;
    Ok(match hp {
        Hyperparams::LogReg { l2, max_iter } => {
            TrainedModel::LogReg(LogisticModel::fit(x, y, l2, max_iter)?)
        }
        Hyperparams::Knn { k } => TrainedModel::Knn(KnnModel::fit(x, y, k)),
        Hyperparams::Svm {
            kernel,
            c,
            tol,
            max_iter,
        } => TrainedModel::Svm(SvmModel::fit(x, y, kernel, c, tol, max_iter)?),
        Hyperparams::Tree(p) => TrainedModel::Tree(DecisionTree::fit(x, y, &p)),
        Hyperparams::Forest {
            trees,
            max_features,
            bootstrap,
            tree,
        } => TrainedModel::Forest(ForestModel::fit(
            x,
            y,
            trees,
            max_features,
            bootstrap,
            &tree,
            spec.seed,
        )),
        Hyperparams::AdaBoost { rounds } => TrainedModel::AdaBoost(AdaBoostModel::fit(x, y, rounds)),
    })
}
