//! Benchmark grid over encodings, models, PCA dimensions and seeds.
//!
//! Per seed: undersample, split, then standardize and project with PCA fitted
//! on the training rows. Per (seed, dimension, encoding): fit the input
//! scaler on training rows and encode both splits. Per model: fit, score the
//! test split and record metrics with wall-clock timings.

mod config;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

pub use config::{
    ExperimentConfig, ModelEntry, NamedEncoder, PreprocessSpec, DEFAULT_PCA_DIMS,
};
pub use report::{format_report, write_report, RESULT_COLUMNS};

use crate::data::FeatureMatrix;
use crate::encoders::{encode_matrix, InputScaler};
use crate::learners::{fit, metrics, MetricBundle, ModelSpec};
use crate::pipeline::{
    cumulative, elbow_index, load_churn_csv, pca_fit, pca_transform, preprocess,
    train_test_split, undersample, LabeledDataset, LoadReport, PcaModel, PipelineError,
    Standardizer, TransformReport,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// One (encoding, model, PCA dimension, seed) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub encoding: String,
    pub model: String,
    pub pca_dim: usize,
    pub seed: u64,
    /// `None` when the cell failed; see `error`.
    pub metrics: Option<MetricBundle>,
    pub encode_ms: f64,
    pub train_ms: f64,
    pub predict_ms: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GridResult {
    /// Ordered by encoding, model, PCA dimension, then seed, following the
    /// configuration order.
    pub records: Vec<ExperimentRecord>,
    pub unsupported: Vec<String>,
    pub load: Option<LoadReport>,
    pub transform: TransformReport,
    /// Rows after balancing, per seed.
    pub balanced_rows: Vec<(u64, usize)>,
    /// Explained-variance ratios of every component of the standardized,
    /// preprocessed dataset.
    pub variance_ratios: Vec<f64>,
    /// Number of components at the elbow of the cumulative curve.
    pub elbow_components: Option<usize>,
}

/// Standardizer and PCA fitted on one training split, with both splits
/// projected onto the leading components.
#[derive(Debug, Clone)]
pub struct PreparedSplit {
    pub standardizer: Standardizer,
    pub pca: PcaModel,
    pub train: FeatureMatrix,
    pub test: FeatureMatrix,
    pub train_labels: Vec<u8>,
    pub test_labels: Vec<u8>,
}

impl PreparedSplit {
    /// Fits on `train` only, keeping `max_dim` components.
    pub fn fit(
        train: &LabeledDataset,
        test: &LabeledDataset,
        max_dim: usize,
    ) -> Result<Self, PipelineError> {
        let xtr = train.to_feature_matrix()?;
        let xte = test.to_feature_matrix()?;
        let standardizer = Standardizer::fit(&xtr);
        let ztr = standardizer.transform(&xtr)?;
        let zte = standardizer.transform(&xte)?;
        let pca = pca_fit(&ztr, max_dim)?;
        Ok(Self {
            train: pca_transform(&pca, &ztr)?,
            test: pca_transform(&pca, &zte)?,
            standardizer,
            pca,
            train_labels: train.labels().to_vec(),
            test_labels: test.labels().to_vec(),
        })
    }

    /// First `dim` principal-component scores of each split.
    pub fn leading(&self, dim: usize) -> (FeatureMatrix, FeatureMatrix) {
        let idx: Vec<usize> = (0..dim).collect();
        (self.train.select_columns(&idx), self.test.select_columns(&idx))
    }
}

/// Input scaler fitted on the training scores and both encoded splits.
#[derive(Debug, Clone)]
pub struct EncodedSplit {
    pub scaler: InputScaler,
    pub train: FeatureMatrix,
    pub test: FeatureMatrix,
}

pub fn encode_split(
    train: &FeatureMatrix,
    test: &FeatureMatrix,
    enc: &NamedEncoder,
) -> Result<EncodedSplit, String> {
    let scaler = InputScaler::fit(train, enc.config.input_scaling);
    let run = |x: &FeatureMatrix| -> Result<FeatureMatrix, String> {
        let scaled = scaler.transform(x).map_err(|e| e.to_string())?;
        encode_matrix(&scaled, &enc.config).map_err(|e| e.to_string())
    };
    Ok(EncodedSplit {
        train: run(train)?,
        test: run(test)?,
        scaler,
    })
}

fn ms(start: Instant, keep: bool) -> f64 {
    if keep {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    }
}

struct CellOutcome {
    metrics: Option<MetricBundle>,
    train_ms: f64,
    predict_ms: f64,
    error: Option<String>,
}

fn run_model(spec: &ModelSpec, data: &EncodedSplit, ytr: &[u8], yte: &[u8], timings: bool) -> CellOutcome {
    let fail = |e: String, train_ms| CellOutcome {
        metrics: None,
        train_ms,
        predict_ms: 0.0,
        error: Some(e),
    };
    let t0 = Instant::now();
    let model = match fit(spec, &data.train, ytr) {
        Ok(m) => m,
        Err(e) => return fail(e.to_string(), ms(t0, timings)),
    };
    let train_ms = ms(t0, timings);
    let t1 = Instant::now();
    let scores = match model.predict_score(&data.test) {
        Ok(s) => s,
        Err(e) => return fail(e.to_string(), train_ms),
    };
    let pred: Vec<u8> = scores.iter().map(|&s| u8::from(s >= 0.5)).collect();
    let predict_ms = ms(t1, timings);
    match metrics(yte, &pred, &scores) {
        Ok(m) => CellOutcome {
            metrics: Some(m),
            train_ms,
            predict_ms,
            error: None,
        },
        Err(e) => fail(e.to_string(), train_ms),
    }
}

/// Loads the configured data file and runs the grid on it.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<GridResult, HarnessError> {
    cfg.validate()?;
    let path: &PathBuf = cfg
        .data
        .as_ref()
        .ok_or_else(|| HarnessError::Config("no data path given".into()))?;
    let (ds, load) = load_churn_csv(path, &cfg.preprocess.load)?;
    let mut result = run_grid_on(cfg, &ds)?;
    result.load = Some(load);
    Ok(result)
}

/// Runs the grid on an already loaded (not yet preprocessed) dataset.
pub fn run_grid_on(cfg: &ExperimentConfig, raw: &LabeledDataset) -> Result<GridResult, HarnessError> {
    cfg.validate()?;
    let (ds, transform) = preprocess(raw, &cfg.preprocess.drop)?;
    let width = ds.columns().len();
    let max_dim = *cfg.pca_dims.iter().max().expect("validated non-empty");
    if max_dim > width {
        return Err(HarnessError::Config(format!(
            "pca dimension {max_dim} exceeds the {width} preprocessed columns"
        )));
    }

    let full = ds.to_feature_matrix()?;
    let z = Standardizer::fit(&full).transform(&full)?;
    let variance_ratios = pca_fit(&z, 1)?.full_variance_ratio;
    let elbow_components = elbow_index(&variance_ratios).ok().map(|i| i + 1);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;

    let supported: Vec<(usize, &str, &ModelSpec)> = cfg
        .models
        .iter()
        .enumerate()
        .filter_map(|(i, m)| match m {
            ModelEntry::Supported { name, spec } => Some((i, name.as_str(), spec)),
            ModelEntry::Unsupported { .. } => None,
        })
        .collect();

    let (prepared, records) = pool.install(|| {
        let prepared: Vec<Result<(usize, PreparedSplit), String>> = cfg
            .seeds
            .par_iter()
            .map(|&seed| {
                let bal = if cfg.preprocess.undersample {
                    undersample(&ds, seed).map_err(|e| e.to_string())?
                } else {
                    ds.clone()
                };
                let (train, test) =
                    train_test_split(&bal, &cfg.split.with_seed(seed)).map_err(|e| e.to_string())?;
                let p = PreparedSplit::fit(&train, &test, max_dim).map_err(|e| e.to_string())?;
                Ok((bal.rows(), p))
            })
            .collect();

        let units: Vec<(usize, usize, usize)> = (0..cfg.seeds.len())
            .flat_map(|s| {
                (0..cfg.pca_dims.len())
                    .flat_map(move |d| (0..cfg.encodings.len()).map(move |e| (s, d, e)))
            })
            .collect();
        let mut records: Vec<((usize, usize, usize, usize), ExperimentRecord)> = units
            .par_iter()
            .flat_map_iter(|&(s, d, e)| {
                let seed = cfg.seeds[s];
                let dim = cfg.pca_dims[d];
                let enc = &cfg.encodings[e];
                let record = |model: &str, o: CellOutcome, encode_ms| ExperimentRecord {
                    encoding: enc.name.clone(),
                    model: model.to_string(),
                    pca_dim: dim,
                    seed,
                    metrics: o.metrics,
                    encode_ms,
                    train_ms: o.train_ms,
                    predict_ms: o.predict_ms,
                    error: o.error,
                };
                let failed = |msg: &str| CellOutcome {
                    metrics: None,
                    train_ms: 0.0,
                    predict_ms: 0.0,
                    error: Some(msg.to_string()),
                };
                let mut out = Vec::with_capacity(supported.len());
                let split = match &prepared[s] {
                    Ok((_, p)) => p,
                    Err(msg) => {
                        for &(m, name, _) in &supported {
                            out.push(((e, m, d, s), record(name, failed(msg), 0.0)));
                        }
                        return out;
                    }
                };
                let (tr, te) = split.leading(dim);
                let t0 = Instant::now();
                let encoded = encode_split(&tr, &te, enc);
                let encode_ms = ms(t0, cfg.timings);
                match encoded {
                    Err(msg) => {
                        for &(m, name, _) in &supported {
                            out.push(((e, m, d, s), record(name, failed(&msg), encode_ms)));
                        }
                    }
                    Ok(data) => {
                        for &(m, name, spec) in &supported {
                            let o = run_model(
                                &spec.with_seed(seed),
                                &data,
                                &split.train_labels,
                                &split.test_labels,
                                cfg.timings,
                            );
                            out.push(((e, m, d, s), record(name, o, encode_ms)));
                        }
                    }
                }
                out
            })
            .collect();
        records.sort_by_key(|(k, _)| *k);
        (prepared, records)
    });

    Ok(GridResult {
        records: records.into_iter().map(|(_, r)| r).collect(),
        unsupported: cfg.unsupported_models(),
        load: None,
        transform,
        balanced_rows: cfg
            .seeds
            .iter()
            .zip(&prepared)
            .filter_map(|(&s, p)| p.as_ref().ok().map(|(n, _)| (s, *n)))
            .collect(),
        variance_ratios,
        elbow_components,
    })
}

/// Cumulative explained variance, one entry per component.
pub fn cumulative_variance(result: &GridResult) -> Vec<f64> {
    cumulative(&result.variance_ratios)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{load_churn_reader, synthetic::telco_like_csv, LoadOptions};

    fn dataset(rows: usize, seed: u64) -> LabeledDataset {
        let text = telco_like_csv(rows, seed);
        load_churn_reader(text.as_bytes(), &LoadOptions::default()).unwrap().0
    }

    fn config(extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(&format!(
            "seeds = [1]\npca_dims = [4]\ntimings = false\n{extra}\n\
             [[encoding]]\nmethod = \"classical\"\n[[model]]\nkind = \"logreg\"\n"
        ))
        .unwrap()
    }

    #[test]
    fn single_cell_grid_gives_one_record() {
        let r = run_grid_on(&config(""), &dataset(300, 1)).unwrap();
        assert_eq!(r.records.len(), 1);
        let rec = &r.records[0];
        assert!(rec.error.is_none(), "{:?}", rec.error);
        assert!(rec.metrics.unwrap().accuracy > 0.6);
        assert_eq!(r.transform.encoded_width, 42);
    }

    #[test]
    fn grid_is_complete_and_ordered() {
        let cfg = ExperimentConfig::from_toml_str(
            "seeds = [3, 1]\npca_dims = [6, 3]\ntimings = false\n\
             [[encoding]]\nmethod = \"iqp\"\n[[encoding]]\nmethod = \"displacement\"\n\
             [[model]]\nkind = \"knn\"\n[[model]]\nkind = \"catboost\"\n[[model]]\nkind = \"decision-tree\"\n",
        )
        .unwrap();
        let r = run_grid_on(&cfg, &dataset(240, 2)).unwrap();
        assert_eq!(r.records.len(), 2 * 2 * 2 * 2);
        assert_eq!(r.unsupported, vec!["catboost".to_string()]);
        let keys: Vec<(String, String, usize, u64)> = r
            .records
            .iter()
            .map(|x| (x.encoding.clone(), x.model.clone(), x.pca_dim, x.seed))
            .collect();
        assert_eq!(keys[0], ("iqp".into(), "knn".into(), 6, 3));
        assert_eq!(keys[1], ("iqp".into(), "knn".into(), 6, 1));
        assert_eq!(keys[2], ("iqp".into(), "knn".into(), 3, 3));
        assert_eq!(keys[4], ("iqp".into(), "decision-tree".into(), 6, 3));
        assert_eq!(keys[8].0, "displacement");
        assert!(r.records.iter().all(|x| x.error.is_none()));
    }

    #[test]
    fn oversized_pca_dimension_is_fatal() {
        let cfg = ExperimentConfig::from_toml_str(
            "pca_dims = [50]\n[[encoding]]\nmethod = \"classical\"\n[[model]]\nkind = \"knn\"\n",
        )
        .unwrap();
        assert!(matches!(
            run_grid_on(&cfg, &dataset(200, 3)),
            Err(HarnessError::Config(_))
        ));
    }

    #[test]
    fn seed_failures_are_recorded_per_cell() {
        // Too few rows to stratify after balancing: every cell of the grid
        // carries the error instead of aborting the run.
        let ds = dataset(200, 4);
        let idx: Vec<usize> = (0..ds.rows())
            .filter(|&i| ds.labels()[i] == 0)
            .take(30)
            .chain((0..ds.rows()).filter(|&i| ds.labels()[i] == 1).take(1))
            .collect();
        let tiny = ds.select_rows(&idx);
        let cfg = config("[preprocess]\nundersample = true");
        let r = run_grid_on(&cfg, &tiny).unwrap();
        assert_eq!(r.records.len(), 1);
        assert!(r.records[0].error.is_some());
    }

    #[test]
    fn fitted_transforms_ignore_test_rows() {
        let ds = dataset(300, 5);
        let (enc, _) = preprocess(&ds, &crate::pipeline::DEFAULT_DROP_PROFILE).unwrap();
        let idx: Vec<usize> = (0..enc.rows()).collect();
        let train = enc.select_rows(&idx[..200]);
        let a = PreparedSplit::fit(&train, &enc.select_rows(&idx[200..]), 5).unwrap();
        let b = PreparedSplit::fit(&train, &enc.select_rows(&idx[..50]), 5).unwrap();
        assert_eq!(a.standardizer, b.standardizer);
        assert_eq!(a.pca, b.pca);
        let named = NamedEncoder {
            name: "squeezing".into(),
            config: crate::encoders::EncoderConfig::new(crate::encoders::EncodingMethod::Squeezing),
        };
        let (tr, te_a) = a.leading(5);
        let (_, te_b) = b.leading(5);
        let ea = encode_split(&tr, &te_a, &named).unwrap();
        let eb = encode_split(&tr, &te_b, &named).unwrap();
        assert_eq!(ea.scaler, eb.scaler);
        assert_eq!(ea.train, eb.train);
    }

    #[test]
    fn variance_curve_reaches_one() {
        let r = run_grid_on(&config(""), &dataset(300, 6)).unwrap();
        let cum = cumulative_variance(&r);
        assert!(cum.windows(2).all(|w| w[1] >= w[0]));
        assert!((cum.last().unwrap() - 1.0).abs() < 1e-9);
        assert!(r.elbow_components.is_some());
    }
}
