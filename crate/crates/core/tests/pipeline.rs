use std::path::PathBuf;

use cvqml::harness::{run_grid, write_report, ExperimentConfig, RESULT_COLUMNS};
use cvqml::pipeline::{
    load_churn_csv, pca_fit, pca_transform, preprocess, synthetic::telco_like_csv, LoadOptions,
    DEFAULT_DROP_PROFILE,
};
use cvqml::FeatureMatrix;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/telco_fixture_20.csv")
}

fn correlated(n: usize, d: usize, seed: u64) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mix: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let z: Vec<f64> = (0..d).map(|k| rng.gen_range(-1.0..1.0) * (k + 1) as f64).collect();
            (0..d)
                .map(|i| (0..d).map(|k| mix[i * d + k] * z[k]).sum())
                .collect()
        })
        .collect();
    FeatureMatrix::from_rows(&rows).unwrap()
}

#[test]
fn pca_matches_nalgebra_eigendecomposition() {
    for seed in 0..5 {
        let d = 6;
        let x = correlated(120, d, seed);
        let m = pca_fit(&x, d).unwrap();

        let n = x.rows();
        let data = DMatrix::from_row_slice(n, d, x.values());
        let mean = data.row_mean();
        let centered = DMatrix::from_fn(n, d, |i, j| data[(i, j)] - mean[j]);
        let cov = centered.transpose() * &centered / (n - 1) as f64;
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let total: f64 = eig.eigenvalues.iter().sum();

        for (k, &o) in order.iter().enumerate() {
            let lambda = eig.eigenvalues[o];
            assert!((m.explained_variance[k] - lambda).abs() < 1e-9 * total, "seed {seed} k {k}");
            assert!((m.explained_variance_ratio[k] - lambda / total).abs() < 1e-10);
            let v = eig.eigenvectors.column(o);
            let align: f64 = m.components[k].iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            assert!((align.abs() - 1.0).abs() < 1e-8, "seed {seed} k {k}: {align}");
            let pivot = m.components[k]
                .iter()
                .copied()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap();
            assert!(pivot > 0.0);
        }
    }
}

#[test]
fn pca_scores_are_uncorrelated() {
    let x = correlated(200, 5, 11);
    let m = pca_fit(&x, 5).unwrap();
    let z = pca_transform(&m, &x).unwrap();
    for a in 0..5 {
        for b in a + 1..5 {
            let cov: f64 = z.row_iter().map(|r| r[a] * r[b]).sum::<f64>() / 199.0;
            assert!(cov.abs() < 1e-9, "{a} {b} {cov}");
        }
        let var: f64 = z.row_iter().map(|r| r[a] * r[a]).sum::<f64>() / 199.0;
        assert!((var - m.explained_variance[a]).abs() < 1e-9 * m.explained_variance[0]);
    }
}

#[test]
fn bundled_fixture_loads_and_encodes() {
    let (ds, load) = load_churn_csv(fixture(), &LoadOptions::default()).unwrap();
    assert_eq!(load.rows_read, 20);
    assert_eq!(ds.rows(), 20);
    assert_eq!(ds.class_counts(), (3, 17));
    let (encoded, report) = preprocess(&ds, &DEFAULT_DROP_PROFILE).unwrap();
    assert_eq!(report.encoded_width, encoded.columns().len());
    let x = encoded.to_feature_matrix().unwrap();
    assert_eq!(x.rows(), 20);
    assert!(x.values().iter().all(|v| v.is_finite()));
}

fn grid_config(data: &std::path::Path, out: &std::path::Path) -> ExperimentConfig {
    let text = format!(
        r#"
        data = "{}"
        out = "{}"
        seeds = [0, 1]
        pca_dims = [3, 6]
        timings = false

        [[encoding]]
        method = "classical"
        [[encoding]]
        method = "displacement"
        [[encoding]]
        method = "squeezing"
        [[encoding]]
        method = "iqp"

        [[model]]
        kind = "logreg"
        [[model]]
        kind = "knn"
        [[model]]
        kind = "tree"
        [[model]]
        kind = "catboost"
        "#,
        data.display(),
        out.display()
    );
    ExperimentConfig::from_toml_str(&text).unwrap()
}

#[test]
fn grid_from_file_is_complete_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("churn.csv");
    std::fs::write(&data, telco_like_csv(240, 5)).unwrap();

    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("out{run}"));
        let cfg = grid_config(&data, &out);
        let result = run_grid(&cfg).unwrap();
        assert_eq!(result.records.len(), 4 * 3 * 2 * 2);
        assert_eq!(result.unsupported, vec!["catboost".to_string()]);
        assert!(result.records.iter().all(|r| r.error.is_none()), "{:?}", result.records);
        assert_eq!(result.load.as_ref().unwrap().rows_read, 240);
        outputs.push(write_report(&result, &cfg.out).unwrap());
    }
    for (a, b) in outputs[0].iter().zip(&outputs[1]) {
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), "{}", a.display());
    }
    let csv = std::fs::read_to_string(&outputs[0][0]).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header.split(',').collect::<Vec<_>>(), RESULT_COLUMNS);
    assert_eq!(csv.lines().count(), 1 + 48);
}

#[test]
fn missing_data_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = grid_config(&dir.path().join("absent.csv"), dir.path());
    let err = run_grid(&cfg).unwrap_err().to_string();
    assert!(err.contains("absent.csv"), "{err}");
}
