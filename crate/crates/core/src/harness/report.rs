use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{cumulative_variance, ExperimentRecord, GridResult, HarnessError};
use crate::learners::MetricBundle;

/// Column order of `results.csv`.
pub const RESULT_COLUMNS: [&str; 14] = [
    "encoding",
    "model",
    "pca_dim",
    "seed",
    "accuracy",
    "precision",
    "sensitivity",
    "f1",
    "roc_auc",
    "kappa",
    "encode_ms",
    "train_ms",
    "predict_ms",
    "error",
];

type Metric = (&'static str, fn(&MetricBundle) -> f64);

const METRICS: [Metric; 6] = [
    ("accuracy", |m| m.accuracy),
    ("precision", |m| m.precision),
    ("sensitivity", |m| m.sensitivity),
    ("f1", |m| m.f1),
    ("roc_auc", |m| m.roc_auc),
    ("kappa", |m| m.cohen_kappa),
];

fn io(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

fn csv_row(r: &ExperimentRecord) -> Vec<String> {
    let mut row = vec![
        r.encoding.clone(),
        r.model.clone(),
        r.pca_dim.to_string(),
        r.seed.to_string(),
    ];
    match &r.metrics {
        Some(m) => row.extend(METRICS.iter().map(|(_, f)| format!("{:.6}", f(m)))),
        None => row.extend(std::iter::repeat_n(String::new(), METRICS.len())),
    }
    row.extend([r.encode_ms, r.train_ms, r.predict_ms].map(|t| format!("{t:.3}")));
    row.push(r.error.clone().unwrap_or_default());
    row
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let std = if v.len() > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

fn first_seen<'a>(items: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

/// Plain-text summary: data facts, then one block per model with a column
/// per encoding and mean ± sample std over seeds.
pub fn format_report(result: &GridResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Benchmark report\n================\n");
    if let Some(l) = &result.load {
        let _ = writeln!(
            s,
            "rows read: {} (blank TotalCharges: {} dropped, {} imputed)",
            l.rows_read, l.blank_rows_dropped, l.blank_cells_imputed
        );
    }
    let t = &result.transform;
    let _ = writeln!(s, "rows after cleaning: {}", t.rows);
    let _ = writeln!(s, "class balance: {} churn / {} retained", t.class_counts.0, t.class_counts.1);
    let _ = writeln!(s, "dropped columns: {}", t.dropped.join(", "));
    let _ = writeln!(s, "encoded width: {}", t.encoded_width);
    for (seed, n) in &result.balanced_rows {
        let _ = writeln!(s, "balanced rows (seed {seed}): {n}");
    }
    match result.elbow_components {
        Some(k) => {
            let cum = cumulative_variance(result);
            let _ = writeln!(
                s,
                "elbow: {k} components, cumulative variance {} (reference: 23)",
                cum[k - 1]
            );
        }
        None => {
            let _ = writeln!(s, "elbow: not defined for fewer than 3 components");
        }
    }
    if !result.unsupported.is_empty() {
        let _ = writeln!(s, "not run (unsupported): {}", result.unsupported.join(", "));
    }
    let failed: Vec<&ExperimentRecord> = result.records.iter().filter(|r| r.error.is_some()).collect();
    let _ = writeln!(s, "cells: {} ({} failed)", result.records.len(), failed.len());

    let encodings = first_seen(result.records.iter().map(|r| r.encoding.as_str()));
    let models = first_seen(result.records.iter().map(|r| r.model.as_str()));
    let mut dims: Vec<usize> = result.records.iter().map(|r| r.pca_dim).collect();
    dims.sort_unstable();
    dims.dedup();

    let mut cells: BTreeMap<(&str, &str, usize), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in &result.records {
        cells.entry((&r.model, &r.encoding, r.pca_dim)).or_default().push(r);
    }
    let width = encodings.iter().map(|e| e.len()).max().unwrap_or(0).max(17);
    for model in &models {
        let _ = writeln!(s, "\n[{model}]");
        let _ = write!(s, "{:<5} {:<12}", "pca", "metric");
        for e in &encodings {
            let _ = write!(s, " {e:>width$}");
        }
        let _ = writeln!(s);
        for &dim in &dims {
            let rows = METRICS
                .iter()
                .map(|(n, f)| (*n, Some(*f)))
                .chain([("train_ms", None), ("n", None)]);
            for (name, f) in rows {
                let _ = write!(s, "{dim:<5} {name:<12}");
                for e in &encodings {
                    let recs = cells.get(&(*model, *e, dim)).map_or(&[][..], |v| &v[..]);
                    let ok: Vec<&MetricBundle> = recs.iter().filter_map(|r| r.metrics.as_ref()).collect();
                    let cell = match (name, f) {
                        ("n", _) => format!("{}/{}", ok.len(), recs.len()),
                        (_, Some(f)) if !ok.is_empty() => {
                            let (m, sd) = mean_std(&ok.iter().map(|b| f(b)).collect::<Vec<_>>());
                            format!("{m:.4} ± {sd:.4}")
                        }
                        ("train_ms", None) if !recs.is_empty() => {
                            let (m, sd) = mean_std(&recs.iter().map(|r| r.train_ms).collect::<Vec<_>>());
                            format!("{m:.1} ± {sd:.1}")
                        }
                        _ => "-".to_string(),
                    };
                    let _ = write!(s, " {cell:>width$}");
                }
                let _ = writeln!(s);
            }
        }
    }
    if !failed.is_empty() {
        let _ = writeln!(s, "\nfailures:");
        for r in failed {
            let _ = writeln!(
                s,
                "  {} / {} / pca {} / seed {}: {}",
                r.encoding,
                r.model,
                r.pca_dim,
                r.seed,
                r.error.as_deref().unwrap_or("")
            );
        }
    }
    s
}

/// Writes `results.csv`, `report.txt` and `explained_variance.csv` into
/// `dir`, creating it if needed. Returns the written paths.
pub fn write_report(result: &GridResult, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, HarnessError> {
    let dir = dir.as_ref();
    if result.records.is_empty() {
        return Err(HarnessError::Config("no records to report".into()));
    }
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;

    let results = dir.join("results.csv");
    let mut w = csv::Writer::from_path(&results).map_err(|e| io(&results, e))?;
    w.write_record(RESULT_COLUMNS).map_err(|e| io(&results, e))?;
    for r in &result.records {
        w.write_record(csv_row(r)).map_err(|e| io(&results, e))?;
    }
    w.flush().map_err(|e| io(&results, e))?;

    let report = dir.join("report.txt");
    fs::write(&report, format_report(result)).map_err(|e| io(&report, e))?;

    let curve = dir.join("explained_variance.csv");
    let mut text = String::from("component,ratio,cumulative\n");
    for (i, (r, c)) in result
        .variance_ratios
        .iter()
        .zip(cumulative_variance(result))
        .enumerate()
    {
        let _ = writeln!(text, "{},{r},{c}", i + 1);
    }
    fs::write(&curve, text).map_err(|e| io(&curve, e))?;
    Ok(vec![results, report, curve])
}
