use std::fmt;

use super::dataset::{Column, ColumnData, LabeledDataset};
use super::PipelineError;

/// Category vocabularies learned from a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct OneHotEncoder {
    groups: Vec<(String, Vec<String>)>,
}

/// Per-column counts of values that were not in the fitted vocabulary.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OneHotReport {
    pub unseen: Vec<(String, usize)>,
}

impl fmt::Display for OneHotReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unseen.is_empty() {
            return writeln!(f, "no unseen categories");
        }
        for (col, n) in &self.unseen {
            writeln!(f, "{col}: {n} unseen value(s) mapped to all-zero indicators")?;
        }
        Ok(())
    }
}

impl OneHotEncoder {
    pub fn fit(ds: &LabeledDataset, categorical: &[impl AsRef<str>]) -> Result<Self, PipelineError> {
        let mut groups = Vec::with_capacity(categorical.len());
        for name in categorical {
            let name = name.as_ref();
            let col = ds
                .column(name)
                .ok_or_else(|| PipelineError::Schema(format!("missing column {name}")))?;
            let ColumnData::Categorical(values) = &col.data else {
                return Err(PipelineError::Schema(format!("column {name} is not categorical")));
            };
            let mut cats = values.clone();
            cats.sort();
            cats.dedup();
            groups.push((name.to_string(), cats));
        }
        Ok(Self { groups })
    }

    /// `(column, sorted categories)` pairs.
    pub fn categories(&self) -> &[(String, Vec<String>)] {
        &self.groups
    }

    /// Output width when applied to `ds`.
    pub fn width(&self, ds: &LabeledDataset) -> usize {
        ds.columns()
            .iter()
            .map(|c| {
                self.groups
                    .iter()
                    .find(|(n, _)| *n == c.name)
                    .map_or(1, |(_, cats)| cats.len())
            })
            .sum()
    }

    /// Replaces each fitted column with one indicator per category, in
    /// place; other columns pass through.
    pub fn transform(
        &self,
        ds: &LabeledDataset,
    ) -> Result<(LabeledDataset, OneHotReport), PipelineError> {
        let mut report = OneHotReport::default();
        let mut columns = Vec::new();
        for col in ds.columns() {
            let Some((_, cats)) = self.groups.iter().find(|(n, _)| *n == col.name) else {
                columns.push(col.clone());
                continue;
            };
            let ColumnData::Categorical(values) = &col.data else {
                return Err(PipelineError::Schema(format!(
                    "column {} is not categorical",
                    col.name
                )));
            };
            let mut indicators = vec![vec![0.0; values.len()]; cats.len()];
            let mut unseen = 0;
            for (i, v) in values.iter().enumerate() {
                match cats.binary_search(v) {
                    Ok(k) => indicators[k][i] = 1.0,
                    Err(_) => unseen += 1,
                }
            }
            if unseen > 0 {
                report.unseen.push((col.name.clone(), unseen));
            }
            for (cat, ind) in cats.iter().zip(indicators) {
                columns.push(Column::numeric(format!("{}_{cat}", col.name), ind));
            }
        }
        for (name, _) in &self.groups {
            if ds.column(name).is_none() {
                return Err(PipelineError::Schema(format!("missing column {name}")));
            }
        }
        Ok((LabeledDataset::new(columns, ds.labels().to_vec())?, report))
    }
}

/// Fits and applies a one-hot encoding in one step.
pub fn one_hot(
    ds: &LabeledDataset,
    categorical: &[impl AsRef<str>],
) -> Result<LabeledDataset, PipelineError> {
    Ok(OneHotEncoder::fit(ds, categorical)?.transform(ds)?.0)
}
