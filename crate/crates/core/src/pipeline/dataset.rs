use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use super::PipelineError;
use crate::data::FeatureMatrix;

/// Header of the public telecom churn file, in file order.
pub const TELCO_COLUMNS: [&str; 21] = [
    "customerID",
    "gender",
    "SeniorCitizen",
    "Partner",
    "Dependents",
    "tenure",
    "PhoneService",
    "MultipleLines",
    "InternetService",
    "OnlineSecurity",
    "OnlineBackup",
    "DeviceProtection",
    "TechSupport",
    "StreamingTV",
    "StreamingMovies",
    "Contract",
    "PaperlessBilling",
    "PaymentMethod",
    "MonthlyCharges",
    "TotalCharges",
    "Churn",
];

pub const TELCO_NUMERIC: [&str; 3] = ["tenure", "MonthlyCharges", "TotalCharges"];

pub const TELCO_CATEGORICAL: [&str; 16] = [
    "gender",
    "SeniorCitizen",
    "Partner",
    "Dependents",
    "PhoneService",
    "MultipleLines",
    "InternetService",
    "OnlineSecurity",
    "OnlineBackup",
    "DeviceProtection",
    "TechSupport",
    "StreamingTV",
    "StreamingMovies",
    "Contract",
    "PaperlessBilling",
    "PaymentMethod",
];

/// Columns removed before encoding in the reference protocol: TotalCharges
/// (correlated with tenure), PhoneService and MonthlyCharges (high VIF).
pub const DEFAULT_DROP_PROFILE: [&str; 3] = ["TotalCharges", "PhoneService", "MonthlyCharges"];

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            Self::Numeric(v) => v.len(),
            Self::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn select(&self, idx: &[usize]) -> Self {
        match self {
            Self::Numeric(v) => Self::Numeric(idx.iter().map(|&i| v[i]).collect()),
            Self::Categorical(v) => Self::Categorical(idx.iter().map(|&i| v[i].clone()).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

impl Column {
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            data: ColumnData::Numeric(values),
        }
    }

    pub fn categorical(name: impl Into<String>, values: Vec<String>) -> Self {
        Self {
            name: name.into(),
            data: ColumnData::Categorical(values),
        }
    }
}

/// Named columns with binary labels (1 = positive class).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    columns: Vec<Column>,
    labels: Vec<u8>,
}

impl LabeledDataset {
    pub fn new(columns: Vec<Column>, labels: Vec<u8>) -> Result<Self, PipelineError> {
        for c in &columns {
            if c.data.len() != labels.len() {
                return Err(PipelineError::Schema(format!(
                    "column {} has {} rows, labels have {}",
                    c.name,
                    c.data.len(),
                    labels.len()
                )));
            }
            if let ColumnData::Numeric(v) = &c.data {
                if let Some(row) = v.iter().position(|x| !x.is_finite()) {
                    return Err(PipelineError::Data {
                        row,
                        message: format!("non-finite value in {}", c.name),
                    });
                }
            }
        }
        if let Some(row) = labels.iter().position(|&l| l > 1) {
            return Err(PipelineError::Data {
                row,
                message: "labels must be 0 or 1".into(),
            });
        }
        Ok(Self { columns, labels })
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Numeric column by name; errors when missing or categorical.
    pub fn numeric(&self, name: &str) -> Result<&[f64], PipelineError> {
        match self.column(name).map(|c| &c.data) {
            Some(ColumnData::Numeric(v)) => Ok(v),
            Some(ColumnData::Categorical(_)) => Err(PipelineError::Schema(format!(
                "column {name} is categorical"
            ))),
            None => Err(PipelineError::Schema(format!("missing column {name}"))),
        }
    }

    /// Positive and negative label counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        (pos, self.labels.len() - pos)
    }

    pub fn drop_columns(&self, names: &[impl AsRef<str>]) -> Result<Self, PipelineError> {
        let missing: Vec<&str> = names
            .iter()
            .map(AsRef::as_ref)
            .filter(|n| self.column(n).is_none())
            .collect();
        if !missing.is_empty() {
            return Err(PipelineError::Schema(format!(
                "cannot drop missing columns: {}",
                missing.join(", ")
            )));
        }
        let columns = self
            .columns
            .iter()
            .filter(|c| !names.iter().any(|n| n.as_ref() == c.name))
            .cloned()
            .collect();
        Ok(Self {
            columns,
            labels: self.labels.clone(),
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self {
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    name: c.name.clone(),
                    data: c.data.select(idx),
                })
                .collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// All columns as a real matrix; fails if any column is still
    /// categorical.
    pub fn to_feature_matrix(&self) -> Result<FeatureMatrix, PipelineError> {
        let mut cols = Vec::with_capacity(self.columns.len());
        for c in &self.columns {
            match &c.data {
                ColumnData::Numeric(v) => cols.push(v.as_slice()),
                ColumnData::Categorical(_) => {
                    return Err(PipelineError::Schema(format!(
                        "column {} is categorical; one-hot encode it first",
                        c.name
                    )))
                }
            }
        }
        let n = self.rows();
        let mut values = Vec::with_capacity(n * cols.len());
        for i in 0..n {
            values.extend(cols.iter().map(|c| c[i]));
        }
        let names = self.columns.iter().map(|c| c.name.clone()).collect();
        Ok(FeatureMatrix::new(n, cols.len(), values, names)?)
    }

    /// Categorical columns replaced by integer codes of their sorted
    /// categories; used for multicollinearity diagnostics on raw columns.
    pub fn label_encoded(&self) -> FeatureMatrix {
        let n = self.rows();
        let cols: Vec<Vec<f64>> = self
            .columns
            .iter()
            .map(|c| match &c.data {
                ColumnData::Numeric(v) => v.clone(),
                ColumnData::Categorical(v) => {
                    let mut cats: Vec<&String> = v.iter().collect();
                    cats.sort();
                    cats.dedup();
                    let codes: BTreeMap<&String, f64> =
                        cats.into_iter().enumerate().map(|(i, s)| (s, i as f64)).collect();
                    v.iter().map(|s| codes[s]).collect()
                }
            })
            .collect();
        let mut values = Vec::with_capacity(n * cols.len());
        for i in 0..n {
            values.extend(cols.iter().map(|c| c[i]));
        }
        let names = self.columns.iter().map(|c| c.name.clone()).collect();
        FeatureMatrix::new(n, cols.len(), values, names).expect("consistent shape")
    }
}

/// Treatment of blank `TotalCharges` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlankPolicy {
    DropRow,
    MeanImpute,
}

impl std::str::FromStr for BlankPolicy {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drop" | "drop-row" => Ok(Self::DropRow),
            "mean" | "mean-impute" => Ok(Self::MeanImpute),
            other => Err(PipelineError::Config(format!("unknown blank policy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub blank_total_charges: BlankPolicy,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            blank_total_charges: BlankPolicy::DropRow,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LoadReport {
    /// Data rows in the file, before any cleaning.
    pub rows_read: usize,
    pub blank_rows_dropped: usize,
    pub blank_cells_imputed: usize,
}

/// Reads the churn CSV at `path`.
///
/// `customerID` is dropped, `Churn` becomes the label (Yes = 1), the three
/// numeric columns are parsed and everything else is kept categorical.
pub fn load_churn_csv(
    path: impl AsRef<Path>,
    opts: &LoadOptions,
) -> Result<(LabeledDataset, LoadReport), PipelineError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))?;
    load_churn_reader(file, opts)
}

pub fn load_churn_reader(
    reader: impl Read,
    opts: &LoadOptions,
) -> Result<(LabeledDataset, LoadReport), PipelineError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| PipelineError::Io(e.to_string()))?
        .iter()
        .map(|s| s.trim_start_matches('\u{feff}').to_string())
        .collect();
    let missing: Vec<&str> = TELCO_COLUMNS
        .iter()
        .copied()
        .filter(|c| !header.iter().any(|h| h == c))
        .collect();
    if !missing.is_empty() {
        let unexpected: Vec<&str> = header
            .iter()
            .map(String::as_str)
            .filter(|h| !TELCO_COLUMNS.contains(h))
            .collect();
        return Err(PipelineError::Schema(format!(
            "missing columns: {}{}",
            missing.join(", "),
            if unexpected.is_empty() {
                String::new()
            } else {
                format!(" (unexpected: {})", unexpected.join(", "))
            }
        )));
    }
    let pos = |name: &str| header.iter().position(|h| h == name).expect("checked");

    let mut numeric: Vec<Vec<Option<f64>>> = vec![Vec::new(); TELCO_NUMERIC.len()];
    let mut categorical: Vec<Vec<String>> = vec![Vec::new(); TELCO_CATEGORICAL.len()];
    let mut labels = Vec::new();
    let mut report = LoadReport::default();

    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| PipelineError::Data {
            row,
            message: e.to_string(),
        })?;
        report.rows_read += 1;
        for (k, name) in TELCO_NUMERIC.iter().enumerate() {
            let cell = record.get(pos(name)).unwrap_or("");
            let value = if cell.is_empty() && *name == "TotalCharges" {
                None
            } else {
                Some(cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(
                    || PipelineError::Data {
                        row,
                        message: format!("{name}: cannot parse '{cell}' as a number"),
                    },
                )?)
            };
            numeric[k].push(value);
        }
        for (k, name) in TELCO_CATEGORICAL.iter().enumerate() {
            categorical[k].push(record.get(pos(name)).unwrap_or("").to_string());
        }
        let churn = record.get(pos("Churn")).unwrap_or("");
        labels.push(match churn {
            "Yes" => 1,
            "No" => 0,
            other => {
                return Err(PipelineError::Data {
                    row,
                    message: format!("Churn: expected Yes or No, got '{other}'"),
                })
            }
        });
    }

    let total_idx = TELCO_NUMERIC.iter().position(|&n| n == "TotalCharges").expect("known");
    let blanks: Vec<usize> = numeric[total_idx]
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.is_none().then_some(i))
        .collect();
    let keep: Vec<usize> = match opts.blank_total_charges {
        BlankPolicy::DropRow => {
            report.blank_rows_dropped = blanks.len();
            (0..labels.len()).filter(|i| numeric[total_idx][*i].is_some()).collect()
        }
        BlankPolicy::MeanImpute => {
            let present: Vec<f64> = numeric[total_idx].iter().flatten().copied().collect();
            let mean = if present.is_empty() {
                0.0
            } else {
                present.iter().sum::<f64>() / present.len() as f64
            };
            for &i in &blanks {
                numeric[total_idx][i] = Some(mean);
            }
            report.blank_cells_imputed = blanks.len();
            (0..labels.len()).collect()
        }
    };

    // Columns keep file order, minus customerID and Churn.
    let mut columns = Vec::new();
    for name in TELCO_COLUMNS {
        if let Some(k) = TELCO_NUMERIC.iter().position(|&n| n == name) {
            let values = keep.iter().map(|&i| numeric[k][i].expect("filled")).collect();
            columns.push(Column::numeric(name, values));
        } else if let Some(k) = TELCO_CATEGORICAL.iter().position(|&n| n == name) {
            let values = keep.iter().map(|&i| categorical[k][i].clone()).collect();
            columns.push(Column::categorical(name, values));
        }
    }
    let labels = keep.iter().map(|&i| labels[i]).collect();
    Ok((LabeledDataset::new(columns, labels)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "customerID,gender,SeniorCitizen,Partner,Dependents,tenure,PhoneService,MultipleLines,InternetService,OnlineSecurity,OnlineBackup,DeviceProtection,TechSupport,StreamingTV,StreamingMovies,Contract,PaperlessBilling,PaymentMethod,MonthlyCharges,TotalCharges,Churn";

    fn rows() -> String {
        [
            HEADER,
            "1-A,Female,0,Yes,No,1,No,No phone service,DSL,No,Yes,No,No,No,No,Month-to-month,Yes,Electronic check,29.85,29.85,No",
            "2-B,Male,0,No,No,34,Yes,No,DSL,Yes,No,Yes,No,No,No,One year,No,Mailed check,56.95,1889.5,No",
            "3-C,Male,1,No,No,0,Yes,No,DSL,Yes,Yes,No,No,No,No,Two year,Yes,Mailed check,53.85, ,Yes",
        ]
        .join("\n")
    }

    #[test]
    fn parses_and_drops_blank_total() {
        let (ds, rep) = load_churn_reader(rows().as_bytes(), &LoadOptions::default()).unwrap();
        assert_eq!(rep.rows_read, 3);
        assert_eq!(rep.blank_rows_dropped, 1);
        assert_eq!(ds.rows(), 2);
        assert!(ds.column("customerID").is_none());
        assert!(ds.column("Churn").is_none());
        assert_eq!(ds.columns().len(), 19);
        assert_eq!(ds.numeric("TotalCharges").unwrap(), &[29.85, 1889.5]);
        assert_eq!(ds.labels(), &[0, 0]);
    }

    #[test]
    fn mean_imputes_blank_total() {
        let opts = LoadOptions {
            blank_total_charges: BlankPolicy::MeanImpute,
        };
        let (ds, rep) = load_churn_reader(rows().as_bytes(), &opts).unwrap();
        assert_eq!(rep.blank_cells_imputed, 1);
        assert_eq!(ds.rows(), 3);
        let total = ds.numeric("TotalCharges").unwrap();
        assert!((total[2] - (29.85 + 1889.5) / 2.0).abs() < 1e-9);
        assert_eq!(ds.labels(), &[0, 0, 1]);
    }

    #[test]
    fn renamed_column_is_schema_error() {
        let text = rows().replacen("tenure", "Tenure", 1);
        let err = load_churn_reader(text.as_bytes(), &LoadOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, PipelineError::Schema(_)));
        assert!(msg.contains("tenure") && msg.contains("Tenure"), "{msg}");
    }

    #[test]
    fn bad_number_reports_row() {
        let text = rows().replacen(",34,", ",thirty,", 1);
        match load_churn_reader(text.as_bytes(), &LoadOptions::default()) {
            Err(PipelineError::Data { row, message }) => {
                assert_eq!(row, 1);
                assert!(message.contains("tenure"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn drop_missing_column_errors() {
        let (ds, _) = load_churn_reader(rows().as_bytes(), &LoadOptions::default()).unwrap();
        assert!(ds.drop_columns(&["nope"]).is_err());
        let d = ds.drop_columns(&DEFAULT_DROP_PROFILE).unwrap();
        assert_eq!(d.columns().len(), 16);
    }
}
