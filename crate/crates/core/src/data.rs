use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
}

/// Row-major real matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    names: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        values: Vec<f64>,
        names: Vec<String>,
    ) -> Result<Self, DataError> {
        if values.len() != rows * cols {
            return Err(DataError::Shape(format!(
                "{} values for a {rows}x{cols} matrix",
                values.len()
            )));
        }
        if names.len() != cols {
            return Err(DataError::Shape(format!(
                "{} column names for {cols} columns",
                names.len()
            )));
        }
        Ok(Self { rows, cols, values, names })
    }

    /// Matrix with generated column names `x0, x1, ...`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, DataError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(DataError::Shape(format!(
                "row {bad} has {} values, expected {cols}",
                rows[bad].len()
            )));
        }
        let names = (0..cols).map(|j| format!("x{j}")).collect();
        Self::new(rows.len(), cols, rows.concat(), names)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut values = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            values,
            names: self.names.clone(),
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut values = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            values.extend(idx.iter().map(|&j| self.get(i, j)));
        }
        Self {
            rows: self.rows,
            cols: idx.len(),
            values,
            names: idx.iter().map(|&j| self.names[j].clone()).collect(),
        }
    }

    /// First non-finite entry, if any.
    pub fn check_finite(&self) -> Result<(), DataError> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(p) => Err(DataError::NonFinite {
                row: p / self.cols.max(1),
                col: p % self.cols.max(1),
            }),
            None => Ok(()),
        }
    }
}
