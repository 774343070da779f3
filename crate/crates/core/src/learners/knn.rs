use crate::data::FeatureMatrix;

/// Euclidean k-nearest-neighbour vote. Distance ties go to the lower
/// training row index.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    train: FeatureMatrix,
    labels: Vec<u8>,
    pub k: usize,
}

impl KnnModel {
    pub fn fit(x: &FeatureMatrix, y: &[u8], k: usize) -> Self {
        Self {
            train: x.clone(),
            labels: y.to_vec(),
            k,
        }
    }

    pub fn width(&self) -> usize {
        self.train.cols()
    }

    /// Training row indices of the neighbours of `row`, nearest first.
    pub fn neighbours(&self, row: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .train
            .row_iter()
            .enumerate()
            .map(|(i, t)| (t.iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        let k = self.k.min(d.len());
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, cmp);
            d.truncate(k);
        }
        d.sort_unstable_by(cmp);
        d.into_iter().map(|(_, i)| i).collect()
    }

    /// Fraction of the k neighbours labelled 1.
    pub fn scores(&self, x: &FeatureMatrix) -> Vec<f64> {
        x.row_iter()
            .map(|row| {
                let nb = self.neighbours(row);
                let ones = nb.iter().filter(|&&i| self.labels[i] == 1).count();
                ones as f64 / nb.len() as f64
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn one_nn_recalls_training_set() {
        let (x, y) = noisy(80, 3, 1);
        let m = KnnModel::fit(&x, &y, 1);
        let pred: Vec<u8> = m.scores(&x).iter().map(|&s| u8::from(s >= 0.5)).collect();
        assert_eq!(accuracy(&pred, &y), 1.0);
    }

    #[test]
    fn three_nn_majority() {
        let x = FeatureMatrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![10.0]]).unwrap();
        let m = KnnModel::fit(&x, &[1, 1, 0, 0], 3);
        let q = FeatureMatrix::from_rows(&[vec![0.9]]).unwrap();
        assert_eq!(m.neighbours(q.row(0)), vec![1, 0, 2]);
        assert_eq!(m.scores(&q), vec![2.0 / 3.0]);
    }

    #[test]
    fn distance_ties_take_lowest_index() {
        let x = FeatureMatrix::from_rows(&[vec![-1.0], vec![1.0], vec![1.0], vec![-1.0]]).unwrap();
        let m = KnnModel::fit(&x, &[0, 1, 1, 0], 2);
        assert_eq!(m.neighbours(&[0.0]), vec![0, 1]);
    }

    #[test]
    fn k_larger_than_training_set() {
        let x = FeatureMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let m = KnnModel::fit(&x, &[1, 0], 10);
        assert_eq!(m.scores(&x), vec![0.5, 0.5]);
    }
}
