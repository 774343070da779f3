use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::LabeledDataset;
use super::PipelineError;

/// Indices of a class-balanced subsample: every minority row plus an equal
/// number of majority rows drawn uniformly without replacement, returned in
/// a seeded random order.
pub fn undersample_indices(labels: &[u8], seed: u64) -> Result<Vec<usize>, PipelineError> {
    let pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1).collect();
    let neg: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(PipelineError::Balance(format!(
            "need both classes, got {} positive and {} negative",
            pos.len(),
            neg.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (minority, mut majority) = if pos.len() <= neg.len() {
        (pos, neg)
    } else {
        (neg, pos)
    };
    majority.shuffle(&mut rng);
    majority.truncate(minority.len());
    let mut out = minority;
    out.extend(majority);
    out.shuffle(&mut rng);
    Ok(out)
}

pub fn undersample(ds: &LabeledDataset, seed: u64) -> Result<LabeledDataset, PipelineError> {
    Ok(ds.select_rows(&undersample_indices(ds.labels(), seed)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64, stratified: bool) -> Result<Self, PipelineError> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(PipelineError::Config(format!(
                "train fraction {train_fraction} must lie strictly between 0 and 1"
            )));
        }
        Ok(Self {
            train_fraction,
            seed,
            stratified,
        })
    }

    pub fn train_fraction(&self) -> f64 {
        self.train_fraction
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            seed: 0,
            stratified: true,
        }
    }
}

/// Train and test row indices, each sorted ascending.
///
/// The training set has `floor(fraction * n)` rows. Under stratification the
/// per-class quotas are floored and the leftover rows go to the classes with
/// the largest fractional remainders (lower label first on ties).
pub fn split_indices(
    labels: &[u8],
    spec: &SplitSpec,
) -> Result<(Vec<usize>, Vec<usize>), PipelineError> {
    let n = labels.len();
    let n_train = (spec.train_fraction * n as f64).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(PipelineError::Split(format!(
            "{n} rows cannot be split at fraction {}",
            spec.train_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::with_capacity(n_train);
    let mut test = Vec::with_capacity(n - n_train);

    if spec.stratified {
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];
        for (i, &l) in labels.iter().enumerate() {
            groups[l as usize].push(i);
        }
        for (label, g) in groups.iter().enumerate() {
            if !g.is_empty() && g.len() < 2 {
                return Err(PipelineError::Split(format!(
                    "class {label} has {} row(s); stratification needs at least 2",
                    g.len()
                )));
            }
        }
        let exact: Vec<f64> = groups
            .iter()
            .map(|g| spec.train_fraction * g.len() as f64)
            .collect();
        let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
        let mut leftover = n_train - quota.iter().sum::<usize>();
        let mut order: Vec<usize> = (0..groups.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = exact[a] - exact[a].floor();
            let fb = exact[b] - exact[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &c in order.iter().cycle() {
            if leftover == 0 {
                break;
            }
            if quota[c] < groups[c].len() {
                quota[c] += 1;
                leftover -= 1;
            }
        }
        for (g, q) in groups.iter_mut().zip(quota) {
            g.shuffle(&mut rng);
            train.extend_from_slice(&g[..q]);
            test.extend_from_slice(&g[q..]);
        }
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        train.extend_from_slice(&all[..n_train]);
        test.extend_from_slice(&all[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn train_test_split(
    ds: &LabeledDataset,
    spec: &SplitSpec,
) -> Result<(LabeledDataset, LabeledDataset), PipelineError> {
    let (train, test) = split_indices(ds.labels(), spec)?;
    Ok((ds.select_rows(&train), ds.select_rows(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(pos: usize, neg: usize) -> Vec<u8> {
        let mut l = vec![1u8; pos];
        l.extend(vec![0u8; neg]);
        l
    }

    #[test]
    fn undersample_ten_ninety() {
        let l = labels(10, 90);
        let idx = undersample_indices(&l, 5).unwrap();
        assert_eq!(idx.len(), 20);
        assert_eq!(idx.iter().filter(|&&i| l[i] == 1).count(), 10);
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 20);
    }

    #[test]
    fn balanced_input_only_reordered() {
        let l = labels(6, 6);
        let mut idx = undersample_indices(&l, 1).unwrap();
        idx.sort_unstable();
        assert_eq!(idx, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn single_class_is_balance_error() {
        assert!(matches!(
            undersample_indices(&[1, 1, 1], 0),
            Err(PipelineError::Balance(_))
        ));
    }

    #[test]
    fn full_size_split_counts() {
        let l = labels(1869, 1869);
        let spec = SplitSpec::new(0.8, 9, true).unwrap();
        let (train, test) = split_indices(&l, &spec).unwrap();
        assert_eq!((train.len(), test.len()), (2990, 748));
        let pos = train.iter().filter(|&&i| l[i] == 1).count();
        assert!((pos as i64 - 1495).abs() <= 1);
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let l: Vec<u8> = (0..101).map(|i| (i % 3 == 0) as u8).collect();
        for stratified in [true, false] {
            let spec = SplitSpec::new(0.7, 42, stratified).unwrap();
            let a = split_indices(&l, &spec).unwrap();
            let b = split_indices(&l, &spec).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.0.len(), 70);
            let mut all: Vec<usize> = a.0.iter().chain(&a.1).copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..101).collect::<Vec<_>>());
        }
    }

    #[test]
    fn tiny_class_cannot_stratify() {
        let spec = SplitSpec::new(0.5, 0, true).unwrap();
        assert!(matches!(
            split_indices(&labels(1, 5), &spec),
            Err(PipelineError::Split(_))
        ));
    }

    #[test]
    fn fraction_bounds() {
        assert!(SplitSpec::new(1.0, 0, true).is_err());
        assert!(SplitSpec::new(0.0, 0, true).is_err());
        assert!(SplitSpec::new(f64::NAN, 0, true).is_err());
    }
}
