use super::LearnError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub false_neg: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.false_neg
    }
}

/// Metrics whose denominator was zero. They are reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Undefined {
    pub precision: bool,
    pub sensitivity: bool,
    pub f1: bool,
    pub roc_auc: bool,
    pub kappa: bool,
}

impl Undefined {
    pub fn any(&self) -> bool {
        self.precision || self.sensitivity || self.f1 || self.roc_auc || self.kappa
    }

    pub fn names(&self) -> Vec<&'static str> {
        [
            (self.precision, "precision"),
            (self.sensitivity, "sensitivity"),
            (self.f1, "f1"),
            (self.roc_auc, "roc_auc"),
            (self.kappa, "kappa"),
        ]
        .into_iter()
        .filter_map(|(b, n)| b.then_some(n))
        .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricBundle {
    pub accuracy: f64,
    pub precision: f64,
    pub sensitivity: f64,
    pub f1: f64,
    pub roc_auc: f64,
    pub cohen_kappa: f64,
    pub confusion: Confusion,
    pub undefined: Undefined,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Probability that a random positive outranks a random negative, ties
/// counting one half. `None` when either class is absent.
pub fn roc_auc(y_true: &[u8], scores: &[f64]) -> Option<f64> {
    let n = y_true.len();
    let n_pos = y_true.iter().filter(|&&l| l == 1).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the rank sum of the positives, with 1-based average ranks for ties.
    let mut rank2_pos: u128 = 0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let pos = order[i..=j].iter().filter(|&&k| y_true[k] == 1).count() as u128;
        rank2_pos += pos * (i + 1 + j + 1) as u128;
        i = j + 1;
    }
    let (p, q) = (n_pos as u128, n_neg as u128);
    let u2 = rank2_pos - p * (p + 1);
    Some(u2 as f64 / (2 * p * q) as f64)
}

/// Binary classification metrics. Zero denominators give 0 with the
/// matching flag in [`MetricBundle::undefined`].
pub fn metrics(y_true: &[u8], y_pred: &[u8], scores: &[f64]) -> Result<MetricBundle, LearnError> {
    let n = y_true.len();
    if n == 0 || y_pred.len() != n || scores.len() != n {
        return Err(LearnError::Shape(format!(
            "metrics need equal non-empty lengths, got {n}, {}, {}",
            y_pred.len(),
            scores.len()
        )));
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(LearnError::Data(format!("score {i} is NaN")));
    }
    if let Some(i) = y_true.iter().chain(y_pred).position(|&l| l > 1) {
        return Err(LearnError::Data(format!("label at position {i} is not 0 or 1")));
    }
    let mut c = Confusion::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => c.tp += 1,
            (0, 1) => c.fp += 1,
            (0, 0) => c.tn += 1,
            _ => c.false_neg += 1,
        }
    }
    let mut undef = Undefined::default();
    let accuracy = (c.tp + c.tn) as f64 / n as f64;
    let (precision, u) = ratio(c.tp, c.tp + c.fp);
    undef.precision = u;
    let (sensitivity, u) = ratio(c.tp, c.tp + c.false_neg);
    undef.sensitivity = u;
    let (f1, u) = if c.tp == 0 {
        (0.0, true)
    } else {
        ratio(2 * c.tp, 2 * c.tp + c.fp + c.false_neg)
    };
    undef.f1 = u;
    let roc_auc = roc_auc(y_true, scores).unwrap_or_else(|| {
        undef.roc_auc = true;
        0.0
    });

    // kappa = (n(tp+tn) - E) / (n^2 - E), E = sum over classes of the
    // product of true and predicted marginals; exact in integers.
    let nn = n as i128;
    let (tp, fp, tn, fneg) = (c.tp as i128, c.fp as i128, c.tn as i128, c.false_neg as i128);
    let e = (tp + fneg) * (tp + fp) + (tn + fp) * (tn + fneg);
    let num = nn * (tp + tn) - e;
    let den = nn * nn - e;
    let cohen_kappa = if den == 0 {
        undef.kappa = true;
        0.0
    } else if num == 0 {
        0.0
    } else {
        num as f64 / den as f64
    };
    Ok(MetricBundle {
        accuracy,
        precision,
        sensitivity,
        f1,
        roc_auc,
        cohen_kappa,
        confusion: c,
        undefined: undef,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_fixture() {
        let m = metrics(&[1, 1, 0, 0], &[1, 0, 0, 0], &[0.9, 0.4, 0.2, 0.1]).unwrap();
        assert_eq!(m.accuracy, 0.75);
        assert_eq!(m.precision, 1.0);
        assert_eq!(m.sensitivity, 0.5);
        assert_eq!(m.f1, 2.0 / 3.0);
        assert_eq!(m.cohen_kappa, 0.5);
        assert_eq!(m.roc_auc, 1.0);
        assert!(!m.undefined.any());
        assert_eq!(
            m.confusion,
            Confusion { tp: 1, fp: 0, tn: 2, false_neg: 1 }
        );
    }

    #[test]
    fn perfect_prediction() {
        let y = [1, 0, 1, 0, 0];
        let m = metrics(&y, &y, &[0.8, 0.1, 0.7, 0.3, 0.2]).unwrap();
        for v in [m.accuracy, m.precision, m.sensitivity, m.f1, m.roc_auc, m.cohen_kappa] {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn separated_scores_give_unit_auc() {
        assert_eq!(roc_auc(&[1, 1, 0, 0], &[0.9, 0.6, 0.4, 0.2]), Some(1.0));
        assert_eq!(roc_auc(&[1, 0], &[0.5, 0.5]), Some(0.5));
        assert_eq!(roc_auc(&[1, 1], &[0.5, 0.2]), None);
    }

    #[test]
    fn constant_predictor_has_zero_kappa() {
        let y = [1, 0, 0, 1, 1, 0, 1];
        for c in [0u8, 1] {
            let m = metrics(&y, &[c; 7], &[0.5; 7]).unwrap();
            assert_eq!(m.cohen_kappa, 0.0);
        }
    }

    #[test]
    fn zero_denominators_are_flagged() {
        let m = metrics(&[1, 1, 0], &[0, 0, 0], &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(m.precision, 0.0);
        assert!(m.undefined.precision && m.undefined.f1);
        assert!(!m.undefined.sensitivity);
        let m = metrics(&[0, 0], &[0, 0], &[0.1, 0.2]).unwrap();
        assert!(m.undefined.roc_auc && m.undefined.kappa && m.undefined.sensitivity);
        assert!(m.cohen_kappa == 0.0 && m.roc_auc == 0.0);
        assert_eq!(m.undefined.names(), ["precision", "sensitivity", "f1", "roc_auc", "kappa"]);
    }

    #[test]
    fn invalid_inputs() {
        assert!(metrics(&[], &[], &[]).is_err());
        assert!(metrics(&[1], &[1, 0], &[0.5]).is_err());
        assert!(metrics(&[1, 0], &[1, 0], &[f64::NAN, 0.1]).is_err());
    }
}
