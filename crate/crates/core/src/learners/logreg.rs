//! L2-regularized logistic regression fitted by damped Newton iterations.

use super::{logistic, LearnError};
use crate::data::FeatureMatrix;
use crate::linalg::{cholesky_solve, dot};

const GRAD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
    /// Max-norm of the objective gradient at the returned parameters.
    pub gradient_norm: f64,
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Objective `sum_i log(1 + e^{z_i}) - y_i z_i + l2/2 |w|^2` with
/// `z_i = w.x_i + b`, and its gradient (intercept last). The intercept is
/// not penalized.
pub fn logreg_objective(
    weights: &[f64],
    intercept: f64,
    x: &FeatureMatrix,
    y: &[u8],
    l2: f64,
) -> (f64, Vec<f64>) {
    let d = weights.len();
    let mut loss = 0.5 * l2 * dot(weights, weights);
    let mut grad: Vec<f64> = weights.iter().map(|w| l2 * w).chain([0.0]).collect();
    for (row, &label) in x.row_iter().zip(y) {
        let z = dot(weights, row) + intercept;
        let t = f64::from(label);
        loss += softplus(z) - t * z;
        let r = logistic(z) - t;
        for j in 0..d {
            grad[j] += r * row[j];
        }
        grad[d] += r;
    }
    (loss, grad)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, g| m.max(g.abs()))
}

impl LogisticModel {
    pub fn fit(x: &FeatureMatrix, y: &[u8], l2: f64, max_iter: usize) -> Result<Self, LearnError> {
        let d = x.cols();
        let p = d + 1;
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let (mut loss, mut grad) = logreg_objective(&w, b, x, y, l2);
        let mut iterations = 0;
        while iterations < max_iter && max_abs(&grad) >= GRAD_TOL {
            iterations += 1;
            let mut h = vec![0.0; p * p];
            for row in x.row_iter() {
                let s = logistic(dot(&w, row) + b);
                let s = s * (1.0 - s);
                if s == 0.0 {
                    continue;
                }
                for i in 0..p {
                    let xi = if i < d { row[i] } else { 1.0 };
                    if xi == 0.0 {
                        continue;
                    }
                    for j in i..p {
                        let xj = if j < d { row[j] } else { 1.0 };
                        h[i * p + j] += s * xi * xj;
                    }
                }
            }
            for i in 0..p {
                if i < d {
                    h[i * p + i] += l2;
                }
                h[i * p + i] += 1e-10;
                for j in 0..i {
                    h[i * p + j] = h[j * p + i];
                }
            }
            let step = cholesky_solve(&h, &grad, p).unwrap_or_else(|| grad.clone());
            let slope: f64 = step.iter().zip(&grad).map(|(s, g)| s * g).sum();
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let nw: Vec<f64> = w.iter().zip(&step).map(|(wi, si)| wi - t * si).collect();
                let nb = b - t * step[d];
                let (nl, ng) = logreg_objective(&nw, nb, x, y, l2);
                if nl <= loss - 1e-4 * t * slope || (nl <= loss && max_abs(&ng) < max_abs(&grad)) {
                    w = nw;
                    b = nb;
                    loss = nl;
                    grad = ng;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if !loss.is_finite() {
            return Err(LearnError::Training("logistic regression diverged".into()));
        }
        Ok(Self {
            weights: w,
            intercept: b,
            iterations,
            gradient_norm: max_abs(&grad),
        })
    }

    pub fn decision(&self, row: &[f64]) -> f64 {
        dot(&self.weights, row) + self.intercept
    }

    pub fn probability(&self, row: &[f64]) -> f64 {
        logistic(self.decision(row))
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn separable_blobs_fit_exactly() {
        let (x, y) = blobs(100, 2.0, 4);
        let m = LogisticModel::fit(&x, &y, 1.0, 100).unwrap();
        let pred: Vec<u8> = x.row_iter().map(|r| u8::from(m.probability(r) >= 0.5)).collect();
        assert_eq!(accuracy(&pred, &y), 1.0);
        assert!(m.gradient_norm < GRAD_TOL);
    }

    #[test]
    fn zero_weights_score_half() {
        let m = LogisticModel {
            weights: vec![0.0; 3],
            intercept: 0.0,
            iterations: 0,
            gradient_norm: 0.0,
        };
        assert_eq!(m.probability(&[1.0, -4.0, 9.0]), 0.5);
    }

    #[test]
    fn balanced_symmetric_data_keeps_zero_intercept() {
        let x = FeatureMatrix::from_rows(&[vec![-1.0], vec![1.0], vec![-2.0], vec![2.0]]).unwrap();
        let m = LogisticModel::fit(&x, &[0, 1, 0, 1], 1.0, 100).unwrap();
        assert!(m.intercept.abs() < 1e-9);
        assert!(m.weights[0] > 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (x, y) = noisy(60, 3, 5);
        let w = [0.3, -0.2, 0.1];
        let b = 0.05;
        let (_, g) = logreg_objective(&w, b, &x, &y, 0.7);
        let h = 1e-6;
        for j in 0..4 {
            let shift = |s: f64| {
                let mut ww = w.to_vec();
                let mut bb = b;
                if j < 3 {
                    ww[j] += s;
                } else {
                    bb += s;
                }
                logreg_objective(&ww, bb, &x, &y, 0.7).0
            };
            let fd = (shift(h) - shift(-h)) / (2.0 * h);
            assert!((fd - g[j]).abs() <= 1e-6 * g[j].abs().max(1.0), "{j}: {fd} vs {}", g[j]);
        }
    }
}
