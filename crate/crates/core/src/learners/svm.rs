//! C-SVC solved in the dual with pairwise (SMO) updates. The working pair
//! is chosen by maximal violation for `i` and second-order gain for `j`,
//! with the kernel matrix precomputed.

use super::spec::Kernel;
use super::LearnError;
use crate::data::FeatureMatrix;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub kernel: Kernel,
    support: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for each support vector.
    coef: Vec<f64>,
    pub rho: f64,
    linear_w: Option<Vec<f64>>,
    width: usize,
    /// Dual multipliers for every training row.
    pub alphas: Vec<f64>,
    pub c: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `max_{I_up} -y G - min_{I_low} -y G` at exit.
    pub kkt_gap: f64,
}

fn scale_gamma(x: &FeatureMatrix) -> f64 {
    let v = x.values();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    if var > 0.0 {
        1.0 / (x.cols() as f64 * var)
    } else {
        1.0
    }
}

impl SvmModel {
    pub fn fit(
        x: &FeatureMatrix,
        y: &[u8],
        kernel: Kernel,
        c: f64,
        tol: f64,
        max_iter: usize,
    ) -> Result<Self, LearnError> {
        let kernel = kernel.resolve(scale_gamma(x));
        let n = x.rows();
        let ys: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = kernel.eval(x.row(i), x.row(j));
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        if k.iter().any(|v| !v.is_finite()) {
            return Err(LearnError::Training("kernel produced non-finite values".into()));
        }

        let mut alpha = vec![0.0; n];
        let mut grad = vec![-1.0; n];
        let up = |a: f64, y: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
        let low = |a: f64, y: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

        let mut iterations = 0;
        let mut gap;
        let mut converged = false;
        loop {
            let mut gmax = f64::NEG_INFINITY;
            let mut i = usize::MAX;
            for t in 0..n {
                if up(alpha[t], ys[t]) && -ys[t] * grad[t] > gmax {
                    gmax = -ys[t] * grad[t];
                    i = t;
                }
            }
            let mut gmin = f64::INFINITY;
            let mut j = usize::MAX;
            let mut best = f64::INFINITY;
            if i != usize::MAX {
                for t in 0..n {
                    if !low(alpha[t], ys[t]) {
                        continue;
                    }
                    let f = -ys[t] * grad[t];
                    gmin = gmin.min(f);
                    let b = gmax - f;
                    if b > 0.0 {
                        let mut a = k[i * n + i] + k[t * n + t] - 2.0 * k[i * n + t];
                        if a <= 0.0 {
                            a = TAU;
                        }
                        let obj = -b * b / a;
                        if obj < best {
                            best = obj;
                            j = t;
                        }
                    }
                }
            }
            gap = if i == usize::MAX { 0.0 } else { gmax - gmin };
            if gap < tol || j == usize::MAX {
                converged = true;
                break;
            }
            if iterations >= max_iter {
                break;
            }
            iterations += 1;

            let mut a = k[i * n + i] + k[j * n + j] - 2.0 * k[i * n + j];
            if a <= 0.0 {
                a = TAU;
            }
            let b = gmax + ys[j] * grad[j];
            let room_i = if ys[i] > 0.0 { c - alpha[i] } else { alpha[i] };
            let room_j = if ys[j] > 0.0 { alpha[j] } else { c - alpha[j] };
            let lambda = (b / a).min(room_i).min(room_j);
            let snap = |v: f64| {
                if v < TAU * c {
                    0.0
                } else if v > c - TAU * c {
                    c
                } else {
                    v
                }
            };
            alpha[i] = snap(alpha[i] + ys[i] * lambda);
            alpha[j] = snap(alpha[j] - ys[j] * lambda);
            for t in 0..n {
                grad[t] += ys[t] * lambda * (k[t * n + i] - k[t * n + j]);
            }
        }

        let mut free_sum = 0.0;
        let mut free = 0usize;
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        for t in 0..n {
            let yg = ys[t] * grad[t];
            let at_upper = alpha[t] >= c;
            let at_lower = alpha[t] <= 0.0;
            if !at_upper && !at_lower {
                free_sum += yg;
                free += 1;
            } else if (ys[t] > 0.0) == at_upper {
                lb = lb.max(yg);
            } else {
                ub = ub.min(yg);
            }
        }
        let rho = if free > 0 {
            free_sum / free as f64
        } else {
            (ub + lb) / 2.0
        };

        let sv: Vec<usize> = (0..n).filter(|&t| alpha[t] > 0.0).collect();
        let support: Vec<Vec<f64>> = sv.iter().map(|&t| x.row(t).to_vec()).collect();
        let coef: Vec<f64> = sv.iter().map(|&t| alpha[t] * ys[t]).collect();
        let linear_w = matches!(kernel, Kernel::Linear).then(|| {
            let mut w = vec![0.0; x.cols()];
            for (s, cf) in support.iter().zip(&coef) {
                w.iter_mut().zip(s).for_each(|(wi, si)| *wi += cf * si);
            }
            w
        });
        Ok(Self {
            kernel,
            support,
            coef,
            rho,
            linear_w,
            width: x.cols(),
            alphas: alpha,
            c,
            iterations,
            converged,
            kkt_gap: gap,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn n_support(&self) -> usize {
        self.support.len()
    }

    /// Signed decision value; positive means class 1.
    pub fn decision(&self, row: &[f64]) -> f64 {
        let s = match &self.linear_w {
            Some(w) => w.iter().zip(row).map(|(a, b)| a * b).sum(),
            None => self
                .support
                .iter()
                .zip(&self.coef)
                .map(|(sv, cf)| cf * self.kernel.eval(sv, row))
                .sum::<f64>(),
        };
        s - self.rho
    }
}
