//! CART trees on weighted Gini impurity, bagged forests and AdaBoost over
//! depth-1 stumps.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spec::TreeParams;
use crate::data::FeatureMatrix;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        score: f64,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    width: usize,
}

struct Grower<'a> {
    x: &'a FeatureMatrix,
    y: &'a [u8],
    w: &'a [f64],
    params: TreeParams,
    features: Option<(&'a mut ChaCha8Rng, usize)>,
    nodes: Vec<Node>,
}

struct Best {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

impl Grower<'_> {
    fn leaf_score(&self, idx: &[usize]) -> f64 {
        let total: f64 = idx.iter().map(|&i| self.w[i]).sum();
        if total > 0.0 {
            idx.iter().filter(|&&i| self.y[i] == 1).map(|&i| self.w[i]).sum::<f64>() / total
        } else {
            idx.iter().filter(|&&i| self.y[i] == 1).count() as f64 / idx.len() as f64
        }
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.cols();
        match &mut self.features {
            Some((rng, m)) if *m < d => {
                let mut f = sample(*rng, d, *m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    /// Lowest weighted child impurity; ties keep the lowest feature index,
    /// then the lowest threshold.
    fn best_split(&mut self, idx: &[usize]) -> Option<Best> {
        let min_leaf = self.params.min_leaf;
        let total_w: f64 = idx.iter().map(|&i| self.w[i]).sum();
        let total_1: f64 = idx.iter().filter(|&&i| self.y[i] == 1).map(|&i| self.w[i]).sum();
        let eps = 1e-12 * total_w.max(f64::MIN_POSITIVE);
        let gini = |w: f64, w1: f64| if w > 0.0 { w - (w1 * w1 + (w - w1) * (w - w1)) / w } else { 0.0 };
        let mut best: Option<Best> = None;
        let mut order = idx.to_vec();
        for f in self.candidate_features() {
            let x = self.x;
            order.sort_by(|&a, &b| x.get(a, f).total_cmp(&x.get(b, f)).then(a.cmp(&b)));
            let (mut wl, mut wl1) = (0.0, 0.0);
            for p in 1..order.len() {
                let prev = order[p - 1];
                wl += self.w[prev];
                if self.y[prev] == 1 {
                    wl1 += self.w[prev];
                }
                if p < min_leaf || order.len() - p < min_leaf {
                    continue;
                }
                let (a, b) = (x.get(prev, f), x.get(order[p], f));
                if a >= b {
                    continue;
                }
                let imp = gini(wl, wl1) + gini(total_w - wl, total_1 - wl1);
                if best.as_ref().is_none_or(|bs| imp < bs.impurity - eps) {
                    let mid = a + (b - a) / 2.0;
                    best = Some(Best {
                        impurity: imp,
                        feature: f,
                        threshold: if mid < b { mid } else { a },
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            score: self.leaf_score(&idx),
        });
        let first = self.y[idx[0]];
        let pure = idx.iter().all(|&i| self.y[i] == first);
        let depth_left = self.params.max_depth.is_none_or(|m| depth < m);
        if pure || !depth_left || idx.len() < 2 * self.params.min_leaf {
            return id;
        }
        let Some(best) = self.best_split(&idx) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| self.x.get(i, best.feature) <= best.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }
}

impl DecisionTree {
    pub fn fit(x: &FeatureMatrix, y: &[u8], params: &TreeParams) -> Self {
        let w = vec![1.0; x.rows()];
        Self::fit_weighted(x, y, &w, (0..x.rows()).collect(), params, None)
    }

    /// Grows on the rows in `idx` (repeats allowed) with per-row weights.
    /// With `features = Some((rng, m))` each split considers `m` random
    /// features.
    fn fit_weighted(
        x: &FeatureMatrix,
        y: &[u8],
        w: &[f64],
        idx: Vec<usize>,
        params: &TreeParams,
        features: Option<(&mut ChaCha8Rng, usize)>,
    ) -> Self {
        let mut g = Grower {
            x,
            y,
            w,
            params: *params,
            features,
            nodes: Vec::new(),
        };
        g.grow(idx, 0);
        Self {
            nodes: g.nodes,
            width: x.cols(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Weighted class-1 fraction of the leaf reached by `row`.
    pub fn score(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { score } => return score,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    trees: Vec<DecisionTree>,
    width: usize,
}

impl ForestModel {
    /// `max_features = None` uses `floor(sqrt(width))`.
    pub fn fit(
        x: &FeatureMatrix,
        y: &[u8],
        trees: usize,
        max_features: Option<usize>,
        bootstrap: bool,
        params: &TreeParams,
        seed: u64,
    ) -> Self {
        let (n, d) = (x.rows(), x.cols());
        let m = max_features
            .unwrap_or_else(|| (d as f64).sqrt().floor() as usize)
            .clamp(1, d.max(1));
        let w = vec![1.0; n];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trees = (0..trees)
            .map(|_| {
                let idx: Vec<usize> = if bootstrap {
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit_weighted(x, y, &w, idx, params, Some((&mut rng, m)))
            })
            .collect();
        Self { trees, width: d }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Mean of the trees' leaf scores.
    pub fn score(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.score(row)).sum::<f64>() / self.trees.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaBoostModel {
    stumps: Vec<(DecisionTree, f64)>,
    width: usize,
    /// Set when a round's weighted error reached 1/2 (or 0) before the
    /// round budget ran out.
    pub stopped_early: bool,
}

const STUMP: TreeParams = TreeParams {
    max_depth: Some(1),
    min_leaf: 1,
};

fn vote(t: &DecisionTree, row: &[f64]) -> f64 {
    if t.score(row) >= 0.5 {
        1.0
    } else {
        -1.0
    }
}

impl AdaBoostModel {
    pub fn fit(x: &FeatureMatrix, y: &[u8], rounds: usize) -> Self {
        let n = x.rows();
        let ys: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let mut w = vec![1.0 / n as f64; n];
        let mut stumps = Vec::new();
        let mut stopped_early = false;
        for round in 0..rounds {
            let stump = DecisionTree::fit_weighted(x, y, &w, (0..n).collect(), &STUMP, None);
            let h: Vec<f64> = x.row_iter().map(|r| vote(&stump, r)).collect();
            let err: f64 = (0..n).filter(|&i| h[i] != ys[i]).map(|i| w[i]).sum();
            if err >= 0.5 - 1e-12 {
                if stumps.is_empty() {
                    stumps.push((stump, 1.0));
                }
                stopped_early = true;
                break;
            }
            let e = err.max(1e-10);
            let alpha = 0.5 * ((1.0 - e) / e).ln();
            stumps.push((stump, alpha));
            if err <= 1e-12 {
                stopped_early = round + 1 < rounds;
                break;
            }
            for i in 0..n {
                w[i] *= (-alpha * ys[i] * h[i]).exp();
            }
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
        }
        Self {
            stumps,
            width: x.cols(),
            stopped_early,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rounds(&self) -> usize {
        self.stumps.len()
    }

    /// `sum_t alpha_t h_t(row)` with `h_t` in {-1, +1}.
    pub fn decision(&self, row: &[f64]) -> f64 {
        self.stumps.iter().map(|(s, a)| a * vote(s, row)).sum()
    }
}
