use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::LearnError;

/// Raw hyperparameters by name. Integers and booleans are carried as reals
/// (`bootstrap = 0 / 1`).
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    LogReg,
    Knn,
    SvmLinear,
    SvmPoly,
    SvmRbf,
    SvmSigmoid,
    DecisionTree,
    RandomForest,
    AdaBoost,
    LightGbm,
    CatBoost,
}

impl ModelKind {
    pub const SUPPORTED: [ModelKind; 9] = [
        Self::LogReg,
        Self::Knn,
        Self::SvmLinear,
        Self::SvmPoly,
        Self::SvmRbf,
        Self::SvmSigmoid,
        Self::DecisionTree,
        Self::RandomForest,
        Self::AdaBoost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::LogReg => "logreg",
            Self::Knn => "knn",
            Self::SvmLinear => "svm-linear",
            Self::SvmPoly => "svm-poly",
            Self::SvmRbf => "svm-rbf",
            Self::SvmSigmoid => "svm-sigmoid",
            Self::DecisionTree => "decision-tree",
            Self::RandomForest => "random-forest",
            Self::AdaBoost => "adaboost",
            Self::LightGbm => "lightgbm",
            Self::CatBoost => "catboost",
        }
    }

    pub fn is_supported(self) -> bool {
        !matches!(self, Self::LightGbm | Self::CatBoost)
    }

    fn allowed_keys(self) -> &'static [&'static str] {
        match self {
            Self::LogReg => &["l2", "max_iter"],
            Self::Knn => &["k"],
            Self::SvmLinear => &["c", "tol", "max_iter"],
            Self::SvmPoly => &["c", "tol", "max_iter", "gamma", "degree", "coef0"],
            Self::SvmRbf => &["c", "tol", "max_iter", "gamma"],
            Self::SvmSigmoid => &["c", "tol", "max_iter", "gamma", "coef0"],
            Self::DecisionTree => &["max_depth", "min_leaf"],
            Self::RandomForest => &["trees", "max_features", "bootstrap", "max_depth", "min_leaf"],
            Self::AdaBoost => &["rounds"],
            Self::LightGbm | Self::CatBoost => &[],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = LearnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "logreg" | "logistic-regression" => Self::LogReg,
            "knn" => Self::Knn,
            "svm-linear" => Self::SvmLinear,
            "svm-poly" => Self::SvmPoly,
            "svm-rbf" => Self::SvmRbf,
            "svm-sigmoid" => Self::SvmSigmoid,
            "decision-tree" | "tree" => Self::DecisionTree,
            "random-forest" | "forest" => Self::RandomForest,
            "adaboost" => Self::AdaBoost,
            "lightgbm" => Self::LightGbm,
            "catboost" => Self::CatBoost,
            other => return Err(LearnError::Config(format!("unknown model kind '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Linear,
    /// `(gamma <x, x'> + coef0)^degree`
    Poly {
        degree: u32,
        gamma: Option<f64>,
        coef0: f64,
    },
    /// `exp(-gamma |x - x'|^2)`
    Rbf { gamma: Option<f64> },
    /// `tanh(gamma <x, x'> + coef0)`
    Sigmoid { gamma: Option<f64>, coef0: f64 },
}

impl Kernel {
    /// Kernel with `gamma = None` resolved to `1 / (width * var(X))`.
    pub(crate) fn resolve(self, scale_gamma: f64) -> Kernel {
        let g = |g: Option<f64>| Some(g.unwrap_or(scale_gamma));
        match self {
            Self::Linear => Self::Linear,
            Self::Poly {
                degree,
                gamma,
                coef0,
            } => Self::Poly {
                degree,
                gamma: g(gamma),
                coef0,
            },
            Self::Rbf { gamma } => Self::Rbf { gamma: g(gamma) },
            Self::Sigmoid { gamma, coef0 } => Self::Sigmoid {
                gamma: g(gamma),
                coef0,
            },
        }
    }

    pub(crate) fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let dot = || a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        match *self {
            Self::Linear => dot(),
            Self::Poly {
                degree,
                gamma,
                coef0,
            } => (gamma.unwrap_or(1.0) * dot() + coef0).powi(degree as i32),
            Self::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
                (-gamma.unwrap_or(1.0) * d2).exp()
            }
            Self::Sigmoid { gamma, coef0 } => (gamma.unwrap_or(1.0) * dot() + coef0).tanh(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: Some(12),
            min_leaf: 2,
        }
    }
}

/// Validated, typed hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hyperparams {
    LogReg {
        l2: f64,
        max_iter: usize,
    },
    Knn {
        k: usize,
    },
    Svm {
        kernel: Kernel,
        c: f64,
        tol: f64,
        max_iter: usize,
    },
    Tree(TreeParams),
    Forest {
        trees: usize,
        /// `None` uses `floor(sqrt(width))`.
        max_features: Option<usize>,
        bootstrap: bool,
        tree: TreeParams,
    },
    AdaBoost {
        rounds: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    params: Params,
    pub seed: u64,
    hyper: Hyperparams,
}

fn positive(key: &str, v: f64) -> Result<f64, LearnError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(LearnError::Config(format!("{key} must be a positive number, got {v}")))
    }
}

fn integer(key: &str, v: f64, min: usize) -> Result<usize, LearnError> {
    if v.is_finite() && v.fract() == 0.0 && v >= min as f64 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(LearnError::Config(format!("{key} must be an integer >= {min}, got {v}")))
    }
}

impl ModelSpec {
    /// Validates `params` for `kind`. Unknown keys and out-of-range values
    /// are rejected; missing keys take their defaults.
    pub fn new(kind: ModelKind, params: Params, seed: u64) -> Result<Self, LearnError> {
        if !kind.is_supported() {
            return Err(LearnError::Unsupported(kind.to_string()));
        }
        let allowed = kind.allowed_keys();
        if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(LearnError::Config(format!(
                "{kind} does not take '{bad}' (allowed: {})",
                allowed.join(", ")
            )));
        }
        let get = |k: &str| params.get(k).copied();
        let tree = || -> Result<TreeParams, LearnError> {
            let max_depth = match get("max_depth") {
                None => Some(12),
                Some(v) if v == f64::INFINITY => None,
                Some(v) => Some(integer("max_depth", v, 1)?),
            };
            let min_leaf = get("min_leaf").map_or(Ok(2), |v| integer("min_leaf", v, 1))?;
            Ok(TreeParams {
                max_depth,
                min_leaf,
            })
        };
        let gamma = || get("gamma").map(|v| positive("gamma", v)).transpose();
        let coef0 = || match get("coef0") {
            Some(v) if !v.is_finite() => Err(LearnError::Config(format!("coef0 must be finite, got {v}"))),
            v => Ok(v.unwrap_or(0.0)),
        };

        let hyper = match kind {
            ModelKind::LogReg => {
                let l2 = get("l2").unwrap_or(1.0);
                if !(l2.is_finite() && l2 >= 0.0) {
                    return Err(LearnError::Config(format!("l2 must be >= 0, got {l2}")));
                }
                Hyperparams::LogReg {
                    l2,
                    max_iter: get("max_iter").map_or(Ok(100), |v| integer("max_iter", v, 1))?,
                }
            }
            ModelKind::Knn => Hyperparams::Knn {
                k: get("k").map_or(Ok(5), |v| integer("k", v, 1))?,
            },
            ModelKind::SvmLinear | ModelKind::SvmPoly | ModelKind::SvmRbf | ModelKind::SvmSigmoid => {
                let kernel = match kind {
                    ModelKind::SvmLinear => Kernel::Linear,
                    ModelKind::SvmPoly => Kernel::Poly {
                        degree: get("degree").map_or(Ok(3), |v| integer("degree", v, 1))? as u32,
                        gamma: gamma()?,
                        coef0: coef0()?,
                    },
                    ModelKind::SvmRbf => Kernel::Rbf { gamma: gamma()? },
                    _ => Kernel::Sigmoid {
                        gamma: gamma()?,
                        coef0: coef0()?,
                    },
                };
                Hyperparams::Svm {
                    kernel,
                    c: get("c").map_or(Ok(1.0), |v| positive("c", v))?,
                    tol: get("tol").map_or(Ok(1e-3), |v| positive("tol", v))?,
                    max_iter: get("max_iter").map_or(Ok(1_000_000), |v| integer("max_iter", v, 1))?,
                }
            }
            ModelKind::DecisionTree => Hyperparams::Tree(tree()?),
            ModelKind::RandomForest => Hyperparams::Forest {
                trees: get("trees").map_or(Ok(100), |v| integer("trees", v, 1))?,
                max_features: get("max_features")
                    .map(|v| integer("max_features", v, 1))
                    .transpose()?,
                bootstrap: match get("bootstrap") {
                    None => true,
                    Some(v) if v == 0.0 || v == 1.0 => v == 1.0,
                    Some(v) => {
                        return Err(LearnError::Config(format!("bootstrap must be 0 or 1, got {v}")))
                    }
                },
                tree: tree()?,
            },
            ModelKind::AdaBoost => Hyperparams::AdaBoost {
                rounds: get("rounds").map_or(Ok(100), |v| integer("rounds", v, 1))?,
            },
            ModelKind::LightGbm | ModelKind::CatBoost => unreachable!(),
        };
        Ok(Self {
            kind,
            params,
            seed,
            hyper,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn hyperparams(&self) -> Hyperparams {
        self.hyper
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pairs: &[(&str, f64)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn defaults() {
        let hp = |k| ModelSpec::new(k, Params::new(), 0).unwrap().hyperparams();
        assert_eq!(hp(ModelKind::LogReg), Hyperparams::LogReg { l2: 1.0, max_iter: 100 });
        assert_eq!(hp(ModelKind::Knn), Hyperparams::Knn { k: 5 });
        assert!(matches!(
            hp(ModelKind::SvmPoly),
            Hyperparams::Svm {
                kernel: Kernel::Poly { degree: 3, gamma: None, coef0 },
                c,
                ..
            } if c == 1.0 && coef0 == 0.0
        ));
        assert_eq!(hp(ModelKind::DecisionTree), Hyperparams::Tree(TreeParams::default()));
        assert!(matches!(
            hp(ModelKind::RandomForest),
            Hyperparams::Forest { trees: 100, max_features: None, bootstrap: true, .. }
        ));
        assert_eq!(hp(ModelKind::AdaBoost), Hyperparams::AdaBoost { rounds: 100 });
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            (ModelKind::Knn, p(&[("k", 0.0)])),
            (ModelKind::Knn, p(&[("k", 2.5)])),
            (ModelKind::LogReg, p(&[("l2", -1.0)])),
            (ModelKind::SvmRbf, p(&[("c", 0.0)])),
            (ModelKind::SvmRbf, p(&[("gamma", f64::NAN)])),
            (ModelKind::SvmRbf, p(&[("degree", 2.0)])),
            (ModelKind::RandomForest, p(&[("bootstrap", 0.5)])),
            (ModelKind::DecisionTree, p(&[("min_leaf", 0.0)])),
        ];
        for (kind, params) in bad {
            assert!(
                matches!(ModelSpec::new(kind, params.clone(), 0), Err(LearnError::Config(_))),
                "{kind} {params:?}"
            );
        }
    }

    #[test]
    fn unlimited_depth() {
        let s = ModelSpec::new(ModelKind::DecisionTree, p(&[("max_depth", f64::INFINITY)]), 0).unwrap();
        assert!(matches!(
            s.hyperparams(),
            Hyperparams::Tree(TreeParams { max_depth: None, .. })
        ));
    }

    #[test]
    fn names_round_trip() {
        for k in ModelKind::SUPPORTED.into_iter().chain([ModelKind::LightGbm, ModelKind::CatBoost]) {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("xgboost".parse::<ModelKind>().is_err());
    }
}
