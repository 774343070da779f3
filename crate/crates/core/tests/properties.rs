use cvqml::encoders::{
    displace_vacuum, displace_vacuum_expm, iqp_encode, iqp_phase_terms, iqp_phases,
    squeeze_vacuum, DisplacementParams, SqueezeParams,
};
use cvqml::fock::{matrix_exponential, ComplexMatrix};
use cvqml::learners::{logreg_objective, metrics, roc_auc, Kernel, LogisticModel, SvmModel};
use cvqml::linalg::exact_sum;
use cvqml::FeatureMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(n: usize, seed: u64, scale: f64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        m[i * n + i] = Complex64::new(rng.gen_range(-scale..scale), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
            m[i * n + j] = z;
            m[j * n + i] = z.conj();
        }
    }
    ComplexMatrix::new(n, n, m).unwrap()
}

fn random_problem(n: usize, d: usize, seed: u64) -> (FeatureMatrix, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let r: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let noise: f64 = rng.gen_range(-1.0..1.0);
        // keep both classes present
        let label = if i < 2 { i as u8 } else { u8::from(r[0] + noise > 0.0) };
        y.push(label);
        rows.push(r);
    }
    (FeatureMatrix::from_rows(&rows).unwrap(), y)
}

fn brute_auc(y: &[u8], s: &[f64]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] == 1 && y[j] == 0 {
                pairs += 1.0;
                if s[i] > s[j] {
                    wins += 1.0;
                } else if s[i] == s[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

fn labelled_scores() -> impl Strategy<Value = (Vec<u8>, Vec<f64>)> {
    prop::collection::vec((0u8..2, 0u8..12), 2..200).prop_map(|v| {
        let (y, s): (Vec<u8>, Vec<u8>) = v.into_iter().unzip();
        (y, s.into_iter().map(|k| f64::from(k) / 11.0).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponential_of_skew_hermitian_is_unitary(n in 1usize..9, seed in any::<u64>(), scale in 0.01f64..4.0) {
        let h = random_hermitian(n, seed, scale);
        let u = matrix_exponential(&h.scale(Complex64::new(0.0, 1.0))).unwrap();
        let uu = u.adjoint().matmul(&u).unwrap();
        prop_assert!(uu.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
    }

    #[test]
    fn coherent_state_paths_agree(re in -1.5f64..1.5, im in -1.5f64..1.5) {
        prop_assume!(re.hypot(im) <= 1.5);
        let p = DisplacementParams::new(Complex64::new(re, im));
        let a = displace_vacuum(p, 30).unwrap();
        let b = displace_vacuum_expm(p, 30).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-8);
        }
    }

    #[test]
    fn coherent_statistics_are_poisson(alpha in -1.5f64..1.5) {
        let p = displace_vacuum(DisplacementParams::real(alpha), 30).unwrap().probabilities();
        let mean = alpha * alpha;
        let mut want = (-mean).exp();
        for (n, got) in p.iter().take(8).enumerate() {
            if n > 0 {
                want *= mean / n as f64;
            }
            prop_assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn squeezed_vacuum_has_even_support(r in 0.0f64..1.0, phi in 0.0f64..std::f64::consts::TAU) {
        let s = squeeze_vacuum(SqueezeParams::new(r, phi).unwrap(), 40).unwrap();
        for (n, a) in s.amplitudes().iter().enumerate() {
            if n % 2 == 1 {
                prop_assert!(a.norm_sqr() < 1e-12);
            }
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn iqp_probabilities_sum_to_one(x in prop::collection::vec(-3.0f64..3.0, 1..7)) {
        let p = iqp_encode(&x, x.len()).unwrap().probabilities();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iqp_phase_ignores_term_order(x in prop::collection::vec(-3.0f64..3.0, 1..6), seed in any::<u64>()) {
        let n = x.len();
        let ph = iqp_phases(&x, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for z in 0..1usize << n {
            let mut t = iqp_phase_terms(&x, z);
            t.shuffle(&mut rng);
            prop_assert_eq!(exact_sum(t).to_bits(), ph.phases[z].to_bits());
        }
    }

    #[test]
    fn rank_auc_matches_pairwise((y, s) in labelled_scores()) {
        let pos = y.iter().filter(|&&l| l == 1).count();
        prop_assume!(pos > 0 && pos < y.len());
        let auc = roc_auc(&y, &s).unwrap();
        prop_assert!((auc - brute_auc(&y, &s)).abs() < 1e-12);
    }

    #[test]
    fn kappa_is_invariant_to_label_swap(v in prop::collection::vec((0u8..2, 0u8..2), 1..100)) {
        let (t, p): (Vec<u8>, Vec<u8>) = v.into_iter().unzip();
        let s = vec![0.5; t.len()];
        let flip = |l: &Vec<u8>| l.iter().map(|x| 1 - x).collect::<Vec<u8>>();
        let a = metrics(&t, &p, &s).unwrap();
        let b = metrics(&flip(&t), &flip(&p), &s).unwrap();
        prop_assert_eq!(a.cohen_kappa, b.cohen_kappa);
        prop_assert_eq!(a.accuracy, b.accuracy);
    }

    #[test]
    fn constant_predictor_kappa_is_zero(t in prop::collection::vec(0u8..2, 1..100), c in 0u8..2) {
        let m = metrics(&t, &vec![c; t.len()], &vec![0.3; t.len()]).unwrap();
        prop_assert_eq!(m.cohen_kappa, 0.0);
    }

    #[test]
    fn metrics_ignore_row_order((y, s) in labelled_scores(), seed in any::<u64>()) {
        let pred: Vec<u8> = s.iter().map(|&v| u8::from(v >= 0.5)).collect();
        let mut idx: Vec<usize> = (0..y.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = metrics(&y, &pred, &s).unwrap();
        let b = metrics(
            &idx.iter().map(|&i| y[i]).collect::<Vec<_>>(),
            &idx.iter().map(|&i| pred[i]).collect::<Vec<_>>(),
            &idx.iter().map(|&i| s[i]).collect::<Vec<_>>(),
        )
        .unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn logreg_converges_to_stationary_point(n in 20usize..80, d in 1usize..5, l2 in 0.1f64..10.0, seed in any::<u64>()) {
        let (x, y) = random_problem(n, d, seed);
        let m = LogisticModel::fit(&x, &y, l2, 100).unwrap();
        let (_, g) = logreg_objective(&m.weights, m.intercept, &x, &y, l2);
        prop_assert!(g.iter().all(|v| v.abs() < 1e-5), "{:?}", g);
    }

    #[test]
    fn svm_duals_stay_in_box(n in 10usize..80, c in 0.1f64..10.0, seed in any::<u64>(), which in 0usize..3) {
        let (x, y) = random_problem(n, 2, seed);
        let kernel = [
            Kernel::Linear,
            Kernel::Rbf { gamma: None },
            Kernel::Poly { degree: 2, gamma: None, coef0: 1.0 },
        ][which];
        let m = SvmModel::fit(&x, &y, kernel, c, 1e-3, 1_000_000).unwrap();
        prop_assert!(m.alphas.iter().all(|&a| (0.0..=c).contains(&a)));
        let balance: f64 = m.alphas.iter().zip(&y).map(|(a, &l)| if l == 1 { *a } else { -a }).sum();
        prop_assert!(balance.abs() < 1e-9 * c.max(1.0) * n as f64);
    }
}
