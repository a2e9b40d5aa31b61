mod common;

use common::{instance_strategy, synthetic};
use l0prune::oracle::brute_force;
use l0prune::{DenseMatrix, LossKind, PenaltyKind, ProblemInstance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn agrees_with_two_dimensional_grid() {
    let a = DenseMatrix::from_rows(&[vec![1.0, 0.4], vec![0.3, -1.2], vec![0.5, 0.5]]).unwrap();
    let y = vec![1.0, -0.7, 0.8];
    let y_cls = vec![1.0, -1.0, 1.0];
    let cases = [
        (LossKind::LeastSquares, PenaltyKind::BigM { big_m: 1.0 }, 0.05),
        (LossKind::LeastSquares, PenaltyKind::BigML1 { big_m: 1.0, alpha: 0.2 }, 0.1),
        (LossKind::LeastSquares, PenaltyKind::BigML2 { big_m: 1.0, alpha: 0.3 }, 0.02),
        (LossKind::Logistic, PenaltyKind::BigM { big_m: 1.0 }, 0.05),
        (LossKind::SquaredHinge, PenaltyKind::BigML2 { big_m: 1.0, alpha: 0.1 }, 0.1),
    ];
    for (loss, penalty, lambda) in cases {
        let labels = if loss.is_classification() { y_cls.clone() } else { y.clone() };
        let inst = ProblemInstance::new(a.clone(), labels, loss, penalty, lambda).unwrap();
        let oracle = brute_force(&inst, 16, 1e-10).unwrap();
        let big_m = penalty.big_m();
        let steps = (2.0 * big_m / 1e-3).round() as usize;
        let coords: Vec<f64> = (0..=steps).map(|k| -big_m + 1e-3 * k as f64).collect();
        let mut best = f64::INFINITY;
        for &x0 in &coords {
            for &x1 in &coords {
                best = best.min(inst.objective(&[x0, x1]));
            }
        }
        assert!(oracle.objective <= best + 1e-9);
        assert!((oracle.objective - best).abs() <= 1e-3, "{} {}: {} vs {best}", loss.name(), penalty.name(), oracle.objective);
    }
}

#[test]
fn objective_is_monotone_in_lambda() {
    let base = synthetic(12, 8, 2, 0.5, 4, LossKind::LeastSquares, PenaltyKind::BigM { big_m: 1.5 }, 1.0);
    let mut previous = f64::NEG_INFINITY;
    for k in 1..=10 {
        let inst = base.with_lambda(0.2 * k as f64);
        let r = brute_force(&inst, 16, 1e-10).unwrap();
        assert!(r.objective >= previous - 1e-12);
        previous = r.objective;
    }
}

#[test]
fn result_is_consistent() {
    let inst = synthetic(10, 8, 2, 0.0, 6, LossKind::Logistic, PenaltyKind::BigML1 { big_m: 2.0, alpha: 0.1 }, 0.1);
    let r = brute_force(&inst, 16, 1e-10).unwrap();
    assert_eq!(r.objective, inst.objective(&r.x));
    let nonzero: Vec<usize> = (0..8).filter(|&i| r.x[i] != 0.0).collect();
    assert_eq!(r.support, nonzero);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn no_sampled_point_beats_the_oracle(inst in instance_strategy(6, 6), seed in any::<u64>()) {
        let r = brute_force(&inst, 16, 1e-10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let big_m = inst.penalty.big_m();
        for _ in 0..1000 {
            let x: Vec<f64> = (0..inst.n())
                .map(|_| if rng.random_bool(0.4) { 0.0 } else { rng.random_range(-big_m..=big_m) })
                .collect();
            prop_assert!(r.objective <= inst.objective(&x) + 1e-9);
        }
    }
}
