#![allow(dead_code)]

use l0prune::data::{generate, AmplitudeSign, SyntheticSpec};
use l0prune::path::lambda_max;
use l0prune::{DenseMatrix, IndexClass, LossKind, PenaltyKind, ProblemInstance};
use proptest::prelude::*;

pub fn loss_strategy() -> impl Strategy<Value = LossKind> {
    prop_oneof![
        Just(LossKind::LeastSquares),
        Just(LossKind::Logistic),
        Just(LossKind::SquaredHinge)
    ]
}

pub fn penalty_strategy() -> impl Strategy<Value = PenaltyKind> {
    (0..3usize, 0.2..3.0f64, 0.01..1.0f64).prop_map(|(k, big_m, alpha)| match k {
        0 => PenaltyKind::BigM { big_m },
        1 => PenaltyKind::BigML1 { big_m, alpha },
        _ => PenaltyKind::BigML2 { big_m, alpha },
    })
}

pub fn class_strategy() -> impl Strategy<Value = IndexClass> {
    prop_oneof![Just(IndexClass::Zero), Just(IndexClass::One), Just(IndexClass::Free)]
}

/// Random dense instance with labels matching the loss.
pub fn instance_strategy(max_m: usize, max_n: usize) -> impl Strategy<Value = ProblemInstance> {
    (2..=max_m, 2..=max_n, loss_strategy(), penalty_strategy(), 0.05..2.0f64).prop_flat_map(
        |(m, n, loss, penalty, lambda)| {
            (
                prop::collection::vec(-2.0..2.0f64, m * n),
                prop::collection::vec(-3.0..3.0f64, m),
            )
                .prop_map(move |(data, raw_y)| {
                    let a = DenseMatrix::from_col_major(m, n, data).unwrap();
                    let y = if loss.is_classification() {
                        raw_y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect()
                    } else {
                        raw_y
                    };
                    ProblemInstance::new(a, y, loss, penalty, lambda).unwrap()
                })
        },
    )
}

/// `−∇f(w)`, a dual point inside the conjugate's domain.
pub fn dual_point(inst: &ProblemInstance, w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let u: Vec<f64> = inst.loss.gradient(&inst.y, w).unwrap().iter().map(|g| -g).collect();
    let inner = inst.a.tr_mul_vec(&u);
    (u, inner)
}

/// Synthetic instance at `ratio · λ_max`.
pub fn synthetic(
    m: usize,
    n: usize,
    k: usize,
    rho: f64,
    seed: u64,
    loss: LossKind,
    penalty: PenaltyKind,
    ratio: f64,
) -> ProblemInstance {
    let data = generate(&SyntheticSpec {
        m,
        n,
        k,
        rho,
        snr_db: 10.0,
        seed,
        amplitude_sign: AmplitudeSign::AllPositive,
    })
    .unwrap();
    let y = if loss.is_classification() {
        data.y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect()
    } else {
        data.y
    };
    let inst = ProblemInstance::new(data.a, y, loss, penalty, 1.0).unwrap();
    let lambda = ratio * lambda_max(&inst);
    inst.with_lambda(lambda)
}
