mod common;

use common::{class_strategy, dual_point, instance_strategy};
use l0prune::dual::{dual_value, expand_tree, sweep_direct_successors, ExpansionOutcome};
use l0prune::node::SuccessorSpec;
use l0prune::relax::relaxed_objective;
use l0prune::{IndexClass, Node, ProblemInstance};
use proptest::prelude::*;

fn case() -> impl Strategy<Value = (ProblemInstance, Vec<IndexClass>, Vec<f64>, Vec<usize>, Vec<bool>)> {
    instance_strategy(6, 8).prop_flat_map(|inst| {
        let (m, n) = (inst.m(), inst.n());
        (
            Just(inst),
            prop::collection::vec(class_strategy(), n),
            prop::collection::vec(-3.0..3.0f64, m),
            prop::collection::vec(0..n, 1..=5),
            prop::collection::vec(any::<bool>(), 5),
        )
    })
}

/// `−f*(−u) − Σᵢ node_conjugate(aᵢᵀu)` summed term by term.
fn termwise(inst: &ProblemInstance, classes: &[IndexClass], u: &[f64], inner: &[f64]) -> f64 {
    let neg: Vec<f64> = u.iter().map(|v| -v).collect();
    let fstar = inst.loss.conjugate(&inst.y, &neg).unwrap();
    let mut total = -fstar;
    for (i, &c) in classes.iter().enumerate() {
        total -= inst.penalty.node_conjugate(inst.lambda, c, inner[i]);
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_termwise_sum((inst, classes, w, _, _) in case()) {
        let node = Node::with_classes(classes.clone(), inst.m()).unwrap();
        let (u, inner) = dual_point(&inst, &w);
        let d = dual_value(&inst, &node, &u, &inner);
        let t = termwise(&inst, &classes, &u, &inner);
        prop_assert!((d - t).abs() <= 1e-12 * (1.0 + t.abs()), "{d} vs {t}");
    }

    #[test]
    fn chain_identity_and_monotonicity((inst, classes, w, picks, dirs) in case()) {
        let node = Node::with_classes(classes, inst.m()).unwrap();
        let (u, inner) = dual_point(&inst, &w);
        let base = dual_value(&inst, &node, &u, &inner);
        let mut succ = node.clone();
        let mut expected = base;
        for (&i, &to_one) in picks.iter().zip(&dirs) {
            if succ.class(i) != IndexClass::Free {
                continue;
            }
            if to_one {
                succ = succ.apply_successor(&inst, SuccessorSpec::to_one(i)).unwrap();
                expected += inst.penalty.pivot1(inst.lambda, inner[i]);
            } else {
                succ = succ.apply_successor(&inst, SuccessorSpec::to_zero(i)).unwrap();
                expected += inst.penalty.pivot0(inst.lambda, inner[i]);
            }
        }
        let direct = dual_value(&inst, &succ, &u, &inner);
        prop_assert!((direct - expected).abs() <= 1e-12 * (1.0 + direct.abs()));
        prop_assert!(direct >= base - 1e-12 * (1.0 + base.abs()));
    }

    #[test]
    fn sweep_matches_explicit_successors((inst, classes, w, _, _) in case(), p_bar in -5.0..20.0f64) {
        let node = Node::with_classes(classes, inst.m()).unwrap();
        let (u, inner) = dual_point(&inst, &w);
        let sweep = sweep_direct_successors(&inst, &node, &u, &inner, p_bar, 0.0);
        for (k, &i) in sweep.free.iter().enumerate() {
            let d0 = dual_value(&inst, &node.apply_successor(&inst, SuccessorSpec::to_zero(i)).unwrap(), &u, &inner);
            let d1 = dual_value(&inst, &node.apply_successor(&inst, SuccessorSpec::to_one(i)).unwrap(), &u, &inner);
            prop_assert!((sweep.d0[k] - d0).abs() <= 1e-12 * (1.0 + d0.abs()));
            prop_assert!((sweep.d1[k] - d1).abs() <= 1e-12 * (1.0 + d1.abs()));
            prop_assert!(sweep.d0[k] >= sweep.base && sweep.d1[k] >= sweep.base);
            prop_assert_eq!(sweep.i0.contains(&i), sweep.d0[k] > p_bar);
            prop_assert_eq!(sweep.i1.contains(&i), sweep.d1[k] > p_bar);
        }
    }

    #[test]
    fn infinite_incumbent_passes_nothing((inst, classes, w, _, _) in case()) {
        let node = Node::with_classes(classes, inst.m()).unwrap();
        let (u, inner) = dual_point(&inst, &w);
        let sweep = sweep_direct_successors(&inst, &node, &u, &inner, f64::INFINITY, 0.0);
        prop_assert!(!sweep.passed_any());
    }

    #[test]
    fn passed_tests_propagate((inst, classes, w, picks, dirs) in case(), slack in 0.0..1.0f64) {
        let node = Node::with_classes(classes, inst.m()).unwrap();
        let (u, inner) = dual_point(&inst, &w);
        let mut succ = node.clone();
        for (&i, &to_one) in picks.iter().zip(&dirs).skip(1) {
            if succ.class(i) == IndexClass::Free {
                let spec = if to_one { SuccessorSpec::to_one(i) } else { SuccessorSpec::to_zero(i) };
                succ = succ.apply_successor(&inst, spec).unwrap();
            }
        }
        for i in succ.free_indices() {
            for spec in [SuccessorSpec::to_zero(i), SuccessorSpec::to_one(i)] {
                let at_node = dual_value(&inst, &node.apply_successor(&inst, spec).unwrap(), &u, &inner);
                let p_bar = at_node - slack;
                if at_node > p_bar {
                    let at_succ = dual_value(&inst, &succ.apply_successor(&inst, spec).unwrap(), &u, &inner);
                    prop_assert!(at_succ > p_bar);
                }
            }
        }
    }

    #[test]
    fn weak_duality((inst, classes, w, _, _) in case(), xs in prop::collection::vec(-1.0..1.0f64, 8)) {
        let node = Node::with_classes(classes.clone(), inst.m()).unwrap();
        let (u, inner) = dual_point(&inst, &w);
        let big_m = inst.penalty.big_m();
        let x: Vec<f64> = classes
            .iter()
            .zip(&xs)
            .map(|(c, &v)| if *c == IndexClass::Zero { 0.0 } else { v * big_m })
            .collect();
        let ax = inst.a.mul_vec(&x);
        prop_assert!(dual_value(&inst, &node, &u, &inner) <= relaxed_objective(&inst, &node, &x, &ax) + 1e-9);
    }

    #[test]
    fn expansion_follows_the_sets((inst, classes, w, _, _) in case(), p_bar in -5.0..20.0f64) {
        let node = Node::with_classes(classes, inst.m()).unwrap();
        let (u, inner) = dual_point(&inst, &w);
        let sweep = sweep_direct_successors(&inst, &node, &u, &inner, p_bar, 0.0);
        match expand_tree(&inst, &node, &sweep).unwrap() {
            ExpansionOutcome::PruneWholeNode => {
                prop_assert!(sweep.i0.iter().any(|i| sweep.i1.contains(i)));
            }
            ExpansionOutcome::NoChange => prop_assert!(!sweep.passed_any()),
            ExpansionOutcome::Refined { node: refined, fixed_to_zero, fixed_to_one } => {
                prop_assert_eq!(&fixed_to_zero, &sweep.i1);
                prop_assert_eq!(&fixed_to_one, &sweep.i0);
                for i in 0..node.n() {
                    let expected = if sweep.i0.contains(&i) {
                        IndexClass::One
                    } else if sweep.i1.contains(&i) {
                        IndexClass::Zero
                    } else {
                        node.class(i)
                    };
                    prop_assert_eq!(refined.class(i), expected);
                }
                // the refined bound is the dual value of the refined node
                let d = dual_value(&inst, &refined, &u, &inner);
                prop_assert!((refined.lower_bound - d).abs() <= 1e-12 * (1.0 + d.abs()));
            }
        }
    }
}
