use proptest::prelude::*;
use seqmads_core::problem::{Function, ProblemSpec};
use seqmads_core::{partial_sum, violation, EvalOrder, Evaluator, InterruptionPolicy, Problem};

const X: [f64; 1] = [0.5];

/// A problem whose functions return fixed values; NaN stands for a crash.
fn fixed(values: &[f64], objective: f64, costs: &[u64]) -> ProblemSpec {
    let constraints: Vec<Function> = values.iter().map(|&v| Box::new(move |_: &[f64]| v) as Function).collect();
    ProblemSpec::new("fixed", vec![0.0], vec![1.0], costs.to_vec(), constraints, Box::new(move |_: &[f64]| objective))
        .unwrap()
}

fn constraint_value() -> impl Strategy<Value = f64> {
    prop_oneof![
        6 => -5.0..5.0f64,
        1 => Just(0.0),
        1 => Just(f64::NAN),
    ]
}

/// Constraint values, costs (objective last) and an evaluation order.
fn setup() -> impl Strategy<Value = (Vec<f64>, Vec<u64>, Vec<usize>)> {
    (1usize..6).prop_flat_map(|m| {
        (
            proptest::collection::vec(constraint_value(), m),
            proptest::collection::vec(1u64..20, m + 1),
            Just((0..m).collect::<Vec<_>>()).prop_shuffle(),
        )
    })
}

fn policy(m: usize) -> impl Strategy<Value = InterruptionPolicy> {
    prop_oneof![
        Just(InterruptionPolicy::None),
        Just(InterruptionPolicy::CrashOnly),
        Just(InterruptionPolicy::ExtremeBarrier),
        (0.0..30.0f64).prop_map(|h| InterruptionPolicy::PartialSum { h_incumbent: h }),
        (1..=m + 1).prop_map(|j| InterruptionPolicy::PrefixFeasibility { j }),
    ]
}

fn ordered(values: &[f64], order: &[usize]) -> Vec<f64> {
    order.iter().map(|&j| if values[j].is_nan() { f64::INFINITY } else { values[j] }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn partial_sums_grow_and_end_at_h((values, _, order) in setup()) {
        let seq = ordered(&values, &order);
        let sums: Vec<f64> = (0..=seq.len()).map(|l| partial_sum(&seq[..l])).collect();
        prop_assert!(sums.windows(2).all(|w| w[0] <= w[1]));
        let h = violation(&seq, true);
        prop_assert_eq!(sums[seq.len()], h);
        prop_assert_eq!(h == 0.0, seq.iter().all(|&c| c <= 0.0));
    }

    #[test]
    fn full_evaluation_reports_h_or_aborts_at_a_crash((values, costs, order) in setup()) {
        let p = fixed(&values, 1.0, &costs);
        let mut ev = Evaluator::new(&p, EvalOrder::new(order.clone()).unwrap(), u64::MAX).unwrap();
        let out = ev.evaluate(&X, InterruptionPolicy::None, true);
        let seq = ordered(&values, &order);
        match seq.iter().position(|v| v.is_infinite()) {
            Some(k) => {
                prop_assert!(out.crashed);
                prop_assert_eq!(out.values.len(), k + 1);
                prop_assert_eq!(out.h, Some(f64::INFINITY));
                prop_assert_eq!(out.objective, None);
                let paid: u64 = order[..=k].iter().map(|&j| costs[j]).sum();
                prop_assert_eq!(out.incurred_cost, paid);
            }
            None => {
                prop_assert!(!out.crashed);
                prop_assert_eq!(out.h, Some(violation(&seq, true)));
                prop_assert_eq!(out.is_feasible(), seq.iter().all(|&c| c <= 0.0));
                prop_assert_eq!(out.objective, Some(1.0));
                prop_assert_eq!(out.incurred_cost, costs.iter().sum::<u64>());
            }
        }
    }

    #[test]
    fn interruptions_are_sound(
        (values, costs, order) in setup(),
        pick in any::<proptest::sample::Index>(),
        h_inc in 0.0..30.0f64,
    ) {
        let m = values.len();
        let seq = ordered(&values, &order);
        let p = fixed(&values, 1.0, &costs);
        let policies = [
            InterruptionPolicy::ExtremeBarrier,
            InterruptionPolicy::PartialSum { h_incumbent: h_inc },
            InterruptionPolicy::PrefixFeasibility { j: pick.index(m + 1) + 1 },
        ];
        for policy in policies {
            let mut ev = Evaluator::new(&p, EvalOrder::new(order.clone()).unwrap(), u64::MAX).unwrap();
            let out = ev.evaluate(&X, policy, false);
            let called = out.values.len();
            let paid: u64 = order[..called].iter().map(|&j| costs[j]).sum();
            prop_assert_eq!(out.incurred_cost, paid);
            prop_assert_eq!(ev.ledger().consumed(), paid);
            let full_h = violation(&seq, true);
            match (policy, out.interrupted_at) {
                (InterruptionPolicy::ExtremeBarrier, Some(l)) => {
                    prop_assert!(seq[l - 1] > 0.0);
                    prop_assert!(full_h > 0.0);
                }
                (InterruptionPolicy::ExtremeBarrier, None) => {
                    prop_assert!(out.crashed || called == m);
                    prop_assert!(seq[..called].iter().all(|&c| c <= 0.0 || c.is_infinite()));
                }
                (InterruptionPolicy::PartialSum { h_incumbent }, Some(l)) => {
                    let s = partial_sum(&seq[..l]);
                    prop_assert!(s >= h_incumbent && s > 0.0);
                    prop_assert!(full_h >= h_incumbent);
                }
                (InterruptionPolicy::PartialSum { h_incumbent }, None) if !out.crashed => {
                    prop_assert_eq!(called, m);
                    prop_assert!(full_h < h_incumbent || full_h == 0.0);
                    prop_assert_eq!(out.h, Some(full_h));
                }
                (InterruptionPolicy::PrefixFeasibility { j }, interrupted) => {
                    prop_assert!(called <= j.min(m));
                    if let Some(l) = interrupted {
                        prop_assert!(l < j && seq[l - 1] > 0.0);
                    }
                }
                _ => {}
            }
        }
    }

    #[test]
    fn ledger_matches_call_counts_under_any_budget(
        (values, costs, order) in setup(),
        budget in 1u64..400,
        policies in proptest::collection::vec(policy(5), 1..30),
        points in proptest::collection::vec(0usize..4, 1..30),
    ) {
        let m = values.len();
        let p = fixed(&values, 2.0, &costs);
        let mut ev = Evaluator::new(&p, EvalOrder::new(order).unwrap(), budget).unwrap();
        let mut refused = false;
        for (policy, &k) in policies.iter().zip(&points) {
            let policy = match *policy {
                InterruptionPolicy::PrefixFeasibility { j } => InterruptionPolicy::PrefixFeasibility { j: j.min(m + 1) },
                other => other,
            };
            let before = ev.ledger().consumed();
            let out = ev.evaluate(&[k as f64 / 4.0], policy, true);
            prop_assert_eq!(ev.ledger().consumed() - before, out.incurred_cost);
            if refused {
                prop_assert!(out.budget_exhausted);
                prop_assert_eq!(out.incurred_cost, 0);
            }
            refused |= out.budget_exhausted;
            let total: u64 = ev.ledger().per_function_calls().iter().zip(p.costs()).map(|(n, c)| n * c).sum();
            prop_assert_eq!(total, ev.ledger().consumed());
            prop_assert!(ev.ledger().consumed() <= budget);
        }
    }

    #[test]
    fn cached_prefixes_are_never_charged_twice((values, costs, order) in setup()) {
        let p = fixed(&values, 3.0, &costs);
        let mut ev = Evaluator::new(&p, EvalOrder::new(order.clone()).unwrap(), u64::MAX).unwrap();
        let first = ev.evaluate(&X, InterruptionPolicy::ExtremeBarrier, false);
        let second = ev.evaluate(&X, InterruptionPolicy::None, true);
        let seq = ordered(&values, &order);
        let reach = seq.iter().position(|v| v.is_infinite()).map_or(seq.len(), |k| k + 1);
        let mut expected: u64 = order[..reach].iter().map(|&j| costs[j]).sum();
        if reach == seq.len() && !seq.iter().any(|v| v.is_infinite()) {
            expected += costs[seq.len()];
        }
        prop_assert_eq!(first.incurred_cost + second.incurred_cost, expected);
        let third = ev.evaluate(&X, InterruptionPolicy::None, true);
        prop_assert_eq!(third.incurred_cost, 0);
        prop_assert_eq!(third.h, second.h);
    }
}
