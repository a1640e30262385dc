use seqmads_core::harness::{sample_infeasible_start, splitmix64};
use seqmads_core::mads::rng_from_seed;
use seqmads_core::strategies::{run_eb, run_int, run_procedure};
use seqmads_core::trace::Termination;
use seqmads_core::{EvalOrder, Evaluator, InterruptionPolicy, ProcedureId, SolverConfig, Tcsd};

fn starts(count: u64) -> Vec<Vec<f64>> {
    (0..count).map(|i| sample_infeasible_start(&Tcsd, &mut rng_from_seed(splitmix64(i))).unwrap()).collect()
}

#[test]
fn interruption_preserves_the_iterates_until_convergence() {
    let order = EvalOrder::identity(4);
    for (i, x0) in starts(4).iter().enumerate() {
        let config = SolverConfig::with_seed(i as u64, 1 << 40);
        let eb = run_eb(&Tcsd, x0, &order, &config).unwrap();
        let int = run_int(&Tcsd, x0, &order, &config).unwrap();
        assert!(eb.phases.iter().all(|p| p.termination != Termination::BudgetExhausted));
        assert_eq!(eb.events.len(), int.events.len());
        for (a, b) in eb.events.iter().zip(&int.events) {
            assert_eq!(a.point, b.point);
            assert_eq!(a.phase, b.phase);
            assert!(b.cost <= a.cost);
        }
        assert_eq!(eb.final_point, int.final_point);
        assert_eq!(eb.final_f, int.final_f);
        assert!(int.consumed <= eb.consumed);
    }
}

#[test]
fn full_evaluations_fit_the_budget_by_floor_division() {
    for budget in [29, 30, 59, 60, 1000, 9999, 10_000, 10_029] {
        let mut ev = Evaluator::new(&Tcsd, EvalOrder::identity(4), budget).unwrap();
        let mut complete = 0;
        for i in 0.. {
            let x = [0.07 + i as f64 * 1e-6, 0.9, 4.0];
            let out = ev.evaluate(&x, InterruptionPolicy::None, true);
            if out.budget_exhausted {
                break;
            }
            assert!(out.objective.is_some());
            complete += 1;
        }
        assert_eq!(complete, budget / 30, "budget {budget}");
        assert!(ev.ledger().consumed() <= budget);
    }
}

#[test]
fn every_procedure_respects_the_budget_and_reports_honest_finals() {
    let order = EvalOrder::identity(4);
    for x0 in starts(3) {
        for proc in ProcedureId::ALL {
            let t = run_procedure(proc, &Tcsd, &x0, &order, &SolverConfig::with_seed(9, 3_000)).unwrap();
            assert!(t.consumed <= 3_000);
            let costs = [1, 4, 8, 14, 3];
            assert_eq!(t.per_function_calls.iter().zip(costs).map(|(n, c)| n * c).sum::<u64>(), t.consumed);
            if t.final_h == Some(0.0) {
                assert!((0..4).all(|j| Tcsd::constraint_value(j, &t.final_point) <= 0.0));
            }
        }
    }
}
