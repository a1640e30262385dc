use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::EvalOrder;
use crate::problem::Problem;

use super::sampling::empirical_feasibility;

/// How a campaign orders the constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingStrategy {
    /// Cheapest first.
    ByCost,
    /// Most often violated first, estimated from a sample. Fractions are
    /// compared in whole percent, so near-equal estimates fall back to cost.
    ByInfeasibility,
    /// 1-based constraint numbers.
    Explicit(Vec<usize>),
}

/// Builds the evaluation order. Ties fall back to cost, then index.
pub fn order_constraints(
    problem: &dyn Problem,
    strategy: &OrderingStrategy,
    samples: Option<&[Vec<f64>]>,
) -> Result<EvalOrder> {
    let m = problem.num_constraints();
    let costs = problem.costs();
    let mut order: Vec<usize> = (0..m).collect();
    match strategy {
        OrderingStrategy::ByCost => order.sort_by_key(|&j| (costs[j], j)),
        OrderingStrategy::ByInfeasibility => {
            let samples = samples
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::InvalidConfig("ordering by infeasibility needs samples".into()))?;
            let percent: Vec<i64> =
                empirical_feasibility(problem, samples).iter().map(|&f| libm::floor(f * 100.0) as i64).collect();
            order.sort_by_key(|&j| (percent[j], costs[j], j));
        }
        OrderingStrategy::Explicit(numbers) => {
            if numbers.len() != m {
                return Err(Error::InvalidOrder(alloc::format!("expected {m} constraints, got {}", numbers.len())));
            }
            return EvalOrder::from_one_based(numbers);
        }
    }
    EvalOrder::new(order)
}
