use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategies::ProcedureId;
use crate::trace::RunTrace;

/// Cumulative cost when the first point with `h = 0` finished evaluating.
pub fn first_feasible_cost(trace: &RunTrace) -> Option<u64> {
    trace.first_feasible_cost
}

/// Objective value an instance must reach: `f* + tolerance·|f*|`.
pub fn target_value(f_star: f64, tolerance: f64) -> f64 {
    f_star + tolerance * libm::fabs(f_star)
}

/// Earliest cost at which the run held a feasible point within the target.
pub fn solved_cost(trace: &RunTrace, target: f64) -> Option<u64> {
    trace
        .events
        .iter()
        .filter(|e| e.h == Some(0.0) && e.f.is_some_and(|f| f <= target))
        .map(|e| e.cost)
        .min()
}

/// Data profiles sampled on a shared cost grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileTable {
    pub costs: Vec<u64>,
    pub curves: Vec<ProfileCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub procedure: ProcedureId,
    /// Fraction of instances solved at each grid cost.
    pub fractions: Vec<f64>,
}

/// Every cost at which any run logged an event, plus `0` and the budget.
pub fn default_cost_grid<'a>(traces: impl IntoIterator<Item = &'a RunTrace>, budget: u64) -> Vec<u64> {
    let mut grid: BTreeSet<u64> = BTreeSet::new();
    grid.insert(0);
    grid.insert(budget);
    for t in traces {
        grid.extend(t.events.iter().map(|e| e.cost));
    }
    grid.into_iter().collect()
}

/// Fraction of instances solved by cost `κ`, for each `κ` of the grid. An
/// instance is solved at `κ` when a feasible point with
/// `f <= f* + tolerance·|f*|` finished evaluating at cumulative cost `<= κ`.
/// Instances whose run failed count as unsolved.
pub fn data_profile(
    runs: &[(ProcedureId, Vec<Option<&RunTrace>>)],
    f_star: Option<f64>,
    tolerance: f64,
    cost_grid: &[u64],
) -> Result<ProfileTable> {
    let f_star = f_star.ok_or(Error::MissingBestKnown)?;
    let target = target_value(f_star, tolerance);
    let curves = runs
        .iter()
        .map(|(procedure, traces)| {
            let total = traces.len().max(1) as f64;
            let solved: Vec<u64> = traces.iter().filter_map(|t| t.and_then(|t| solved_cost(t, target))).collect();
            let fractions = cost_grid
                .iter()
                .map(|&k| solved.iter().filter(|&&c| c <= k).count() as f64 / total)
                .collect();
            ProfileCurve { procedure: *procedure, fractions }
        })
        .collect();
    Ok(ProfileTable { costs: cost_grid.to_vec(), curves })
}
