use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::evaluator::partial_sum;
use crate::mads::SolverRng;
use crate::problem::Problem;

/// Consecutive feasible samples tolerated before giving up.
pub const MAX_START_ATTEMPTS: usize = 10_000;

fn uniform_point(lower: &[f64], upper: &[f64], rng: &mut SolverRng) -> Vec<f64> {
    lower.iter().zip(upper).map(|(&lo, &hi)| rng.random_range(lo..=hi)).collect()
}

/// Draws uniform points in the box until one violates some constraint.
/// These evaluations are setup work and are not charged to any budget.
pub fn sample_infeasible_start(problem: &dyn Problem, rng: &mut SolverRng) -> Result<Vec<f64>> {
    let (lower, upper) = (problem.lower_bounds(), problem.upper_bounds());
    for _ in 0..MAX_START_ATTEMPTS {
        let x = uniform_point(lower, upper, rng);
        let values: Vec<f64> = (0..problem.num_constraints()).map(|j| problem.constraint(j, &x)).collect();
        if partial_sum(&values) > 0.0 {
            return Ok(x);
        }
    }
    Err(Error::NoInfeasibleSample(MAX_START_ATTEMPTS))
}

/// Latin hypercube sample: along every coordinate, each of the `count`
/// equal-width strata holds exactly one point.
pub fn lhs_sample(lower: &[f64], upper: &[f64], count: usize, rng: &mut SolverRng) -> Vec<Vec<f64>> {
    let mut points = alloc::vec![Vec::with_capacity(lower.len()); count];
    let mut strata: Vec<usize> = (0..count).collect();
    for (&lo, &hi) in lower.iter().zip(upper) {
        strata.shuffle(rng);
        for (point, &s) in points.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            let v = lo + (s as f64 + u) / count as f64 * (hi - lo);
            point.push(v.clamp(lo, hi));
        }
    }
    points
}

/// Fraction of `points` satisfying each constraint (crashes count as
/// violations), indexed by constraint.
pub fn empirical_feasibility(problem: &dyn Problem, points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len().max(1) as f64;
    (0..problem.num_constraints())
        .map(|j| points.iter().filter(|x| problem.constraint(j, x) <= 0.0).count() as f64 / n)
        .collect()
}
