//! Run traces: the serializable record of one solver run.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::evaluator::{CallRecord, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Feasibility,
    Optimization,
    /// Hierarchical subproblem `j` (1-based): minimize the `j`-th constraint
    /// of the order subject to the ones before it.
    Subproblem(usize),
}

/// Why a mesh adaptive direct search run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The acceptor's goal was reached (e.g. a feasible point was found).
    GoalReached,
    /// The frame size dropped below its minimum.
    MeshConverged,
    BudgetExhausted,
}

/// The incumbent changed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementEvent {
    pub phase: Phase,
    /// Cumulative cost when the point finished evaluating.
    pub cost: u64,
    pub point: Vec<f64>,
    #[serde(with = "crate::extreal::option")]
    pub h: Option<f64>,
    #[serde(with = "crate::extreal::option")]
    pub f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseOutcome {
    FeasiblePointFound(Vec<f64>),
    InfeasibleDeclared,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseResult {
    pub kind: Phase,
    pub outcome: PhaseOutcome,
    pub termination: Termination,
    pub iterations: usize,
    pub start_cost: u64,
    pub end_cost: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub problem: String,
    pub procedure: String,
    pub seed: u64,
    pub budget: u64,
    /// 1-based constraint numbers in evaluation order.
    pub order: Vec<usize>,
    pub start: Vec<f64>,
    pub phases: Vec<PhaseResult>,
    pub events: Vec<ImprovementEvent>,
    pub final_point: Vec<f64>,
    #[serde(with = "crate::extreal::option")]
    pub final_h: Option<f64>,
    #[serde(with = "crate::extreal::option")]
    pub final_f: Option<f64>,
    /// Calls of `(c_1, ..., c_m, f)`.
    pub per_function_calls: Vec<u64>,
    pub consumed: u64,
    pub first_feasible_cost: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trials: Vec<TrialRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub calls: Vec<CallRecord>,
}

impl RunTrace {
    /// Final objective value if the run ended on a feasible point.
    pub fn final_feasible_objective(&self) -> Option<f64> {
        match (self.final_h, self.final_f) {
            (Some(h), Some(f)) if h == 0.0 && f.is_finite() => Some(f),
            _ => None,
        }
    }

    /// Incumbent points in order, with consecutive repeats (a phase starting
    /// from the previous phase's last point) collapsed.
    pub fn incumbent_points(&self) -> Vec<&[f64]> {
        let mut points: Vec<&[f64]> = Vec::with_capacity(self.events.len());
        for e in &self.events {
            if points.last().is_none_or(|p| *p != e.point.as_slice()) {
                points.push(&e.point);
            }
        }
        points
    }
}
