//! Sequentially evaluable constrained problems.
//!
//! A problem exposes `m` constraint functions and one objective, each of which
//! can be called on its own and carries a fixed integer cost. Any evaluation
//! that does not produce a finite number (division by zero, overflow, NaN) is
//! reported as `+∞`, the crash convention used throughout the crate.

mod tcsd;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use tcsd::Tcsd;

/// Maps every non-finite value to `+∞`.
#[inline]
pub fn crash_to_inf(value: f64) -> f64 {
    if value.is_finite() {
        value
    } else {
        f64::INFINITY
    }
}

/// Identifies one of the `m + 1` functions of a problem.
///
/// Constraints are 0-based internally and printed 1-based (`c1`, `c2`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FunctionId {
    Constraint(usize),
    Objective,
}

impl FunctionId {
    /// Position in a `(c_1, ..., c_m, f)` vector.
    pub fn slot(self, num_constraints: usize) -> usize {
        match self {
            FunctionId::Constraint(j) => j,
            FunctionId::Objective => num_constraints,
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionId::Constraint(j) => write!(f, "c{}", j + 1),
            FunctionId::Objective => f.write_str("f"),
        }
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "f" {
            return Ok(FunctionId::Objective);
        }
        s.strip_prefix('c')
            .and_then(|rest| rest.parse::<usize>().ok())
            .filter(|&j| j >= 1)
            .map(|j| FunctionId::Constraint(j - 1))
            .ok_or_else(|| Error::UnknownFunction(s.to_string()))
    }
}

/// Reference solution of a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestKnown {
    pub point: Vec<f64>,
    pub objective_value: f64,
}

/// A bound-constrained problem whose constraints and objective are separate,
/// individually priced blackboxes.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;

    fn lower_bounds(&self) -> &[f64];

    fn upper_bounds(&self) -> &[f64];

    fn num_constraints(&self) -> usize;

    /// Costs of `(c_1, ..., c_m, f)`.
    fn costs(&self) -> &[u64];

    /// Raw value of constraint `j` (0-based). May be non-finite.
    fn raw_constraint(&self, j: usize, x: &[f64]) -> f64;

    /// Raw objective value. May be non-finite.
    fn raw_objective(&self, x: &[f64]) -> f64;

    fn best_known(&self) -> Option<BestKnown> {
        None
    }

    fn dimension(&self) -> usize {
        self.lower_bounds().len()
    }

    /// Constraint value with crashes mapped to `+∞`.
    fn constraint(&self, j: usize, x: &[f64]) -> f64 {
        crash_to_inf(self.raw_constraint(j, x))
    }

    /// Objective value with crashes mapped to `+∞`.
    fn objective(&self, x: &[f64]) -> f64 {
        crash_to_inf(self.raw_objective(x))
    }

    fn call(&self, fid: FunctionId, x: &[f64]) -> f64 {
        match fid {
            FunctionId::Constraint(j) => self.constraint(j, x),
            FunctionId::Objective => self.objective(x),
        }
    }

    fn cost_of(&self, fid: FunctionId) -> Result<u64> {
        let m = self.num_constraints();
        match fid {
            FunctionId::Constraint(j) if j < m => Ok(self.costs()[j]),
            FunctionId::Objective => Ok(self.costs()[m]),
            other => Err(Error::UnknownFunction(other.to_string())),
        }
    }

    /// Whether `x` lies in the bound box.
    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(self.lower_bounds().iter().zip(self.upper_bounds()))
                .all(|(&v, (&lo, &hi))| v.is_finite() && lo <= v && v <= hi)
    }
}

/// Checks the structural invariants every problem must satisfy.
pub fn validate(problem: &dyn Problem) -> Result<()> {
    let lower = problem.lower_bounds();
    let upper = problem.upper_bounds();
    if lower.is_empty() {
        return Err(Error::InvalidProblem("dimension must be positive".into()));
    }
    if lower.len() != upper.len() {
        return Err(Error::InvalidProblem(format!(
            "{} lower bounds but {} upper bounds",
            lower.len(),
            upper.len()
        )));
    }
    for (i, (lo, hi)) in lower.iter().zip(upper).enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidProblem(format!(
                "bounds of x{} must satisfy lower < upper, got [{lo}, {hi}]",
                i + 1
            )));
        }
    }
    if problem.num_constraints() == 0 {
        return Err(Error::InvalidProblem("at least one constraint is required".into()));
    }
    let costs = problem.costs();
    if costs.len() != problem.num_constraints() + 1 {
        return Err(Error::InvalidProblem(format!(
            "expected {} costs, got {}",
            problem.num_constraints() + 1,
            costs.len()
        )));
    }
    if costs.contains(&0) {
        return Err(Error::InvalidProblem("costs must be strictly positive".into()));
    }
    if let Some(best) = problem.best_known() {
        if best.point.len() != lower.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: best.point.len() });
        }
    }
    Ok(())
}

pub type Function = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A problem assembled from closures.
pub struct ProblemSpec {
    name: String,
    lower: Vec<f64>,
    upper: Vec<f64>,
    costs: Vec<u64>,
    constraints: Vec<Function>,
    objective: Function,
    best_known: Option<BestKnown>,
}

impl ProblemSpec {
    pub fn new(
        name: impl Into<String>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        costs: Vec<u64>,
        constraints: Vec<Function>,
        objective: Function,
    ) -> Result<Self> {
        let spec = ProblemSpec {
            name: name.into(),
            lower,
            upper,
            costs,
            constraints,
            objective,
            best_known: None,
        };
        validate(&spec)?;
        Ok(spec)
    }

    pub fn with_best_known(mut self, best: BestKnown) -> Result<Self> {
        self.best_known = Some(best);
        validate(&self)?;
        Ok(self)
    }
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("costs", &self.costs)
            .field("num_constraints", &self.constraints.len())
            .finish()
    }
}

impl Problem for ProblemSpec {
    fn name(&self) -> &str {
        &self.name
    }

    fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    fn upper_bounds(&self) -> &[f64] {
        &self.upper
    }

    fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    fn costs(&self) -> &[u64] {
        &self.costs
    }

    fn raw_constraint(&self, j: usize, x: &[f64]) -> f64 {
        (self.constraints[j])(x)
    }

    fn raw_objective(&self, x: &[f64]) -> f64 {
        (self.objective)(x)
    }

    fn best_known(&self) -> Option<BestKnown> {
        self.best_known.clone()
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_PROBLEMS: &[&str] = &["tcsd"];

/// Looks up a built-in problem by name.
pub fn builtin(name: &str) -> Result<Box<dyn Problem>> {
    match name.to_ascii_lowercase().as_str() {
        "tcsd" => Ok(Box::new(Tcsd)),
        _ => Err(Error::UnknownProblem(name.to_string())),
    }
}
