//! Sequential, interruptible and cost-metered evaluation of trial points.
//!
//! An [`Evaluator`] owns the cost ledger and the evaluation cache of a single
//! solver run. Constraints are called one at a time in a fixed [`EvalOrder`];
//! after every call the active [`InterruptionPolicy`] decides whether the rest
//! of the sequence is worth paying for. A crashed call (`+∞`) always ends the
//! sequence.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{FunctionId, Problem};
use crate::trace::Phase;

/// `Σ max(c_j, 0)²` over the given values, in the given order.
///
/// Any `+∞` makes the sum `+∞`.
pub fn partial_sum(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, &c| {
        let p = if c > 0.0 { c } else { 0.0 };
        acc + p * p
    })
}

/// Constraint violation `h`: the partial sum over all constraints inside the
/// domain, `+∞` outside of it.
pub fn violation(all_values: &[f64], in_domain: bool) -> f64 {
    if in_domain {
        partial_sum(all_values)
    } else {
        f64::INFINITY
    }
}

/// Order in which the constraints are evaluated (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct EvalOrder(Vec<usize>);

impl EvalOrder {
    pub fn new(permutation: Vec<usize>) -> Result<Self> {
        let m = permutation.len();
        if m == 0 {
            return Err(Error::InvalidOrder("empty order".into()));
        }
        let mut seen = alloc::vec![false; m];
        for &j in &permutation {
            if j >= m || seen[j] {
                return Err(Error::InvalidOrder(format!("{permutation:?} is not a permutation of 0..{m}")));
            }
            seen[j] = true;
        }
        Ok(EvalOrder(permutation))
    }

    /// Builds an order from 1-based constraint numbers, e.g. `[3, 1, 2, 4]`.
    pub fn from_one_based(numbers: &[usize]) -> Result<Self> {
        if numbers.contains(&0) {
            return Err(Error::InvalidOrder("constraint numbers start at 1".into()));
        }
        Self::new(numbers.iter().map(|j| j - 1).collect())
    }

    pub fn identity(m: usize) -> Self {
        EvalOrder((0..m).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based constraint numbers, as printed in reports.
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|j| j + 1).collect()
    }
}

impl TryFrom<Vec<usize>> for EvalOrder {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        EvalOrder::new(v)
    }
}

impl From<EvalOrder> for Vec<usize> {
    fn from(o: EvalOrder) -> Self {
        o.0
    }
}

/// When to stop evaluating the constraint sequence of a trial point.
///
/// Every policy stops on a crashed call; `None` and `CrashOnly` differ only in
/// name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InterruptionPolicy {
    None,
    CrashOnly,
    /// Stop at the first violated constraint.
    ExtremeBarrier,
    /// Stop once the running violation sum reaches the incumbent's `h`.
    PartialSum {
        #[serde(with = "crate::extreal")]
        h_incumbent: f64,
    },
    /// Evaluate only the first `j` constraints of the order, stopping at the
    /// first violation among the first `j - 1`. `j = m + 1` evaluates all of
    /// them under the extreme barrier.
    PrefixFeasibility { j: usize },
}

impl InterruptionPolicy {
    pub fn validate(&self, num_constraints: usize) -> Result<()> {
        match *self {
            InterruptionPolicy::PartialSum { h_incumbent } if h_incumbent.is_nan() || h_incumbent < 0.0 => {
                Err(Error::InvalidConfig(format!("h_incumbent must be nonnegative, got {h_incumbent}")))
            }
            InterruptionPolicy::PrefixFeasibility { j } if j == 0 || j > num_constraints + 1 => Err(
                Error::InvalidConfig(format!("prefix index {j} outside 1..={}", num_constraints + 1)),
            ),
            _ => Ok(()),
        }
    }

    /// Number of constraints in the evaluated sequence.
    fn scope(&self, m: usize) -> usize {
        match *self {
            InterruptionPolicy::PrefixFeasibility { j } => j.min(m),
            _ => m,
        }
    }

    /// Whether the value at 0-based `position`, with running sum `sum`,
    /// rejects the point.
    fn interrupts(&self, position: usize, value: f64, sum: f64) -> bool {
        match *self {
            InterruptionPolicy::None | InterruptionPolicy::CrashOnly => false,
            InterruptionPolicy::ExtremeBarrier => value > 0.0,
            InterruptionPolicy::PartialSum { h_incumbent } => sum > 0.0 && sum >= h_incumbent,
            InterruptionPolicy::PrefixFeasibility { j } => position + 1 < j && value > 0.0,
        }
    }
}

/// Result of evaluating one trial point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutcome {
    /// `(constraint index, value)` for the evaluated prefix, in evaluation order.
    pub values: Vec<(usize, f64)>,
    /// 1-based position in the order of the constraint that triggered the policy.
    pub interrupted_at: Option<usize>,
    /// A constraint call returned `+∞`.
    pub crashed: bool,
    pub outside_domain: bool,
    pub objective: Option<f64>,
    /// Cost charged by this request (cache hits are free).
    pub incurred_cost: u64,
    /// Violation `h`, present once all constraints are known, or `+∞` after a
    /// crash or outside the domain.
    pub h: Option<f64>,
    pub budget_exhausted: bool,
}

impl EvalOutcome {
    fn empty() -> Self {
        EvalOutcome {
            values: Vec::new(),
            interrupted_at: None,
            crashed: false,
            outside_domain: false,
            objective: None,
            incurred_cost: 0,
            h: None,
            budget_exhausted: false,
        }
    }

    /// Value of constraint `j` (0-based) if it was evaluated.
    pub fn constraint(&self, j: usize) -> Option<f64> {
        self.values.iter().find(|(k, _)| *k == j).map(|&(_, v)| v)
    }

    pub fn is_feasible(&self) -> bool {
        self.h == Some(0.0)
    }

    /// `f_Ω`: the objective on feasible points, `+∞` elsewhere.
    pub fn barrier_objective(&self) -> f64 {
        match (self.h, self.objective) {
            (Some(0.0), Some(f)) => f,
            _ => f64::INFINITY,
        }
    }
}

/// Consumed evaluation cost against a budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    consumed: u64,
    budget: u64,
    costs: Vec<u64>,
    per_function_calls: Vec<u64>,
}

impl CostLedger {
    /// `costs` are those of `(c_1, ..., c_m, f)`.
    pub fn new(costs: &[u64], budget: u64) -> Self {
        CostLedger {
            consumed: 0,
            budget,
            costs: costs.to_vec(),
            per_function_calls: alloc::vec![0; costs.len()],
        }
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn remaining(&self) -> u64 {
        self.budget - self.consumed
    }

    /// Calls per function, `(c_1, ..., c_m, f)`.
    pub fn per_function_calls(&self) -> &[u64] {
        &self.per_function_calls
    }

    fn slot(&self, fid: FunctionId) -> usize {
        fid.slot(self.costs.len() - 1)
    }

    pub fn can_afford(&self, fid: FunctionId) -> bool {
        self.consumed + self.costs[self.slot(fid)] <= self.budget
    }

    /// Charges one call of `fid`. Refuses, leaving the ledger untouched, when
    /// the call would overshoot the budget.
    pub fn try_charge(&mut self, fid: FunctionId) -> bool {
        if !self.can_afford(fid) {
            return false;
        }
        let slot = self.slot(fid);
        self.consumed += self.costs[slot];
        self.per_function_calls[slot] += 1;
        true
    }
}

/// What is known about a point after one or more requests.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheEntry {
    /// Indexed by constraint.
    pub constraints: Vec<Option<f64>>,
    pub objective: Option<f64>,
}

/// One blackbox call, for the optional evaluation log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallRecord {
    pub phase: Phase,
    pub point: Vec<f64>,
    pub fid: FunctionId,
    #[serde(with = "crate::extreal")]
    pub value: f64,
    pub cumulative_cost: u64,
}

/// One evaluation request, for replaying interruption decisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub phase: Phase,
    pub point: Vec<f64>,
    pub policy: InterruptionPolicy,
    pub interrupted_at: Option<usize>,
    pub crashed: bool,
    #[serde(with = "crate::extreal::option")]
    pub h: Option<f64>,
    pub cumulative_cost: u64,
}

fn cache_key(x: &[f64]) -> Vec<u64> {
    x.iter().map(|v| v.to_bits()).collect()
}

/// Evaluation state of one solver run: ledger, cache and logs.
pub struct Evaluator<'p> {
    problem: &'p dyn Problem,
    order: EvalOrder,
    ledger: CostLedger,
    cache: BTreeMap<Vec<u64>, CacheEntry>,
    phase: Phase,
    exhausted: bool,
    first_feasible_cost: Option<u64>,
    logging: bool,
    calls: Vec<CallRecord>,
    trials: Vec<TrialRecord>,
}

impl<'p> Evaluator<'p> {
    pub fn new(problem: &'p dyn Problem, order: EvalOrder, budget: u64) -> Result<Self> {
        if order.len() != problem.num_constraints() {
            return Err(Error::InvalidOrder(format!(
                "order has {} entries, problem has {} constraints",
                order.len(),
                problem.num_constraints()
            )));
        }
        if budget == 0 {
            return Err(Error::InvalidConfig("budget must be positive".into()));
        }
        Ok(Evaluator {
            problem,
            order,
            ledger: CostLedger::new(problem.costs(), budget),
            cache: BTreeMap::new(),
            phase: Phase::Feasibility,
            exhausted: false,
            first_feasible_cost: None,
            logging: false,
            calls: Vec::new(),
            trials: Vec::new(),
        })
    }

    /// Records every call and every request.
    pub fn with_logging(mut self, enabled: bool) -> Self {
        self.logging = enabled;
        self
    }

    pub fn problem(&self) -> &'p dyn Problem {
        self.problem
    }

    pub fn order(&self) -> &EvalOrder {
        &self.order
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// Cumulative cost when the first point with `h = 0` finished evaluating.
    pub fn first_feasible_cost(&self) -> Option<u64> {
        self.first_feasible_cost
    }

    pub fn calls(&self) -> &[CallRecord] {
        &self.calls
    }

    pub fn trials(&self) -> &[TrialRecord] {
        &self.trials
    }

    pub fn take_logs(&mut self) -> (Vec<CallRecord>, Vec<TrialRecord>) {
        (core::mem::take(&mut self.calls), core::mem::take(&mut self.trials))
    }

    pub fn cached_lookup(&self, x: &[f64]) -> Option<&CacheEntry> {
        self.cache.get(&cache_key(x))
    }

    /// Returns the cached value of `fid` at `x`, or calls and charges it.
    /// `None` means the budget refused the call.
    fn value_of(&mut self, key: &[u64], x: &[f64], fid: FunctionId, incurred: &mut u64) -> Option<f64> {
        let m = self.problem.num_constraints();
        let entry = self.cache.entry(key.to_vec()).or_insert_with(|| CacheEntry {
            constraints: alloc::vec![None; m],
            objective: None,
        });
        let slot = match fid {
            FunctionId::Constraint(j) => &mut entry.constraints[j],
            FunctionId::Objective => &mut entry.objective,
        };
        if let Some(v) = *slot {
            return Some(v);
        }
        if !self.ledger.try_charge(fid) {
            return None;
        }
        let value = self.problem.call(fid, x);
        *slot = Some(value);
        *incurred += self.problem.costs()[fid.slot(m)];
        if self.logging {
            self.calls.push(CallRecord {
                phase: self.phase,
                point: x.to_vec(),
                fid,
                value,
                cumulative_cost: self.ledger.consumed(),
            });
        }
        Some(value)
    }

    /// Evaluates `x` sequentially under `policy`.
    ///
    /// The budget is checked before each individual call; a call that would
    /// overshoot is not made, the outcome is flagged `budget_exhausted` and
    /// every later request is refused as well.
    pub fn evaluate(&mut self, x: &[f64], policy: InterruptionPolicy, include_objective: bool) -> EvalOutcome {
        let mut out = EvalOutcome::empty();
        if self.exhausted {
            out.budget_exhausted = true;
            return out;
        }
        if !self.problem.contains(x) {
            out.outside_domain = true;
            out.h = Some(f64::INFINITY);
            self.log_trial(x, policy, &out);
            return out;
        }
        debug_assert!(policy.validate(self.problem.num_constraints()).is_ok());

        let key = cache_key(x);
        let m = self.problem.num_constraints();
        let scope = policy.scope(m);
        let mut sum = 0.0;
        let mut incurred = 0;
        for position in 0..scope {
            let j = self.order.as_slice()[position];
            let Some(value) = self.value_of(&key, x, FunctionId::Constraint(j), &mut incurred) else {
                self.exhausted = true;
                out.budget_exhausted = true;
                break;
            };
            out.values.push((j, value));
            sum += partial_sum(&[value]);
            if value == f64::INFINITY {
                out.crashed = true;
                out.h = Some(f64::INFINITY);
                break;
            }
            if policy.interrupts(position, value, sum) {
                out.interrupted_at = Some(position + 1);
                break;
            }
        }

        let complete = out.values.len() == m && !out.crashed && !out.budget_exhausted;
        if complete {
            out.h = Some(sum);
            // feasibility is known once the last constraint returns
            if sum == 0.0 && self.first_feasible_cost.is_none() {
                self.first_feasible_cost = Some(self.ledger.consumed());
            }
        }
        if complete && out.interrupted_at.is_none() && include_objective {
            match self.value_of(&key, x, FunctionId::Objective, &mut incurred) {
                Some(f) => out.objective = Some(f),
                None => {
                    self.exhausted = true;
                    out.budget_exhausted = true;
                }
            }
        }
        out.incurred_cost = incurred;

        self.log_trial(x, policy, &out);
        out
    }

    fn log_trial(&mut self, x: &[f64], policy: InterruptionPolicy, out: &EvalOutcome) {
        if self.logging {
            self.trials.push(TrialRecord {
                phase: self.phase,
                point: x.to_vec(),
                policy,
                interrupted_at: out.interrupted_at,
                crashed: out.crashed,
                h: out.h,
                cumulative_cost: self.ledger.consumed(),
            });
        }
    }
}
