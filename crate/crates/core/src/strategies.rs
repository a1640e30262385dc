//! The four constraint-handling procedures, written as acceptors and phase
//! schedules over [`run_mads`]:
//!
//! - **EB**: two-phase extreme barrier. Phase 1 minimizes `h` until a feasible
//!   point appears, phase 2 minimizes `f_Ω`. Every trial point is evaluated in
//!   full.
//! - **PB**: progressive barrier. One phase keeps a feasible and an infeasible
//!   incumbent and a shrinking violation threshold `h_max`.
//! - **Int**: EB with interruption. Phase 1 drops a trial point as soon as the
//!   running violation sum reaches the incumbent's `h`; phase 2 drops it at the
//!   first violated constraint.
//! - **Hier**: for each `j`, minimize the `j`-th constraint of the order subject
//!   to the earlier ones, chaining the solutions, then run Int's phase 2.
//!
//! All of them share one cost ledger over the whole run.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{partial_sum, EvalOrder, EvalOutcome, Evaluator, InterruptionPolicy};
use crate::mads::{rng_from_seed, run_mads, Acceptor, Candidate, Decision, MadsRun, SolverConfig, SolverRng};
use crate::problem::Problem;
use crate::trace::{ImprovementEvent, Phase, PhaseOutcome, PhaseResult, RunTrace, Termination};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcedureId {
    Eb,
    Pb,
    Int,
    Hier,
}

impl ProcedureId {
    pub const ALL: [ProcedureId; 4] = [ProcedureId::Eb, ProcedureId::Pb, ProcedureId::Int, ProcedureId::Hier];

    pub fn as_str(self) -> &'static str {
        match self {
            ProcedureId::Eb => "eb",
            ProcedureId::Pb => "pb",
            ProcedureId::Int => "int",
            ProcedureId::Hier => "hier",
        }
    }
}

impl fmt::Display for ProcedureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProcedureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProcedureId::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownProcedure(s.to_string()))
    }
}

/// Phase 1 of EB and Int: minimize `h`, stop at the first feasible point.
#[derive(Debug, Clone)]
pub struct ViolationMinimizer {
    interruptible: bool,
    incumbent: Option<(Candidate, f64)>,
}

impl ViolationMinimizer {
    pub fn new(interruptible: bool) -> Self {
        ViolationMinimizer { interruptible, incumbent: None }
    }

    pub fn incumbent_h(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::INFINITY, |(_, h)| *h)
    }

    pub fn feasible_point(&self) -> Option<&Candidate> {
        self.incumbent.as_ref().filter(|(_, h)| *h == 0.0).map(|(c, _)| c)
    }
}

impl Acceptor for ViolationMinimizer {
    fn policy(&self) -> InterruptionPolicy {
        if self.interruptible {
            InterruptionPolicy::PartialSum { h_incumbent: self.incumbent_h() }
        } else {
            InterruptionPolicy::CrashOnly
        }
    }

    /// EB asks the blackbox for every output, the objective included.
    fn include_objective(&self) -> bool {
        !self.interruptible
    }

    fn initialize(&mut self, start: &Candidate, outcome: &EvalOutcome) {
        self.incumbent = Some((start.clone(), outcome.h.unwrap_or(f64::INFINITY)));
    }

    fn consider(&mut self, trial: &Candidate, outcome: &EvalOutcome) -> Decision {
        match outcome.h {
            Some(h) if outcome.interrupted_at.is_none() && h < self.incumbent_h() => {
                self.incumbent = Some((trial.clone(), h));
                Decision::Improvement
            }
            _ => Decision::Rejection,
        }
    }

    fn poll_center(&self) -> &Candidate {
        &self.incumbent.as_ref().expect("initialized").0
    }

    fn is_done(&self) -> bool {
        self.incumbent_h() == 0.0
    }
}

/// Optimization phase of EB, Int and Hier: minimize `f_Ω`.
#[derive(Debug, Clone)]
pub struct BarrierMinimizer {
    interruptible: bool,
    incumbent: Option<(Candidate, f64)>,
}

impl BarrierMinimizer {
    pub fn new(interruptible: bool) -> Self {
        BarrierMinimizer { interruptible, incumbent: None }
    }

    pub fn incumbent_f(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::INFINITY, |(_, f)| *f)
    }
}

impl Acceptor for BarrierMinimizer {
    fn policy(&self) -> InterruptionPolicy {
        if self.interruptible {
            InterruptionPolicy::ExtremeBarrier
        } else {
            InterruptionPolicy::CrashOnly
        }
    }

    fn include_objective(&self) -> bool {
        true
    }

    fn initialize(&mut self, start: &Candidate, outcome: &EvalOutcome) {
        self.incumbent = Some((start.clone(), outcome.barrier_objective()));
    }

    fn consider(&mut self, trial: &Candidate, outcome: &EvalOutcome) -> Decision {
        let f = outcome.barrier_objective();
        if f < self.incumbent_f() {
            self.incumbent = Some((trial.clone(), f));
            Decision::Improvement
        } else {
            Decision::Rejection
        }
    }

    fn poll_center(&self) -> &Candidate {
        &self.incumbent.as_ref().expect("initialized").0
    }
}

/// Hierarchical subproblem: minimize the constraint at 1-based position `j`
/// of the order subject to the constraints before it, and stop as soon as it
/// is satisfied.
#[derive(Debug, Clone)]
pub struct SubproblemMinimizer {
    j: usize,
    constraint: usize,
    incumbent: Option<(Candidate, f64)>,
}

impl SubproblemMinimizer {
    pub fn new(j: usize, order: &EvalOrder) -> Self {
        SubproblemMinimizer { j, constraint: order.as_slice()[j - 1], incumbent: None }
    }

    pub fn incumbent_value(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::INFINITY, |(_, v)| *v)
    }

    fn value(&self, outcome: &EvalOutcome) -> f64 {
        if outcome.interrupted_at.is_some() || outcome.crashed || outcome.outside_domain {
            return f64::INFINITY;
        }
        outcome.constraint(self.constraint).unwrap_or(f64::INFINITY)
    }

    pub fn solution(&self) -> Option<&Candidate> {
        self.incumbent.as_ref().filter(|(_, v)| *v <= 0.0).map(|(c, _)| c)
    }
}

impl Acceptor for SubproblemMinimizer {
    fn policy(&self) -> InterruptionPolicy {
        InterruptionPolicy::PrefixFeasibility { j: self.j }
    }

    fn include_objective(&self) -> bool {
        false
    }

    fn initialize(&mut self, start: &Candidate, outcome: &EvalOutcome) {
        self.incumbent = Some((start.clone(), self.value(outcome)));
    }

    fn consider(&mut self, trial: &Candidate, outcome: &EvalOutcome) -> Decision {
        let v = self.value(outcome);
        if v < self.incumbent_value() {
            self.incumbent = Some((trial.clone(), v));
            Decision::Improvement
        } else {
            Decision::Rejection
        }
    }

    fn poll_center(&self) -> &Candidate {
        &self.incumbent.as_ref().expect("initialized").0
    }

    fn is_done(&self) -> bool {
        self.incumbent_value() <= 0.0
    }
}

/// An evaluated infeasible point kept by the progressive barrier.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPoint {
    pub candidate: Candidate,
    pub h: f64,
    pub f: f64,
}

fn dominates(h_a: f64, f_a: f64, h_b: f64, f_b: f64) -> bool {
    (h_a < h_b && f_a <= f_b) || (h_a <= h_b && f_a < f_b)
}

/// State of the progressive barrier.
#[derive(Debug, Clone)]
pub struct PbState {
    pub h_max: f64,
    pub feasible: Option<(Candidate, f64)>,
    /// Non-dominated infeasible points with `h <= h_max`.
    pub filter: Vec<FilterPoint>,
    /// Index into `filter`.
    pub infeasible: Option<usize>,
    /// `h_max` after every iteration.
    pub h_max_history: Vec<f64>,
}

impl Default for PbState {
    fn default() -> Self {
        PbState { h_max: f64::INFINITY, feasible: None, filter: Vec::new(), infeasible: None, h_max_history: Vec::new() }
    }
}

impl PbState {
    pub fn infeasible_incumbent(&self) -> Option<&FilterPoint> {
        self.infeasible.map(|i| &self.filter[i])
    }

    /// Adds `p` unless a kept point dominates it, dropping the points it
    /// dominates.
    fn insert(&mut self, p: FilterPoint) {
        if self.filter.iter().any(|q| q.candidate.point == p.candidate.point || dominates(q.h, q.f, p.h, p.f)) {
            return;
        }
        self.filter.retain(|q| !dominates(p.h, p.f, q.h, q.f));
        self.filter.push(p);
        self.select_infeasible();
    }

    /// The infeasible incumbent minimizes `f` among kept points with
    /// `h <= h_max`, ties broken by smaller `h` then by the point.
    fn select_infeasible(&mut self) {
        self.filter.retain(|q| q.h <= self.h_max);
        self.infeasible = self
            .filter
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.f.total_cmp(&b.f)
                    .then(a.h.total_cmp(&b.h))
                    .then_with(|| lexicographic(&a.candidate.point, &b.candidate.point))
            })
            .map(|(i, _)| i);
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(core::cmp::Ordering::Equal)
}

/// Threshold update after an iteration.
///
/// After a dominating iteration `h_max` drops to the infeasible incumbent's
/// `h`. Otherwise it drops to the largest `h` among this iteration's
/// infeasible trial points that beat the incumbent's `h`, if any. It never
/// increases.
pub fn pb_update_hmax(state: &mut PbState, dominating: bool, iteration_hs: &[f64]) {
    let candidate = match state.infeasible_incumbent() {
        None => None,
        Some(inc) if dominating => Some(inc.h),
        Some(inc) => iteration_hs
            .iter()
            .copied()
            .filter(|&h| h > 0.0 && h < inc.h)
            .max_by(f64::total_cmp),
    };
    if let Some(h) = candidate {
        if h < state.h_max {
            state.h_max = h;
        }
    }
    state.select_infeasible();
    state.h_max_history.push(state.h_max);
}

/// Progressive barrier acceptor. One frame center per iteration: the feasible
/// incumbent when there is one, the infeasible incumbent otherwise.
#[derive(Debug, Clone)]
pub struct ProgressiveBarrier {
    pub state: PbState,
    start: Option<Candidate>,
    iteration_hs: Vec<f64>,
    dominating: bool,
}

impl ProgressiveBarrier {
    pub fn new() -> Self {
        ProgressiveBarrier { state: PbState::default(), start: None, iteration_hs: Vec::new(), dominating: false }
    }

    /// Classifies an evaluated point. Returns whether it dominates the
    /// incumbent it is compared with or lowers the infeasible incumbent's `h`.
    fn absorb(&mut self, candidate: &Candidate, outcome: &EvalOutcome) -> bool {
        let Some(h) = outcome.h else { return false };
        let f = outcome.objective.unwrap_or(f64::INFINITY);
        if !h.is_finite() || !f.is_finite() {
            return false;
        }
        if h == 0.0 {
            let better = self.state.feasible.as_ref().is_none_or(|(_, best)| f < *best);
            if better {
                self.state.feasible = Some((candidate.clone(), f));
            }
            return better;
        }
        self.iteration_hs.push(h);
        if h > self.state.h_max {
            return false;
        }
        let previous = self.state.infeasible_incumbent().map(|p| (p.h, p.f));
        self.state.insert(FilterPoint { candidate: candidate.clone(), h, f });
        match previous {
            Some((h_inc, f_inc)) => {
                let dominating = dominates(h, f, h_inc, f_inc);
                self.dominating |= dominating;
                // a smaller h is progress even when f got worse
                dominating || h < h_inc
            }
            // first infeasible incumbent: only a success when it is the frame center
            None => self.state.feasible.is_none(),
        }
    }
}

impl Default for ProgressiveBarrier {
    fn default() -> Self {
        Self::new()
    }
}

impl Acceptor for ProgressiveBarrier {
    fn policy(&self) -> InterruptionPolicy {
        InterruptionPolicy::CrashOnly
    }

    fn include_objective(&self) -> bool {
        true
    }

    fn initialize(&mut self, start: &Candidate, outcome: &EvalOutcome) {
        self.start = Some(start.clone());
        self.absorb(start, outcome);
        self.iteration_hs.clear();
    }

    fn consider(&mut self, trial: &Candidate, outcome: &EvalOutcome) -> Decision {
        if self.absorb(trial, outcome) {
            Decision::Improvement
        } else {
            Decision::Rejection
        }
    }

    fn end_iteration(&mut self, _success: bool) {
        let hs = core::mem::take(&mut self.iteration_hs);
        let dominating = core::mem::take(&mut self.dominating);
        pb_update_hmax(&mut self.state, dominating, &hs);
    }

    fn poll_center(&self) -> &Candidate {
        if let Some((c, _)) = &self.state.feasible {
            return c;
        }
        if let Some(p) = self.state.infeasible_incumbent() {
            return &p.candidate;
        }
        self.start.as_ref().expect("initialized")
    }
}

/// Bookkeeping shared by the procedure drivers.
struct RunBuilder<'p> {
    procedure: ProcedureId,
    config: SolverConfig,
    start: Vec<f64>,
    evaluator: Evaluator<'p>,
    rng: SolverRng,
    phases: Vec<PhaseResult>,
    events: Vec<ImprovementEvent>,
}

impl<'p> RunBuilder<'p> {
    fn new(
        procedure: ProcedureId,
        problem: &'p dyn Problem,
        x0: &[f64],
        order: &EvalOrder,
        config: &SolverConfig,
    ) -> Result<Self> {
        config.validate()?;
        if x0.len() != problem.dimension() {
            return Err(Error::DimensionMismatch { expected: problem.dimension(), got: x0.len() });
        }
        if !problem.contains(x0) {
            return Err(Error::StartOutsideBounds);
        }
        let evaluator = Evaluator::new(problem, order.clone(), config.budget)?.with_logging(config.log_evaluations);
        Ok(RunBuilder {
            procedure,
            config: config.clone(),
            start: x0.to_vec(),
            evaluator,
            rng: rng_from_seed(config.seed),
            phases: Vec::new(),
            events: Vec::new(),
        })
    }

    fn phase<A: Acceptor>(
        &mut self,
        kind: Phase,
        start: &[f64],
        acceptor: &mut A,
        solution: impl FnOnce(&A) -> Option<Vec<f64>>,
    ) -> Result<Option<Vec<f64>>> {
        self.evaluator.set_phase(kind);
        let start_cost = self.evaluator.ledger().consumed();
        let MadsRun { termination, iterations, events, .. } =
            run_mads(start, acceptor, &self.config, &mut self.evaluator, &mut self.rng)?;
        self.events.extend(events);
        let found = solution(acceptor);
        let outcome = match (&found, termination) {
            (Some(x), _) => PhaseOutcome::FeasiblePointFound(x.clone()),
            (None, Termination::BudgetExhausted) => PhaseOutcome::BudgetExhausted,
            (None, _) => PhaseOutcome::InfeasibleDeclared,
        };
        self.phases.push(PhaseResult {
            kind,
            outcome,
            termination,
            iterations,
            start_cost,
            end_cost: self.evaluator.ledger().consumed(),
        });
        Ok(found)
    }

    /// `(h, f)` of `x` as far as the cache knows them.
    fn known_values(&self, x: &[f64]) -> (Option<f64>, Option<f64>) {
        let Some(entry) = self.evaluator.cached_lookup(x) else { return (None, None) };
        let ordered: Option<Vec<f64>> =
            self.evaluator.order().as_slice().iter().map(|&j| entry.constraints[j]).collect();
        let crashed = entry.constraints.contains(&Some(f64::INFINITY));
        let h = match ordered {
            Some(values) => Some(partial_sum(&values)),
            None if crashed => Some(f64::INFINITY),
            None => None,
        };
        (h, entry.objective)
    }

    fn finish(mut self, final_point: Vec<f64>) -> RunTrace {
        let (final_h, final_f) = self.known_values(&final_point);
        let problem = self.evaluator.problem();
        let (calls, trials) = self.evaluator.take_logs();
        RunTrace {
            problem: String::from(problem.name()),
            procedure: String::from(self.procedure.as_str()),
            seed: self.config.seed,
            budget: self.config.budget,
            order: self.evaluator.order().one_based(),
            start: self.start,
            phases: self.phases,
            events: self.events,
            final_point,
            final_h,
            final_f,
            per_function_calls: self.evaluator.ledger().per_function_calls().to_vec(),
            consumed: self.evaluator.ledger().consumed(),
            first_feasible_cost: self.evaluator.first_feasible_cost(),
            trials,
            calls,
        }
    }
}

fn two_phase_barrier(
    procedure: ProcedureId,
    interruptible: bool,
    problem: &dyn Problem,
    x0: &[f64],
    order: &EvalOrder,
    config: &SolverConfig,
) -> Result<RunTrace> {
    let mut run = RunBuilder::new(procedure, problem, x0, order, config)?;
    let mut feasibility = ViolationMinimizer::new(interruptible);
    let found = run.phase(Phase::Feasibility, x0, &mut feasibility, |a| a.feasible_point().map(|c| c.point.clone()))?;
    let Some(x_bar) = found else {
        let last = feasibility.poll_center().point.clone();
        return Ok(run.finish(last));
    };
    let x_final = optimization_phase(&mut run, interruptible, &x_bar)?;
    Ok(run.finish(x_final))
}

fn optimization_phase(run: &mut RunBuilder<'_>, interruptible: bool, start: &[f64]) -> Result<Vec<f64>> {
    let mut optimizer = BarrierMinimizer::new(interruptible);
    run.phase(Phase::Optimization, start, &mut optimizer, |a| Some(a.poll_center().point.clone()))?;
    Ok(optimizer.poll_center().point.clone())
}

/// Two-phase extreme barrier with full evaluation of every trial point.
pub fn run_eb(problem: &dyn Problem, x0: &[f64], order: &EvalOrder, config: &SolverConfig) -> Result<RunTrace> {
    two_phase_barrier(ProcedureId::Eb, false, problem, x0, order, config)
}

/// Two-phase interruptible extreme barrier.
pub fn run_int(problem: &dyn Problem, x0: &[f64], order: &EvalOrder, config: &SolverConfig) -> Result<RunTrace> {
    two_phase_barrier(ProcedureId::Int, true, problem, x0, order, config)
}

/// Progressive barrier, single phase, full evaluation of every trial point.
pub fn run_pb(problem: &dyn Problem, x0: &[f64], order: &EvalOrder, config: &SolverConfig) -> Result<RunTrace> {
    let mut run = RunBuilder::new(ProcedureId::Pb, problem, x0, order, config)?;
    let mut pb = ProgressiveBarrier::new();
    run.phase(Phase::Optimization, x0, &mut pb, |a| a.state.feasible.as_ref().map(|(c, _)| c.point.clone()))?;
    let final_point = pb.poll_center().point.clone();
    Ok(run.finish(final_point))
}

/// Hierarchical satisfiability followed by the interruptible optimization
/// phase.
pub fn run_hier(problem: &dyn Problem, x0: &[f64], order: &EvalOrder, config: &SolverConfig) -> Result<RunTrace> {
    let mut run = RunBuilder::new(ProcedureId::Hier, problem, x0, order, config)?;
    let mut x = x0.to_vec();
    for j in 1..=order.len() {
        let mut sub = SubproblemMinimizer::new(j, order);
        let found = run.phase(Phase::Subproblem(j), &x, &mut sub, |a| a.solution().map(|c| c.point.clone()))?;
        match found {
            Some(next) => x = next,
            None => {
                let last = sub.poll_center().point.clone();
                return Ok(run.finish(last));
            }
        }
    }
    let x_final = optimization_phase(&mut run, true, &x)?;
    Ok(run.finish(x_final))
}

pub fn run_procedure(
    procedure: ProcedureId,
    problem: &dyn Problem,
    x0: &[f64],
    order: &EvalOrder,
    config: &SolverConfig,
) -> Result<RunTrace> {
    match procedure {
        ProcedureId::Eb => run_eb(problem, x0, order, config),
        ProcedureId::Pb => run_pb(problem, x0, order, config),
        ProcedureId::Int => run_int(problem, x0, order, config),
        ProcedureId::Hier => run_hier(problem, x0, order, config),
    }
}
