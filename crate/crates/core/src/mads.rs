//! A deterministic, poll-only mesh adaptive direct search engine.
//!
//! All mesh arithmetic happens in coordinates scaled to the unit box. Each
//! iteration polls `2n` points built from a random orthonormal (Householder)
//! basis rounded to the mesh, evaluates them opportunistically and stops at
//! the first one the [`Acceptor`] takes as an improvement. Constraint handling
//! lives entirely in the acceptor, so the four procedures share this engine.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{EvalOutcome, Evaluator, InterruptionPolicy};
use crate::problem::Problem;
use crate::trace::{ImprovementEvent, Termination};

pub type SolverRng = ChaCha8Rng;

/// Solver parameters, in unit-box coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seed: u64,
    pub budget: u64,
    pub initial_frame_size: f64,
    pub min_frame_size: f64,
    pub max_frame_size: f64,
    /// Keep per-call and per-trial logs in the trace.
    #[serde(default)]
    pub log_evaluations: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            budget: 10_000,
            initial_frame_size: 0.1,
            min_frame_size: 1e-9,
            max_frame_size: 1.0,
            log_evaluations: false,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64, budget: u64) -> Self {
        SolverConfig { seed, budget, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.min_frame_size > 0.0
            && self.min_frame_size < self.initial_frame_size
            && self.initial_frame_size <= self.max_frame_size
            && self.max_frame_size.is_finite();
        if !ok {
            return Err(Error::InvalidConfig(alloc::format!(
                "frame sizes must satisfy 0 < min < initial <= max, got {} / {} / {}",
                self.min_frame_size,
                self.initial_frame_size,
                self.max_frame_size
            )));
        }
        if self.budget == 0 {
            return Err(Error::InvalidConfig("budget must be positive".into()));
        }
        Ok(())
    }
}

/// Frame size `Δ` and mesh size `δ = min(Δ, Δ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshState {
    pub frame_size: f64,
    pub mesh_size: f64,
    pub max_frame_size: f64,
    pub successes: u64,
    pub failures: u64,
}

impl MeshState {
    pub fn new(frame_size: f64, max_frame_size: f64) -> Self {
        MeshState {
            frame_size,
            mesh_size: mesh_size_for(frame_size),
            max_frame_size,
            successes: 0,
            failures: 0,
        }
    }

    /// Success doubles `Δ` (capped), failure halves it.
    pub fn update(&mut self, success: bool) {
        if success {
            self.frame_size = (2.0 * self.frame_size).min(self.max_frame_size);
            self.successes += 1;
        } else {
            self.frame_size /= 2.0;
            self.failures += 1;
        }
        self.mesh_size = mesh_size_for(self.frame_size);
    }
}

fn mesh_size_for(frame_size: f64) -> f64 {
    frame_size.min(frame_size * frame_size)
}

/// Maps between the bound box and the unit box.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaling {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Scaling {
    pub fn new(problem: &dyn Problem) -> Self {
        Scaling { lower: problem.lower_bounds().to_vec(), upper: problem.upper_bounds().to_vec() }
    }

    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| (v - lo) / (hi - lo))
            .collect()
    }

    /// Maps back and clamps so rounding never leaves the box.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| (lo + v * (hi - lo)).clamp(lo, hi))
            .collect()
    }
}

/// A trial point in both coordinate systems.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub unit: Vec<f64>,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Improvement,
    Rejection,
}

/// Constraint handling plugged into the engine.
///
/// The acceptor owns the incumbent(s): it picks the interruption policy for the
/// next trial point, judges each evaluated trial point and says when its phase
/// is over.
pub trait Acceptor {
    fn policy(&self) -> InterruptionPolicy;

    fn include_objective(&self) -> bool;

    /// Takes the evaluated starting point as the first incumbent.
    fn initialize(&mut self, start: &Candidate, outcome: &EvalOutcome);

    fn consider(&mut self, trial: &Candidate, outcome: &EvalOutcome) -> Decision;

    /// Called after every poll, before the mesh update.
    fn end_iteration(&mut self, _success: bool) {}

    fn poll_center(&self) -> &Candidate;

    fn is_done(&self) -> bool {
        false
    }
}

/// `2n` poll steps `{δ z_1, ..., δ z_n, -δ z_1, ..., -δ z_n}` in unit-box
/// coordinates, where the `z_i` are the rows of a random Householder basis
/// rounded to integers with `‖δ z_i‖∞ ≤ Δ`.
pub fn generate_poll_directions(mesh: &MeshState, n: usize, rng: &mut SolverRng) -> Vec<Vec<f64>> {
    assert!(n >= 1, "dimension must be positive");
    let v = random_unit_vector(n, rng);
    let ratio = mesh.frame_size / mesh.mesh_size;
    let max_index = libm::floor(ratio).max(1.0);

    let mut basis: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let row: Vec<f64> =
                (0..n).map(|j| if i == j { 1.0 } else { 0.0 } - 2.0 * v[i] * v[j]).collect();
            let inf_norm = row.iter().fold(0.0f64, |a, &r| a.max(libm::fabs(r)));
            row.iter().map(|&r| libm::round(ratio * r / inf_norm).clamp(-max_index, max_index)).collect()
        })
        .collect();
    if !has_full_rank(&basis) {
        basis = (0..n)
            .map(|i| (0..n).map(|j| if i == j { max_index } else { 0.0 }).collect())
            .collect();
    }

    let delta = mesh.mesh_size;
    let positive = basis.iter().map(|z| z.iter().map(|&zi| zi * delta).collect::<Vec<_>>());
    let negative = basis.iter().map(|z| z.iter().map(|&zi| -zi * delta).collect::<Vec<_>>());
    positive.chain(negative).collect()
}

fn random_unit_vector(n: usize, rng: &mut SolverRng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        if norm2 > 1e-12 && norm2 <= 1.0 {
            let norm = libm::sqrt(norm2);
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Gaussian elimination with partial pivoting on a copy of `rows`.
pub(crate) fn has_full_rank(rows: &[Vec<f64>]) -> bool {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let scale = a.iter().flatten().fold(0.0f64, |m, &x| m.max(libm::fabs(x)));
    if scale == 0.0 {
        return false;
    }
    let tol = 1e-9 * scale;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| libm::fabs(a[i][col]).total_cmp(&libm::fabs(a[j][col])))
            .unwrap();
        if libm::fabs(a[pivot][col]) <= tol {
            return false;
        }
        a.swap(col, pivot);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= factor * a[col][c];
            }
        }
    }
    true
}

/// Rounds `u` onto the mesh anchored at `anchor`, then clamps to `[0, 1]`.
fn snap(u: &[f64], anchor: &[f64], mesh_size: f64) -> Vec<f64> {
    u.iter()
        .zip(anchor)
        .map(|(&v, &a)| (a + libm::round((v - a) / mesh_size) * mesh_size).clamp(0.0, 1.0))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PollResult {
    Success,
    Failure,
    BudgetExhausted,
}

/// Per-phase engine state shared by [`poll_step`] calls.
pub struct PollContext<'a> {
    pub scaling: &'a Scaling,
    /// Unit coordinates the mesh is anchored at.
    pub anchor: &'a [f64],
    /// Step of the last successful poll, in unit coordinates.
    pub last_success: Option<Vec<f64>>,
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = libm::sqrt(a.iter().map(|x| x * x).sum());
    let nb = libm::sqrt(b.iter().map(|x| x * x).sum());
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Evaluates poll points around the acceptor's center and stops at the first
/// improvement. Directions closest to the last successful step go first.
pub fn poll_step<A: Acceptor + ?Sized>(
    ctx: &mut PollContext<'_>,
    mesh: &MeshState,
    acceptor: &mut A,
    evaluator: &mut Evaluator<'_>,
    rng: &mut SolverRng,
    events: &mut Vec<ImprovementEvent>,
) -> PollResult {
    let center = acceptor.poll_center().unit.clone();
    let mut steps = generate_poll_directions(mesh, center.len(), rng);
    if let Some(last) = &ctx.last_success {
        steps.sort_by(|a, b| cosine(b, last).total_cmp(&cosine(a, last)));
    }
    for step in steps {
        let shifted: Vec<f64> = center.iter().zip(&step).map(|(c, s)| c + s).collect();
        let unit = snap(&shifted, ctx.anchor, mesh.mesh_size);
        if unit == center {
            continue;
        }
        let point = ctx.scaling.from_unit(&unit);
        let candidate = Candidate { unit, point };
        let outcome = evaluator.evaluate(&candidate.point, acceptor.policy(), acceptor.include_objective());
        if outcome.budget_exhausted {
            return PollResult::BudgetExhausted;
        }
        if acceptor.consider(&candidate, &outcome) == Decision::Improvement {
            events.push(event_for(evaluator, &candidate, &outcome));
            ctx.last_success = Some(candidate.unit.iter().zip(&center).map(|(u, c)| u - c).collect());
            return PollResult::Success;
        }
    }
    PollResult::Failure
}

fn event_for(evaluator: &Evaluator<'_>, candidate: &Candidate, outcome: &EvalOutcome) -> ImprovementEvent {
    ImprovementEvent {
        phase: evaluator.phase(),
        cost: evaluator.ledger().consumed(),
        point: candidate.point.clone(),
        h: outcome.h,
        f: outcome.objective,
    }
}

/// Output of one engine run.
#[derive(Debug, Clone, PartialEq)]
pub struct MadsRun {
    pub termination: Termination,
    pub iterations: usize,
    pub events: Vec<ImprovementEvent>,
    pub mesh: MeshState,
}

/// Runs the engine from `start` until the acceptor is done, the budget runs
/// out or the frame size falls below its minimum.
pub fn run_mads<A: Acceptor + ?Sized>(
    start: &[f64],
    acceptor: &mut A,
    config: &SolverConfig,
    evaluator: &mut Evaluator<'_>,
    rng: &mut SolverRng,
) -> Result<MadsRun> {
    let problem = evaluator.problem();
    if start.len() != problem.dimension() {
        return Err(Error::DimensionMismatch { expected: problem.dimension(), got: start.len() });
    }
    if !problem.contains(start) {
        return Err(Error::StartOutsideBounds);
    }
    config.validate()?;

    let scaling = Scaling::new(problem);
    let anchor = scaling.to_unit(start);
    let mut ctx = PollContext { scaling: &scaling, anchor: &anchor, last_success: None };
    let start = Candidate { unit: anchor.clone(), point: start.to_vec() };

    let mut mesh = MeshState::new(config.initial_frame_size, config.max_frame_size);
    let mut events = Vec::new();
    let outcome = evaluator.evaluate(&start.point, acceptor.policy(), acceptor.include_objective());
    acceptor.initialize(&start, &outcome);
    events.push(event_for(evaluator, &start, &outcome));
    let finish = |termination, iterations, events, mesh| Ok(MadsRun { termination, iterations, events, mesh });
    if outcome.budget_exhausted {
        return finish(Termination::BudgetExhausted, 0, events, mesh);
    }

    let mut iterations = 0;
    loop {
        if acceptor.is_done() {
            return finish(Termination::GoalReached, iterations, events, mesh);
        }
        if mesh.frame_size < config.min_frame_size {
            return finish(Termination::MeshConverged, iterations, events, mesh);
        }
        let result = poll_step(&mut ctx, &mesh, acceptor, evaluator, rng, &mut events);
        if result == PollResult::BudgetExhausted {
            return finish(Termination::BudgetExhausted, iterations, events, mesh);
        }
        let success = result == PollResult::Success;
        acceptor.end_iteration(success);
        mesh.update(success);
        iterations += 1;
    }
}

/// Convenience for tests and callers that only need a fresh generator.
pub fn rng_from_seed(seed: u64) -> SolverRng {
    use rand::SeedableRng;
    SolverRng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::EvalOrder;
    use crate::problem::{Function, ProblemSpec};
    use alloc::boxed::Box;
    use alloc::vec;

    /// Minimizes the objective with full evaluation, no constraint handling.
    struct Minimizer {
        incumbent: Option<(Candidate, f64)>,
        stop_immediately: bool,
        considered: usize,
    }

    impl Minimizer {
        fn new() -> Self {
            Minimizer { incumbent: None, stop_immediately: false, considered: 0 }
        }
    }

    impl Acceptor for Minimizer {
        fn policy(&self) -> InterruptionPolicy {
            InterruptionPolicy::None
        }

        fn include_objective(&self) -> bool {
            true
        }

        fn initialize(&mut self, start: &Candidate, outcome: &EvalOutcome) {
            self.incumbent = Some((start.clone(), outcome.objective.unwrap_or(f64::INFINITY)));
        }

        fn consider(&mut self, trial: &Candidate, outcome: &EvalOutcome) -> Decision {
            self.considered += 1;
            let f = outcome.objective.unwrap_or(f64::INFINITY);
            let (_, best) = self.incumbent.as_ref().unwrap();
            if f < *best {
                self.incumbent = Some((trial.clone(), f));
                Decision::Improvement
            } else {
                Decision::Rejection
            }
        }

        fn poll_center(&self) -> &Candidate {
            &self.incumbent.as_ref().unwrap().0
        }

        fn is_done(&self) -> bool {
            self.stop_immediately
        }
    }

    fn quadratic(center: [f64; 2]) -> ProblemSpec {
        let objective: Function =
            Box::new(move |x: &[f64]| (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2));
        ProblemSpec::new("quad", vec![-1.0, 0.0], vec![3.0, 2.0], vec![1, 1], vec![Box::new(|_: &[f64]| -1.0)], objective)
            .unwrap()
    }

    fn config(seed: u64, budget: u64) -> SolverConfig {
        SolverConfig::with_seed(seed, budget)
    }

    #[test]
    fn update_mesh_examples() {
        let mut mesh = MeshState::new(0.1, 1.0);
        mesh.update(false);
        assert!((mesh.frame_size - 0.05).abs() < 1e-15);
        assert!((mesh.mesh_size - 0.0025).abs() < 1e-15);

        let mut mesh = MeshState::new(0.5, 1.0);
        mesh.update(true);
        assert_eq!(mesh.frame_size, 1.0);
        assert_eq!(mesh.mesh_size, 1.0);
    }

    #[test]
    fn alternating_updates_stay_bounded() {
        let mut mesh = MeshState::new(0.1, 1.0);
        for k in 0..1000 {
            mesh.update(k % 2 == 0);
            assert!(mesh.frame_size > 0.0 && mesh.frame_size <= 1.0);
            assert!(mesh.mesh_size <= mesh.frame_size);
            assert_eq!(mesh.mesh_size, mesh.frame_size.min(mesh.frame_size * mesh.frame_size));
        }
    }

    #[test]
    fn one_dimensional_poll_is_symmetric_pair() {
        let mut rng = rng_from_seed(3);
        for frame in [1.0, 0.1, 0.0125] {
            let mesh = MeshState::new(frame, 1.0);
            let dirs = generate_poll_directions(&mesh, 1, &mut rng);
            assert_eq!(dirs.len(), 2);
            assert_eq!(dirs[0][0], -dirs[1][0]);
            assert!(dirs[0][0].abs() > 0.0 && dirs[0][0].abs() <= frame + 1e-15);
        }
    }

    #[test]
    fn opposite_directions_cancel_and_stay_in_frame() {
        let mut rng = rng_from_seed(11);
        let mut mesh = MeshState::new(0.1, 1.0);
        for _ in 0..30 {
            let dirs = generate_poll_directions(&mesh, 3, &mut rng);
            assert_eq!(dirs.len(), 6);
            for i in 0..3 {
                for k in 0..3 {
                    assert_eq!(dirs[i][k] + dirs[i + 3][k], 0.0);
                }
                let inf = dirs[i].iter().fold(0.0f64, |a, &d| a.max(d.abs()));
                assert!(inf <= mesh.frame_size * (1.0 + 1e-12));
                // every step is an integer multiple of the mesh size
                for &d in &dirs[i] {
                    let q = d / mesh.mesh_size;
                    assert!((q - q.round()).abs() < 1e-6);
                }
            }
            mesh.update(false);
        }
    }

    #[test]
    fn rank_check() {
        assert!(has_full_rank(&[vec![1.0, 0.0], vec![0.0, 1.0]]));
        assert!(!has_full_rank(&[vec![1.0, 1.0], vec![2.0, 2.0]]));
        assert!(!has_full_rank(&[vec![0.0, 0.0], vec![0.0, 0.0]]));
    }

    #[test]
    fn immediate_termination_keeps_only_the_start() {
        let p = quadratic([1.0, 1.0]);
        let mut ev = Evaluator::new(&p, EvalOrder::identity(1), 1000).unwrap();
        let mut acc = Minimizer::new();
        acc.stop_immediately = true;
        let run = run_mads(&[0.0, 0.5], &mut acc, &config(1, 1000), &mut ev, &mut rng_from_seed(1)).unwrap();
        assert_eq!(run.termination, Termination::GoalReached);
        assert_eq!(run.events.len(), 1);
        assert_eq!(run.events[0].point, vec![0.0, 0.5]);
        assert_eq!(acc.considered, 0);
    }

    #[test]
    fn start_outside_box_is_an_error() {
        let p = quadratic([1.0, 1.0]);
        let mut ev = Evaluator::new(&p, EvalOrder::identity(1), 1000).unwrap();
        let err = run_mads(&[5.0, 0.5], &mut Minimizer::new(), &config(1, 1000), &mut ev, &mut rng_from_seed(1));
        assert_eq!(err.unwrap_err(), Error::StartOutsideBounds);
    }

    #[test]
    fn converges_to_the_quadratic_minimum() {
        let center = [1.0, 1.0];
        let p = quadratic(center);
        // grid-search oracle over the box
        let mut oracle = ([0.0, 0.0], f64::INFINITY);
        for i in 0..=400 {
            for j in 0..=200 {
                let x = [-1.0 + 0.01 * i as f64, 0.01 * j as f64];
                let f = p.objective(&x);
                if f < oracle.1 {
                    oracle = (x, f);
                }
            }
        }
        let mut ev = Evaluator::new(&p, EvalOrder::identity(1), 1_000_000).unwrap();
        let mut acc = Minimizer::new();
        let run = run_mads(&[-0.7, 1.9], &mut acc, &config(5, 1_000_000), &mut ev, &mut rng_from_seed(5)).unwrap();
        assert_eq!(run.termination, Termination::MeshConverged);
        let best = &acc.incumbent.as_ref().unwrap().0.point;
        for k in 0..2 {
            assert!((best[k] - oracle.0[k]).abs() < 1e-4, "{best:?} vs {:?}", oracle.0);
        }
    }

    #[test]
    fn identical_seeds_replay_identically() {
        let p = quadratic([0.3, 1.7]);
        let run = |seed| {
            let mut ev = Evaluator::new(&p, EvalOrder::identity(1), 500).unwrap().with_logging(true);
            let mut acc = Minimizer::new();
            let r = run_mads(&[2.5, 0.2], &mut acc, &config(seed, 500), &mut ev, &mut rng_from_seed(seed)).unwrap();
            (r, ev.trials().to_vec())
        };
        let (a, ta) = run(9);
        let (b, tb) = run(9);
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        let (_, tc) = run(10);
        assert_ne!(ta, tc);
    }

    #[test]
    fn trial_points_stay_in_the_box_and_polls_are_bounded() {
        let p = quadratic([-1.0, 2.0]);
        let mut ev = Evaluator::new(&p, EvalOrder::identity(1), 4000).unwrap().with_logging(true);
        let mut acc = Minimizer::new();
        let run = run_mads(&[2.9, 0.1], &mut acc, &config(2, 4000), &mut ev, &mut rng_from_seed(2)).unwrap();
        assert!(ev.trials().iter().all(|t| p.contains(&t.point)));
        // the start plus at most 2n trial points per iteration
        assert!(ev.trials().len() <= 1 + 4 * run.iterations + 4);
    }

    /// Rejects everything: every poll is a failure.
    struct RejectAll(Candidate, usize);

    impl Acceptor for RejectAll {
        fn policy(&self) -> InterruptionPolicy {
            InterruptionPolicy::None
        }
        fn include_objective(&self) -> bool {
            true
        }
        fn initialize(&mut self, start: &Candidate, _: &EvalOutcome) {
            self.0 = start.clone();
        }
        fn consider(&mut self, _: &Candidate, _: &EvalOutcome) -> Decision {
            self.1 += 1;
            Decision::Rejection
        }
        fn poll_center(&self) -> &Candidate {
            &self.0
        }
    }

    struct AcceptAll(Candidate, usize);

    impl Acceptor for AcceptAll {
        fn policy(&self) -> InterruptionPolicy {
            InterruptionPolicy::None
        }
        fn include_objective(&self) -> bool {
            true
        }
        fn initialize(&mut self, start: &Candidate, _: &EvalOutcome) {
            self.0 = start.clone();
        }
        fn consider(&mut self, trial: &Candidate, _: &EvalOutcome) -> Decision {
            self.1 += 1;
            self.0 = trial.clone();
            Decision::Improvement
        }
        fn poll_center(&self) -> &Candidate {
            &self.0
        }
    }

    #[test]
    fn all_rejected_poll_fails_and_first_accept_stops_the_poll() {
        let p = quadratic([1.0, 1.0]);
        let scaling = Scaling::new(&p);
        let anchor = scaling.to_unit(&[1.0, 1.0]);
        let mut ctx = PollContext { scaling: &scaling, anchor: &anchor, last_success: None };
        let mesh = MeshState::new(0.1, 1.0);
        let start = Candidate { unit: anchor.clone(), point: vec![1.0, 1.0] };

        let mut ev = Evaluator::new(&p, EvalOrder::identity(1), 1000).unwrap();
        let mut reject = RejectAll(start.clone(), 0);
        let mut events = Vec::new();
        let r = poll_step(&mut ctx, &mesh, &mut reject, &mut ev, &mut rng_from_seed(4), &mut events);
        assert_eq!(r, PollResult::Failure);
        assert_eq!(reject.1, 4);
        assert!(events.is_empty());
        assert_eq!(reject.0, start);

        // accepting the first candidate leaves the other 2n - 1 unevaluated
        let mut ev = Evaluator::new(&p, EvalOrder::identity(1), 1000).unwrap();
        let mut accept = AcceptAll(start, 0);
        let mut events = Vec::new();
        let r = poll_step(&mut ctx, &mesh, &mut accept, &mut ev, &mut rng_from_seed(4), &mut events);
        assert_eq!(r, PollResult::Success);
        assert_eq!(accept.1, 1);
        assert_eq!(events.len(), 1);
        assert_eq!(ev.ledger().consumed(), 2);
    }
}
