use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::EvalOrder;
use crate::mads::{rng_from_seed, SolverConfig};
use crate::problem::Problem;
use crate::strategies::{run_procedure, ProcedureId};
use crate::trace::RunTrace;

use super::ordering::{order_constraints, OrderingStrategy};
use super::profile::{data_profile, default_cost_grid, first_feasible_cost, ProfileTable};
use super::sampling::{empirical_feasibility, lhs_sample, sample_infeasible_start};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub problem: String,
    pub procedures: Vec<ProcedureId>,
    pub num_instances: usize,
    pub budget: u64,
    pub ordering: OrderingStrategy,
    pub master_seed: u64,
    pub tolerance: f64,
    /// Sample size of the Latin hypercube feasibility study.
    pub feasibility_samples: usize,
    pub initial_frame_size: f64,
    pub min_frame_size: f64,
    #[serde(default)]
    pub log_evaluations: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        CampaignConfig {
            problem: String::from("tcsd"),
            procedures: ProcedureId::ALL.to_vec(),
            num_instances: 40,
            budget: 10_000,
            ordering: OrderingStrategy::ByCost,
            master_seed: 0,
            tolerance: 0.05,
            feasibility_samples: 5_000,
            initial_frame_size: solver.initial_frame_size,
            min_frame_size: solver.min_frame_size,
            log_evaluations: false,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_instances == 0 {
            return Err(Error::InvalidConfig("at least one instance is required".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidConfig(alloc::format!("tolerance must lie in (0, 1), got {}", self.tolerance)));
        }
        if self.procedures.is_empty() {
            return Err(Error::InvalidConfig("no procedure selected".into()));
        }
        if self.feasibility_samples == 0 {
            return Err(Error::InvalidConfig("feasibility sample size must be positive".into()));
        }
        self.solver(0).validate()
    }

    pub fn solver(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            seed,
            budget: self.budget,
            initial_frame_size: self.initial_frame_size,
            min_frame_size: self.min_frame_size,
            log_evaluations: self.log_evaluations,
            ..SolverConfig::default()
        }
    }
}

/// SplitMix64 step, used to derive independent seeds from the master seed.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_START: u64 = 1;
const STREAM_SOLVER: u64 = 2;
const STREAM_LHS: u64 = 3;

fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(stream)) ^ index)
}

/// Everything fixed before any run starts: order, starting points and seeds.
/// Instance `i` uses the same start and seed for every procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignPlan {
    pub config: CampaignConfig,
    pub order: EvalOrder,
    pub feasibility: Option<Vec<f64>>,
    pub starts: Vec<Vec<f64>>,
    pub seeds: Vec<u64>,
}

impl CampaignPlan {
    pub fn new(problem: &dyn Problem, config: &CampaignConfig) -> Result<Self> {
        config.validate()?;
        let feasibility = match config.ordering {
            OrderingStrategy::ByInfeasibility => {
                let mut rng = rng_from_seed(derive_seed(config.master_seed, STREAM_LHS, 0));
                let pts = lhs_sample(problem.lower_bounds(), problem.upper_bounds(), config.feasibility_samples, &mut rng);
                Some((pts.clone(), empirical_feasibility(problem, &pts)))
            }
            _ => None,
        };
        let order = order_constraints(problem, &config.ordering, feasibility.as_ref().map(|(p, _)| p.as_slice()))?;
        let starts = (0..config.num_instances as u64)
            .map(|i| sample_infeasible_start(problem, &mut rng_from_seed(derive_seed(config.master_seed, STREAM_START, i))))
            .collect::<Result<Vec<_>>>()?;
        let seeds = (0..config.num_instances as u64).map(|i| derive_seed(config.master_seed, STREAM_SOLVER, i)).collect();
        Ok(CampaignPlan { config: config.clone(), order, feasibility: feasibility.map(|(_, f)| f), starts, seeds })
    }

    /// All `(procedure, instance)` pairs, in aggregation order.
    pub fn jobs(&self) -> Vec<(ProcedureId, usize)> {
        self.config
            .procedures
            .iter()
            .flat_map(|&p| (0..self.config.num_instances).map(move |i| (p, i)))
            .collect()
    }

    pub fn run_one(&self, problem: &dyn Problem, procedure: ProcedureId, instance: usize) -> InstanceRun {
        let config = self.config.solver(self.seeds[instance]);
        match run_procedure(procedure, problem, &self.starts[instance], &self.order, &config) {
            Ok(trace) => InstanceRun { instance, trace: Some(trace), error: None },
            Err(e) => InstanceRun { instance, trace: None, error: Some(e.to_string()) },
        }
    }

    /// Assembles the result from runs given in [`jobs`](Self::jobs) order.
    pub fn finish(self, problem: &dyn Problem, results: Vec<InstanceRun>) -> Result<CampaignResult> {
        let n = self.config.num_instances;
        if results.len() != self.config.procedures.len() * n {
            return Err(Error::InvalidConfig(alloc::format!(
                "expected {} runs, got {}",
                self.config.procedures.len() * n,
                results.len()
            )));
        }
        let mut results = results.into_iter();
        let runs: Vec<ProcedureRuns> = self
            .config
            .procedures
            .iter()
            .map(|&procedure| ProcedureRuns { procedure, instances: results.by_ref().take(n).collect() })
            .collect();

        let summaries = runs.iter().map(|r| summarize(r, problem.num_constraints())).collect();
        let grid = default_cost_grid(runs.iter().flat_map(|r| r.traces()), self.config.budget);
        let profile_input: Vec<(ProcedureId, Vec<Option<&RunTrace>>)> = runs
            .iter()
            .map(|r| (r.procedure, r.instances.iter().map(|i| i.trace.as_ref()).collect()))
            .collect();
        let f_star = problem.best_known().map(|b| b.objective_value);
        let profiles = match f_star {
            Some(_) => Some(data_profile(&profile_input, f_star, self.config.tolerance, &grid)?),
            None => None,
        };
        Ok(CampaignResult {
            config: self.config,
            order: self.order.one_based(),
            feasibility: self.feasibility,
            best_known_value: f_star,
            starts: self.starts,
            summaries,
            profiles,
            runs,
        })
    }
}

/// Outcome of one `(procedure, instance)` run; failures are kept, not fatal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRun {
    pub instance: usize,
    pub trace: Option<RunTrace>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcedureRuns {
    pub procedure: ProcedureId,
    pub instances: Vec<InstanceRun>,
}

impl ProcedureRuns {
    pub fn traces(&self) -> impl Iterator<Item = &RunTrace> {
        self.instances.iter().filter_map(|i| i.trace.as_ref())
    }
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub procedure: ProcedureId,
    pub completed_runs: usize,
    /// Runs that reached a feasible point.
    pub feasible_runs: usize,
    pub avg_first_feasible_cost: Option<f64>,
    /// Average calls of `(c_1, ..., c_m, f)`.
    pub avg_calls: Vec<f64>,
    pub avg_final_f: Option<f64>,
    pub best_final_f: Option<f64>,
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

pub fn summarize(runs: &ProcedureRuns, num_constraints: usize) -> SummaryRow {
    let traces: Vec<&RunTrace> = runs.traces().collect();
    let first: Vec<f64> = traces.iter().filter_map(|t| first_feasible_cost(t)).map(|c| c as f64).collect();
    let avg_calls = (0..=num_constraints)
        .map(|k| mean(&traces.iter().map(|t| t.per_function_calls[k] as f64).collect::<Vec<_>>()).unwrap_or(0.0))
        .collect();
    let finals: Vec<f64> = traces.iter().filter_map(|t| t.final_feasible_objective()).collect();
    SummaryRow {
        procedure: runs.procedure,
        completed_runs: traces.len(),
        feasible_runs: first.len(),
        avg_first_feasible_cost: mean(&first),
        avg_calls,
        avg_final_f: mean(&finals),
        best_final_f: finals.iter().copied().min_by(f64::total_cmp),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub config: CampaignConfig,
    /// 1-based constraint numbers in evaluation order.
    pub order: Vec<usize>,
    /// Per-constraint feasible fractions, when the order came from a sample.
    pub feasibility: Option<Vec<f64>>,
    pub best_known_value: Option<f64>,
    pub starts: Vec<Vec<f64>>,
    pub summaries: Vec<SummaryRow>,
    pub profiles: Option<ProfileTable>,
    pub runs: Vec<ProcedureRuns>,
}

impl CampaignResult {
    pub fn runs_of(&self, procedure: ProcedureId) -> Option<&ProcedureRuns> {
        self.runs.iter().find(|r| r.procedure == procedure)
    }

    pub fn summary_of(&self, procedure: ProcedureId) -> Option<&SummaryRow> {
        self.summaries.iter().find(|r| r.procedure == procedure)
    }
}

/// Runs every `(procedure, instance)` pair sequentially.
pub fn run_campaign(problem: &dyn Problem, config: &CampaignConfig) -> Result<CampaignResult> {
    let plan = CampaignPlan::new(problem, config)?;
    let results = plan.jobs().into_iter().map(|(p, i)| plan.run_one(problem, p, i)).collect();
    plan.finish(problem, results)
}
