//! Benchmark protocol: infeasible starting points, Latin hypercube
//! feasibility studies, constraint orderings, campaigns and data profiles.

mod campaign;
mod ordering;
mod profile;
mod sampling;

pub use campaign::{
    run_campaign, splitmix64, summarize, CampaignConfig, CampaignPlan, CampaignResult, InstanceRun, ProcedureRuns,
    SummaryRow,
};
pub use ordering::{order_constraints, OrderingStrategy};
pub use profile::{
    data_profile, default_cost_grid, first_feasible_cost, solved_cost, target_value, ProfileCurve, ProfileTable,
};
pub use sampling::{empirical_feasibility, lhs_sample, sample_infeasible_start, MAX_START_ATTEMPTS};
