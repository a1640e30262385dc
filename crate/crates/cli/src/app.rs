//! Argument definitions and subcommand implementations.

use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use seqmads_core::harness::{
    empirical_feasibility, lhs_sample, CampaignConfig, CampaignPlan, CampaignResult, InstanceRun, OrderingStrategy,
};
use seqmads_core::mads::rng_from_seed;
use seqmads_core::problem::builtin;
use seqmads_core::{Problem, ProcedureId};

use crate::io;
use crate::problem_file::ProblemFile;
use crate::svg;

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "SEQMADS_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "seqmads-out";

#[derive(Debug, Parser)]
#[command(name = "seqmads", version, about = "Sequential, interruptible constraint evaluation for direct search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one procedure on one instance.
    Solve(SolveArgs),
    /// Run every selected procedure on a set of instances.
    Campaign(CampaignArgs),
    /// Estimate per-constraint feasible fractions from a Latin hypercube sample.
    Feasibility(FeasibilityArgs),
    /// Render a profiles.csv file to SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Built-in problem name.
    #[arg(long, default_value = "tcsd", conflicts_with = "problem_file")]
    pub problem: String,
    /// JSON problem definition.
    #[arg(long, value_name = "PATH")]
    pub problem_file: Option<PathBuf>,
}

impl ProblemArgs {
    pub fn load(&self) -> anyhow::Result<Box<dyn Problem>> {
        match &self.problem_file {
            Some(path) => Ok(Box::new(ProblemFile::load(path)?.build()?)),
            None => Ok(builtin(&self.problem)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderingArg {
    Cost,
    Infeasibility,
    Explicit,
}

#[derive(Debug, Clone, Args)]
pub struct OrderingArgs {
    #[arg(long, value_enum, default_value_t = OrderingArg::Cost)]
    pub ordering: OrderingArg,
    /// Comma-separated 1-based constraint numbers, with `--ordering explicit`.
    #[arg(long, value_delimiter = ',')]
    pub order: Vec<usize>,
    /// Sample size for `--ordering infeasibility`.
    #[arg(long, default_value_t = 5_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
}

impl OrderingArgs {
    pub fn strategy(&self) -> anyhow::Result<OrderingStrategy> {
        match (self.ordering, self.order.is_empty()) {
            (OrderingArg::Explicit, false) => Ok(OrderingStrategy::Explicit(self.order.clone())),
            (OrderingArg::Explicit, true) => bail!("--ordering explicit needs --order"),
            (_, false) => bail!("--order is only valid with --ordering explicit"),
            (OrderingArg::Cost, true) => Ok(OrderingStrategy::ByCost),
            (OrderingArg::Infeasibility, true) => Ok(OrderingStrategy::ByInfeasibility),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long = "proc")]
    pub procedure: ProcedureId,
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    /// Master seed; the run is instance 0 of a campaign with this seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub ordering: OrderingArgs,
    /// Trace file (default: `<out dir>/solve_<proc>_<seed>.json`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CampaignArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 40)]
    pub instances: usize,
    #[arg(long = "procs", value_delimiter = ',', default_value = "eb,pb,int,hier")]
    pub procedures: Vec<ProcedureId>,
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub ordering: OrderingArgs,
    /// Relative gap to the best-known value counted as solved.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    /// Campaign directory (default: `<out dir>/campaign`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    /// Also write profiles.svg.
    #[arg(long)]
    pub plot: bool,
    /// Keep every function call in logs/<proc>.jsonl.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FeasibilityArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 5_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    pub profiles: PathBuf,
    /// SVG file (default: next to the input, with an .svg extension).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "Data profiles")]
    pub title: String,
}

fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from(DEFAULT_OUT_DIR), PathBuf::from)
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"))
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
    format!("[{}]", parts.join(", "))
}

fn constraint_list(order: &[usize]) -> String {
    order.iter().map(|j| format!("c{j}")).collect::<Vec<_>>().join(" ")
}

pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Solve(args) => solve(&args, out),
        Command::Campaign(args) => campaign(&args, out),
        Command::Feasibility(args) => feasibility(&args, out),
        Command::Plot(args) => plot(&args, out),
    }
}

pub fn solve(args: &SolveArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let problem = args.problem.load()?;
    let config = CampaignConfig {
        problem: problem.name().to_string(),
        procedures: vec![args.procedure],
        num_instances: 1,
        budget: args.budget,
        ordering: args.ordering.strategy()?,
        master_seed: args.seed,
        feasibility_samples: args.ordering.samples as usize,
        ..CampaignConfig::default()
    };
    let plan = CampaignPlan::new(problem.as_ref(), &config)?;
    let run = plan.run_one(problem.as_ref(), args.procedure, 0);
    let trace = match (run.trace, run.error) {
        (Some(t), _) => t,
        (None, e) => bail!("{} failed: {}", args.procedure, e.unwrap_or_default()),
    };

    writeln!(out, "problem {} procedure {} seed {} budget {}", trace.problem, trace.procedure, args.seed, trace.budget)?;
    writeln!(out, "order {}", constraint_list(&trace.order))?;
    writeln!(out, "start {}", fmt_point(&trace.start))?;
    for (k, x) in trace.incumbent_points().iter().enumerate() {
        writeln!(out, "incumbent {k} {}", fmt_point(x))?;
    }
    writeln!(out, "final x {}", fmt_point(&trace.final_point))?;
    writeln!(out, "final f {}", fmt_opt(trace.final_f, 8))?;
    writeln!(out, "final h {}", fmt_opt(trace.final_h, 8))?;
    writeln!(out, "first feasible cost {}", trace.first_feasible_cost.map_or("-".to_string(), |c| c.to_string()))?;
    let m = trace.order.len();
    let calls: Vec<String> = trace
        .per_function_calls
        .iter()
        .enumerate()
        .map(|(k, n)| if k < m { format!("c{}={n}", k + 1) } else { format!("f={n}") })
        .collect();
    writeln!(out, "calls {} consumed {}", calls.join(" "), trace.consumed)?;

    let path = args.out.clone().unwrap_or_else(|| out_dir().join(format!("solve_{}_{}.json", args.procedure, args.seed)));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    io::write_json(&path, &trace)?;
    writeln!(out, "trace {}", path.display())?;
    Ok(())
}

/// Runs the plan on `jobs` threads. Runs are reassembled in job order, so
/// the result does not depend on scheduling.
pub fn execute(problem: &dyn Problem, plan: CampaignPlan, jobs: usize) -> anyhow::Result<CampaignResult> {
    let work = plan.jobs();
    let results: Vec<InstanceRun> = if jobs <= 1 {
        work.iter().map(|&(p, i)| plan.run_one(problem, p, i)).collect()
    } else {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<InstanceRun>>> = Mutex::new(vec![None; work.len()]);
        std::thread::scope(|s| {
            for _ in 0..jobs.min(work.len()) {
                s.spawn(|| loop {
                    let k = next.fetch_add(1, AtomicOrdering::Relaxed);
                    let Some(&(p, i)) = work.get(k) else { break };
                    let run = plan.run_one(problem, p, i);
                    slots.lock().expect("no worker panics while holding the lock")[k] = Some(run);
                });
            }
        });
        slots.into_inner()?.into_iter().map(|r| r.expect("every job ran")).collect()
    };
    Ok(plan.finish(problem, results)?)
}

pub fn print_summary(result: &CampaignResult, out: &mut dyn Write) -> anyhow::Result<()> {
    let m = result.order.len();
    writeln!(
        out,
        "problem {} instances {} budget {} seed {}",
        result.config.problem, result.config.num_instances, result.config.budget, result.config.master_seed
    )?;
    writeln!(out, "order {}", constraint_list(&result.order))?;
    if let Some(fr) = &result.feasibility {
        let parts: Vec<String> = result.order.iter().map(|&j| format!("c{j}={:.4}", fr[j - 1])).collect();
        writeln!(out, "feasible fractions {}", parts.join(" "))?;
    }
    let mut header = format!("{:<6}{:>6}{:>10}{:>16}", "proc", "runs", "feasible", "first feasible");
    for &j in &result.order {
        header.push_str(&format!("{:>10}", format!("c{j}")));
    }
    header.push_str(&format!("{:>10}{:>14}{:>14}", "f", "avg final f", "best final f"));
    writeln!(out, "{header}")?;
    for row in &result.summaries {
        let mut line = format!(
            "{:<6}{:>6}{:>10}{:>16}",
            row.procedure.to_string().to_uppercase(),
            row.completed_runs,
            row.feasible_runs,
            fmt_opt(row.avg_first_feasible_cost, 1)
        );
        for &j in &result.order {
            line.push_str(&format!("{:>10.1}", row.avg_calls[j - 1]));
        }
        line.push_str(&format!(
            "{:>10.1}{:>14}{:>14}",
            row.avg_calls[m],
            fmt_opt(row.avg_final_f, 7),
            fmt_opt(row.best_final_f, 7)
        ));
        writeln!(out, "{line}")?;
    }
    if let (Some(profiles), Some(f_star)) = (&result.profiles, result.best_known_value) {
        let solved: Vec<String> = profiles
            .curves
            .iter()
            .map(|c| format!("{}={:.3}", c.procedure, c.fractions.last().copied().unwrap_or(0.0)))
            .collect();
        writeln!(
            out,
            "solved within {}% of {f_star} at budget: {}",
            result.config.tolerance * 100.0,
            solved.join(" ")
        )?;
    }
    let failures: usize = result.runs.iter().flat_map(|r| &r.instances).filter(|i| i.error.is_some()).count();
    if failures > 0 {
        writeln!(out, "failed runs {failures} (see campaign.json)")?;
    }
    Ok(())
}

pub fn campaign(args: &CampaignArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let problem = args.problem.load()?;
    let config = CampaignConfig {
        problem: problem.name().to_string(),
        procedures: args.procedures.clone(),
        num_instances: args.instances,
        budget: args.budget,
        ordering: args.ordering.strategy()?,
        master_seed: args.seed,
        tolerance: args.tolerance,
        feasibility_samples: args.ordering.samples as usize,
        log_evaluations: args.log,
        ..CampaignConfig::default()
    };
    let plan = CampaignPlan::new(problem.as_ref(), &config)?;
    let result = execute(problem.as_ref(), plan, args.jobs as usize)?;
    let dir = args.out.clone().unwrap_or_else(|| out_dir().join("campaign"));
    io::write_campaign(&dir, &result)?;
    print_summary(&result, out)?;
    if args.plot {
        match &result.profiles {
            Some(table) => {
                let path = dir.join("profiles.svg");
                std::fs::write(&path, svg::render_profiles(table, &format!("Data profiles, {}", result.config.problem)))?;
            }
            None => writeln!(out, "no best-known value, skipping the plot")?,
        }
    }
    writeln!(out, "output {}", dir.display())?;
    Ok(())
}

pub fn feasibility(args: &FeasibilityArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let problem = args.problem.load()?;
    let mut rng = rng_from_seed(args.seed);
    let points = lhs_sample(problem.lower_bounds(), problem.upper_bounds(), args.samples as usize, &mut rng);
    let fractions = empirical_feasibility(problem.as_ref(), &points);
    let mut ranked: Vec<usize> = (0..fractions.len()).collect();
    ranked.sort_by(|&a, &b| fractions[a].total_cmp(&fractions[b]).then(a.cmp(&b)));
    writeln!(out, "{:<12}{:>10}", "constraint", "feasible")?;
    for j in ranked {
        writeln!(out, "{:<12}{:>9.2}%", format!("c{}", j + 1), fractions[j] * 100.0)?;
    }
    Ok(())
}

pub fn plot(args: &PlotArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let table = io::read_profiles(&args.profiles)?;
    let path = args.out.clone().unwrap_or_else(|| args.profiles.with_extension("svg"));
    std::fs::write(&path, svg::render_profiles(&table, &args.title)).with_context(|| format!("writing {}", path.display()))?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}
