use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use seqmads::io::{read_manifest, read_profiles, read_trace, trace_path};
use seqmads::problem_file::ProblemFile;
use seqmads_core::harness::{run_campaign, CampaignConfig};
use seqmads_core::{Problem, ProcedureId, Tcsd};

fn seqmads(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqmads"))
        .args(args)
        .env("SEQMADS_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn problem_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems/tcsd.json")
}

#[test]
fn solve_prints_a_summary_and_writes_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&seqmads(&["solve", "--problem", "tcsd", "--proc", "int", "--budget", "10000", "--seed", "7"], dir.path()));
    for key in ["final x", "final f", "final h", "first feasible cost", "calls c1="] {
        assert!(text.contains(key), "{key} missing from\n{text}");
    }
    let trace = read_trace(&dir.path().join("solve_int_7.json")).unwrap();
    assert_eq!(trace.procedure, "int");
    assert!(trace.consumed <= 10_000);
    assert!(text.contains(&format!("consumed {}", trace.consumed)));
}

#[test]
fn eb_and_int_print_the_same_incumbents() {
    let dir = tempfile::tempdir().unwrap();
    let incumbents = |proc: &str| -> Vec<String> {
        let text = stdout(&seqmads(&["solve", "--proc", proc, "--seed", "7", "--budget", "100000000"], dir.path()));
        text.lines().filter(|l| l.starts_with("incumbent ")).map(String::from).collect()
    };
    let eb = incumbents("eb");
    assert!(eb.len() > 10);
    assert_eq!(eb, incumbents("int"));
}

#[test]
fn bad_arguments_fail() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["solve", "--proc", "bogus"][..],
        &["solve", "--proc", "eb", "--problem", "rosenbrock"],
        &["solve", "--proc", "eb", "--ordering", "explicit"],
        &["solve", "--proc", "eb", "--ordering", "explicit", "--order", "1,2,2,4"],
        &["campaign", "--instances", "0"],
        &["campaign", "--tolerance", "1.5"],
        &["feasibility", "--samples", "0"],
        &["plot", "missing/profiles.csv"],
    ] {
        let o = seqmads(args, dir.path());
        assert!(!o.status.success(), "{args:?} should fail");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn single_instance_campaign_summarizes_its_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    stdout(&seqmads(&["campaign", "--instances", "1", "--procs", "int", "--out", out.to_str().unwrap()], dir.path()));
    let manifest = read_manifest(&out).unwrap();
    let trace = read_trace(&trace_path(&out, ProcedureId::Int, 0)).unwrap();
    let row = &manifest.summaries[0];
    assert_eq!(row.completed_runs, 1);
    assert_eq!(row.avg_first_feasible_cost, trace.first_feasible_cost.map(|c| c as f64));
    assert_eq!(row.avg_calls, trace.per_function_calls.iter().map(|&n| n as f64).collect::<Vec<_>>());
    assert_eq!(row.best_final_f, trace.final_feasible_objective());
}

#[test]
fn infeasibility_ordering_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let text = stdout(&seqmads(
        &["campaign", "--instances", "2", "--budget", "1000", "--ordering", "infeasibility", "--out", out.to_str().unwrap()],
        dir.path(),
    ));
    assert!(text.contains("order c3 c1 c2 c4"));
    let manifest = read_manifest(&out).unwrap();
    assert_eq!(manifest.order, vec![3, 1, 2, 4]);
    assert_eq!(manifest.feasibility.unwrap().len(), 4);
}

#[test]
fn default_campaign_writes_everything_under_the_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&seqmads(&["campaign", "--plot", "--log", "--instances", "3"], dir.path()));
    let out = dir.path().join("campaign");
    for proc in ProcedureId::ALL {
        assert!(text.lines().any(|l| l.starts_with(&proc.to_string().to_uppercase())));
        for i in 0..3 {
            assert!(trace_path(&out, proc, i).is_file());
        }
        assert!(out.join("logs").join(format!("{proc}.jsonl")).is_file());
    }
    let profiles = read_profiles(&out.join("profiles.csv")).unwrap();
    assert_eq!(profiles.curves.len(), 4);
    for c in &profiles.curves {
        assert!(c.fractions.windows(2).all(|w| w[0] <= w[1]));
    }
    let svg = std::fs::read_to_string(out.join("profiles.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn parallel_jobs_write_the_same_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str| {
        let out = dir.path().join(format!("j{jobs}"));
        stdout(&seqmads(&["campaign", "--instances", "5", "--budget", "3000", "--jobs", jobs, "--out", out.to_str().unwrap()], dir.path()));
        out
    };
    let (a, b) = (run("1"), run("4"));
    for file in ["campaign.json", "profiles.csv", "traces/hier_4.json", "traces/pb_0.json"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn feasibility_ranks_c3_first() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&seqmads(&["feasibility", "--problem", "tcsd", "--samples", "5000", "--seed", "1"], dir.path()));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("c3"));
    assert_eq!(text, stdout(&seqmads(&["feasibility", "--samples", "5000", "--seed", "1"], dir.path())));
}

#[test]
fn plot_renders_a_profiles_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profiles.csv");
    std::fs::write(&csv, "cost,eb,pb,int,hier\n0,0,0,0,0\n500,0,0,0.25,0.5\n10000,0.5,0.25,0.75,0.75\n").unwrap();
    stdout(&seqmads(&["plot", csv.to_str().unwrap()], dir.path()));
    let svg = std::fs::read_to_string(dir.path().join("profiles.svg")).unwrap();
    assert_eq!(svg.matches("<path ").count(), 4);
}

#[test]
fn problem_file_matches_the_builtin_problem() {
    let spec = ProblemFile::load(&problem_path()).unwrap().build().unwrap();
    assert_eq!(spec.costs(), Tcsd.costs());
    assert_eq!(spec.lower_bounds(), Tcsd.lower_bounds());
    assert_eq!(spec.upper_bounds(), Tcsd.upper_bounds());
    assert_eq!(spec.best_known(), Tcsd.best_known());
    let x = [0.5, 0.5, 5.0];
    assert_eq!(spec.constraint(3, &x), f64::INFINITY);
    for k in 0..200 {
        let t = k as f64 / 199.0;
        let x = [0.05 + 1.95 * t, 0.25 + 1.05 * (1.0 - t) * t * 4.0, 2.0 + 13.0 * (t * 7.0).fract()];
        for j in 0..4 {
            assert_eq!(spec.constraint(j, &x).to_bits(), Tcsd.constraint(j, &x).to_bits(), "c{} at {x:?}", j + 1);
        }
        assert_eq!(spec.objective(&x).to_bits(), Tcsd.objective(&x).to_bits());
    }

    let config = CampaignConfig { num_instances: 3, budget: 3_000, ..Default::default() };
    let from_file = run_campaign(&spec, &config).unwrap();
    let builtin = run_campaign(&Tcsd, &config).unwrap();
    assert_eq!(from_file.runs, builtin.runs);
}

#[test]
fn problem_file_drives_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let file = problem_path();
    let a = stdout(&seqmads(&["solve", "--proc", "hier", "--seed", "2", "--out", "/dev/null"], dir.path()));
    let b = stdout(&seqmads(
        &["solve", "--problem-file", file.to_str().unwrap(), "--proc", "hier", "--seed", "2", "--out", "/dev/null"],
        dir.path(),
    ));
    assert_eq!(a, b);
}
