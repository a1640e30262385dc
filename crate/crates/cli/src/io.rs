//! On-disk formats: trace JSON, campaign directories, profile CSV and
//! per-call evaluation logs.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use seqmads_core::harness::{CampaignConfig, CampaignResult, ProfileCurve, ProfileTable, SummaryRow};
use seqmads_core::{Phase, ProcedureId, RunTrace};

pub const CAMPAIGN_FILE: &str = "campaign.json";
pub const PROFILES_FILE: &str = "profiles.csv";
pub const TRACES_DIR: &str = "traces";
pub const LOGS_DIR: &str = "logs";

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_trace(path: &Path) -> anyhow::Result<RunTrace> {
    read_json(path)
}

/// A run that produced no trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub procedure: ProcedureId,
    pub instance: usize,
    pub error: String,
}

/// Contents of `campaign.json`: everything but the traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignManifest {
    pub config: CampaignConfig,
    pub order: Vec<usize>,
    pub feasibility: Option<Vec<f64>>,
    pub best_known_value: Option<f64>,
    pub starts: Vec<Vec<f64>>,
    pub summaries: Vec<SummaryRow>,
    pub failures: Vec<RunFailure>,
}

impl CampaignManifest {
    pub fn from_result(result: &CampaignResult) -> Self {
        let failures = result
            .runs
            .iter()
            .flat_map(|r| {
                r.instances.iter().filter_map(move |i| {
                    i.error.as_ref().map(|e| RunFailure { procedure: r.procedure, instance: i.instance, error: e.clone() })
                })
            })
            .collect();
        CampaignManifest {
            config: result.config.clone(),
            order: result.order.clone(),
            feasibility: result.feasibility.clone(),
            best_known_value: result.best_known_value,
            starts: result.starts.clone(),
            summaries: result.summaries.clone(),
            failures,
        }
    }
}

pub fn trace_path(dir: &Path, procedure: ProcedureId, instance: usize) -> PathBuf {
    dir.join(TRACES_DIR).join(format!("{procedure}_{instance}.json"))
}

/// One line of an evaluation log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalLogRecord {
    pub instance: usize,
    pub phase: Phase,
    pub point: Vec<f64>,
    /// `c1`..`cm` or `f`.
    pub fid: String,
    #[serde(with = "seqmads_core::extreal")]
    pub value: f64,
    pub cumulative_cost: u64,
}

pub fn log_records(instance: usize, trace: &RunTrace) -> impl Iterator<Item = EvalLogRecord> + '_ {
    trace.calls.iter().map(move |c| EvalLogRecord {
        instance,
        phase: c.phase,
        point: c.point.clone(),
        fid: c.fid.to_string(),
        value: c.value,
        cumulative_cost: c.cumulative_cost,
    })
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut out, &r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    BufReader::new(file)
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|(i, l)| {
            let line = l?;
            serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))
        })
        .collect()
}

pub fn write_profiles(path: &Path, table: &ProfileTable) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["cost".to_string()];
    header.extend(table.curves.iter().map(|c| c.procedure.to_string()));
    w.write_record(&header)?;
    for (row, cost) in table.costs.iter().enumerate() {
        let mut record = vec![cost.to_string()];
        record.extend(table.curves.iter().map(|c| c.fractions[row].to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_profiles(path: &Path) -> anyhow::Result<ProfileTable> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header = r.headers()?.clone();
    if header.get(0) != Some("cost") || header.len() < 2 {
        bail!("{}: expected a header starting with 'cost' and at least one procedure", path.display());
    }
    let mut curves: Vec<ProfileCurve> = header
        .iter()
        .skip(1)
        .map(|name| Ok(ProfileCurve { procedure: name.parse()?, fractions: Vec::new() }))
        .collect::<anyhow::Result<_>>()?;
    let mut costs = Vec::new();
    for record in r.records() {
        let record = record?;
        costs.push(record[0].parse::<u64>().with_context(|| format!("bad cost '{}'", &record[0]))?);
        for (curve, field) in curves.iter_mut().zip(record.iter().skip(1)) {
            curve.fractions.push(field.parse::<f64>().with_context(|| format!("bad fraction '{field}'"))?);
        }
    }
    Ok(ProfileTable { costs, curves })
}

/// Writes `campaign.json`, one trace per run, `profiles.csv` when the
/// problem has a best-known value and evaluation logs when they were kept.
pub fn write_campaign(dir: &Path, result: &CampaignResult) -> anyhow::Result<()> {
    fs::create_dir_all(dir.join(TRACES_DIR)).with_context(|| format!("creating {}", dir.display()))?;
    write_json(&dir.join(CAMPAIGN_FILE), &CampaignManifest::from_result(result))?;
    for runs in &result.runs {
        for run in &runs.instances {
            if let Some(trace) = &run.trace {
                write_json(&trace_path(dir, runs.procedure, run.instance), trace)?;
            }
        }
    }
    if let Some(table) = &result.profiles {
        write_profiles(&dir.join(PROFILES_FILE), table)?;
    }
    if result.config.log_evaluations {
        fs::create_dir_all(dir.join(LOGS_DIR))?;
        for runs in &result.runs {
            let records = runs
                .instances
                .iter()
                .filter_map(|i| i.trace.as_ref().map(|t| (i.instance, t)))
                .flat_map(|(i, t)| log_records(i, t));
            write_jsonl(&dir.join(LOGS_DIR).join(format!("{}.jsonl", runs.procedure)), records)?;
        }
    }
    Ok(())
}

pub fn read_manifest(dir: &Path) -> anyhow::Result<CampaignManifest> {
    read_json(&dir.join(CAMPAIGN_FILE))
}
