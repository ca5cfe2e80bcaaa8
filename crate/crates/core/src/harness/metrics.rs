use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mission::MissionRecord;
use crate::error::{Error, Result};

/// Per-scenario means over a set of runs. Percent reductions average only
/// the runs that had an intervention; their count is reported alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub scenario: String,
    pub runs: usize,
    pub delta_r_pct: Option<f64>,
    pub delta_r_count: usize,
    pub delta_h_pct: Option<f64>,
    pub delta_h_count: usize,
    pub min_clearance: Option<f64>,
    pub path_length: f64,
    pub mission_time: f64,
    pub goal_rate: f64,
}

fn mean(values: impl IntoIterator<Item = f64>) -> (Option<f64>, usize) {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v;
        n += 1;
    }
    ((n > 0).then(|| sum / n as f64), n)
}

pub fn compute_metrics(records: &[MissionRecord]) -> Result<MetricsSummary> {
    let first = records
        .first()
        .ok_or_else(|| Error::Metrics("no runs to aggregate".into()))?;
    if let Some(other) = records.iter().find(|r| r.scenario != first.scenario) {
        return Err(Error::Metrics(format!(
            "cannot aggregate scenarios {:?} and {:?} together",
            first.scenario, other.scenario
        )));
    }
    let n = records.len() as f64;
    let (delta_r_pct, delta_r_count) = mean(records.iter().filter_map(|r| r.delta_r_pct));
    let (delta_h_pct, delta_h_count) = mean(records.iter().filter_map(|r| r.delta_h_pct));
    let (min_clearance, _) = mean(records.iter().filter_map(|r| r.min_clearance));
    Ok(MetricsSummary {
        scenario: first.scenario.clone(),
        runs: records.len(),
        delta_r_pct,
        delta_r_count,
        delta_h_pct,
        delta_h_count,
        min_clearance,
        path_length: records.iter().map(|r| r.path_length).sum::<f64>() / n,
        mission_time: records.iter().map(|r| r.mission_time).sum::<f64>() / n,
        goal_rate: records.iter().filter(|r| r.goal_reached).count() as f64 / n,
    })
}

/// Groups records by scenario name (sorted) and summarises each group.
pub fn summarize_all(records: &[MissionRecord]) -> Result<Vec<MetricsSummary>> {
    let mut names: Vec<&str> = records.iter().map(|r| r.scenario.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    names
        .into_iter()
        .map(|name| {
            let group: Vec<MissionRecord> =
                records.iter().filter(|r| r.scenario == name).cloned().collect();
            compute_metrics(&group)
        })
        .collect()
}

pub fn write_summary_csv(summaries: &[MetricsSummary], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    for s in summaries {
        w.serialize(s)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_summary_json(summaries: &[MetricsSummary], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(summaries)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}
