//! Writing a [`RunReport`] to disk.
//!
//! * `metrics.csv`: `round,test_acc,comm_mb_cum,lambda,cluster_hash`, one row
//!   per round including round 0.
//! * `summary.json`: final and tail-mean accuracy, traffic, method, seed and
//!   the echoed configuration.
//! * `bandit.csv`: per-round bandit state, header only for methods without a
//!   bandit.
//! * `topology.csv`: cluster labels and common-model clients per round.
//!
//! Traffic is reported in megabytes of 10^6 bytes. Output bytes depend only
//! on the report and the configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use fedgcf_core::federated::RunReport;

use crate::config::RunConfig;
use crate::error::{IoContext, Result};

const BYTES_PER_MB: f64 = 1e6;

/// Width of the tail over which `mean_acc_last50` is taken.
pub const TAIL_ROUNDS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub final_acc: f64,
    pub mean_acc_last50: f64,
    pub total_comm_mb: f64,
    pub method: String,
    pub seed: u64,
    pub total_comm_bytes: u64,
    pub final_client_mean_acc: f64,
    pub rounds: usize,
    pub warnings: Vec<String>,
    pub config: RunConfig,
}

impl Summary {
    pub fn new(report: &RunReport, config: &RunConfig) -> Self {
        Self {
            final_acc: report.final_acc(),
            mean_acc_last50: report.mean_acc_last(TAIL_ROUNDS),
            total_comm_mb: report.total_bytes() as f64 / BYTES_PER_MB,
            method: report.method.name().to_owned(),
            seed: report.config.seed,
            total_comm_bytes: report.total_bytes(),
            final_client_mean_acc: report.rounds.last().map_or(0.0, |r| r.client_mean_acc),
            rounds: report.rounds.len() - 1,
            warnings: report.warnings.clone(),
            config: config.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub metrics: PathBuf,
    pub summary: PathBuf,
    pub bandit: PathBuf,
    pub topology: PathBuf,
}

impl ReportFiles {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            metrics: dir.join("metrics.csv"),
            summary: dir.join("summary.json"),
            bandit: dir.join("bandit.csv"),
            topology: dir.join("topology.csv"),
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn csv_bytes(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(w.into_inner().expect("in-memory writer"))
}

pub fn metrics_csv(report: &RunReport) -> Result<Vec<u8>> {
    let header = ["round", "test_acc", "comm_mb_cum", "lambda", "cluster_hash"]
        .map(String::from)
        .to_vec();
    let rows = report
        .rounds
        .iter()
        .map(|r| {
            vec![
                r.round.to_string(),
                r.test_acc.to_string(),
                (r.comm_bytes_cum as f64 / BYTES_PER_MB).to_string(),
                r.lambda.to_string(),
                format!("{:016x}", r.cluster_hash()),
            ]
        })
        .collect();
    csv_bytes(header, rows)
}

pub fn bandit_csv(report: &RunReport) -> Result<Vec<u8>> {
    let arms = &report.config.arms;
    let mut header: Vec<String> = ["round", "selected", "lambda", "test_acc"].map(String::from).to_vec();
    for field in ["reward", "count", "score"] {
        header.extend((0..arms.len()).map(|m| format!("{field}_{m}")));
    }
    let rows = report
        .rounds
        .iter()
        .filter_map(|r| r.bandit.as_ref().map(|b| (r, b)))
        .map(|(r, b)| {
            let mut row = vec![
                r.round.to_string(),
                b.selected.to_string(),
                r.lambda.to_string(),
                r.test_acc.to_string(),
            ];
            row.extend(b.rewards.iter().map(f64::to_string));
            row.extend(b.counts.iter().map(u64::to_string));
            row.extend(b.scores.iter().map(f64::to_string));
            row
        })
        .collect();
    csv_bytes(header, rows)
}

pub fn topology_csv(report: &RunReport) -> Result<Vec<u8>> {
    let header = ["round", "clusters", "common_clients"].map(String::from).to_vec();
    let rows = report
        .rounds
        .iter()
        .map(|r| vec![r.round.to_string(), join(&r.clusters), join(&r.common_clients)])
        .collect();
    csv_bytes(header, rows)
}

pub fn summary_json(report: &RunReport, config: &RunConfig) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(&Summary::new(report, config))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes all report files into `dir`, creating it if needed.
pub fn emit_report(report: &RunReport, config: &RunConfig, dir: &Path) -> Result<ReportFiles> {
    fs::create_dir_all(dir).at(dir)?;
    let files = ReportFiles::in_dir(dir);
    for (path, bytes) in [
        (&files.metrics, metrics_csv(report)?),
        (&files.summary, summary_json(report, config)?),
        (&files.bandit, bandit_csv(report)?),
        (&files.topology, topology_csv(report)?),
    ] {
        fs::write(path, bytes).at(path)?;
    }
    Ok(files)
}
