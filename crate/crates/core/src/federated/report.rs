use alloc::string::String;
use alloc::vec::Vec;

use super::ledger::CommLedger;
use crate::gnn::DualBranchModel;
use super::runner::{Method, SimConfig};

/// Bandit internals after the round's reward update.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditRecord {
    pub selected: usize,
    pub rewards: Vec<f64>,
    pub counts: Vec<u64>,
    /// Scores each arm would get if selection ran at this round.
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    /// Accuracy over the pooled test graphs of all clients.
    pub test_acc: f64,
    /// Mean of the per-client test accuracies.
    pub client_mean_acc: f64,
    pub comm_bytes_cum: u64,
    pub lambda: f64,
    /// Cluster of every client.
    pub clusters: Vec<usize>,
    /// Clients whose node models formed the common node model.
    pub common_clients: Vec<usize>,
    pub bandit: Option<BanditRecord>,
}

impl RoundRecord {
    pub fn cluster_hash(&self) -> u64 {
        cluster_hash(&self.clusters)
    }
}

/// FNV-1a over the little-endian cluster labels.
pub fn cluster_hash(labels: &[usize]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &l in labels {
        for b in (l as u64).to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Everything a run produced, one record per round starting at round 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub method: Method,
    pub config: SimConfig,
    pub rounds: Vec<RoundRecord>,
    pub ledger: CommLedger,
    pub warnings: Vec<String>,
    /// The model each client holds after the last round.
    pub final_models: Vec<DualBranchModel>,
}

impl RunReport {
    pub fn final_acc(&self) -> f64 {
        self.rounds.last().map_or(0.0, |r| r.test_acc)
    }

    /// Mean test accuracy over the last `n` rounds, round 0 included only if
    /// the run is that short.
    pub fn mean_acc_last(&self, n: usize) -> f64 {
        let tail = &self.rounds[self.rounds.len().saturating_sub(n)..];
        if tail.is_empty() {
            return 0.0;
        }
        tail.iter().map(|r| r.test_acc).sum::<f64>() / tail.len() as f64
    }

    pub fn total_bytes(&self) -> u64 {
        self.ledger.total_bytes()
    }
}
