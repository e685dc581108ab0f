//! Federated rounds: local training, weighted aggregation, traffic
//! accounting and the method runners.

mod aggregate;
mod client;
mod ledger;
mod report;
mod runner;

pub use aggregate::aggregate;
pub use client::{local_train, ClientData, ClientState, TrainConfig, TrainOutcome};
pub use ledger::{CommLedger, RoundTraffic};
pub use report::{cluster_hash, BanditRecord, RoundRecord, RunReport};
pub use runner::{derive_seed, run, Method, SimConfig};
