//! Core of a single-process federated graph learning simulator.
//!
//! Clients hold labeled graphs. Each trains a node-feature GCN and a
//! structural GIN; the server clusters clients by their structural models,
//! picks a common node model from clients on the longest shortest paths of a
//! similarity topology, and a UCB bandit chooses the ratio at which the two
//! are fused. FedAvg and purely local training are provided as baselines.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod federated;
pub mod gcf;
pub mod gnn;
pub mod graph;
pub mod partition;
pub mod pce;
pub mod structural;
pub mod synthetic;

pub use error::{Error, Result};
pub use graph::{Dataset, Graph};
