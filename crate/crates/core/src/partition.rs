//! Splitting a dataset across clients, IID or with a dominant class per client.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Dataset;

/// Smallest per-client share the partitioner accepts.
pub const MIN_GRAPHS_PER_CLIENT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartitionMode {
    Iid,
    /// Fraction of each client's graphs drawn from one class, chosen at
    /// random among the classes that can still supply it.
    NonIid(f64),
}

/// Train/validation/test indices of one client, 8:1:1 by count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClientSplit {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClientPartition {
    /// Dataset indices held by each client, disjoint across clients.
    pub assignments: Vec<Vec<usize>>,
    pub splits: Vec<ClientSplit>,
    /// Supply shortfalls hit while drawing dominant classes.
    pub warnings: Vec<String>,
}

impl ClientPartition {
    pub fn num_clients(&self) -> usize {
        self.assignments.len()
    }

    /// Largest single-class share of each client's graphs.
    pub fn dominant_fractions(&self, dataset: &Dataset) -> Vec<f64> {
        self.assignments
            .iter()
            .map(|idx| {
                let mut counts = alloc::vec![0usize; dataset.num_classes()];
                for &i in idx {
                    counts[dataset.graphs()[i].label()] += 1;
                }
                counts.iter().copied().max().unwrap_or(0) as f64 / idx.len().max(1) as f64
            })
            .collect()
    }
}

/// `ceil(frac * k)` robust to representation error in `frac`.
pub fn dominant_quota(frac: f64, k: usize) -> usize {
    let raw = frac * k as f64;
    let rounded = libm::round(raw);
    if libm::fabs(raw - rounded) < 1e-9 {
        rounded as usize
    } else {
        libm::ceil(raw) as usize
    }
}

/// Split `assignment` 8:1:1; validation and test get the floor, train the rest.
pub fn split_8_1_1(assignment: &[usize]) -> ClientSplit {
    let tenth = assignment.len() / 10;
    let n_train = assignment.len() - 2 * tenth;
    ClientSplit {
        train: assignment[..n_train].to_vec(),
        val: assignment[n_train..n_train + tenth].to_vec(),
        test: assignment[n_train + tenth..].to_vec(),
    }
}

/// Per-class pools of unassigned graph indices.
struct Pools(Vec<Vec<usize>>);

impl Pools {
    fn total(&self) -> usize {
        self.0.iter().map(Vec::len).sum()
    }

    /// Removes one index uniformly at random from all remaining graphs.
    fn draw_any(&mut self, rng: &mut ChaCha8Rng) -> Option<usize> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let mut j = rng.random_range(0..total);
        for pool in &mut self.0 {
            if j < pool.len() {
                return Some(pool.swap_remove(j));
            }
            j -= pool.len();
        }
        None
    }

    /// Class with the most remaining graphs, lowest index on ties.
    fn most_available(&self) -> usize {
        let mut best = 0;
        for (c, p) in self.0.iter().enumerate() {
            if p.len() > self.0[best].len() {
                best = c;
            }
        }
        best
    }
}

/// Assigns `floor(|D| / N)` graphs to each of `num_clients` clients and
/// splits each client's share 8:1:1.
pub fn partition(dataset: &Dataset, num_clients: usize, mode: PartitionMode, seed: u64) -> Result<ClientPartition> {
    if num_clients < 2 {
        return Err(Error::Config(format!("need at least 2 clients, got {num_clients}")));
    }
    let per_client = dataset.len() / num_clients;
    if per_client < MIN_GRAPHS_PER_CLIENT {
        return Err(Error::Config(format!(
            "{} graphs over {num_clients} clients leaves {per_client} each, need >= {MIN_GRAPHS_PER_CLIENT}",
            dataset.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut warnings = Vec::new();

    let mut assignments: Vec<Vec<usize>> = match mode {
        PartitionMode::Iid => {
            let mut all: Vec<usize> = (0..dataset.len()).collect();
            all.shuffle(&mut rng);
            all.chunks_exact(per_client).take(num_clients).map(<[usize]>::to_vec).collect()
        }
        PartitionMode::NonIid(frac) => {
            if !(frac > 0.0 && frac <= 1.0) {
                return Err(Error::Config(format!("non-IID fraction {frac} outside (0, 1]")));
            }
            let mut pools = Pools(alloc::vec![Vec::new(); dataset.num_classes()]);
            for (i, g) in dataset.graphs().iter().enumerate() {
                pools.0[g.label()].push(i);
            }
            for pool in &mut pools.0 {
                pool.shuffle(&mut rng);
            }
            let quota = dominant_quota(frac, per_client);
            // dominant shares are reserved for every client before any
            // filler is drawn, so filler never eats into a later quota
            let mut out = Vec::with_capacity(num_clients);
            for client in 0..num_clients {
                let feasible: Vec<usize> = (0..dataset.num_classes())
                    .filter(|&c| pools.0[c].len() >= quota)
                    .collect();
                let dominant = if feasible.is_empty() {
                    let fallback = pools.most_available();
                    warnings.push(format!(
                        "client {client}: no class has {quota} graphs left; using class {fallback} with {}",
                        pools.0[fallback].len()
                    ));
                    fallback
                } else {
                    feasible[rng.random_range(0..feasible.len())]
                };
                let take = quota.min(pools.0[dominant].len());
                let at = pools.0[dominant].len() - take;
                out.push(pools.0[dominant].split_off(at));
            }
            for mine in &mut out {
                while mine.len() < per_client {
                    match pools.draw_any(&mut rng) {
                        Some(i) => mine.push(i),
                        None => break,
                    }
                }
            }
            out
        }
    };

    let splits = assignments
        .iter_mut()
        .map(|a| {
            a.shuffle(&mut rng);
            split_8_1_1(a)
        })
        .collect();
    Ok(ClientPartition {
        assignments,
        splits,
        warnings,
    })
}
