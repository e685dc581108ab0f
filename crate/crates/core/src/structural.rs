//! Per-node structural vectors: random-walk return probabilities and a clamped
//! degree one-hot.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};

/// Widths of the two halves of the structural vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructConfig {
    pub rw_dim: usize,
    pub deg_dim: usize,
}

impl Default for StructConfig {
    fn default() -> Self {
        Self { rw_dim: 16, deg_dim: 16 }
    }
}

impl StructConfig {
    pub fn dim(&self) -> usize {
        self.rw_dim + self.deg_dim
    }

    pub fn validate(&self) -> Result<()> {
        if self.rw_dim == 0 || self.deg_dim == 0 {
            return Err(Error::Config("structural encoding widths must be >= 1".into()));
        }
        Ok(())
    }
}

/// Iterates the rows `e_u P^1, e_u P^2, ...` of the random-walk transition
/// matrix `P = D^-1 A` started from node `u`. Isolated nodes yield zero rows.
pub struct WalkDistribution<'g> {
    graph: &'g Graph,
    row: Vec<f64>,
    next: Vec<f64>,
}

impl<'g> WalkDistribution<'g> {
    pub fn new(graph: &'g Graph, start: usize) -> Self {
        let mut row = vec![0.0; graph.num_nodes()];
        row[start] = 1.0;
        Self {
            graph,
            next: vec![0.0; row.len()],
            row,
        }
    }
}

impl Iterator for WalkDistribution<'_> {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        self.next.iter_mut().for_each(|x| *x = 0.0);
        for (w, &mass) in self.row.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let nbrs = self.graph.neighbors(w);
            if nbrs.is_empty() {
                continue;
            }
            let share = mass / nbrs.len() as f64;
            for &v in nbrs {
                self.next[v] += share;
            }
        }
        core::mem::swap(&mut self.row, &mut self.next);
        Some(self.row.clone())
    }
}

/// Return probabilities `(P^(k+1))_uu` for `k = 0..rw_dim`, one row per node.
pub fn random_walk_encoding(graph: &Graph, rw_dim: usize) -> Vec<Vec<f64>> {
    (0..graph.num_nodes())
        .map(|u| WalkDistribution::new(graph, u).take(rw_dim).map(|row| row[u].min(1.0)).collect())
        .collect()
}

/// One-hot of `min(degree, deg_dim - 1)` per node.
pub fn degree_encoding(graph: &Graph, deg_dim: usize) -> Vec<Vec<f64>> {
    (0..graph.num_nodes())
        .map(|u| {
            let mut v = vec![0.0; deg_dim];
            v[graph.degree(u).min(deg_dim - 1)] = 1.0;
            v
        })
        .collect()
}

/// Concatenated `[random walk | degree]` matrix for one graph, row-major.
pub fn encode_graph(graph: &Graph, config: &StructConfig) -> Vec<f64> {
    let rw = random_walk_encoding(graph, config.rw_dim);
    let deg = degree_encoding(graph, config.deg_dim);
    rw.into_iter()
        .zip(deg)
        .flat_map(|(mut r, d)| {
            r.extend(d);
            r
        })
        .collect()
}

/// Fills every node's structural vector. Re-annotating gives the same result.
pub fn annotate(dataset: Dataset, config: &StructConfig) -> Result<Dataset> {
    config.validate()?;
    let num_classes = dataset.num_classes();
    let mut graphs = dataset.into_graphs();
    for g in &mut graphs {
        let values = encode_graph(g, config);
        g.set_structs(config.dim(), values)?;
    }
    Dataset::new(graphs, num_classes)
}
