//! Labeled graph samples and datasets.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Width of the structural vector before a dataset is annotated.
pub const DEFAULT_STRUCT_DIM: usize = 32;

/// One labeled, undirected graph with per-node raw features and structural vectors.
///
/// Edges are stored once per undirected pair as `(u, v)` with `u < v`, sorted.
/// Adjacency is kept in compressed row form for message passing.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    feature_dim: usize,
    features: Vec<f64>,
    struct_dim: usize,
    node_struct: Vec<f64>,
    label: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an edge list and a row-major `num_nodes × feature_dim`
    /// feature matrix. Edge direction and duplicates are normalized away.
    pub fn new<I>(
        num_nodes: usize,
        edges: I,
        features: Vec<f64>,
        feature_dim: usize,
        label: usize,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {num_nodes} nodes"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            normalized.push(if u < v { (u, v) } else { (v, u) });
        }
        normalized.sort_unstable();
        normalized.dedup();

        if features.len() != num_nodes * feature_dim {
            return Err(Error::InvalidGraph(format!(
                "feature matrix has {} entries, expected {} x {}",
                features.len(),
                num_nodes,
                feature_dim
            )));
        }

        let (offsets, neighbors) = build_csr(num_nodes, &normalized);
        Ok(Self {
            num_nodes,
            edges: normalized,
            feature_dim,
            features,
            struct_dim: DEFAULT_STRUCT_DIM,
            node_struct: vec![0.0; num_nodes * DEFAULT_STRUCT_DIM],
            label,
            offsets,
            neighbors,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Undirected edges, each once with the smaller endpoint first.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `u` in ascending order.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn feature(&self, u: usize) -> &[f64] {
        &self.features[u * self.feature_dim..(u + 1) * self.feature_dim]
    }

    /// Row-major `num_nodes × feature_dim` feature matrix.
    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn struct_dim(&self) -> usize {
        self.struct_dim
    }

    pub fn node_struct(&self, u: usize) -> &[f64] {
        &self.node_struct[u * self.struct_dim..(u + 1) * self.struct_dim]
    }

    /// Row-major `num_nodes × struct_dim` structural matrix.
    pub fn structs(&self) -> &[f64] {
        &self.node_struct
    }

    /// Replaces the structural vectors with a row-major `num_nodes × dim` matrix.
    pub fn set_structs(&mut self, dim: usize, values: Vec<f64>) -> Result<()> {
        if values.len() != self.num_nodes * dim {
            return Err(Error::InvalidGraph(format!(
                "structural matrix has {} entries, expected {} x {dim}",
                values.len(),
                self.num_nodes
            )));
        }
        self.struct_dim = dim;
        self.node_struct = values;
        Ok(())
    }

    /// Relabels nodes so that old node `u` becomes `perm[u]`.
    ///
    /// Features and structural vectors travel with their nodes.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_nodes;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || core::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidGraph(format!("not a permutation of {n} nodes")));
        }
        let mut features = vec![0.0; self.features.len()];
        let mut structs = vec![0.0; self.node_struct.len()];
        for (u, &p) in perm.iter().enumerate() {
            features[p * self.feature_dim..(p + 1) * self.feature_dim].copy_from_slice(self.feature(u));
            structs[p * self.struct_dim..(p + 1) * self.struct_dim].copy_from_slice(self.node_struct(u));
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v]));
        let mut g = Graph::new(n, edges, features, self.feature_dim, self.label)?;
        g.set_structs(self.struct_dim, structs)?;
        Ok(g)
    }
}

fn build_csr(num_nodes: usize, edges: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let mut degree = vec![0usize; num_nodes];
    for &(u, v) in edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let mut offsets = Vec::with_capacity(num_nodes + 1);
    offsets.push(0);
    for d in &degree {
        offsets.push(offsets.last().copied().unwrap_or(0) + d);
    }
    let mut cursor = offsets.clone();
    let mut neighbors = vec![0usize; 2 * edges.len()];
    // edges are sorted, so each neighbor list comes out ascending
    for &(u, v) in edges {
        neighbors[cursor[u]] = v;
        cursor[u] += 1;
    }
    for &(u, v) in edges {
        neighbors[cursor[v]] = u;
        cursor[v] += 1;
    }
    for u in 0..num_nodes {
        neighbors[offsets[u]..offsets[u + 1]].sort_unstable();
    }
    (offsets, neighbors)
}

/// A collection of labeled graphs sharing feature and structural widths.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    graphs: Vec<Graph>,
    num_classes: usize,
    feature_dim: usize,
}

impl Dataset {
    pub fn new(graphs: Vec<Graph>, num_classes: usize) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::InvalidGraph(format!(
                "dataset needs at least 2 classes, got {num_classes}"
            )));
        }
        let feature_dim = graphs.first().map_or(0, Graph::feature_dim);
        let struct_dim = graphs.first().map_or(0, Graph::struct_dim);
        let mut per_class = vec![0usize; num_classes];
        for (i, g) in graphs.iter().enumerate() {
            if g.label() >= num_classes {
                return Err(Error::InvalidGraph(format!(
                    "graph {i} has label {} outside [0, {num_classes})",
                    g.label()
                )));
            }
            if g.feature_dim() != feature_dim || g.struct_dim() != struct_dim {
                return Err(Error::InvalidGraph(format!("graph {i} has mismatched node vector widths")));
            }
            per_class[g.label()] += 1;
        }
        if let Some(empty) = per_class.iter().position(|&c| c == 0) {
            return Err(Error::InvalidGraph(format!("class {empty} has no graphs")));
        }
        Ok(Self {
            graphs,
            num_classes,
            feature_dim,
        })
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn into_graphs(self) -> Vec<Graph> {
        self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn struct_dim(&self) -> usize {
        self.graphs.first().map_or(DEFAULT_STRUCT_DIM, Graph::struct_dim)
    }

    /// Number of graphs carrying each label.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for g in &self.graphs {
            counts[g.label()] += 1;
        }
        counts
    }
}
