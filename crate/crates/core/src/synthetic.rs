//! Seeded synthetic graph-classification datasets.
//!
//! Every class has a backbone motif and a feature center. Classes that differ
//! only in motif are separable by topology alone; classes that differ only in
//! center are separable by mean node feature alone.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Motif {
    /// Cycle through all nodes.
    Ring,
    /// Simple path through all nodes.
    Chain,
    /// Node 0 joined to every other node.
    Star,
}

impl Motif {
    fn edges(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            Motif::Ring => (0..n).map(|u| (u, (u + 1) % n)).collect(),
            Motif::Chain => (1..n).map(|u| (u - 1, u)).collect(),
            Motif::Star => (1..n).map(|u| (0, u)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassSpec {
    pub motif: Motif,
    /// Mean node feature; empty means the zero vector.
    pub feature_center: Vec<f64>,
}

impl ClassSpec {
    pub fn new(motif: Motif, feature_center: Vec<f64>) -> Self {
        Self { motif, feature_center }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub classes: Vec<ClassSpec>,
    pub graphs_per_class: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub feature_dim: usize,
    /// Standard deviation of the Gaussian noise added to every feature.
    pub feature_noise: f64,
}

impl SyntheticSpec {
    /// Unit-vector center `e_axis` scaled by `scale`.
    pub fn axis(feature_dim: usize, axis: usize, scale: f64) -> Vec<f64> {
        (0..feature_dim).map(|i| if i == axis { scale } else { 0.0 }).collect()
    }

    /// Four classes crossing two motifs with two feature centers, so that
    /// neither topology nor features alone determine the label.
    pub fn mixed_signal(graphs_per_class: usize) -> Self {
        let dim = 4;
        Self {
            classes: alloc::vec![
                ClassSpec::new(Motif::Ring, Self::axis(dim, 0, 1.0)),
                ClassSpec::new(Motif::Chain, Self::axis(dim, 0, 1.0)),
                ClassSpec::new(Motif::Ring, Self::axis(dim, 1, 1.0)),
                ClassSpec::new(Motif::Chain, Self::axis(dim, 1, 1.0)),
            ],
            graphs_per_class,
            min_nodes: 6,
            max_nodes: 14,
            feature_dim: dim,
            feature_noise: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.len() < 2 {
            return Err(Error::Config(format!(
                "synthetic data needs at least 2 classes, got {}",
                self.classes.len()
            )));
        }
        if self.graphs_per_class == 0 || self.feature_dim == 0 {
            return Err(Error::Config("graphs_per_class and feature_dim must be >= 1".into()));
        }
        if self.min_nodes < 3 || self.min_nodes > self.max_nodes {
            return Err(Error::Config(format!(
                "node range [{}, {}] must satisfy 3 <= min <= max",
                self.min_nodes, self.max_nodes
            )));
        }
        if self.feature_noise.is_nan() || self.feature_noise < 0.0 {
            return Err(Error::Config("feature_noise must be >= 0".into()));
        }
        for (c, class) in self.classes.iter().enumerate() {
            if !class.feature_center.is_empty() && class.feature_center.len() != self.feature_dim {
                return Err(Error::Config(format!(
                    "class {c} center has {} entries, feature_dim is {}",
                    class.feature_center.len(),
                    self.feature_dim
                )));
            }
        }
        Ok(())
    }
}

/// Generates `graphs_per_class` graphs for every class, interleaved by class.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = Vec::with_capacity(spec.classes.len() * spec.graphs_per_class);
    for _ in 0..spec.graphs_per_class {
        for (label, class) in spec.classes.iter().enumerate() {
            let n = rng.random_range(spec.min_nodes..=spec.max_nodes);
            let mut features = Vec::with_capacity(n * spec.feature_dim);
            for _ in 0..n {
                for d in 0..spec.feature_dim {
                    let center = class.feature_center.get(d).copied().unwrap_or(0.0);
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    features.push(center + spec.feature_noise * noise);
                }
            }
            graphs.push(Graph::new(n, class.motif.edges(n), features, spec.feature_dim, label)?);
        }
    }
    Dataset::new(graphs, spec.classes.len())
}
