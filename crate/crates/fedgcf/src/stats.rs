use std::fmt;

use fedgcf_core::Dataset;

/// Size summary of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub graphs: usize,
    pub classes: usize,
    pub class_counts: Vec<usize>,
    pub feature_dim: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub mean_nodes: f64,
    pub mean_edges: f64,
}

impl DatasetStats {
    pub fn of(dataset: &Dataset) -> Self {
        let graphs = dataset.graphs();
        let nodes = graphs.iter().map(|g| g.num_nodes());
        let n = graphs.len().max(1) as f64;
        Self {
            graphs: graphs.len(),
            classes: dataset.num_classes(),
            class_counts: dataset.class_counts(),
            feature_dim: dataset.feature_dim(),
            min_nodes: nodes.clone().min().unwrap_or(0),
            max_nodes: nodes.clone().max().unwrap_or(0),
            mean_nodes: nodes.sum::<usize>() as f64 / n,
            mean_edges: graphs.iter().map(|g| g.num_edges()).sum::<usize>() as f64 / n,
        }
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graphs        {}", self.graphs)?;
        writeln!(f, "classes       {}", self.classes)?;
        for (c, n) in self.class_counts.iter().enumerate() {
            writeln!(f, "  class {c:<5} {n}")?;
        }
        writeln!(f, "feature dim   {}", self.feature_dim)?;
        writeln!(
            f,
            "nodes         min {} / mean {:.2} / max {}",
            self.min_nodes, self.mean_nodes, self.max_nodes
        )?;
        write!(f, "edges         mean {:.2}", self.mean_edges)
    }
}
