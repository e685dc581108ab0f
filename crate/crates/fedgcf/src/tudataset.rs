//! Reader and writer for the TUDataset text layout.
//!
//! A dataset `DS` is a directory holding `DS_A.txt` (one `row, col` edge per
//! line over 1-based global node ids), `DS_graph_indicator.txt` (the 1-based
//! graph id of every node), `DS_graph_labels.txt` (one label per graph) and
//! optionally `DS_node_labels.txt` and `DS_node_attributes.txt`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fedgcf_core::{Dataset, Graph};

use crate::error::{Error, IoContext, Result};

/// A loaded dataset and how its raw values were mapped.
#[derive(Debug, Clone, PartialEq)]
pub struct TuDataset {
    pub dataset: Dataset,
    /// Raw graph label of each class index.
    pub class_values: Vec<i64>,
    /// Raw node label of each one-hot position.
    pub node_label_values: Vec<i64>,
    pub attribute_dim: usize,
    pub self_loops_dropped: usize,
}

fn file(dir: &Path, name: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{name}_{suffix}.txt"))
}

/// Non-empty lines with their 1-based line numbers.
fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path).at(path)?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.trim().to_owned()))
        .collect())
}

fn read_optional(path: &Path) -> Result<Option<Vec<(usize, String)>>> {
    if path.exists() {
        read_lines(path).map(Some)
    } else {
        Ok(None)
    }
}

fn parse<T: std::str::FromStr>(path: &Path, line: usize, field: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field.trim().parse().map_err(|e: T::Err| Error::Format {
        file: path.to_path_buf(),
        line,
        message: format!("{field:?}: {e}"),
    })
}

fn parse_ints(path: &Path, lines: &[(usize, String)]) -> Result<Vec<i64>> {
    lines.iter().map(|(n, l)| parse(path, *n, l)).collect()
}

/// Sorted distinct values and the index of every input value among them.
fn remap(values: &[i64]) -> (Vec<i64>, Vec<usize>) {
    let mut distinct = values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let index: BTreeMap<i64, usize> = distinct.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    (distinct, values.iter().map(|v| index[v]).collect())
}

/// Reads dataset `name` from `dir`.
///
/// Node features are the one-hot node label followed by the node
/// attributes; a dataset with neither gets the constant feature `1.0`.
/// Self-loops are dropped and counted.
pub fn load(dir: &Path, name: &str) -> Result<TuDataset> {
    let indicator_path = file(dir, name, "graph_indicator");
    let indicator = parse_ints(&indicator_path, &read_lines(&indicator_path)?)?;
    let num_nodes = indicator.len();
    let num_graphs = indicator.iter().copied().max().unwrap_or(0);
    if num_graphs < 1 || indicator.iter().any(|&g| g < 1) {
        return Err(Error::Integrity(format!(
            "{}: graph ids must be >= 1 and at least one node is required",
            indicator_path.display()
        )));
    }
    let num_graphs = num_graphs as usize;

    let mut sizes = vec![0usize; num_graphs];
    let mut local = Vec::with_capacity(num_nodes);
    for &g in &indicator {
        let g = g as usize - 1;
        local.push(sizes[g]);
        sizes[g] += 1;
    }
    if let Some(g) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Integrity(format!("graph {} has no nodes", g + 1)));
    }

    let labels_path = file(dir, name, "graph_labels");
    let raw_labels = parse_ints(&labels_path, &read_lines(&labels_path)?)?;
    if raw_labels.len() != num_graphs {
        return Err(Error::Integrity(format!(
            "{} graph labels for {num_graphs} graphs",
            raw_labels.len()
        )));
    }
    let (class_values, labels) = remap(&raw_labels);

    let node_labels_path = file(dir, name, "node_labels");
    let (node_label_values, node_onehot) = match read_optional(&node_labels_path)? {
        Some(lines) => {
            let raw = parse_ints(&node_labels_path, &lines)?;
            if raw.len() != num_nodes {
                return Err(Error::Integrity(format!("{} node labels for {num_nodes} nodes", raw.len())));
            }
            let (values, idx) = remap(&raw);
            (values, Some(idx))
        }
        None => (Vec::new(), None),
    };

    let attributes_path = file(dir, name, "node_attributes");
    let attributes = match read_optional(&attributes_path)? {
        Some(lines) => {
            if lines.len() != num_nodes {
                return Err(Error::Integrity(format!(
                    "{} attribute rows for {num_nodes} nodes",
                    lines.len()
                )));
            }
            let rows: Vec<Vec<f64>> = lines
                .iter()
                .map(|(n, l)| l.split(',').map(|f| parse(&attributes_path, *n, f)).collect())
                .collect::<Result<_>>()?;
            if let Some((n, _)) = lines.iter().zip(&rows).find(|(_, r)| r.len() != rows[0].len()) {
                return Err(Error::Format {
                    file: attributes_path,
                    line: n.0,
                    message: format!("expected {} attributes", rows[0].len()),
                });
            }
            Some(rows)
        }
        None => None,
    };
    let attribute_dim = attributes.as_ref().map_or(0, |r| r[0].len());
    let onehot_dim = node_label_values.len();
    let constant = onehot_dim == 0 && attribute_dim == 0;
    let feature_dim = if constant { 1 } else { onehot_dim + attribute_dim };

    let edges_path = file(dir, name, "A");
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_graphs];
    let mut self_loops_dropped = 0;
    for (n, l) in read_lines(&edges_path)? {
        let mut fields = l.split(',');
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Format {
                file: edges_path,
                line: n,
                message: "expected `row, col`".into(),
            });
        };
        let a: usize = parse(&edges_path, n, a)?;
        let b: usize = parse(&edges_path, n, b)?;
        if a < 1 || b < 1 || a > num_nodes || b > num_nodes {
            return Err(Error::Format {
                file: edges_path,
                line: n,
                message: format!("node id out of range 1..={num_nodes}"),
            });
        }
        let (ga, gb) = (indicator[a - 1], indicator[b - 1]);
        if ga != gb {
            return Err(Error::Integrity(format!("edge {a}-{b} joins graphs {ga} and {gb}")));
        }
        if a == b {
            self_loops_dropped += 1;
            continue;
        }
        edges[ga as usize - 1].push((local[a - 1], local[b - 1]));
    }

    let mut features: Vec<Vec<f64>> = sizes.iter().map(|&s| Vec::with_capacity(s * feature_dim)).collect();
    for v in 0..num_nodes {
        let row = &mut features[indicator[v] as usize - 1];
        if constant {
            row.push(1.0);
            continue;
        }
        if let Some(idx) = &node_onehot {
            row.extend((0..onehot_dim).map(|k| if k == idx[v] { 1.0 } else { 0.0 }));
        }
        if let Some(rows) = &attributes {
            row.extend_from_slice(&rows[v]);
        }
    }

    let graphs = sizes
        .iter()
        .zip(edges)
        .zip(features)
        .zip(&labels)
        .map(|(((&n, e), f), &y)| Graph::new(n, e, f, feature_dim, y))
        .collect::<fedgcf_core::Result<Vec<_>>>()?;
    let dataset = Dataset::new(graphs, class_values.len())?;
    Ok(TuDataset {
        dataset,
        class_values,
        node_label_values,
        attribute_dim,
        self_loops_dropped,
    })
}

/// Writes `dataset` as `name` into `dir`, features as node attributes and
/// class indices as graph labels. Every undirected edge is written in both
/// directions.
pub fn write(dataset: &Dataset, dir: &Path, name: &str) -> Result<()> {
    fs::create_dir_all(dir).at(dir)?;
    let mut a = String::new();
    let mut indicator = String::new();
    let mut labels = String::new();
    let mut attributes = String::new();
    let mut offset = 0;
    for (gi, g) in dataset.graphs().iter().enumerate() {
        for &(u, v) in g.edges() {
            writeln!(a, "{}, {}", offset + u + 1, offset + v + 1).unwrap();
            writeln!(a, "{}, {}", offset + v + 1, offset + u + 1).unwrap();
        }
        for u in 0..g.num_nodes() {
            writeln!(indicator, "{}", gi + 1).unwrap();
            let row: Vec<String> = g.feature(u).iter().map(f64::to_string).collect();
            writeln!(attributes, "{}", row.join(", ")).unwrap();
        }
        writeln!(labels, "{}", g.label()).unwrap();
        offset += g.num_nodes();
    }
    for (suffix, body) in [
        ("A", a),
        ("graph_indicator", indicator),
        ("graph_labels", labels),
        ("node_attributes", attributes),
    ] {
        let path = file(dir, name, suffix);
        fs::write(&path, body).at(&path)?;
    }
    Ok(())
}
