//! Two-branch models whose logits are mixed by a combination ratio.

use alloc::format;
use alloc::vec::Vec;

use super::model::{backward, check_params, cross_entropy, forward, forward_trace, ModelSpec};
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Architectures of the node (raw feature) and structural branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchSpecs {
    pub node: ModelSpec,
    pub structure: ModelSpec,
}

impl BranchSpecs {
    pub fn new(node: ModelSpec, structure: ModelSpec) -> Self {
        Self { node, structure }
    }
}

/// A node-feature model and a structural model fused at the logit level.
///
/// `ratio` is the weight on the structural branch.
#[derive(Debug, Clone, PartialEq)]
pub struct DualBranchModel {
    pub node_branch: ModelParams,
    pub struct_branch: ModelParams,
    pub ratio: f64,
}

impl DualBranchModel {
    pub fn new(node_branch: ModelParams, struct_branch: ModelParams, ratio: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&ratio) {
            return Err(Error::Contract(format!("combination ratio {ratio} outside [0, 1]")));
        }
        Ok(Self {
            node_branch,
            struct_branch,
            ratio,
        })
    }

    fn check(&self, specs: &BranchSpecs) -> Result<()> {
        check_params(&self.node_branch, &specs.node)?;
        check_params(&self.struct_branch, &specs.structure)
    }
}

/// How local training distributes the loss over the two branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchTraining {
    /// One cross-entropy on the fused logits, back-propagated through both branches.
    #[default]
    Joint,
    /// Each branch minimizes its own cross-entropy.
    Independent,
}

/// `λ · struct_logits + (1 − λ) · node_logits`.
pub fn mix_logits(ratio: f64, structural: &[f64], node: &[f64]) -> Vec<f64> {
    structural
        .iter()
        .zip(node)
        .map(|(s, n)| ratio * s + (1.0 - ratio) * n)
        .collect()
}

/// Fused class logits for one graph.
///
/// At `λ = 1` and `λ = 0` only the active branch runs and its logits are
/// returned unchanged.
pub fn fused_predict(model: &DualBranchModel, specs: &BranchSpecs, graph: &Graph) -> Result<Vec<f64>> {
    if model.ratio == 1.0 {
        return forward(&model.struct_branch, &specs.structure, graph);
    }
    if model.ratio == 0.0 {
        return forward(&model.node_branch, &specs.node, graph);
    }
    let s = forward(&model.struct_branch, &specs.structure, graph)?;
    let n = forward(&model.node_branch, &specs.node, graph)?;
    Ok(mix_logits(model.ratio, &s, &n))
}

/// Index of the largest logit; ties go to the lowest class.
pub fn argmax(logits: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in logits.iter().enumerate().skip(1) {
        if v > logits[best] {
            best = i;
        }
    }
    best
}

/// Number of graphs the fused model classifies correctly.
pub fn count_correct<'g, I>(model: &DualBranchModel, specs: &BranchSpecs, graphs: I) -> Result<usize>
where
    I: IntoIterator<Item = &'g Graph>,
{
    let mut correct = 0;
    for g in graphs {
        if argmax(&fused_predict(model, specs, g)?) == g.label() {
            correct += 1;
        }
    }
    Ok(correct)
}

/// Fraction of `graphs` classified correctly.
pub fn evaluate(model: &DualBranchModel, specs: &BranchSpecs, graphs: &[Graph]) -> Result<f64> {
    if graphs.is_empty() {
        return Err(Error::Contract("evaluation over an empty graph set".into()));
    }
    Ok(count_correct(model, specs, graphs)? as f64 / graphs.len() as f64)
}

/// Loss and per-branch gradients of a two-branch model over a batch.
#[derive(Debug, Clone)]
pub struct FusedGradient {
    pub loss: f64,
    pub node: ModelParams,
    pub structure: ModelParams,
}

/// Mean cross-entropy over `batch` and gradients for both branches.
///
/// Branches with zero weight in the fused output get a zero gradient and are
/// not evaluated in joint mode.
pub fn fused_loss_and_grad(
    model: &DualBranchModel,
    specs: &BranchSpecs,
    batch: &[&Graph],
    mode: BranchTraining,
) -> Result<FusedGradient> {
    model.check(specs)?;
    if batch.is_empty() {
        return Err(Error::Contract("loss over an empty batch".into()));
    }
    let lambda = model.ratio;
    let use_struct = lambda > 0.0;
    let use_node = lambda < 1.0;
    let scale = 1.0 / batch.len() as f64;
    let mut grad_node = model.node_branch.zeros_like();
    let mut grad_struct = model.struct_branch.zeros_like();
    let mut total = 0.0;

    for (i, g) in batch.iter().enumerate() {
        let st = if use_struct {
            Some(forward_trace(&model.struct_branch, &specs.structure, g)?)
        } else {
            None
        };
        let nt = if use_node {
            Some(forward_trace(&model.node_branch, &specs.node, g)?)
        } else {
            None
        };
        let (loss, d_struct, d_node) = match mode {
            BranchTraining::Joint => {
                let logits = match (&st, &nt) {
                    (Some(s), Some(n)) => mix_logits(lambda, &s.logits, &n.logits),
                    (Some(s), None) => s.logits.clone(),
                    (None, Some(n)) => n.logits.clone(),
                    (None, None) => unreachable!("ratio lies in [0, 1]"),
                };
                let (loss, d) = cross_entropy(&logits, g.label());
                let ds: Vec<f64> = d.iter().map(|x| x * lambda * scale).collect();
                let dn: Vec<f64> = d.iter().map(|x| x * (1.0 - lambda) * scale).collect();
                (loss, ds, dn)
            }
            BranchTraining::Independent => {
                let mut loss = 0.0;
                let mut ds = Vec::new();
                let mut dn = Vec::new();
                if let Some(s) = &st {
                    let (l, d) = cross_entropy(&s.logits, g.label());
                    loss += l;
                    ds = d.iter().map(|x| x * scale).collect();
                }
                if let Some(n) = &nt {
                    let (l, d) = cross_entropy(&n.logits, g.label());
                    loss += l;
                    dn = d.iter().map(|x| x * scale).collect();
                }
                (loss, ds, dn)
            }
        };
        if !loss.is_finite() {
            return Err(Error::Numeric {
                graph_index: i,
                value: loss,
            });
        }
        total += loss;
        if let Some(s) = &st {
            backward(&model.struct_branch, &specs.structure, g, s, &d_struct, grad_struct.values_mut());
        }
        if let Some(n) = &nt {
            backward(&model.node_branch, &specs.node, g, n, &d_node, grad_node.values_mut());
        }
    }
    Ok(FusedGradient {
        loss: total * scale,
        node: grad_node,
        structure: grad_struct,
    })
}
