//! GCN and GIN message-passing stacks with mean readout and a linear head.
//!
//! Layer `l` computes `H' = ReLU(M H W^T + b)` where the propagation operator
//! `M` is the symmetrically normalized adjacency with self-loops for GCN and
//! `A + I` (GIN with a fixed epsilon of zero) for GIN. Both operators are
//! symmetric, so the backward pass reuses the forward propagation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::params::{Manifest, ModelParams, ParamShape};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arch {
    Gcn,
    Gin,
}

/// Which per-node vectors a model reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeInput {
    /// Raw node features `x_u`.
    Features,
    /// Structural vectors `s_u`.
    Structure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSpec {
    pub arch: Arch,
    pub input: NodeInput,
    pub num_layers: usize,
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub num_classes: usize,
}

pub const DEFAULT_LAYERS: usize = 3;
pub const DEFAULT_HIDDEN: usize = 64;

impl ModelSpec {
    /// Three-layer GCN over raw node features.
    pub fn node_branch(feature_dim: usize, num_classes: usize) -> Self {
        Self {
            arch: Arch::Gcn,
            input: NodeInput::Features,
            num_layers: DEFAULT_LAYERS,
            input_dim: feature_dim,
            hidden_dim: DEFAULT_HIDDEN,
            num_classes,
        }
    }

    /// Three-layer GIN over structural vectors.
    pub fn struct_branch(struct_dim: usize, num_classes: usize) -> Self {
        Self {
            arch: Arch::Gin,
            input: NodeInput::Structure,
            num_layers: DEFAULT_LAYERS,
            input_dim: struct_dim,
            hidden_dim: DEFAULT_HIDDEN,
            num_classes,
        }
    }

    pub fn with_hidden(mut self, hidden_dim: usize) -> Self {
        self.hidden_dim = hidden_dim;
        self
    }

    pub fn with_layers(mut self, num_layers: usize) -> Self {
        self.num_layers = num_layers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_layers == 0 || self.input_dim == 0 || self.hidden_dim == 0 || self.num_classes == 0 {
            return Err(Error::Config(format!("model dimensions must be >= 1: {self:?}")));
        }
        Ok(())
    }

    fn layer_dims(&self, l: usize) -> (usize, usize) {
        let input = if l == 0 { self.input_dim } else { self.hidden_dim };
        (input, self.hidden_dim)
    }

    pub fn manifest(&self) -> Manifest {
        let mut entries = Vec::with_capacity(2 * self.num_layers + 2);
        for l in 0..self.num_layers {
            let (i, o) = self.layer_dims(l);
            entries.push(ParamShape::new(format!("layer{l}.weight"), vec![o, i]));
            entries.push(ParamShape::new(format!("layer{l}.bias"), vec![o]));
        }
        entries.push(ParamShape::new("head.weight", vec![self.num_classes, self.hidden_dim]));
        entries.push(ParamShape::new("head.bias", vec![self.num_classes]));
        Manifest::new(entries)
    }

    pub fn num_params(&self) -> usize {
        self.manifest().num_params()
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init<R: Rng + ?Sized>(&self, rng: &mut R) -> ModelParams {
        let manifest = self.manifest();
        let mut params = ModelParams::zeros(manifest.clone());
        let offsets = manifest.offsets();
        for (entry, &off) in manifest.entries().iter().zip(&offsets) {
            if entry.shape.len() != 2 {
                continue;
            }
            let (fan_out, fan_in) = (entry.shape[0], entry.shape[1]);
            let limit = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
            for w in &mut params.values_mut()[off..off + entry.size()] {
                *w = rng.random_range(-limit..limit);
            }
        }
        params
    }

    fn node_inputs<'g>(&self, graph: &'g Graph) -> Result<&'g [f64]> {
        let (dim, values) = match self.input {
            NodeInput::Features => (graph.feature_dim(), graph.features()),
            NodeInput::Structure => (graph.struct_dim(), graph.structs()),
        };
        if dim != self.input_dim {
            return Err(Error::Contract(format!(
                "layer0 expects input width {}, graph provides {dim} ({:?})",
                self.input_dim, self.input
            )));
        }
        Ok(values)
    }
}

/// Borrowed weight/bias slices for one linear map.
struct Linear<'p> {
    weight: &'p [f64],
    bias: &'p [f64],
    in_dim: usize,
    out_dim: usize,
}

/// Offsets of each layer's weight and bias inside the flat vector.
#[derive(Debug, Clone, Copy)]
struct LayerSlot {
    weight: usize,
    bias: usize,
    in_dim: usize,
    out_dim: usize,
}

fn slots(spec: &ModelSpec) -> Vec<LayerSlot> {
    let mut out = Vec::with_capacity(spec.num_layers + 1);
    let mut at = 0;
    for l in 0..=spec.num_layers {
        let (in_dim, out_dim) = if l < spec.num_layers {
            spec.layer_dims(l)
        } else {
            (spec.hidden_dim, spec.num_classes)
        };
        out.push(LayerSlot {
            weight: at,
            bias: at + in_dim * out_dim,
            in_dim,
            out_dim,
        });
        at += in_dim * out_dim + out_dim;
    }
    out
}

impl LayerSlot {
    fn view<'p>(&self, values: &'p [f64]) -> Linear<'p> {
        Linear {
            weight: &values[self.weight..self.bias],
            bias: &values[self.bias..self.bias + self.out_dim],
            in_dim: self.in_dim,
            out_dim: self.out_dim,
        }
    }
}

impl Linear<'_> {
    /// `rows × in` → `rows × out`.
    fn apply(&self, x: &[f64], rows: usize) -> Vec<f64> {
        let mut z = vec![0.0; rows * self.out_dim];
        for r in 0..rows {
            let xr = &x[r * self.in_dim..(r + 1) * self.in_dim];
            for (o, zo) in z[r * self.out_dim..(r + 1) * self.out_dim].iter_mut().enumerate() {
                let wo = &self.weight[o * self.in_dim..(o + 1) * self.in_dim];
                *zo = self.bias[o] + dot(xr, wo);
            }
        }
        z
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Applies the layer's propagation operator to a `n × dim` node matrix.
fn propagate(arch: Arch, graph: &Graph, h: &[f64], dim: usize) -> Vec<f64> {
    let n = graph.num_nodes();
    let mut out = vec![0.0; n * dim];
    match arch {
        Arch::Gcn => {
            let inv_sqrt: Vec<f64> = (0..n)
                .map(|u| 1.0 / libm::sqrt((graph.degree(u) + 1) as f64))
                .collect();
            for u in 0..n {
                let row = &mut out[u * dim..(u + 1) * dim];
                let self_w = inv_sqrt[u] * inv_sqrt[u];
                for (o, x) in row.iter_mut().zip(&h[u * dim..(u + 1) * dim]) {
                    *o = self_w * x;
                }
                for &v in graph.neighbors(u) {
                    let w = inv_sqrt[u] * inv_sqrt[v];
                    for (o, x) in row.iter_mut().zip(&h[v * dim..(v + 1) * dim]) {
                        *o += w * x;
                    }
                }
            }
        }
        Arch::Gin => {
            for u in 0..n {
                let row = &mut out[u * dim..(u + 1) * dim];
                row.copy_from_slice(&h[u * dim..(u + 1) * dim]);
                for &v in graph.neighbors(u) {
                    for (o, x) in row.iter_mut().zip(&h[v * dim..(v + 1) * dim]) {
                        *o += x;
                    }
                }
            }
        }
    }
    out
}

/// Intermediate values kept for the backward pass.
pub(crate) struct Trace {
    /// Propagated layer inputs `M H^l`, one per layer.
    propagated: Vec<Vec<f64>>,
    /// Pre-activations `Z^l`, one per layer.
    pre_act: Vec<Vec<f64>>,
    readout: Vec<f64>,
    pub(crate) logits: Vec<f64>,
}

pub(crate) fn check_params(params: &ModelParams, spec: &ModelSpec) -> Result<()> {
    spec.validate()?;
    if params.manifest() != &spec.manifest() {
        return Err(Error::Contract("parameters do not match the model spec".into()));
    }
    Ok(())
}

pub(crate) fn forward_trace(params: &ModelParams, spec: &ModelSpec, graph: &Graph) -> Result<Trace> {
    let input = spec.node_inputs(graph)?;
    let values = params.values();
    let slots = slots(spec);
    let n = graph.num_nodes();

    let mut h = input.to_vec();
    let mut propagated = Vec::with_capacity(spec.num_layers);
    let mut pre_act = Vec::with_capacity(spec.num_layers);
    for slot in &slots[..spec.num_layers] {
        let x = propagate(spec.arch, graph, &h, slot.in_dim);
        let z = slot.view(values).apply(&x, n);
        h = z.iter().map(|&v| v.max(0.0)).collect();
        propagated.push(x);
        pre_act.push(z);
    }

    let mut readout = vec![0.0; spec.hidden_dim];
    if n > 0 {
        for row in h.chunks_exact(spec.hidden_dim) {
            for (r, x) in readout.iter_mut().zip(row) {
                *r += x;
            }
        }
        let inv = 1.0 / n as f64;
        readout.iter_mut().for_each(|r| *r *= inv);
    }
    let logits = slots[spec.num_layers].view(values).apply(&readout, 1);
    Ok(Trace {
        propagated,
        pre_act,
        readout,
        logits,
    })
}

/// Class logits for one graph.
pub fn forward(params: &ModelParams, spec: &ModelSpec, graph: &Graph) -> Result<Vec<f64>> {
    check_params(params, spec)?;
    Ok(forward_trace(params, spec, graph)?.logits)
}

/// Accumulates `d loss / d params` into `grad` given `d loss / d logits`.
pub(crate) fn backward(
    params: &ModelParams,
    spec: &ModelSpec,
    graph: &Graph,
    trace: &Trace,
    d_logits: &[f64],
    grad: &mut [f64],
) {
    let values = params.values();
    let slots = slots(spec);
    let n = graph.num_nodes();
    let hd = spec.hidden_dim;

    let head = slots[spec.num_layers];
    let head_w = &values[head.weight..head.bias];
    let mut d_readout = vec![0.0; hd];
    for (c, &dl) in d_logits.iter().enumerate() {
        grad[head.bias + c] += dl;
        let gw = &mut grad[head.weight + c * hd..head.weight + (c + 1) * hd];
        for (g, r) in gw.iter_mut().zip(&trace.readout) {
            *g += dl * r;
        }
        for (d, w) in d_readout.iter_mut().zip(&head_w[c * hd..(c + 1) * hd]) {
            *d += dl * w;
        }
    }
    if n == 0 {
        return;
    }

    // mean readout spreads the gradient evenly over nodes
    let inv = 1.0 / n as f64;
    let mut d_h: Vec<f64> = (0..n).flat_map(|_| d_readout.iter().map(|d| d * inv)).collect();

    for l in (0..spec.num_layers).rev() {
        let slot = slots[l];
        let (in_dim, out_dim) = (slot.in_dim, slot.out_dim);
        let z = &trace.pre_act[l];
        let x = &trace.propagated[l];
        let d_z: Vec<f64> = d_h
            .iter()
            .zip(z)
            .map(|(&d, &zv)| if zv > 0.0 { d } else { 0.0 })
            .collect();

        let w = &values[slot.weight..slot.bias];
        let mut d_x = vec![0.0; n * in_dim];
        for u in 0..n {
            let xu = &x[u * in_dim..(u + 1) * in_dim];
            let dxu = &mut d_x[u * in_dim..(u + 1) * in_dim];
            for o in 0..out_dim {
                let dz = d_z[u * out_dim + o];
                if dz == 0.0 {
                    continue;
                }
                grad[slot.bias + o] += dz;
                let gw = &mut grad[slot.weight + o * in_dim..slot.weight + (o + 1) * in_dim];
                for (g, xv) in gw.iter_mut().zip(xu) {
                    *g += dz * xv;
                }
                for (d, wv) in dxu.iter_mut().zip(&w[o * in_dim..(o + 1) * in_dim]) {
                    *d += dz * wv;
                }
            }
        }
        if l > 0 {
            d_h = propagate(spec.arch, graph, &d_x, in_dim);
        }
    }
}

/// Numerically stable `log Σ exp`.
fn log_sum_exp(logits: &[f64]) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + libm::log(logits.iter().map(|l| libm::exp(l - max)).sum::<f64>())
}

/// Cross-entropy of `softmax(logits)` against `label` and its logit gradient.
pub fn cross_entropy(logits: &[f64], label: usize) -> (f64, Vec<f64>) {
    let lse = log_sum_exp(logits);
    let loss = lse - logits[label];
    let mut grad: Vec<f64> = logits.iter().map(|l| libm::exp(l - lse)).collect();
    grad[label] -= 1.0;
    (loss, grad)
}

/// Mean cross-entropy over `batch` and its gradient.
pub fn loss_and_grad(params: &ModelParams, spec: &ModelSpec, batch: &[&Graph]) -> Result<(f64, ModelParams)> {
    check_params(params, spec)?;
    if batch.is_empty() {
        return Err(Error::Contract("loss over an empty batch".into()));
    }
    let scale = 1.0 / batch.len() as f64;
    let mut grad = params.zeros_like();
    let mut total = 0.0;
    for (i, g) in batch.iter().enumerate() {
        let trace = forward_trace(params, spec, g)?;
        let (loss, d_logits) = cross_entropy(&trace.logits, g.label());
        if !loss.is_finite() {
            return Err(Error::Numeric {
                graph_index: i,
                value: loss,
            });
        }
        total += loss;
        let d_logits: Vec<f64> = d_logits.iter().map(|d| d * scale).collect();
        backward(params, spec, g, &trace, &d_logits, grad.values_mut());
    }
    Ok((total * scale, grad))
}
