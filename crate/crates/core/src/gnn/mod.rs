//! A small trainable GNN stack: GCN/GIN layers, mean readout, linear head,
//! cross-entropy, hand-written backprop and Adam.

mod adam;
mod fusion;
mod model;
mod params;

pub use adam::{adam_step, AdamState, BETA1, BETA2, EPSILON};
pub use fusion::{
    argmax, count_correct, evaluate, fused_loss_and_grad, fused_predict, mix_logits, BranchSpecs, BranchTraining,
    DualBranchModel, FusedGradient,
};
pub use model::{
    cross_entropy, forward, loss_and_grad, Arch, ModelSpec, NodeInput, DEFAULT_HIDDEN, DEFAULT_LAYERS,
};
pub use params::{Manifest, ModelParams, ParamShape, WIRE_BYTES_PER_PARAM};
