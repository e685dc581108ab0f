use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gnn::{adam_step, fused_loss_and_grad, AdamState, BranchSpecs, BranchTraining, DualBranchModel, ModelParams};
use crate::graph::Graph;

/// Local optimization settings shared by all clients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub branch_training: BranchTraining,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1,
            batch_size: 128,
            lr: 0.001,
            branch_training: BranchTraining::Joint,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        if !self.lr.is_finite() || self.lr < 0.0 {
            return Err(Error::Config(format!("learning rate {} is not a finite non-negative number", self.lr)));
        }
        Ok(())
    }
}

/// A client's local graphs, already carrying structural vectors.
#[derive(Debug, Clone, Default)]
pub struct ClientData {
    pub train: Vec<Graph>,
    pub val: Vec<Graph>,
    pub test: Vec<Graph>,
}

/// Everything a client keeps between rounds.
#[derive(Debug, Clone)]
pub struct ClientState {
    pub id: usize,
    pub data: ClientData,
    pub node_model: ModelParams,
    pub struct_model: ModelParams,
    pub node_opt: AdamState,
    pub struct_opt: AdamState,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainOutcome {
    Trained { steps: usize, last_loss: Option<f64> },
    Skipped(String),
}

impl ClientState {
    pub fn new(id: usize, data: ClientData, initial: &DualBranchModel) -> Self {
        Self {
            id,
            data,
            node_opt: AdamState::for_params(&initial.node_branch),
            struct_opt: AdamState::for_params(&initial.struct_branch),
            node_model: initial.node_branch.clone(),
            struct_model: initial.struct_branch.clone(),
        }
    }

    /// Number of training graphs, the client's aggregation weight.
    pub fn num_samples(&self) -> usize {
        self.data.train.len()
    }

    /// The client's current models fused at `ratio`.
    pub fn model(&self, ratio: f64) -> Result<DualBranchModel> {
        DualBranchModel::new(self.node_model.clone(), self.struct_model.clone(), ratio)
    }
}

/// Loads the received models and runs `epochs` passes of minibatch Adam on
/// the fused loss. Adam moments persist across rounds on the client.
pub fn local_train<R: Rng + ?Sized>(
    client: &mut ClientState,
    received: &DualBranchModel,
    specs: &BranchSpecs,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<TrainOutcome> {
    config.validate()?;
    client.node_model.ensure_compatible(&received.node_branch, "received node model")?;
    client.struct_model.ensure_compatible(&received.struct_branch, "received structural model")?;
    client.node_model = received.node_branch.clone();
    client.struct_model = received.struct_branch.clone();

    if client.data.train.is_empty() {
        return Ok(TrainOutcome::Skipped(format!("client {} has no training graphs", client.id)));
    }
    let train_struct = received.ratio > 0.0;
    let train_node = received.ratio < 1.0;
    let mut order: Vec<usize> = (0..client.data.train.len()).collect();
    let mut steps = 0;
    let mut last_loss = None;
    for _ in 0..config.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&Graph> = chunk.iter().map(|&i| &client.data.train[i]).collect();
            let model = client.model(received.ratio)?;
            let g = fused_loss_and_grad(&model, specs, &batch, config.branch_training)?;
            if train_node {
                adam_step(&mut client.node_model, &g.node, &mut client.node_opt, config.lr)?;
            }
            if train_struct {
                adam_step(&mut client.struct_model, &g.structure, &mut client.struct_opt, config.lr)?;
            }
            steps += 1;
            last_loss = Some(g.loss);
        }
    }
    Ok(TrainOutcome::Trained { steps, last_loss })
}
