use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::aggregate::aggregate;
use super::client::{local_train, ClientData, ClientState, TrainConfig, TrainOutcome};
use super::ledger::CommLedger;
use super::report::{BanditRecord, RoundRecord, RunReport};
use crate::error::{Error, Result};
use crate::gcf::{default_arms, fuse, BanditState};
use crate::gnn::{count_correct, BranchSpecs, DualBranchModel, ModelParams, ModelSpec, DEFAULT_HIDDEN, DEFAULT_LAYERS};
use crate::graph::{Dataset, Graph};
use crate::partition::{partition, split_8_1_1, ClientSplit, PartitionMode};
use crate::pce::{
    build_topology, cluster_structural, common_node_model, select_common_clients, shared_structural_models,
    ClusterAssignment,
};
use crate::structural::{annotate, StructConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    FedGcf,
    FedAvg,
    Local,
    /// Structural sharing only, fused at `λ = 1`.
    FedGcfSc,
    /// Common node model only, fused at `λ = 0`.
    FedGcfNp,
    /// Both branches at a fixed `λ = 0.5`.
    FedGcfEf,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::FedGcf,
        Method::FedAvg,
        Method::Local,
        Method::FedGcfSc,
        Method::FedGcfNp,
        Method::FedGcfEf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::FedGcf => "fedgcf",
            Method::FedAvg => "fedavg",
            Method::Local => "local",
            Method::FedGcfSc => "fedgcf-sc",
            Method::FedGcfNp => "fedgcf-np",
            Method::FedGcfEf => "fedgcf-ef",
        }
    }

    fn uses_pce(self) -> bool {
        matches!(self, Method::FedGcf | Method::FedGcfSc | Method::FedGcfNp | Method::FedGcfEf)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

/// Settings of one simulated federation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub num_clients: usize,
    pub rounds: usize,
    pub train: TrainConfig,
    pub partition: PartitionMode,
    pub seed: u64,
    /// Number of structural clusters.
    pub clusters: usize,
    /// Number of longest paths feeding the common node model.
    pub paths: usize,
    pub alpha: f64,
    pub beta: f64,
    pub arms: Vec<f64>,
    pub hidden_dim: usize,
    pub num_layers: usize,
    pub structure: StructConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            num_clients: 10,
            rounds: 200,
            train: TrainConfig::default(),
            partition: PartitionMode::Iid,
            seed: 0,
            clusters: 3,
            paths: 3,
            alpha: 2.0,
            beta: 5.0,
            arms: default_arms(),
            hidden_dim: DEFAULT_HIDDEN,
            num_layers: DEFAULT_LAYERS,
            structure: StructConfig::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_clients == 0 {
            return Err(Error::Config("num_clients must be >= 1".into()));
        }
        if self.clusters == 0 || self.paths == 0 {
            return Err(Error::Config("clusters and paths must be >= 1".into()));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(Error::Config(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if let PartitionMode::NonIid(f) = self.partition {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Config(format!("non-IID fraction {f} outside (0, 1]")));
            }
        }
        self.train.validate()?;
        self.structure.validate()?;
        // checks arms and beta
        BanditState::new(&self.arms, self.beta, 0)?;
        Ok(())
    }

    /// Structural weight used before the first bandit decision.
    fn initial_ratio(&self, method: Method) -> f64 {
        match method {
            Method::FedGcf => self.arms.iter().sum::<f64>() / self.arms.len() as f64,
            Method::FedGcfSc => 1.0,
            Method::FedGcfEf => 0.5,
            Method::FedAvg | Method::Local | Method::FedGcfNp => 0.0,
        }
    }
}

const STREAM_PARTITION: u64 = 1;
const STREAM_INIT: u64 = 2;
const STREAM_BANDIT: u64 = 3;
const STREAM_CLIENT: u64 = 4;
const STREAM_CLUSTER: u64 = 5;

/// Independent seed for `(stream, index)` under the run seed.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(index.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    for _ in 0..2 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

fn client_splits(dataset: &Dataset, config: &SimConfig, warnings: &mut Vec<String>) -> Result<Vec<ClientSplit>> {
    let seed = derive_seed(config.seed, STREAM_PARTITION, 0);
    if config.num_clients == 1 {
        let mut all: Vec<usize> = (0..dataset.len()).collect();
        all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        return Ok(vec![split_8_1_1(&all)]);
    }
    let p = partition(dataset, config.num_clients, config.partition, seed)?;
    warnings.extend(p.warnings);
    Ok(p.splits)
}

fn gather(dataset: &Dataset, idx: &[usize]) -> Vec<Graph> {
    idx.iter().map(|&i| dataset.graphs()[i].clone()).collect()
}

struct Evaluation {
    pooled: f64,
    client_mean: f64,
}

fn evaluate_clients(models: &[DualBranchModel], clients: &[ClientState], specs: &BranchSpecs) -> Result<Evaluation> {
    let mut correct = 0;
    let mut total = 0;
    let mut acc_sum = 0.0;
    let mut evaluated = 0;
    for (model, client) in models.iter().zip(clients) {
        let test = &client.data.test;
        if test.is_empty() {
            continue;
        }
        let c = count_correct(model, specs, test)?;
        correct += c;
        total += test.len();
        acc_sum += c as f64 / test.len() as f64;
        evaluated += 1;
    }
    if total == 0 {
        return Err(Error::Config("no client has test graphs".into()));
    }
    Ok(Evaluation {
        pooled: correct as f64 / total as f64,
        client_mean: acc_sum / evaluated as f64,
    })
}

/// Runs `method` for `config.rounds` rounds on `dataset`.
///
/// Round 0 evaluates the initial model. Every later round trains all clients
/// locally, performs the method's server step, evaluates the models the
/// clients are about to receive and records the traffic.
pub fn run(method: Method, dataset: &Dataset, config: &SimConfig) -> Result<RunReport> {
    config.validate()?;
    let dataset = annotate(dataset.clone(), &config.structure)?;
    let specs = BranchSpecs::new(
        ModelSpec::node_branch(dataset.feature_dim(), dataset.num_classes())
            .with_hidden(config.hidden_dim)
            .with_layers(config.num_layers),
        ModelSpec::struct_branch(config.structure.dim(), dataset.num_classes())
            .with_hidden(config.hidden_dim)
            .with_layers(config.num_layers),
    );
    specs.node.validate()?;
    specs.structure.validate()?;

    let mut warnings = Vec::new();
    let splits = client_splits(&dataset, config, &mut warnings)?;
    let n = splits.len();

    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, STREAM_INIT, 0));
    let initial = DualBranchModel::new(
        specs.node.init(&mut init_rng),
        specs.structure.init(&mut init_rng),
        config.initial_ratio(method),
    )?;
    let mut clients: Vec<ClientState> = splits
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let data = ClientData {
                train: gather(&dataset, &s.train),
                val: gather(&dataset, &s.val),
                test: gather(&dataset, &s.test),
            };
            ClientState::new(i, data, &initial)
        })
        .collect();
    let mut rngs: Vec<ChaCha8Rng> = (0..n)
        .map(|i| ChaCha8Rng::seed_from_u64(derive_seed(config.seed, STREAM_CLIENT, i as u64)))
        .collect();
    let weights: Vec<usize> = clients.iter().map(ClientState::num_samples).collect();

    let mut received = vec![initial.clone(); n];
    let eval0 = evaluate_clients(&received, &clients, &specs)?;
    let mut bandit = BanditState::new(&config.arms, config.beta, derive_seed(config.seed, STREAM_BANDIT, 0))?
        .with_best_acc(eval0.pooled);
    let mut ledger = CommLedger::new();
    let mut rounds = vec![RoundRecord {
        round: 0,
        test_acc: eval0.pooled,
        client_mean_acc: eval0.client_mean,
        comm_bytes_cum: 0,
        lambda: initial.ratio,
        clusters: vec![0; n],
        common_clients: if method.uses_pce() { (0..n).collect() } else { Vec::new() },
        bandit: None,
    }];

    let node_bytes = initial.node_branch.wire_bytes();
    let struct_bytes = initial.struct_branch.wire_bytes();

    for t in 1..=config.rounds {
        let mut step = || -> Result<RoundRecord> {
            for ((client, model), rng) in clients.iter_mut().zip(&received).zip(rngs.iter_mut()) {
                if let TrainOutcome::Skipped(w) = local_train(client, model, &specs, &config.train, rng)? {
                    warnings.push(format!("round {t}: {w}"));
                }
            }
            let mut record = RoundRecord {
                round: t,
                test_acc: 0.0,
                client_mean_acc: 0.0,
                comm_bytes_cum: 0,
                lambda: 0.0,
                clusters: vec![0; n],
                common_clients: Vec::new(),
                bandit: None,
            };
            let (up, down) = match method {
                Method::Local => {
                    received = clients.iter().map(|c| c.model(0.0)).collect::<Result<_>>()?;
                    (0, 0)
                }
                Method::FedAvg => {
                    let items: Vec<(&ModelParams, usize)> =
                        clients.iter().map(|c| &c.node_model).zip(weights.iter().copied()).collect();
                    let global = aggregate(&items)?;
                    for (r, c) in received.iter_mut().zip(&clients) {
                        *r = DualBranchModel::new(global.clone(), c.struct_model.clone(), 0.0)?;
                    }
                    let b = n as u64 * node_bytes;
                    (b, b)
                }
                _ => {
                    let use_struct = method != Method::FedGcfNp;
                    let use_node = method != Method::FedGcfSc;
                    let structs: Vec<ModelParams> = clients.iter().map(|c| c.struct_model.clone()).collect();
                    let nodes: Vec<ModelParams> = clients.iter().map(|c| c.node_model.clone()).collect();

                    let (assignment, shared) = if use_struct {
                        let a = cluster_structural(
                            &structs,
                            config.clusters.min(n),
                            derive_seed(config.seed, STREAM_CLUSTER, t as u64),
                        )?;
                        let shared = shared_structural_models(&structs, &weights, &a)?;
                        (a, shared)
                    } else {
                        (ClusterAssignment::single(n), vec![initial.struct_branch.clone()])
                    };
                    let common = if use_node {
                        let selected = if n >= 2 {
                            let topology = build_topology(&nodes, config.alpha)?;
                            let sel = select_common_clients(&topology, config.paths)?;
                            if t == 1 {
                                if let Some(w) = sel.warning {
                                    warnings.push(w);
                                }
                            }
                            sel.clients
                        } else {
                            vec![0]
                        };
                        let common = common_node_model(&nodes, &weights, &selected)?;
                        record.common_clients = selected;
                        common
                    } else {
                        initial.node_branch.clone()
                    };

                    let lambda = match method {
                        Method::FedGcf => bandit.select_ratio(),
                        other => config.initial_ratio(other),
                    };
                    let fused = fuse(&shared, &common, lambda)?;
                    for (i, r) in received.iter_mut().enumerate() {
                        *r = fused[assignment.cluster_of(i)].clone();
                    }
                    record.clusters = assignment.labels().to_vec();
                    let per_client = if use_node { node_bytes } else { 0 } + if use_struct { struct_bytes } else { 0 };
                    let b = n as u64 * per_client;
                    (b, b)
                }
            };
            let eval = evaluate_clients(&received, &clients, &specs)?;
            if method == Method::FedGcf {
                bandit.update_reward(eval.pooled)?;
                let selected = bandit.last_selected().unwrap_or(0);
                record.bandit = Some(BanditRecord {
                    selected,
                    rewards: bandit.arms().iter().map(|a| a.reward).collect(),
                    counts: bandit.arms().iter().map(|a| a.count).collect(),
                    scores: bandit.scores_at(bandit.round()),
                });
            }
            ledger.record(t, up, down);
            record.test_acc = eval.pooled;
            record.client_mean_acc = eval.client_mean;
            record.comm_bytes_cum = ledger.total_bytes();
            record.lambda = received[0].ratio;
            Ok(record)
        };
        let record = step().map_err(|e| e.in_round(t))?;
        rounds.push(record);
    }

    Ok(RunReport {
        method,
        config: config.clone(),
        rounds,
        ledger,
        warnings,
        final_models: received,
    })
}
