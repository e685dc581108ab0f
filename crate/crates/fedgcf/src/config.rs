//! TOML run configuration.
//!
//! ```toml
//! method = "fedgcf"
//! seed = 3
//! num_clients = 8
//! rounds = 60
//!
//! [partition]
//! mode = "non-iid"
//! fraction = 0.5
//!
//! [dataset]
//! kind = "mixed-signal"
//! graphs_per_class = 100
//! ```
//!
//! Every key is optional; omitted keys take the defaults of
//! [`RunConfig::default`].

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use fedgcf_core::federated::{Method, SimConfig, TrainConfig};
use fedgcf_core::gcf::default_arms;
use fedgcf_core::gnn::BranchTraining;
use fedgcf_core::partition::PartitionMode;
use fedgcf_core::structural::StructConfig;
use fedgcf_core::synthetic::{generate_synthetic, ClassSpec, Motif, SyntheticSpec};
use fedgcf_core::Dataset;

use crate::error::{Error, IoContext, Result};
use crate::tudataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Fedgcf,
    Fedavg,
    Local,
    FedgcfSc,
    FedgcfNp,
    FedgcfEf,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::Fedgcf => Method::FedGcf,
            MethodName::Fedavg => Method::FedAvg,
            MethodName::Local => Method::Local,
            MethodName::FedgcfSc => Method::FedGcfSc,
            MethodName::FedgcfNp => Method::FedGcfNp,
            MethodName::FedgcfEf => Method::FedGcfEf,
        }
    }
}

impl From<Method> for MethodName {
    fn from(m: Method) -> Self {
        match m {
            Method::FedGcf => MethodName::Fedgcf,
            Method::FedAvg => MethodName::Fedavg,
            Method::Local => MethodName::Local,
            Method::FedGcfSc => MethodName::FedgcfSc,
            Method::FedGcfNp => MethodName::FedgcfNp,
            Method::FedGcfEf => MethodName::FedgcfEf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PartitionConfig {
    Iid,
    NonIid { fraction: f64 },
}

impl From<PartitionConfig> for PartitionMode {
    fn from(p: PartitionConfig) -> Self {
        match p {
            PartitionConfig::Iid => PartitionMode::Iid,
            PartitionConfig::NonIid { fraction } => PartitionMode::NonIid(fraction),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchTrainingName {
    Joint,
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MotifName {
    Ring,
    Chain,
    Star,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    pub motif: MotifName,
    #[serde(default)]
    pub center: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub classes: Vec<ClassConfig>,
    pub graphs_per_class: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub feature_dim: usize,
    pub feature_noise: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            classes: self
                .classes
                .iter()
                .map(|c| {
                    let motif = match c.motif {
                        MotifName::Ring => Motif::Ring,
                        MotifName::Chain => Motif::Chain,
                        MotifName::Star => Motif::Star,
                    };
                    ClassSpec::new(motif, c.center.clone())
                })
                .collect(),
            graphs_per_class: self.graphs_per_class,
            min_nodes: self.min_nodes,
            max_nodes: self.max_nodes,
            feature_dim: self.feature_dim,
            feature_noise: self.feature_noise,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DatasetConfig {
    /// TUDataset files `path/name_*.txt`; a relative `path` is resolved
    /// against the config file's directory.
    Tudataset { path: PathBuf, name: String },
    /// Four classes crossing ring/chain backbones with two feature centers.
    MixedSignal {
        graphs_per_class: usize,
        #[serde(default)]
        seed: u64,
    },
    Synthetic(SyntheticConfig),
}

impl DatasetConfig {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DatasetConfig::Tudataset { path, name } => Ok(tudataset::load(path, name)?.dataset),
            DatasetConfig::MixedSignal { graphs_per_class, seed } => {
                Ok(generate_synthetic(&SyntheticSpec::mixed_signal(*graphs_per_class), *seed)?)
            }
            DatasetConfig::Synthetic(s) => Ok(generate_synthetic(&s.spec(), s.seed)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub method: MethodName,
    pub seed: u64,
    pub num_clients: usize,
    pub rounds: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub branch_training: BranchTrainingName,
    pub clusters: usize,
    pub paths: usize,
    pub alpha: f64,
    pub beta: f64,
    pub arms: Vec<f64>,
    pub hidden_dim: usize,
    pub num_layers: usize,
    pub rw_dim: usize,
    pub deg_dim: usize,
    pub partition: PartitionConfig,
    pub dataset: DatasetConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sim = SimConfig::default();
        Self {
            method: MethodName::Fedgcf,
            seed: sim.seed,
            num_clients: sim.num_clients,
            rounds: sim.rounds,
            epochs: sim.train.epochs,
            batch_size: sim.train.batch_size,
            lr: sim.train.lr,
            branch_training: BranchTrainingName::Joint,
            clusters: sim.clusters,
            paths: sim.paths,
            alpha: sim.alpha,
            beta: sim.beta,
            arms: default_arms(),
            hidden_dim: sim.hidden_dim,
            num_layers: sim.num_layers,
            rw_dim: sim.structure.rw_dim,
            deg_dim: sim.structure.deg_dim,
            partition: PartitionConfig::Iid,
            dataset: DatasetConfig::MixedSignal {
                graphs_per_class: 50,
                seed: 0,
            },
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses `path`, resolving a relative dataset path against its directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).at(path)?;
        let mut config = Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let DatasetConfig::Tudataset { path: data, .. } = &mut config.dataset {
            if data.is_relative() {
                if let Some(parent) = path.parent() {
                    *data = parent.join(&*data);
                }
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn method(&self) -> Method {
        self.method.into()
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            num_clients: self.num_clients,
            rounds: self.rounds,
            train: TrainConfig {
                epochs: self.epochs,
                batch_size: self.batch_size,
                lr: self.lr,
                branch_training: match self.branch_training {
                    BranchTrainingName::Joint => BranchTraining::Joint,
                    BranchTrainingName::Independent => BranchTraining::Independent,
                },
            },
            partition: self.partition.into(),
            seed: self.seed,
            clusters: self.clusters,
            paths: self.paths,
            alpha: self.alpha,
            beta: self.beta,
            arms: self.arms.clone(),
            hidden_dim: self.hidden_dim,
            num_layers: self.num_layers,
            structure: StructConfig {
                rw_dim: self.rw_dim,
                deg_dim: self.deg_dim,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sim_config().validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
        assert_eq!(RunConfig::default().sim_config(), SimConfig::default());
    }

    #[test]
    fn parses_sections() {
        let c = RunConfig::from_toml(
            r#"
            method = "fedgcf-ef"
            alpha = 3
            [partition]
            mode = "non-iid"
            fraction = 0.7
            [dataset]
            kind = "tudataset"
            path = "data"
            name = "MUTAG"
            "#,
        )
        .unwrap();
        assert_eq!(c.method(), Method::FedGcfEf);
        assert_eq!(c.alpha, 3.0);
        assert_eq!(c.sim_config().partition, PartitionMode::NonIid(0.7));
        assert!(matches!(c.dataset, DatasetConfig::Tudataset { .. }));
    }

    #[test]
    fn unknown_keys_and_methods_fail() {
        assert!(RunConfig::from_toml("metod = \"fedgcf\"").is_err());
        assert!(RunConfig::from_toml("method = \"fedprox\"").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let c = RunConfig {
            partition: PartitionConfig::NonIid { fraction: 0.5 },
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn method_names_agree_with_core() {
        for m in Method::ALL {
            let name = serde_json::to_string(&MethodName::from(m)).unwrap();
            assert_eq!(name, format!("\"{}\"", m.name()));
        }
    }
}
