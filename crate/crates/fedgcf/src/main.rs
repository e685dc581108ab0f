use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use fedgcf::checkpoint;
use fedgcf::config::{DatasetConfig, MethodName, RunConfig};
use fedgcf::report::{emit_report, Summary};
use fedgcf::stats::DatasetStats;
use fedgcf::tudataset;
use fedgcf_core::federated::{run, Method};
use fedgcf_core::synthetic::{generate_synthetic, SyntheticSpec};

#[derive(Parser)]
#[command(version, about = "Federated graph classification simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one federated simulation and write its reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Overrides the config method (fedgcf, fedavg, local, fedgcf-sc, fedgcf-np, fedgcf-ef).
        #[arg(long)]
        method: Option<String>,
        /// Also save every client's final models under `<out>/models`.
        #[arg(long)]
        checkpoints: bool,
    },
    /// Generate a synthetic dataset in TUDataset layout.
    GenData {
        /// Take the synthetic dataset section from this run config.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Graphs per class of the built-in mixed-signal set, when no config is given.
        #[arg(long, default_value_t = 50)]
        graphs_per_class: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "SYNTH")]
        name: String,
    },
    /// Print dataset statistics.
    Inspect {
        /// Inspect the dataset named in this run config.
        #[arg(long, conflicts_with_all = ["dir", "name"])]
        config: Option<PathBuf>,
        #[arg(long, requires = "name")]
        dir: Option<PathBuf>,
        #[arg(long)]
        name: Option<String>,
    },
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run {
            config,
            seed,
            out,
            method,
            checkpoints,
        } => {
            let mut cfg = RunConfig::from_file(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(m) = method {
                cfg.method = MethodName::from(m.parse::<Method>()?);
            }
            cfg.validate()?;
            let dataset = cfg.dataset.load().context("loading dataset")?;
            log::info!(
                "{} on {} graphs, {} clients, {} rounds, seed {}",
                cfg.method(),
                dataset.len(),
                cfg.num_clients,
                cfg.rounds,
                cfg.seed
            );
            let started = Instant::now();
            let report = run(cfg.method(), &dataset, &cfg.sim_config())?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            let files = emit_report(&report, &cfg, &out)?;
            if checkpoints {
                for (i, m) in report.final_models.iter().enumerate() {
                    let dir = out.join("models");
                    checkpoint::save(&m.node_branch, &dir.join(format!("client{i}.node")))?;
                    checkpoint::save(&m.struct_branch, &dir.join(format!("client{i}.struct")))?;
                }
            }
            let summary = Summary::new(&report, &cfg);
            log::info!("finished in {:.1?}", started.elapsed());
            println!(
                "{} seed {}: final_acc {:.4} mean_acc_last50 {:.4} comm {:.3} MB -> {}",
                summary.method,
                summary.seed,
                summary.final_acc,
                summary.mean_acc_last50,
                summary.total_comm_mb,
                files.summary.display()
            );
        }
        Command::GenData {
            config,
            graphs_per_class,
            seed,
            out,
            name,
        } => {
            let dataset = match config {
                Some(path) => match RunConfig::from_file(&path)?.dataset {
                    DatasetConfig::Tudataset { .. } => bail!("{} names a TUDataset, not a synthetic set", path.display()),
                    synthetic => synthetic.load()?,
                },
                None => generate_synthetic(&SyntheticSpec::mixed_signal(graphs_per_class), seed)?,
            };
            tudataset::write(&dataset, &out, &name)?;
            println!("wrote {} graphs to {}/{name}_*.txt", dataset.len(), out.display());
        }
        Command::Inspect { config, dir, name } => {
            let dataset = match (config, dir, name) {
                (Some(path), _, _) => RunConfig::from_file(&path)?.dataset.load()?,
                (None, Some(dir), Some(name)) => {
                    let tu = tudataset::load(&dir, &name)?;
                    if tu.self_loops_dropped > 0 {
                        log::warn!("dropped {} self-loops", tu.self_loops_dropped);
                    }
                    tu.dataset
                }
                _ => bail!("inspect needs --config or --dir with --name"),
            };
            println!("{}", DatasetStats::of(&dataset));
        }
    }
    Ok(())
}
