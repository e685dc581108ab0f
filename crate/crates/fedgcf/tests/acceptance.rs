//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process exits non-zero if any check fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fedgcf::config::{DatasetConfig, MethodName, PartitionConfig, RunConfig};
use fedgcf::report::{bandit_csv, metrics_csv, summary_json};
use fedgcf_core::federated::{aggregate, run, Method, SimConfig, TrainConfig};
use fedgcf_core::gcf::{default_arms, BanditState};
use fedgcf_core::gnn::{forward, fused_predict, loss_and_grad, BranchSpecs, DualBranchModel, ModelParams, ModelSpec};
use fedgcf_core::graph::Graph;
use fedgcf_core::partition::{partition, PartitionMode};
use fedgcf_core::pce::{sim_to_dist, ClientTopology};
use fedgcf_core::structural::{encode_graph, StructConfig};
use fedgcf_core::synthetic::{generate_synthetic, ClassSpec, Motif, SyntheticSpec};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.1?}, limit {limit:?}"))
}

/// Random graph on 2..=6 nodes with features in [-1, 1) and structural
/// vectors filled in.
fn random_graph(rng: &mut ChaCha8Rng, feature_dim: usize, num_classes: usize, structure: &StructConfig) -> Graph {
    let n = rng.random_range(2..=6);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.5) {
                edges.push((u, v));
            }
        }
    }
    let features = (0..n * feature_dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut g = Graph::new(n, edges, features, feature_dim, rng.random_range(0..num_classes)).unwrap();
    let s = encode_graph(&g, structure);
    g.set_structs(structure.dim(), s).unwrap();
    g
}

/// Initial parameters with every entry, biases included, jittered so no unit
/// starts at a ReLU kink.
fn random_params(spec: &ModelSpec, rng: &mut ChaCha8Rng) -> ModelParams {
    let mut p = spec.init(rng);
    for v in p.values_mut() {
        *v += rng.random_range(-0.3..0.3);
    }
    p
}

/// Cross-entropy from logits, written out independently of the library.
fn reference_loss(params: &ModelParams, spec: &ModelSpec, g: &Graph) -> f64 {
    let z = forward(params, spec, g).unwrap();
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
    lse - z[g.label()]
}

fn gradient_check() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let structure = StructConfig { rw_dim: 4, deg_dim: 4 };
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for instance in 0..20 {
        let g = random_graph(&mut rng, 3, 3, &structure);
        for spec in [
            ModelSpec::node_branch(3, 3).with_hidden(5),
            ModelSpec::struct_branch(structure.dim(), 3).with_hidden(5),
        ] {
            let params = random_params(&spec, &mut rng);
            let (_, grad) = loss_and_grad(&params, &spec, &[&g]).map_err(|e| e.to_string())?;
            for k in 0..params.len() {
                let mut plus = params.clone();
                plus.values_mut()[k] += h;
                let mut minus = params.clone();
                minus.values_mut()[k] -= h;
                let numeric = (reference_loss(&plus, &spec, &g) - reference_loss(&minus, &spec, &g)) / (2.0 * h);
                let analytic = grad.values()[k];
                let scale = analytic.abs().max(numeric.abs());
                if scale < 1e-8 {
                    continue;
                }
                let rel = (analytic - numeric).abs() / scale;
                checked += 1;
                if rel > worst {
                    worst = rel;
                }
                ensure(rel < 1e-3, || {
                    format!("{:?} instance {instance} param {k}: analytic {analytic:e} numeric {numeric:e} rel {rel:e}", spec.arch)
                })?;
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "GCN and GIN, 20 instances each, {checked} entries, max rel err {worst:.2e}, {:.1?}",
        start.elapsed()
    ))
}

fn scalar(v: f64) -> ModelParams {
    let spec = ModelSpec::node_branch(1, 1).with_hidden(1).with_layers(1);
    let mut p = ModelParams::zeros(spec.manifest());
    p.values_mut().fill(v);
    p
}

fn aggregation_oracle() -> Outcome {
    let (a, b, c) = (scalar(6.0), scalar(3.0), scalar(1.0));
    let out = aggregate(&[(&a, 1), (&b, 2), (&c, 3)]).map_err(|e| e.to_string())?;
    ensure(out.values().iter().all(|v| v.to_bits() == 2.5f64.to_bits()), || {
        format!("(1,2,3)x(6,3,1) gave {:?}", out.values())
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let spec = ModelSpec::node_branch(3, 2).with_hidden(4);
    for trial in 0..100 {
        let k = rng.random_range(1..=8);
        let models: Vec<ModelParams> = (0..k)
            .map(|_| {
                let mut p = spec.init(&mut rng);
                for v in p.values_mut() {
                    *v = rng.random_range(-10.0..10.0);
                }
                p
            })
            .collect();
        let weights: Vec<usize> = (0..k).map(|_| rng.random_range(1..50)).collect();

        let same: Vec<(&ModelParams, usize)> = weights.iter().map(|&n| (&models[0], n)).collect();
        let idem = aggregate(&same).map_err(|e| e.to_string())?;
        ensure(idem == models[0], || format!("trial {trial}: aggregate of identical models changed them"))?;

        let mut items: Vec<(&ModelParams, usize)> = models.iter().zip(weights.iter().copied()).collect();
        let base = aggregate(&items).map_err(|e| e.to_string())?;
        items.shuffle(&mut rng);
        let shuffled = aggregate(&items).map_err(|e| e.to_string())?;
        ensure(
            base.values().iter().zip(shuffled.values()).all(|(x, y)| x.to_bits() == y.to_bits()),
            || format!("trial {trial}: result depends on client order"),
        )?;
    }
    Ok("2.5 bit-exact; idempotent and order-invariant over 100 trials".into())
}

fn distance_mapping() -> Outcome {
    for alpha in [0.5, 2.0, 5.0] {
        ensure(sim_to_dist(1.0, alpha) == 0.0, || format!("d(1, {alpha}) != 0"))?;
        let sweep: Vec<f64> = (1..=1000).map(|i| -1.0 + 2.0 * i as f64 / 1000.0).collect();
        for w in sweep.windows(2) {
            let (d0, d1) = (sim_to_dist(w[0], alpha), sim_to_dist(w[1], alpha));
            ensure(d0 > d1 && d0.is_finite(), || {
                format!("alpha {alpha}: d({}) = {d0} not above d({}) = {d1}", w[0], w[1])
            })?;
        }
    }
    let d = sim_to_dist(0.0, 2.0);
    let expected = 2.0f64.exp() - 1.0;
    ensure((d - expected).abs() <= 1e-12, || format!("d(0, 2) = {d}, expected {expected}"))?;
    Ok(format!("d(1)=0, strictly decreasing on 1000 points for alpha 0.5/2/5, d(0,2)-(e^2-1)={:.1e}", d - expected))
}

/// `(length, hops)` of all-pairs shortest paths by Floyd–Warshall.
fn floyd_warshall(dist: &[Vec<f64>]) -> Vec<Vec<(f64, usize)>> {
    let n = dist.len();
    let mut best: Vec<Vec<(f64, usize)>> = (0..n)
        .map(|i| (0..n).map(|j| (dist[i][j], usize::from(i != j))).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = (best[i][k].0 + best[k][j].0, best[i][k].1 + best[k][j].1);
                if via.0 < best[i][j].0 || (via.0 == best[i][j].0 && via.1 < best[i][j].1) {
                    best[i][j] = via;
                }
            }
        }
    }
    best
}

/// For each hop count, the shortest walks from `source` with exactly that
/// many hops, lexicographically smallest among equals.
fn layered_paths(dist: &[Vec<f64>], source: usize) -> Vec<Vec<(f64, Vec<usize>)>> {
    let n = dist.len();
    let mut layers = vec![(0..n)
        .map(|v| if v == source { (0.0, vec![source]) } else { (f64::INFINITY, Vec::new()) })
        .collect::<Vec<_>>()];
    for _ in 1..n {
        let prev = layers.last().unwrap();
        let next = (0..n)
            .map(|v| {
                let mut best: (f64, Vec<usize>) = (f64::INFINITY, Vec::new());
                for u in (0..n).filter(|&u| u != v && prev[u].0.is_finite()) {
                    let len = prev[u].0 + dist[u][v];
                    let mut walk = prev[u].1.clone();
                    walk.push(v);
                    if len < best.0 || (len == best.0 && walk < best.1) {
                        best = (len, walk);
                    }
                }
                best
            })
            .collect();
        layers.push(next);
    }
    layers
}

fn shortest_path_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut ties = 0;
    for instance in 0..200 {
        let n = rng.random_range(2..=12);
        // integer weights keep every sum exact, so lengths can be compared
        // bit for bit whatever the summation order; small ranges force ties
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let w = f64::from(rng.random_range(0..=9u8));
                dist[i][j] = w;
                dist[j][i] = w;
            }
        }
        let topology = ClientTopology::from_distances(dist.clone()).map_err(|e| e.to_string())?;
        let fw = floyd_warshall(&dist);
        for s in 0..n {
            let layers = layered_paths(&dist, s);
            for t in 0..n {
                let p = topology.path(s, t);
                let (len, hops) = fw[s][t];
                ensure(p.length == len, || format!("instance {instance} {s}->{t}: length {} vs {len}", p.length))?;
                ensure(p.vertices.len() == hops + 1, || {
                    format!("instance {instance} {s}->{t}: {} hops vs {hops}", p.vertices.len() - 1)
                })?;
                let expected = &layers[hops][t].1;
                ensure(&p.vertices == expected, || {
                    format!("instance {instance} {s}->{t}: path {:?} vs {expected:?}", p.vertices)
                })?;
                let folded = p.vertices.windows(2).fold(0.0, |acc, w| acc + dist[w[0]][w[1]]);
                ensure(folded == p.length, || format!("instance {instance} {s}->{t}: stored length is not the path sum"))?;
                if s != t && (1..n).filter(|&h| layers[h][t].0 == len).count() > 1 {
                    ties += 1;
                }
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "200 complete graphs, N<=12, lengths and paths agree ({ties} pairs also reachable at the same length with other hop counts), {:.1?}",
        start.elapsed()
    ))
}

fn bandit_behavior() -> Outcome {
    let arms = default_arms();
    for seed in 0..100 {
        let mut b = BanditState::new(&arms, 5.0, seed).map_err(|e| e.to_string())?;
        let picks: Vec<usize> = (0..=arms.len()).map(|_| b.select()).collect();
        let mut warm = picks[1..].to_vec();
        warm.sort_unstable();
        ensure(warm == (0..arms.len()).collect::<Vec<_>>(), || {
            format!("seed {seed}: rounds 2..=M+1 picked {:?}", &picks[1..])
        })?;
        ensure(b.arms().iter().all(|a| a.count >= 1), || format!("seed {seed}: arm unplayed after warm-up"))?;
    }

    let mut b = BanditState::new(&[0.5], 5.0, 0).map_err(|e| e.to_string())?.with_best_acc(0.7);
    for _ in 0..200 {
        b.select();
        b.update_reward(0.7).map_err(|e| e.to_string())?;
    }
    let fixed = b.arms()[0].reward;
    ensure((fixed - 0.1).abs() <= 1e-6, || format!("fixed point {fixed}, expected 0.1"))?;

    let mut freq = 0.0;
    for seed in 0..10u64 {
        let best = (seed % arms.len() as u64) as usize;
        let mut b = BanditState::new(&arms, 5.0, seed).map_err(|e| e.to_string())?;
        let mut hits = 0;
        for _ in 0..500 {
            let m = b.select();
            hits += usize::from(m == best);
            b.update_reward(if m == best { 0.8 } else { 0.5 }).map_err(|e| e.to_string())?;
        }
        freq += hits as f64 / 500.0 / 10.0;
    }
    ensure(freq > 0.8, || format!("best arm chosen {:.1}% of rounds", 100.0 * freq))?;
    Ok(format!(
        "warm-up complete for 100 seeds, fixed point {fixed:.9}, best-arm frequency {:.1}%",
        100.0 * freq
    ))
}

fn fusion_endpoints() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let structure = StructConfig::default();
    let specs = BranchSpecs::new(
        ModelSpec::node_branch(3, 4).with_hidden(8),
        ModelSpec::struct_branch(structure.dim(), 4).with_hidden(8),
    );
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let g = random_graph(&mut rng, 3, 4, &structure);
        let node = random_params(&specs.node, &mut rng);
        let st = random_params(&specs.structure, &mut rng);
        let s_logits = forward(&st, &specs.structure, &g).unwrap();
        let n_logits = forward(&node, &specs.node, &g).unwrap();
        let at = |l: f64| {
            let m = DualBranchModel::new(node.clone(), st.clone(), l).unwrap();
            fused_predict(&m, &specs, &g).unwrap()
        };
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        ensure(bits(&at(1.0)) == bits(&s_logits), || "lambda 1 differs from the structural branch".into())?;
        ensure(bits(&at(0.0)) == bits(&n_logits), || "lambda 0 differs from the node branch".into())?;
        for l in [0.25, 0.5, 0.75] {
            for ((f, s), n) in at(l).iter().zip(&s_logits).zip(&n_logits) {
                let err = (f - (l * s + (1.0 - l) * n)).abs();
                worst = worst.max(err);
                ensure(err <= 1e-12, || format!("lambda {l}: affine error {err:e}"))?;
            }
        }
    }
    Ok(format!("endpoints bit-equal, max affine error {worst:.1e}"))
}

fn non_iid_partition() -> Outcome {
    let spec = SyntheticSpec {
        classes: (0..3).map(|_| ClassSpec::new(Motif::Ring, vec![])).collect(),
        graphs_per_class: 100,
        min_nodes: 3,
        max_nodes: 5,
        feature_dim: 1,
        feature_noise: 0.0,
    };
    let ds = generate_synthetic(&spec, 0).map_err(|e| e.to_string())?;
    let mut checked = 0;
    let mut short = 0;
    let mut lowest: f64 = 1.0;
    for seed in 0..50 {
        let p = partition(&ds, 6, PartitionMode::NonIid(0.7), seed).map_err(|e| e.to_string())?;
        for (client, f) in p.dominant_fractions(&ds).into_iter().enumerate() {
            if p.warnings.iter().any(|w| w.starts_with(&format!("client {client}:"))) {
                short += 1;
                continue;
            }
            checked += 1;
            lowest = lowest.min(f);
            ensure(f >= 0.7, || format!("seed {seed} client {client}: dominant fraction {f}"))?;
        }
    }
    Ok(format!(
        "50 seeds, {checked} clients checked, {short} supply-limited, min dominant fraction {lowest:.3}"
    ))
}

fn e2e_config(seed: u64) -> SimConfig {
    SimConfig {
        num_clients: 8,
        rounds: 60,
        partition: PartitionMode::NonIid(0.5),
        seed,
        hidden_dim: 32,
        train: TrainConfig {
            epochs: 2,
            batch_size: 16,
            lr: 0.01,
            ..TrainConfig::default()
        },
        ..SimConfig::default()
    }
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let methods = [Method::FedGcf, Method::FedAvg, Method::FedGcfSc, Method::FedGcfNp, Method::FedGcfEf];
    let mut mean = [0.0; 5];
    for seed in 0..5u64 {
        let ds = generate_synthetic(&SyntheticSpec::mixed_signal(125), 1000 + seed).map_err(|e| e.to_string())?;
        for (slot, &m) in mean.iter_mut().zip(&methods) {
            let r = run(m, &ds, &e2e_config(seed)).map_err(|e| e.to_string())?;
            *slot += r.final_acc() / 5.0;
        }
    }
    let [gcf, avg, sc, np, ef] = mean;
    let table = format!("fedgcf {gcf:.4}, fedavg {avg:.4}, sc {sc:.4}, np {np:.4}, ef {ef:.4}");
    ensure(gcf >= avg, || format!("fedgcf below fedavg: {table}"))?;
    for (name, other) in [("sc", sc), ("np", np), ("ef", ef)] {
        ensure(gcf >= other - 0.01, || format!("fedgcf more than 1% below {name}: {table}"))?;
    }
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!("{table}, {:.1?}", start.elapsed()))
}

fn comm_ledger() -> Outcome {
    let ds = generate_synthetic(&SyntheticSpec::mixed_signal(20), 5).map_err(|e| e.to_string())?;
    let (n, t) = (4usize, 3usize);
    let config = SimConfig {
        num_clients: n,
        rounds: t,
        hidden_dim: 16,
        ..e2e_config(0)
    };
    let fedavg = run(Method::FedAvg, &ds, &config).map_err(|e| e.to_string())?;
    let params = ModelSpec::node_branch(ds.feature_dim(), ds.num_classes()).with_hidden(16).num_params() as u64;
    let expected = 2 * n as u64 * t as u64 * 4 * params;
    ensure(fedavg.total_bytes() == expected, || {
        format!("fedavg moved {} bytes, expected {expected}", fedavg.total_bytes())
    })?;
    let local = run(Method::Local, &ds, &config).map_err(|e| e.to_string())?;
    ensure(local.total_bytes() == 0, || format!("local moved {} bytes", local.total_bytes()))?;
    Ok(format!("fedavg {expected} bytes = 2*{n}*{t}*4*{params}; local 0"))
}

fn determinism() -> Outcome {
    let config = RunConfig {
        method: MethodName::Fedgcf,
        seed: 9,
        num_clients: 4,
        rounds: 12,
        epochs: 1,
        batch_size: 8,
        lr: 0.01,
        hidden_dim: 16,
        partition: PartitionConfig::NonIid { fraction: 0.5 },
        dataset: DatasetConfig::MixedSignal {
            graphs_per_class: 20,
            seed: 9,
        },
        ..RunConfig::default()
    };
    let produce = || -> Result<[Vec<u8>; 3], String> {
        let ds = config.dataset.load().map_err(|e| e.to_string())?;
        let report = run(config.method(), &ds, &config.sim_config()).map_err(|e| e.to_string())?;
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        fedgcf::report::emit_report(&report, &config, dir.path()).map_err(|e| e.to_string())?;
        let read = |f: &str| std::fs::read(dir.path().join(f)).map_err(|e| e.to_string());
        let files = [read("metrics.csv")?, read("summary.json")?, read("bandit.csv")?];
        ensure(files[0] == metrics_csv(&report).unwrap(), || "metrics.csv differs from its rendering".into())?;
        ensure(files[1] == summary_json(&report, &config).unwrap(), || "summary.json differs".into())?;
        ensure(files[2] == bandit_csv(&report).unwrap(), || "bandit.csv differs".into())?;
        Ok(files)
    };
    let a = produce()?;
    let b = produce()?;
    for (name, (x, y)) in ["metrics.csv", "summary.json", "bandit.csv"].iter().zip(a.iter().zip(&b)) {
        ensure(x == y, || format!("{name} differs between runs"))?;
    }
    let bandit_rows = a[2].iter().filter(|&&c| c == b'\n').count() - 1;
    ensure(bandit_rows == 12, || format!("bandit.csv has {bandit_rows} rows"))?;
    Ok(format!(
        "metrics.csv ({} B), summary.json ({} B), bandit.csv ({} B) byte-identical",
        a[0].len(),
        a[1].len(),
        a[2].len()
    ))
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Outcome); 10] = [
        ("gradient correctness", gradient_check),
        ("aggregation oracle", aggregation_oracle),
        ("similarity-to-distance mapping", distance_mapping),
        ("shortest-path oracle", shortest_path_oracle),
        ("bandit warm-up, decay and regret", bandit_behavior),
        ("fusion endpoints", fusion_endpoints),
        ("non-IID partitioner", non_iid_partition),
        ("end-to-end desk scale", end_to_end),
        ("communication ledger", comm_ledger),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
