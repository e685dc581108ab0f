//! Server-side characteristic extraction.
//!
//! Structural models are clustered so that clients with similar graph
//! topology share one structural model per cluster. Node models are compared
//! pairwise; cosine similarity is mapped to a distance that grows
//! exponentially as models diverge, all-pairs shortest paths are computed on
//! the complete client graph, and the clients lying on the longest of those
//! paths contribute to a single common node model.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::federated::aggregate;
use crate::gnn::ModelParams;

pub const KMEANS_MAX_ITERS: usize = 100;
pub const KMEANS_TOLERANCE: f64 = 1e-8;

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        return 0.0;
    }
    (ab / libm::sqrt(aa * bb)).clamp(-1.0, 1.0)
}

/// Cosine similarity of the flat parameter vectors; zero if either is zero.
pub fn similarity(a: &ModelParams, b: &ModelParams) -> Result<f64> {
    a.ensure_compatible(b, "similarity")?;
    Ok(cosine(a.values(), b.values()))
}

/// Distance assigned to perfectly opposite models, `e^(10α)`.
pub fn distance_ceiling(alpha: f64) -> f64 {
    libm::exp(10.0 * alpha)
}

/// `d = e^(α (1 − σ) / (1 + σ)) − 1`, bounded by [`distance_ceiling`].
///
/// The exact value is used up to half the ceiling. Beyond that the exponent
/// `x = α (1 − σ) / (1 + σ)` is mapped to `D − (D − d_h) x_h / x`, which stays
/// strictly decreasing in `σ` and reaches `D` only at `σ = −1`.
pub fn sim_to_dist(sigma: f64, alpha: f64) -> f64 {
    let ceiling = distance_ceiling(alpha);
    if sigma <= -1.0 {
        return ceiling;
    }
    let x = alpha * ((1.0 - sigma) / (1.0 + sigma));
    let half = ceiling / 2.0;
    let x_half = libm::log1p(half);
    if x <= x_half {
        libm::expm1(x)
    } else {
        ceiling - (ceiling - half) * x_half / x
    }
}

/// Cluster index per client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl ClusterAssignment {
    /// Builds an assignment, renumbering clusters by first appearance.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        let mut remap = vec![usize::MAX; k];
        let mut next = 0;
        let mut out = Vec::with_capacity(labels.len());
        for &l in &labels {
            if l >= k {
                return Err(Error::Contract(format!("cluster {l} outside [0, {k})")));
            }
            if remap[l] == usize::MAX {
                remap[l] = next;
                next += 1;
            }
            out.push(remap[l]);
        }
        if next != k {
            return Err(Error::Contract(format!("{} of {k} clusters are empty", k - next)));
        }
        Ok(Self { labels: out, k })
    }

    /// Every client in cluster 0.
    pub fn single(num_clients: usize) -> Self {
        Self {
            labels: vec![0; num_clients],
            k: 1,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_clusters(&self) -> usize {
        self.k
    }

    pub fn cluster_of(&self, client: usize) -> usize {
        self.labels[client]
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i] == cluster).collect()
    }

    /// Clusters as sets of client ids, independent of cluster numbering.
    pub fn as_sets(&self) -> BTreeSet<BTreeSet<usize>> {
        (0..self.k).map(|c| self.members(c).into_iter().collect()).collect()
    }
}

/// Cosine k-means (`1 − σ` as the distance) with k-means++ seeding.
///
/// Runs at most [`KMEANS_MAX_ITERS`] iterations or until no centroid moves by
/// more than [`KMEANS_TOLERANCE`]. Empty clusters take the point farthest from
/// its own centroid.
pub fn cluster_structural(models: &[ModelParams], k: usize, seed: u64) -> Result<ClusterAssignment> {
    let n = models.len();
    if k == 0 || k > n {
        return Err(Error::Config(format!("cannot form {k} clusters from {n} clients")));
    }
    for m in &models[1..] {
        models[0].ensure_compatible(m, "clustering")?;
    }
    if k == 1 {
        return Ok(ClusterAssignment::single(n));
    }
    let points: Vec<&[f64]> = models.iter().map(ModelParams::values).collect();
    let dist = |a: &[f64], b: &[f64]| (1.0 - cosine(a, b)).max(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++
    let mut chosen = vec![rng.random_range(0..n)];
    while chosen.len() < k {
        let weights: Vec<f64> = points
            .iter()
            .map(|p| {
                let d = chosen.iter().map(|&c| dist(p, points[c])).fold(f64::INFINITY, f64::min);
                d * d
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (i, w) in weights.iter().enumerate() {
                if *w > 0.0 && r < *w {
                    pick = i;
                    break;
                }
                r -= w;
            }
            while weights[pick] == 0.0 {
                pick -= 1;
            }
            pick
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(pick);
    }
    let mut centroids: Vec<Vec<f64>> = chosen.iter().map(|&c| points[c].to_vec()).collect();
    let mut labels = vec![0usize; n];

    for _ in 0..KMEANS_MAX_ITERS {
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = dist(p, &centroids[0]);
            for (c, centroid) in centroids.iter().enumerate().skip(1) {
                let d = dist(p, centroid);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            labels[i] = best;
        }
        repair_empty(&points, &mut labels, &centroids, k, &dist);

        let mut moved: f64 = 0.0;
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
            let mut mean = vec![0.0; centroid.len()];
            for &i in &members {
                for (m, x) in mean.iter_mut().zip(points[i]) {
                    *m += x;
                }
            }
            let inv = 1.0 / members.len() as f64;
            mean.iter_mut().for_each(|m| *m *= inv);
            let shift: f64 = mean.iter().zip(centroid.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            moved = moved.max(libm::sqrt(shift));
            *centroid = mean;
        }
        if moved < KMEANS_TOLERANCE {
            break;
        }
    }
    ClusterAssignment::new(labels, k)
}

fn repair_empty(
    points: &[&[f64]],
    labels: &mut [usize],
    centroids: &[Vec<f64>],
    k: usize,
    dist: &dyn Fn(&[f64], &[f64]) -> f64,
) {
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut donor = None;
        let mut far = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            if sizes[labels[i]] < 2 {
                continue;
            }
            let d = dist(p, &centroids[labels[i]]);
            if d > far {
                far = d;
                donor = Some(i);
            }
        }
        match donor {
            Some(i) => labels[i] = empty,
            None => return,
        }
    }
}

/// Per-cluster weighted average of the members' structural models.
pub fn shared_structural_models(
    models: &[ModelParams],
    weights: &[usize],
    assignment: &ClusterAssignment,
) -> Result<Vec<ModelParams>> {
    if models.len() != assignment.labels().len() || weights.len() != models.len() {
        return Err(Error::Contract("assignment does not cover the given models".into()));
    }
    (0..assignment.num_clusters())
        .map(|c| {
            let members = assignment.members(c);
            if members.is_empty() {
                return Err(Error::Contract(format!("cluster {c} is empty")));
            }
            let items: Vec<(&ModelParams, usize)> = members.iter().map(|&i| (&models[i], weights[i])).collect();
            aggregate(&items)
        })
        .collect()
}

/// A shortest path and its length accumulated edge by edge from the source.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPath {
    pub length: f64,
    pub vertices: Vec<usize>,
}

impl ShortestPath {
    /// Orders by length, then hop count, then lexicographic vertex list.
    pub fn cmp_key(&self, other: &ShortestPath) -> Ordering {
        self.length
            .total_cmp(&other.length)
            .then(self.vertices.len().cmp(&other.vertices.len()))
            .then_with(|| self.vertices.cmp(&other.vertices))
    }
}

/// Pairwise client distances and all-pairs shortest paths on the complete graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ClientTopology {
    dist: Vec<Vec<f64>>,
    paths: Vec<Vec<ShortestPath>>,
}

impl ClientTopology {
    /// Runs Dijkstra from every client over a symmetric distance matrix.
    pub fn from_distances(dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Contract("distance matrix is not square".into()));
            }
            if row[i] != 0.0 {
                return Err(Error::Contract(format!("distance d[{i}][{i}] is not zero")));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 || d != dist[j][i] {
                    return Err(Error::Contract(format!("invalid distance d[{i}][{j}] = {d}")));
                }
            }
        }
        let paths = (0..n).map(|s| dijkstra(&dist, s)).collect();
        Ok(Self { dist, paths })
    }

    pub fn num_clients(&self) -> usize {
        self.dist.len()
    }

    pub fn distances(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn path(&self, from: usize, to: usize) -> &ShortestPath {
        &self.paths[from][to]
    }
}

/// Single-source shortest paths on a complete graph given as a dense matrix.
///
/// Among equal-length paths the one with fewer hops wins, then the
/// lexicographically smallest vertex list.
pub fn dijkstra(dist: &[Vec<f64>], source: usize) -> Vec<ShortestPath> {
    let n = dist.len();
    let mut best: Vec<Option<ShortestPath>> = vec![None; n];
    let mut settled = vec![false; n];
    best[source] = Some(ShortestPath {
        length: 0.0,
        vertices: vec![source],
    });
    for _ in 0..n {
        let mut next: Option<usize> = None;
        for v in 0..n {
            if settled[v] {
                continue;
            }
            if let Some(p) = &best[v] {
                let better = match next {
                    None => true,
                    Some(u) => p.cmp_key(best[u].as_ref().expect("candidate")) == Ordering::Less,
                };
                if better {
                    next = Some(v);
                }
            }
        }
        let Some(u) = next else { break };
        settled[u] = true;
        let base = best[u].clone().expect("settled vertex has a path");
        for v in 0..n {
            if settled[v] {
                continue;
            }
            let mut vertices = base.vertices.clone();
            vertices.push(v);
            let cand = ShortestPath {
                length: base.length + dist[u][v],
                vertices,
            };
            let replace = match &best[v] {
                None => true,
                Some(cur) => cand.cmp_key(cur) == Ordering::Less,
            };
            if replace {
                best[v] = Some(cand);
            }
        }
    }
    best.into_iter().map(|p| p.expect("complete graph is connected")).collect()
}

/// Distances `sim_to_dist(similarity(ω_i, ω_j), α)` between every pair of node
/// models, with shortest paths.
pub fn build_topology(node_models: &[ModelParams], alpha: f64) -> Result<ClientTopology> {
    let n = node_models.len();
    if n < 2 {
        return Err(Error::Config(format!("topology needs at least 2 clients, got {n}")));
    }
    if alpha.is_nan() || alpha <= 0.0 || !distance_ceiling(alpha).is_finite() {
        return Err(Error::Config(format!("alpha must be > 0 with a finite e^(10 alpha), got {alpha}")));
    }
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = sim_to_dist(similarity(&node_models[i], &node_models[j])?, alpha);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    ClientTopology::from_distances(dist)
}

/// Clients on the `P` longest pairwise shortest paths.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonSelection {
    /// Sorted client ids.
    pub clients: Vec<usize>,
    /// Unordered pairs whose paths were used, longest first.
    pub pairs: Vec<(usize, usize)>,
    pub warning: Option<String>,
}

/// Ranks unordered pairs by shortest-path length (descending, ties to the
/// smaller pair) and returns the union of vertices on the top `p` paths.
pub fn select_common_clients(topology: &ClientTopology, p: usize) -> Result<CommonSelection> {
    if p == 0 {
        return Err(Error::Config("number of selected paths must be >= 1".into()));
    }
    let n = topology.num_clients();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs.sort_by(|a, b| {
        topology
            .path(b.0, b.1)
            .length
            .total_cmp(&topology.path(a.0, a.1).length)
            .then(a.cmp(b))
    });
    let warning = (p > pairs.len())
        .then(|| format!("requested {p} paths but only {} client pairs exist; using all", pairs.len()));
    pairs.truncate(p);
    let clients: BTreeSet<usize> = pairs
        .iter()
        .flat_map(|&(i, j)| topology.path(i, j).vertices.iter().copied())
        .collect();
    Ok(CommonSelection {
        clients: clients.into_iter().collect(),
        pairs,
        warning,
    })
}

/// Weighted average of the node models of the selected clients.
pub fn common_node_model(models: &[ModelParams], weights: &[usize], selected: &[usize]) -> Result<ModelParams> {
    if selected.is_empty() {
        return Err(Error::Contract("no clients selected for the common node model".into()));
    }
    let items: Vec<(&ModelParams, usize)> = selected.iter().map(|&i| (&models[i], weights[i])).collect();
    aggregate(&items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::{Manifest, ParamShape};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};
    use rand::Rng;

    fn params(values: Vec<f64>) -> ModelParams {
        let m = Manifest::new(vec![ParamShape::new("w", vec![values.len()])]);
        ModelParams::new(m, values).unwrap()
    }

    #[test]
    fn similarity_examples() {
        let a = params(vec![1.0, 2.0, -3.0]);
        let neg = params(vec![-1.0, -2.0, 3.0]);
        assert_abs_diff_eq!(similarity(&a, &a).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(similarity(&a, &neg).unwrap(), -1.0, epsilon = 1e-15);
        assert_eq!(similarity(&params(vec![1.0, 0.0]), &params(vec![0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(similarity(&params(vec![0.0, 0.0]), &params(vec![0.0, 1.0])).unwrap(), 0.0);
        assert!(similarity(&a, &params(vec![1.0])).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(sim_to_dist(1.0, 2.0), 0.0);
        assert_abs_diff_eq!(sim_to_dist(0.0, 2.0), 6.38905609893065, epsilon = 1e-12);
        assert_eq!(sim_to_dist(-1.0, 2.0), distance_ceiling(2.0));
        assert!(sim_to_dist(-1.0 + 1e-12, 2.0) < distance_ceiling(2.0));
        assert!(sim_to_dist(-1.0 + 1e-12, 2.0) > sim_to_dist(-1.0 + 1e-6, 2.0));
        assert!(sim_to_dist(-0.99, 5.0).is_finite());
    }

    #[test]
    fn triangle_prefers_two_hops() {
        let d = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        let t = ClientTopology::from_distances(d).unwrap();
        assert_eq!(t.path(0, 2).vertices, vec![0, 1, 2]);
        assert_eq!(t.path(0, 2).length, 2.0);
    }

    #[test]
    fn identical_models_use_direct_hops() {
        let models = vec![params(vec![1.0, 2.0]); 4];
        let t = build_topology(&models, 2.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(t.distances()[i][j], 0.0);
                let expect = if i == j { vec![i] } else { vec![i, j] };
                assert_eq!(t.path(i, j).vertices, expect);
            }
        }
    }

    #[test]
    fn rejects_bad_distance_matrices() {
        assert!(ClientTopology::from_distances(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(ClientTopology::from_distances(vec![vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        assert!(ClientTopology::from_distances(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
    }

    #[test]
    fn selection_examples() {
        let two = ClientTopology::from_distances(vec![vec![0.0, 3.0], vec![3.0, 0.0]]).unwrap();
        assert_eq!(select_common_clients(&two, 1).unwrap().clients, vec![0, 1]);
        let sel = select_common_clients(&two, 4).unwrap();
        assert!(sel.warning.is_some());
        assert_eq!(sel.pairs, vec![(0, 1)]);

        // (0,3) direct is 10 but 0-2-3 costs 6 and is the longest shortest path
        let d = vec![
            vec![0.0, 1.0, 3.0, 10.0],
            vec![1.0, 0.0, 2.5, 6.0],
            vec![3.0, 2.5, 0.0, 3.0],
            vec![10.0, 6.0, 3.0, 0.0],
        ];
        let t = ClientTopology::from_distances(d).unwrap();
        assert_eq!(t.path(0, 3).vertices, vec![0, 2, 3]);
        let sel = select_common_clients(&t, 1).unwrap();
        assert_eq!(sel.pairs, vec![(0, 3)]);
        assert_eq!(sel.clients, vec![0, 2, 3]);
        assert!(select_common_clients(&t, 0).is_err());
    }

    #[test]
    fn all_pairs_cover_every_client() {
        let d = vec![
            vec![0.0, 2.0, 3.0, 4.0],
            vec![2.0, 0.0, 2.0, 3.0],
            vec![3.0, 2.0, 0.0, 2.0],
            vec![4.0, 3.0, 2.0, 0.0],
        ];
        let t = ClientTopology::from_distances(d).unwrap();
        assert_eq!(select_common_clients(&t, 6).unwrap().clients, vec![0, 1, 2, 3]);
    }

    #[test]
    fn weighted_shared_models() {
        let models = vec![params(vec![4.0]), params(vec![8.0]), params(vec![-1.0])];
        let asg = ClusterAssignment::new(vec![0, 0, 1], 2).unwrap();
        let shared = shared_structural_models(&models, &[1, 3, 5], &asg).unwrap();
        assert_eq!(shared[0].values(), &[7.0]);
        assert_eq!(shared[1].values(), &[-1.0]);
        let eq = shared_structural_models(&models, &[2, 2, 2], &ClusterAssignment::new(vec![0, 0, 1], 2).unwrap())
            .unwrap();
        assert_eq!(eq[0].values(), &[6.0]);
        assert_eq!(common_node_model(&models, &[1, 3, 5], &[0, 1]).unwrap().values(), &[7.0]);
        assert_eq!(common_node_model(&models, &[1, 3, 5], &[2]).unwrap().values(), &[-1.0]);
        assert!(common_node_model(&models, &[1, 3, 5], &[]).is_err());
    }

    #[test]
    fn assignment_renumbers_and_rejects_empty() {
        let a = ClusterAssignment::new(vec![2, 0, 2, 1], 3).unwrap();
        assert_eq!(a.labels(), &[0, 1, 0, 2]);
        assert!(ClusterAssignment::new(vec![0, 0], 2).is_err());
    }

    fn planted(groups: &[usize], dim: usize, spread: f64, seed: u64) -> Vec<ModelParams> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers: Vec<Vec<f64>> = (0..4)
            .map(|g| (0..dim).map(|d| if d % 4 == g { 1.0 } else { 0.0 }).collect())
            .collect();
        groups
            .iter()
            .map(|&g| {
                params(
                    centers[g]
                        .iter()
                        .map(|c| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            c + spread * z
                        })
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn kmeans_trivial_cases() {
        let models = planted(&[0, 1, 2, 3, 0], 8, 0.05, 1);
        assert_eq!(cluster_structural(&models, 1, 0).unwrap().labels(), &[0; 5]);
        let each = cluster_structural(&models, 5, 0).unwrap();
        assert_eq!(each.as_sets().len(), 5);
        assert!(cluster_structural(&models, 6, 0).is_err());
        assert!(cluster_structural(&models, 0, 0).is_err());
    }

    #[test]
    fn kmeans_recovers_planted_groups() {
        let groups = [0, 1, 0, 0, 1, 1, 0, 1];
        let models = planted(&groups, 16, 0.05, 7);
        for seed in 0..10 {
            let asg = cluster_structural(&models, 2, seed).unwrap();
            let expect = ClusterAssignment::new(groups.to_vec(), 2).unwrap();
            assert_eq!(asg.as_sets(), expect.as_sets());
        }
    }

    #[test]
    fn kmeans_partition_survives_relabeling() {
        let groups = [0, 1, 2, 0, 1, 2, 2, 0, 1];
        let models = planted(&groups, 12, 0.05, 3);
        let perm = [4, 7, 0, 2, 8, 1, 6, 3, 5];
        let mut permuted = vec![models[0].clone(); models.len()];
        for (i, &p) in perm.iter().enumerate() {
            permuted[p] = models[i].clone();
        }
        let a = cluster_structural(&models, 3, 11).unwrap();
        let b = cluster_structural(&permuted, 3, 11).unwrap();
        let mapped: BTreeSet<BTreeSet<usize>> = a
            .as_sets()
            .into_iter()
            .map(|s| s.into_iter().map(|i| perm[i]).collect())
            .collect();
        assert_eq!(mapped, b.as_sets());
    }

    proptest! {
        #[test]
        fn distance_is_monotone_in_similarity(a in -0.9999f64..1.0, b in -0.9999f64..1.0, alpha in 0.1f64..5.0) {
            prop_assume!(b - a > 1e-9);
            prop_assert!(sim_to_dist(a, alpha) > sim_to_dist(b, alpha));
            prop_assert!(sim_to_dist(a, alpha) < distance_ceiling(alpha));
        }

        #[test]
        fn shortest_paths_never_exceed_direct(seed in any::<u64>(), n in 2usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let models: Vec<ModelParams> = (0..n)
                .map(|_| params((0..6).map(|_| rng.random_range(-1.0..1.0)).collect()))
                .collect();
            let t = build_topology(&models, 2.0).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let p = t.path(i, j);
                    prop_assert_eq!(t.distances()[i][j], t.distances()[j][i]);
                    prop_assert!(p.length <= t.distances()[i][j]);
                    prop_assert_eq!(p.vertices.first(), Some(&i));
                    prop_assert_eq!(p.vertices.last(), Some(&j));
                }
            }
        }
    }
}
