//! Random ground truth: connected upper-triangular DAGs, latent
//! confounders, linear-Gaussian data.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded with `seed_from_u64`,
//! which produces the same stream on every platform.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::citest::DataSet;
use crate::error::{Error, Result};
use crate::graph::{CausalDag, NodeId, NodeRole};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    /// Connectivity factor: expected degree per node is about `rho`.
    pub rho: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("need at least 2 nodes, got {}", self.n)));
        }
        if !(self.rho > 0.0) {
            return Err(Error::Config(format!("rho must be positive, got {}", self.rho)));
        }
        Ok(())
    }

    /// Edge probability `min(1, ρ / (n − 1))`.
    pub fn edge_probability(&self) -> f64 {
        (self.rho / (self.n - 1) as f64).min(1.0)
    }
}

/// Stream ids separating the independent uses of one instance seed.
mod stream {
    pub const GRAPH: u64 = 0;
    pub const LATENTS: u64 = 1;
    pub const WEIGHTS: u64 = 2;
    pub const DATA: u64 = 3;
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One draw of i.i.d. Bernoulli edges `i → j` over `i < j`, in row order.
fn bernoulli_upper_triangle(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// All-observed DAG with i.i.d. Bernoulli edges `i → j` for `i < j`,
/// resampled until weakly connected.
///
/// The rejection step raises the expected edge count noticeably above the
/// unconditioned `ρ·n/2` for sparse settings, since a connected graph needs
/// at least `n − 1` edges.
pub fn random_dag(cfg: &GenConfig) -> Result<CausalDag> {
    cfg.validate()?;
    let p = cfg.edge_probability();
    let mut rng = rng_for(cfg.seed, stream::GRAPH);
    loop {
        let edges = bernoulli_upper_triangle(cfg.n, p, &mut rng);
        let dag = CausalDag::observed_only(cfg.n, &edges)?;
        if dag.is_weakly_connected() {
            return Ok(dag);
        }
    }
}

/// Marks ⌊|P|/2⌋ nodes latent, chosen uniformly from the set `P` of
/// parentless nodes with at least two children. Selection set stays empty.
pub fn select_latents(dag: &CausalDag, seed: u64) -> Result<CausalDag> {
    let pool: Vec<NodeId> = (0..dag.node_count())
        .filter(|&v| dag.parents(v).is_empty() && dag.children(v).len() >= 2)
        .collect();
    let mut rng = rng_for(seed, stream::LATENTS);
    let mut roles = vec![NodeRole::Observed; dag.node_count()];
    for i in index::sample(&mut rng, pool.len(), pool.len() / 2) {
        roles[pool[i]] = NodeRole::Latent;
    }
    dag.with_roles(roles)
}

/// Linear SEM `X_j = Σ_i w_ij X_i + ε_j`, `ε_j ~ N(0, 1)`.
#[derive(Debug, Clone)]
pub struct LinearGaussianScm {
    dag: CausalDag,
    /// `weights[j]` pairs each parent of `j` with its coefficient.
    weights: Vec<Vec<(NodeId, f64)>>,
}

impl LinearGaussianScm {
    /// Draws each edge weight from `Uniform([−2, −0.5] ∪ [0.5, 2])`.
    pub fn random(dag: CausalDag, seed: u64) -> Self {
        let mut rng = rng_for(seed, stream::WEIGHTS);
        let weights = (0..dag.node_count())
            .map(|j| {
                dag.parents(j)
                    .iter()
                    .map(|&i| {
                        let magnitude = rng.random_range(0.5..=2.0);
                        let w = if rng.random_bool(0.5) { magnitude } else { -magnitude };
                        (i, w)
                    })
                    .collect()
            })
            .collect();
        LinearGaussianScm { dag, weights }
    }

    /// Explicit weights for the DAG's edges, given as `(from, to, w)`.
    pub fn with_weights(dag: CausalDag, edges: &[(NodeId, NodeId, f64)]) -> Result<Self> {
        let mut weights: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); dag.node_count()];
        for &(i, j, w) in edges {
            if j >= dag.node_count() || !dag.parents(j).contains(&i) {
                return Err(Error::Config(format!("no edge {i} -> {j} in the DAG")));
            }
            weights[j].push((i, w));
        }
        for j in 0..dag.node_count() {
            if weights[j].len() != dag.parents(j).len() {
                return Err(Error::Config(format!("missing weight for a parent of {j}")));
            }
        }
        Ok(LinearGaussianScm { dag, weights })
    }

    pub fn dag(&self) -> &CausalDag {
        &self.dag
    }

    pub fn weight(&self, from: NodeId, to: NodeId) -> Option<f64> {
        self.weights[to].iter().find(|(i, _)| *i == from).map(|&(_, w)| w)
    }

    /// Weighted edges `(from, to, w)`, sorted by edge.
    pub fn weighted_edges(&self) -> Vec<(NodeId, NodeId, f64)> {
        let mut out: Vec<_> = self
            .weights
            .iter()
            .enumerate()
            .flat_map(|(j, ws)| ws.iter().map(move |&(i, w)| (i, j, w)))
            .collect();
        out.sort_by_key(|&(i, j, _)| (i, j));
        out
    }
}

/// Ancestral sampling of `ell` rows; latent and selection columns are
/// dropped. Columns follow the observed nodes in ascending id order and are
/// named by their DAG ids.
pub fn sample_data(scm: &LinearGaussianScm, ell: usize, seed: u64) -> Result<DataSet> {
    if ell == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let dag = &scm.dag;
    let order = dag.topological_order()?;
    let observed = dag.observed();
    let n = dag.node_count();
    let mut rng = rng_for(seed, stream::DATA);
    let mut row = vec![0.0; n];
    let mut values = DMatrix::zeros(ell, observed.len());
    for s in 0..ell {
        for &j in &order {
            let noise: f64 = rng.sample(StandardNormal);
            row[j] = scm.weights[j].iter().map(|&(i, w)| w * row[i]).sum::<f64>() + noise;
        }
        for (c, &v) in observed.iter().enumerate() {
            values[(s, c)] = row[v];
        }
    }
    let names = observed.iter().map(ToString::to_string).collect();
    Ok(DataSet::with_names(values, names))
}

/// Ground truth for one benchmark instance: DAG with latents plus weights.
#[derive(Debug, Clone)]
pub struct Instance {
    pub seed: u64,
    pub scm: LinearGaussianScm,
}

impl Instance {
    /// Graph, latents and weights all derived from `seed`.
    pub fn generate(n: usize, rho: f64, seed: u64) -> Result<Self> {
        let dag = random_dag(&GenConfig { n, rho, seed })?;
        let dag = select_latents(&dag, seed)?;
        Ok(Instance { seed, scm: LinearGaussianScm::random(dag, seed) })
    }

    pub fn dag(&self) -> &CausalDag {
        self.scm.dag()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_nodes_always_connected() {
        for seed in 0..20 {
            let d = random_dag(&GenConfig { n: 2, rho: 1.5, seed }).unwrap();
            assert_eq!(d.edges(), vec![(0, 1)]);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = GenConfig { n: 12, rho: 2.0, seed: 42 };
        assert_eq!(random_dag(&cfg).unwrap(), random_dag(&cfg).unwrap());
        let a = Instance::generate(12, 2.0, 5).unwrap();
        let b = Instance::generate(12, 2.0, 5).unwrap();
        assert_eq!(a.dag(), b.dag());
        assert_eq!(a.scm.weighted_edges(), b.scm.weighted_edges());
        let da = sample_data(&a.scm, 50, 1).unwrap();
        let db = sample_data(&b.scm, 50, 1).unwrap();
        assert_eq!(da.values(), db.values());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(random_dag(&GenConfig { n: 1, rho: 2.0, seed: 0 }).is_err());
        assert!(random_dag(&GenConfig { n: 5, rho: 0.0, seed: 0 }).is_err());
    }

    #[test]
    fn raw_edge_count_matches_binomial_mean() {
        // Binomial(105, 2/14) has mean ρ·n/2 = 15 and sd ≈ 3.6; 1000 draws
        // put the sample mean within ±0.4 with overwhelming probability.
        let cfg = GenConfig { n: 15, rho: 2.0, seed: 0 };
        let mut rng = rng_for(77, stream::GRAPH);
        let total: usize =
            (0..1000).map(|_| bernoulli_upper_triangle(cfg.n, cfg.edge_probability(), &mut rng).len()).sum();
        let mean = total as f64 / 1000.0;
        assert!((13.5..=16.5).contains(&mean), "mean edge count {mean}");
    }

    #[test]
    fn connected_edge_count_matches_reference_simulation() {
        // Independent simulation (20000 accepted graphs, separate RNG and
        // connectivity routine) gives a conditional mean of 19.12.
        let total: usize = (0..1000)
            .map(|seed| random_dag(&GenConfig { n: 15, rho: 2.0, seed }).unwrap().edge_count())
            .sum();
        let mean = total as f64 / 1000.0;
        assert!((18.5..=19.75).contains(&mean), "mean edge count {mean}");
    }

    #[test]
    fn latent_choice_examples() {
        let collider = CausalDag::observed_only(3, &[(0, 2), (1, 2)]).unwrap();
        // Neither root has two children.
        assert!(select_latents(&collider, 0).unwrap().latent().is_empty());
        let forks = CausalDag::observed_only(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(select_latents(&forks, 3).unwrap().latent().len(), 1);
        let chain = CausalDag::observed_only(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(select_latents(&chain, 0).unwrap().latent().is_empty());
    }

    #[test]
    fn latents_are_parentless_with_two_children() {
        for seed in 0..1000 {
            let inst = Instance::generate(15, 2.0, seed).unwrap();
            let d = inst.dag();
            let pool = (0..15).filter(|&v| d.parents(v).is_empty() && d.children(v).len() >= 2).count();
            assert_eq!(d.latent().len(), pool / 2);
            for v in d.latent() {
                assert!(d.parents(v).is_empty() && d.children(v).len() >= 2);
            }
            assert!(d.selection().is_empty());
        }
    }

    #[test]
    fn weights_in_range() {
        let inst = Instance::generate(20, 2.0, 9).unwrap();
        for (_, _, w) in inst.scm.weighted_edges() {
            assert!((0.5..=2.0).contains(&w.abs()));
        }
        assert_eq!(inst.scm.weighted_edges().len(), inst.dag().edge_count());
    }

    fn corr(d: &DataSet, a: usize, b: usize) -> f64 {
        let c = d.covariance();
        c[(a, b)] / (c[(a, a)] * c[(b, b)]).sqrt()
    }

    #[test]
    fn edgeless_columns_uncorrelated_with_unit_variance() {
        let dag = CausalDag::observed_only(4, &[]).unwrap();
        let scm = LinearGaussianScm::random(dag, 0);
        let d = sample_data(&scm, 10_000, 7).unwrap();
        for a in 0..4 {
            assert!((d.covariance()[(a, a)] - 1.0).abs() < 0.05);
            for b in a + 1..4 {
                assert!(corr(&d, a, b).abs() < 0.05);
            }
        }
    }

    #[test]
    fn single_edge_correlation_matches_weight() {
        let dag = CausalDag::observed_only(2, &[(0, 1)]).unwrap();
        let scm = LinearGaussianScm::with_weights(dag, &[(0, 1, 2.0)]).unwrap();
        let d = sample_data(&scm, 10_000, 11).unwrap();
        let expected = 2.0 / 5f64.sqrt();
        assert!((corr(&d, 0, 1) - expected).abs() < 0.02);
    }

    #[test]
    fn latent_columns_dropped() {
        let dag = CausalDag::with_partition(3, &[(1, 0), (1, 2)], &[0, 2], &[1], &[]).unwrap();
        let scm = LinearGaussianScm::random(dag, 1);
        let d = sample_data(&scm, 10, 0).unwrap();
        assert_eq!(d.var_count(), 2);
        assert_eq!(d.names(), &["0".to_string(), "2".to_string()]);
        assert!(sample_data(&scm, 0, 0).is_err());
    }
}
