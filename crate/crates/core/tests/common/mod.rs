//! Brute-force reference implementations used to check the library.
//!
//! Everything here enumerates paths or subsets directly from the textbook
//! definitions, with no pruning, so it is only usable on tiny graphs.

#![allow(dead_code)]

use std::io::Write;

use icd::graph::{CausalDag, EdgeMark, MixedGraph, NodeId, NodeRole};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Prints a criterion verdict straight to the process stdout, bypassing the
/// test harness capture so the line always shows.
pub fn report(id: u32, pass: bool, detail: &str) {
    let line = format!("criterion {id}: {} ({detail})\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn skeleton_dag(dag: &CausalDag) -> Vec<Vec<NodeId>> {
    let n = dag.node_count();
    (0..n).map(|v| dag.parents(v).iter().chain(dag.children(v)).copied().collect()).collect()
}

/// Calls `f` with every simple path (as a node list) from `start` in `adj`.
pub fn for_each_simple_path(adj: &[Vec<NodeId>], start: NodeId, f: &mut dyn FnMut(&[NodeId])) {
    fn go(adj: &[Vec<NodeId>], path: &mut Vec<NodeId>, on: &mut Vec<bool>, f: &mut dyn FnMut(&[NodeId])) {
        f(path);
        let cur = *path.last().unwrap();
        for &w in &adj[cur] {
            if !on[w] {
                on[w] = true;
                path.push(w);
                go(adj, path, on, f);
                path.pop();
                on[w] = false;
            }
        }
    }
    let mut on = vec![false; adj.len()];
    on[start] = true;
    go(adj, &mut vec![start], &mut on, f);
}

fn is_ancestor_of_set(dag: &CausalDag, v: NodeId, z: &[NodeId]) -> bool {
    // v is an ancestor of some member of z (itself included): search
    // children from v.
    let mut stack = vec![v];
    let mut seen = vec![false; dag.node_count()];
    while let Some(u) = stack.pop() {
        if z.contains(&u) {
            return true;
        }
        if !seen[u] {
            seen[u] = true;
            stack.extend(dag.children(u));
        }
    }
    false
}

/// d-separation by enumerating every simple path between `x` and `y`: a
/// path is active when each collider is an ancestor of `z` (or in it) and
/// each non-collider is outside `z`.
pub fn brute_d_separated(dag: &CausalDag, x: NodeId, y: NodeId, z: &[NodeId]) -> bool {
    let adj = skeleton_dag(dag);
    let arrow_into = |from: NodeId, to: NodeId| dag.parents(to).contains(&from);
    let mut active = false;
    for_each_simple_path(&adj, x, &mut |p| {
        if active || *p.last().unwrap() != y {
            return;
        }
        let ok = (1..p.len() - 1).all(|i| {
            let (u, v, w) = (p[i - 1], p[i], p[i + 1]);
            if arrow_into(u, v) && arrow_into(w, v) {
                is_ancestor_of_set(dag, v, z)
            } else {
                !z.contains(&v)
            }
        });
        active |= ok;
    });
    !active
}

/// Every DAG on `n` labelled nodes (each pair absent, forward or backward,
/// cyclic combinations dropped), all nodes observed.
pub fn all_dags(n: usize) -> Vec<CausalDag> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let total = 3usize.pow(pairs.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut edges = Vec::new();
        for &(a, b) in &pairs {
            match c % 3 {
                1 => edges.push((a, b)),
                2 => edges.push((b, a)),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(d) = CausalDag::observed_only(n, &edges) {
            out.push(d);
        }
    }
    out
}

/// Random DAG under a random node order, with each pair joined with
/// probability `p`.
pub fn random_dag(n: usize, p: f64, rng: &mut ChaCha8Rng) -> CausalDag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((order[i], order[j]));
            }
        }
    }
    CausalDag::observed_only(n, &edges).unwrap()
}

/// Random DAG with some nodes turned latent or selection.
pub fn random_partitioned_dag(n: usize, p: f64, rng: &mut ChaCha8Rng) -> CausalDag {
    let d = random_dag(n, p, rng);
    let roles = (0..n)
        .map(|_| match rng.random_range(0..10) {
            0..=1 => NodeRole::Latent,
            2 => NodeRole::Selection,
            _ => NodeRole::Observed,
        })
        .collect();
    d.with_roles(roles).unwrap()
}

/// All subsets of `pool` (as sorted vectors).
pub fn subsets(pool: &[NodeId]) -> Vec<Vec<NodeId>> {
    (0..1u32 << pool.len())
        .map(|m| (0..pool.len()).filter(|i| m >> i & 1 == 1).map(|i| pool[i]).collect())
        .collect()
}

/// Mixed graph with each pair adjacent with probability `p` and each
/// endpoint mark uniform over circle, arrowhead and tail.
pub fn random_mixed_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> MixedGraph {
    const MARKS: [EdgeMark; 3] = [EdgeMark::Circle, EdgeMark::Arrowhead, EdgeMark::Tail];
    let mut g = MixedGraph::empty(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                let ma = MARKS[rng.random_range(0..3)];
                let mb = MARKS[rng.random_range(0..3)];
                g.add_edge(a, b, ma, mb).unwrap();
            }
        }
    }
    g
}

fn skeleton_mixed(g: &MixedGraph) -> Vec<Vec<NodeId>> {
    (0..g.node_count()).map(|v| g.neighbors(v).collect()).collect()
}

/// Internal nodes of `p` are each colliders or in a triangle with their
/// path neighbours.
pub fn collider_or_triangle_path(g: &MixedGraph, p: &[NodeId]) -> bool {
    (1..p.len().saturating_sub(1)).all(|i| {
        let (u, v, w) = (p[i - 1], p[i], p[i + 1]);
        g.has_mark(u, v, EdgeMark::Arrowhead) && g.has_mark(w, v, EdgeMark::Arrowhead) || g.is_adjacent(u, w)
    })
}

/// Nodes lying on at least one simple path between `a` and `b`.
pub fn brute_on_paths_between(g: &MixedGraph, a: NodeId, b: NodeId) -> Vec<bool> {
    let mut on = vec![false; g.node_count()];
    on[a] = true;
    on[b] = true;
    for_each_simple_path(&skeleton_mixed(g), a, &mut |p| {
        if *p.last().unwrap() == b {
            for &v in p {
                on[v] = true;
            }
        }
    });
    on
}

/// Shortest qualifying path length from `a` to each node by full
/// enumeration. `forbid_b` keeps `b` off the path and `restrict` requires
/// every path node to lie on a path between `a` and `b`.
pub fn brute_pds_distances(g: &MixedGraph, a: NodeId, b: NodeId, forbid_b: bool, restrict: bool) -> Vec<Option<usize>> {
    let allowed = if restrict { brute_on_paths_between(g, a, b) } else { vec![true; g.node_count()] };
    let mut dist: Vec<Option<usize>> = vec![None; g.node_count()];
    for_each_simple_path(&skeleton_mixed(g), a, &mut |p| {
        if p.len() < 2 || (forbid_b && p.contains(&b)) || !p.iter().all(|&v| allowed[v]) {
            return;
        }
        if collider_or_triangle_path(g, p) {
            let z = *p.last().unwrap();
            let len = p.len() - 1;
            if dist[z].is_none_or(|d| len < d) {
                dist[z] = Some(len);
            }
        }
    });
    dist
}

/// Possible-D-Sep(a, b): nodes other than `a`, `b` reachable from `a` by a
/// collider-or-triangle path.
pub fn brute_possible_d_sep(g: &MixedGraph, a: NodeId, b: NodeId) -> Vec<NodeId> {
    let d = brute_pds_distances(g, a, b, false, false);
    (0..g.node_count()).filter(|&v| v != a && v != b && d[v].is_some()).collect()
}

/// KS statistic from the definition: largest ECDF gap over pooled points.
pub fn brute_ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let f = |s: &[f64], t: f64| s.iter().filter(|&&v| v <= t).count() as f64 / s.len() as f64;
    a.iter().chain(b).map(|&t| (f(a, t) - f(b, t)).abs()).fold(0.0, f64::max)
}

/// Exact permutation p-value: share of all `C(m+n, m)` relabellings of the
/// pooled sample whose statistic is at least the observed one.
pub fn permutation_ks_p_value(a: &[f64], b: &[f64]) -> f64 {
    let observed = brute_ks_statistic(a, b);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (m, total) = (a.len(), pooled.len());
    let (mut hits, mut count) = (0u64, 0u64);
    for mask in 0u32..1 << total {
        if mask.count_ones() as usize != m {
            continue;
        }
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for (i, &v) in pooled.iter().enumerate() {
            if mask >> i & 1 == 1 { x.push(v) } else { y.push(v) }
        }
        count += 1;
        if brute_ks_statistic(&x, &y) >= observed - 1e-12 {
            hits += 1;
        }
    }
    hits as f64 / count as f64
}
