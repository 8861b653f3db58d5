//! Properties of ICD, FCI and the orientation rules under the d-separation
//! oracle, on graphs small enough to check exhaustively.

mod common;

use icd::citest::{CachedTester, CiTester};
use icd::fci::{fci, fci_skeleton_phase1, AdjacencySets, FciConfig};
use icd::graph::{graph_equal, CausalDag, EdgeMark, MixedGraph, NodeId};
use icd::icd::{icd_from, icd_iteration, icd_main, icd_traced, pds_distances, Closure, IcdConfig};
use icd::oracle::{true_pag, DSepOracle};
use icd::orientation::{apply_rules_in_order, orient_from_scratch, orient_v_structures, ConflictPolicy, Rule, SepsetRecord};
use icd::simgen::Instance;
use rand::seq::SliceRandom;

use common::*;

fn instances(count: u64, base: u64) -> impl Iterator<Item = Instance> {
    (0..count).map(move |i| Instance::generate(6 + (i as usize % 6), 2.0, base + i).unwrap())
}

/// Relabels DAG nodes by `perm` (old id to new id), keeping roles.
fn relabel(dag: &CausalDag, perm: &[NodeId]) -> CausalDag {
    let edges: Vec<_> = dag.edges().into_iter().map(|(a, b)| (perm[a], perm[b])).collect();
    let mut roles = dag.roles().to_vec();
    for v in 0..dag.node_count() {
        roles[perm[v]] = dag.role(v);
    }
    CausalDag::new(dag.node_count(), &edges, roles).unwrap()
}

/// Carries a PAG over observed indices of `old` onto those of `new`.
fn carry(pag: &MixedGraph, old: &CausalDag, new: &CausalDag, perm: &[NodeId]) -> MixedGraph {
    let old_obs = old.observed();
    let new_obs = new.observed();
    let idx = |i: usize| new_obs.iter().position(|&v| v == perm[old_obs[i]]).unwrap();
    let mut out = MixedGraph::empty(pag.node_count());
    for (a, b) in pag.edges() {
        out.add_edge(idx(a), idx(b), pag.mark(b, a).unwrap(), pag.mark(a, b).unwrap()).unwrap();
    }
    out
}

#[test]
fn results_do_not_depend_on_node_labels() {
    let mut rng = rng(71);
    for inst in instances(40, 7100) {
        let dag = inst.dag();
        let mut perm: Vec<NodeId> = (0..dag.node_count()).collect();
        perm.shuffle(&mut rng);
        let moved = relabel(dag, &perm);
        let truth = true_pag(dag).unwrap();
        assert!(graph_equal(&true_pag(&moved).unwrap(), &carry(&truth, dag, &moved, &perm)).unwrap());
        let oracle = DSepOracle::new(moved.clone());
        let icd = icd_main(&mut CachedTester::new(&oracle), &IcdConfig::default()).unwrap();
        assert!(graph_equal(&icd, &true_pag(&moved).unwrap()).unwrap());
    }
}

#[test]
fn adjacency_search_sepsets_are_true_separations() {
    let mut rng = rng(72);
    let mut checked = 0;
    while checked < 20 {
        let dag = random_partitioned_dag(9, 0.35, &mut rng);
        let obs = dag.observed();
        if obs.len() < 3 || obs.len() > 8 {
            continue;
        }
        let oracle = DSepOracle::new(dag.clone());
        let (g, seps) = fci_skeleton_phase1(&mut CachedTester::new(&oracle), &FciConfig::default()).unwrap();
        for ((x, y), z) in seps.entries() {
            assert!(!g.is_adjacent(x, y));
            // Selection variables are always conditioned on.
            let zd: Vec<NodeId> = z.iter().map(|&v| obs[v]).chain(dag.selection()).collect();
            assert!(brute_d_separated(&dag, obs[x], obs[y], &zd));
        }
        for x in 0..obs.len() {
            for y in x + 1..obs.len() {
                assert_eq!(g.is_adjacent(x, y), seps.get(x, y).is_none());
            }
        }
        checked += 1;
    }
}

#[test]
fn fci_with_one_sided_adjacency_sets_is_still_exact() {
    let cfg = FciConfig { adjacency_sets: AdjacencySets::First, ..FciConfig::default() };
    for inst in instances(30, 7300) {
        let oracle = DSepOracle::new(inst.dag().clone());
        let got = fci(&mut CachedTester::new(&oracle), &cfg).unwrap();
        assert!(graph_equal(&got, &true_pag(inst.dag()).unwrap()).unwrap());
    }
}

#[test]
fn every_closure_mode_recovers_the_true_pag() {
    for closure in [Closure::Off, Closure::Connected, Closure::Shortest] {
        let cfg = IcdConfig { closure, ..IcdConfig::default() };
        for inst in instances(24, 7400) {
            let oracle = DSepOracle::new(inst.dag().clone());
            let got = icd_main(&mut CachedTester::new(&oracle), &cfg).unwrap();
            assert!(graph_equal(&got, &true_pag(inst.dag()).unwrap()).unwrap(), "{closure:?}");
        }
    }
}

/// Runs to the end and returns the final graph and separating sets.
fn run_with_sepsets(oracle: &DSepOracle) -> (MixedGraph, SepsetRecord) {
    let mut seps = SepsetRecord::new();
    let g = icd_traced(&mut CachedTester::new(oracle), &IcdConfig::default(), |v| seps = v.sepsets.clone()).unwrap();
    (g, seps)
}

#[test]
fn orientation_is_idempotent_and_order_free() {
    let mut rng = rng(75);
    for inst in instances(40, 7500) {
        let oracle = DSepOracle::new(inst.dag().clone());
        let (g, seps) = run_with_sepsets(&oracle);
        let mut again = g.clone();
        orient_from_scratch(&mut again, &seps, ConflictPolicy::Fail).unwrap();
        assert!(graph_equal(&again, &g).unwrap());
        for _ in 0..5 {
            let mut order = Rule::ALL.to_vec();
            order.shuffle(&mut rng);
            let mut h = g.clone();
            h.reset_marks(EdgeMark::Circle);
            orient_v_structures(&mut h, &seps, ConflictPolicy::Fail).unwrap();
            apply_rules_in_order(&mut h, &seps, ConflictPolicy::Fail, &order).unwrap();
            assert!(graph_equal(&h, &g).unwrap(), "order {order:?}");
        }
    }
}

#[test]
fn resuming_from_a_snapshot_matches_a_full_run() {
    for inst in instances(30, 7600) {
        let oracle = DSepOracle::new(inst.dag().clone());
        let full = icd_main(&mut CachedTester::new(&oracle), &IcdConfig::default()).unwrap();
        let mut snapshot = None;
        let stop = IcdConfig { n_max: Some(1), ..IcdConfig::default() };
        icd_traced(&mut CachedTester::new(&oracle), &stop, |v| snapshot = Some((v.graph.clone(), v.sepsets.clone())))
            .unwrap();
        let (g, seps) = snapshot.unwrap();
        let rest = IcdConfig { r0: 2, ..IcdConfig::default() };
        let resumed = icd_from(g, seps, &mut CachedTester::new(&oracle), &rest, |_| {}).unwrap();
        assert!(graph_equal(&resumed, &full).unwrap());
    }
}

#[test]
fn queries_respect_the_iteration_size_and_distance_bound() {
    for inst in instances(30, 7700) {
        let oracle = DSepOracle::new(inst.dag().clone());
        let mut ci = CachedTester::new(&oracle).with_audit();
        let cfg = IcdConfig::default();
        let mut g = MixedGraph::complete(oracle.num_vars(), EdgeMark::Circle);
        let mut seps = SepsetRecord::new();
        let mut seen = 0;
        for r in 0..oracle.num_vars() {
            let before = g.clone();
            let done = icd_iteration(&mut g, &mut seps, r, &mut ci, &cfg).unwrap();
            let audit = ci.audit().unwrap();
            for e in &audit[seen..] {
                assert_eq!(e.cond.len(), r);
                // Adjacencies only shrink within an iteration, so a
                // member close enough at query time was close on entry.
                let dx = pds_distances(&before, e.x, e.y, cfg.restriction).unwrap();
                let dy = pds_distances(&before, e.y, e.x, cfg.restriction).unwrap();
                for &z in &e.cond {
                    let near = dx[z].into_iter().chain(dy[z]).min();
                    assert!(near.is_some_and(|d| d <= r), "member {z} of {:?} at r = {r}", e.cond);
                }
            }
            seen = audit.len();
            if done {
                break;
            }
        }
        let audit = ci.audit().unwrap();
        let fresh = audit.iter().filter(|e| e.fresh).count() as u64;
        assert_eq!(fresh, ci.stats().total());
        assert_eq!(audit.len() as u64 - fresh, ci.stats().cache_hits());
    }
}
