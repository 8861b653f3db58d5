//! Anytime iterative causal discovery.
//!
//! Iteration `r` tests each remaining edge `x *-* y` against conditioning
//! sets of exactly `r` nodes, each drawn from nodes within `r` edges of `x`
//! or `y` along a PDS-path (every internal node a collider or in a
//! triangle). Sets whose members are not linked to `x` or `y` through the
//! set itself are skipped and the rest are tried closest-first. After the
//! sweep the graph is re-oriented from scratch, so the output after any
//! iteration is a valid (if less informative) PAG.

use itertools::Itertools;

use crate::citest::CachedTester;
use crate::error::{Error, Result};
use crate::graph::{EdgeMark, MixedGraph, NodeId};
use crate::orientation::{orient_from_scratch, ConflictPolicy, SepsetRecord};
use crate::pds::{on_paths_between, shortest_paths, PathLimits};

/// How candidate conditioning sets are ordered for one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CandidateOrder {
    /// Ascending mean PDS-path distance of the members, then lexicographic.
    #[default]
    Distance,
    /// Lexicographic on sorted member ids only.
    Lexicographic,
}

/// Whether PDS-path nodes must lie on some path between the tested pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathRestriction {
    #[default]
    OnPathsBetween,
    Off,
}

#[derive(Debug, Clone)]
pub struct IcdConfig {
    /// First conditioning-set size.
    pub r0: usize,
    /// Last conditioning-set size; `None` means `|O| − 2`.
    pub n_max: Option<usize>,
    pub order: CandidateOrder,
    pub restriction: PathRestriction,
    pub conflicts: ConflictPolicy,
    pub closure: Closure,
}

/// Pruning of candidate sets by shortest-PDS-path closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Closure {
    /// Every size-`r` subset of the pool is a candidate.
    Off,
    /// Each member must be reachable from `x` or `y` by a PDS-path whose
    /// internal nodes all belong to the set.
    Connected,
    /// As `Connected`, and that path must be a shortest PDS-path from the
    /// nearer anchor.
    #[default]
    Shortest,
}

impl Default for IcdConfig {
    fn default() -> Self {
        IcdConfig {
            r0: 0,
            n_max: None,
            order: CandidateOrder::Distance,
            restriction: PathRestriction::OnPathsBetween,
            conflicts: ConflictPolicy::Fail,
            closure: Closure::Shortest,
        }
    }
}

impl IcdConfig {
    /// Resolved `n_max` for `vars` observed variables, after validation.
    pub fn last_size(&self, vars: usize) -> Result<usize> {
        let cap = vars.saturating_sub(2);
        let n_max = self.n_max.map_or(cap, |n| n.min(cap));
        if self.r0 > n_max && vars >= 2 {
            return Err(Error::Config(format!("r0 = {} exceeds n_max = {n_max}", self.r0)));
        }
        Ok(n_max)
    }
}

/// One candidate conditioning set with its ordering score.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub nodes: Vec<NodeId>,
    /// Mean shortest PDS-path distance of the members (0 for the empty set).
    pub score: f64,
}

/// Shortest PDS-path length from `a` to every node, with respect to `b`.
///
/// Paths start at `a`, never pass through `b`, and every internal node is a
/// collider or part of a triangle on the path. Under
/// [`PathRestriction::OnPathsBetween`] every path node must also lie on
/// some path between `a` and `b`.
pub fn pds_distances(g: &MixedGraph, a: NodeId, b: NodeId, restriction: PathRestriction) -> Result<Vec<Option<usize>>> {
    pds_distances_within(g, a, b, restriction, None)
}

fn pds_distances_within(
    g: &MixedGraph,
    a: NodeId,
    b: NodeId,
    restriction: PathRestriction,
    max_len: Option<usize>,
) -> Result<Vec<Option<usize>>> {
    g.check_node(a)?;
    g.check_node(b)?;
    if a == b {
        return Err(Error::NotDistinct(vec![a, b]));
    }
    let mask = match restriction {
        PathRestriction::OnPathsBetween => Some(on_paths_between(g, a, b)),
        PathRestriction::Off => None,
    };
    let limits = PathLimits { forbid: Some(b), allowed: mask.as_deref(), max_len };
    Ok(shortest_paths(g, a, &limits))
}

/// Candidate conditioning sets of size `r` for the edge `x *-* y`.
///
/// The pool is every node other than `x`, `y` whose PDS-path distance from
/// `x` or from `y` is at most `r`. Each size-`r` subset that passes the
/// configured [`Closure`] filter is scored by the mean of its members'
/// distances (the nearer anchor for each member).
pub fn pdsep_r(g: &MixedGraph, x: NodeId, y: NodeId, r: usize, cfg: &IcdConfig) -> Result<Vec<CandidateSet>> {
    g.check_node(x)?;
    g.check_node(y)?;
    if x == y || !g.is_adjacent(x, y) {
        return Err(Error::NotAdjacent(x, y));
    }
    if r == 0 {
        return Ok(vec![CandidateSet { nodes: Vec::new(), score: 0.0 }]);
    }
    let from_x = pds_distances_within(g, x, y, cfg.restriction, Some(r))?;
    let from_y = pds_distances_within(g, y, x, cfg.restriction, Some(r))?;
    let dist: Vec<Option<usize>> = from_x
        .iter()
        .zip(&from_y)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => Some(*a.min(b)),
            (a, b) => a.or(*b),
        })
        .collect();
    let pool: Vec<NodeId> = (0..g.node_count())
        .filter(|&v| v != x && v != y && dist[v].is_some_and(|d| d <= r))
        .collect();
    if pool.len() < r {
        return Ok(Vec::new());
    }
    let between = match (cfg.closure, cfg.restriction) {
        (Closure::Off, _) | (_, PathRestriction::Off) => None,
        (_, PathRestriction::OnPathsBetween) => Some(on_paths_between(g, x, y)),
    };
    let anchors = [(x, y, &from_x), (y, x, &from_y)];
    let mut scored: Vec<(usize, Vec<NodeId>)> = pool
        .into_iter()
        .combinations(r)
        .filter(|set| cfg.closure == Closure::Off || is_closed(g, set, &anchors, &dist, between.as_deref(), r, cfg.closure))
        .map(|set| {
            let total = match cfg.order {
                CandidateOrder::Distance => set.iter().map(|&v| dist[v].unwrap_or(0)).sum(),
                CandidateOrder::Lexicographic => 0,
            };
            (total, set)
        })
        .collect();
    // Same size r for all sets, so comparing sums compares means.
    scored.sort();
    Ok(scored
        .into_iter()
        .map(|(total, nodes)| CandidateSet { score: total as f64 / r as f64, nodes })
        .collect())
}

/// Whether every member of `set` is reached from one of the anchors by a
/// PDS-path that runs through `set` only (a shortest one for
/// [`Closure::Shortest`]).
fn is_closed(
    g: &MixedGraph,
    set: &[NodeId],
    anchors: &[(NodeId, NodeId, &Vec<Option<usize>>); 2],
    dist: &[Option<usize>],
    between: Option<&[bool]>,
    r: usize,
    closure: Closure,
) -> bool {
    let within: Vec<Vec<Option<usize>>> = anchors
        .iter()
        .map(|&(a, b, _)| {
            let mut allowed = vec![false; g.node_count()];
            for &v in set.iter().chain([&a]) {
                allowed[v] = between.is_none_or(|m| m[v]);
            }
            shortest_paths(g, a, &PathLimits { forbid: Some(b), allowed: Some(&allowed), max_len: Some(r) })
        })
        .collect();
    set.iter().all(|&z| {
        anchors.iter().zip(&within).any(|(&(_, _, full), inside)| match closure {
            Closure::Shortest => full[z].is_some() && full[z] == dist[z] && inside[z] == full[z],
            _ => inside[z].is_some(),
        })
    })
}

/// One refinement pass at conditioning-set size `r`; returns `done`, true
/// when no edge had any candidate set.
///
/// Edges are visited in lexicographic order of a snapshot taken on entry;
/// removals take effect immediately for later edges. The graph is then
/// re-oriented from scratch using all separating sets recorded so far.
pub fn icd_iteration(
    g: &mut MixedGraph,
    seps: &mut SepsetRecord,
    r: usize,
    ci: &mut CachedTester<'_>,
    cfg: &IcdConfig,
) -> Result<bool> {
    let mut done = true;
    for (x, y) in g.edges() {
        let candidates = pdsep_r(g, x, y, r, cfg)?;
        if candidates.is_empty() {
            continue;
        }
        done = false;
        for cand in candidates {
            if ci.test(x, y, &cand.nodes)?.is_independent() {
                g.remove_edge(x, y);
                seps.insert(x, y, &cand.nodes);
                break;
            }
        }
    }
    orient_from_scratch(g, seps, cfg.conflicts)?;
    Ok(done)
}

/// Snapshot handed to [`icd_traced`] observers after each iteration.
#[derive(Debug, Clone, Copy)]
pub struct IterationView<'a> {
    pub r: usize,
    pub graph: &'a MixedGraph,
    pub sepsets: &'a SepsetRecord,
    pub done: bool,
}

/// Runs ICD from the complete `o-o` graph over the tester's variables.
pub fn icd_main(ci: &mut CachedTester<'_>, cfg: &IcdConfig) -> Result<MixedGraph> {
    icd_traced(ci, cfg, |_| {})
}

/// [`icd_main`] with a callback after every iteration.
pub fn icd_traced(
    ci: &mut CachedTester<'_>,
    cfg: &IcdConfig,
    observe: impl FnMut(IterationView<'_>),
) -> Result<MixedGraph> {
    let n = ci.num_vars();
    let g = MixedGraph::complete(n, EdgeMark::Circle);
    icd_from(g, SepsetRecord::new(), ci, cfg, observe)
}

/// Continues ICD from a caller-supplied PAG and the separating sets that
/// explain its missing edges.
pub fn icd_from(
    mut g: MixedGraph,
    mut seps: SepsetRecord,
    ci: &mut CachedTester<'_>,
    cfg: &IcdConfig,
    mut observe: impl FnMut(IterationView<'_>),
) -> Result<MixedGraph> {
    let vars = ci.num_vars();
    if g.node_count() != vars {
        return Err(Error::NodeCountMismatch(g.node_count(), vars));
    }
    if vars < 2 {
        return Ok(g);
    }
    let n_max = cfg.last_size(vars)?;
    for r in cfg.r0..=n_max {
        let done = icd_iteration(&mut g, &mut seps, r, ci, cfg)?;
        observe(IterationView { r, graph: &g, sepsets: &seps, done });
        if done {
            break;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_pag, write_pag, CausalDag};
    use crate::oracle::DSepOracle;

    fn oracle(n: usize, edges: &[(usize, usize)]) -> DSepOracle {
        DSepOracle::new(CausalDag::observed_only(n, edges).unwrap())
    }

    #[test]
    fn complete_graph_distances_are_one() {
        let g = MixedGraph::complete(5, EdgeMark::Circle);
        let d = pds_distances(&g, 0, 1, PathRestriction::OnPathsBetween).unwrap();
        assert_eq!(d, vec![None, None, Some(1), Some(1), Some(1)]);
    }

    #[test]
    fn non_collider_stops_pds_path() {
        let g = parse_pag("pag 3\n0 o-> 1\n1 --> 2\n").unwrap();
        let d = pds_distances(&g, 0, 2, PathRestriction::Off).unwrap();
        assert_eq!(d[1], Some(1));
        let d = pds_distances(&g, 0, 1, PathRestriction::Off).unwrap();
        assert_eq!(d[2], None);
    }

    #[test]
    fn size_zero_candidate_is_empty_set() {
        let g = MixedGraph::complete(4, EdgeMark::Circle);
        let c = pdsep_r(&g, 2, 3, 0, &IcdConfig::default()).unwrap();
        assert_eq!(c, vec![CandidateSet { nodes: vec![], score: 0.0 }]);
    }

    #[test]
    fn size_one_candidates_on_complete_graph() {
        let g = MixedGraph::complete(4, EdgeMark::Circle);
        let c = pdsep_r(&g, 0, 1, 1, &IcdConfig::default()).unwrap();
        assert_eq!(
            c,
            vec![
                CandidateSet { nodes: vec![2], score: 1.0 },
                CandidateSet { nodes: vec![3], score: 1.0 }
            ]
        );
        assert!(pdsep_r(&MixedGraph::empty(3), 0, 1, 1, &IcdConfig::default()).is_err());
    }

    #[test]
    fn closer_sets_come_first() {
        // 0 o-o 1 is tested; 2 is adjacent to 0, 3 is two colliding steps out.
        let g = parse_pag("pag 4\n0 o-o 1\n0 o-> 2\n1 o-> 2\n2 <-> 3\n1 o-o 3\n").unwrap();
        let c = pdsep_r(&g, 0, 1, 2, &IcdConfig::default()).unwrap();
        assert_eq!(c[0].nodes, vec![2, 3]);
        let c = pdsep_r(&g, 0, 1, 1, &IcdConfig::default()).unwrap();
        assert_eq!(c.iter().map(|s| s.nodes.clone()).collect::<Vec<_>>(), vec![vec![2], vec![3]]);
    }

    #[test]
    fn closure_drops_sets_missing_an_intermediate_node() {
        // From 0: 2 at distance 1, 3 at distance 2 through the collider at 2.
        // From 1: 4 at distance 1.
        let g = parse_pag("pag 5\n0 o-o 1\n0 o-> 2\n2 <-o 3\n1 o-o 4\n").unwrap();
        let sets = |closure| {
            let cfg = IcdConfig { restriction: PathRestriction::Off, closure, ..IcdConfig::default() };
            pdsep_r(&g, 0, 1, 2, &cfg).unwrap().into_iter().map(|c| c.nodes).collect::<Vec<_>>()
        };
        assert_eq!(sets(Closure::Off), vec![vec![2, 4], vec![2, 3], vec![3, 4]]);
        assert_eq!(sets(Closure::Connected), vec![vec![2, 4], vec![2, 3]]);
        assert_eq!(sets(Closure::Shortest), vec![vec![2, 4], vec![2, 3]]);
    }

    #[test]
    fn members_adjacent_to_an_anchor_always_pass() {
        // 3 is also two steps out through 2, but its direct edge to 0 is the
        // shortest path and needs no other member.
        let g = parse_pag("pag 5\n0 o-o 1\n0 o-o 2\n2 o-o 3\n0 o-o 3\n1 o-o 4\n").unwrap();
        let cfg = IcdConfig { restriction: PathRestriction::Off, ..IcdConfig::default() };
        let sets: Vec<_> = pdsep_r(&g, 0, 1, 2, &cfg).unwrap().into_iter().map(|c| c.nodes).collect();
        assert_eq!(sets, vec![vec![2, 3], vec![2, 4], vec![3, 4]]);
    }

    #[test]
    fn independent_pair_removed_at_r0() {
        let o = oracle(2, &[]);
        let mut ci = CachedTester::new(&o);
        let mut g = MixedGraph::complete(2, EdgeMark::Circle);
        let mut seps = SepsetRecord::new();
        let done = icd_iteration(&mut g, &mut seps, 0, &mut ci, &IcdConfig::default()).unwrap();
        assert!(!done);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(seps.get(0, 1), Some(&[][..]));
    }

    #[test]
    fn chain_needs_r1() {
        let o = oracle(3, &[(0, 1), (1, 2)]);
        let mut ci = CachedTester::new(&o);
        let mut g = MixedGraph::complete(3, EdgeMark::Circle);
        let mut seps = SepsetRecord::new();
        let cfg = IcdConfig::default();
        icd_iteration(&mut g, &mut seps, 0, &mut ci, &cfg).unwrap();
        assert_eq!(g.edge_count(), 3);
        icd_iteration(&mut g, &mut seps, 1, &mut ci, &cfg).unwrap();
        assert!(!g.is_adjacent(0, 2));
        assert_eq!(seps.get(0, 2), Some(&[1][..]));
    }

    #[test]
    fn dependent_pair_keeps_circle_edge() {
        let o = oracle(2, &[(0, 1)]);
        let mut ci = CachedTester::new(&o);
        let g = icd_main(&mut ci, &IcdConfig::default()).unwrap();
        assert_eq!(write_pag(&g), "pag 2\n0 o-o 1\n");
    }

    #[test]
    fn v_structure_recovered() {
        let o = oracle(3, &[(0, 1), (2, 1)]);
        let mut ci = CachedTester::new(&o);
        let g = icd_main(&mut ci, &IcdConfig::default()).unwrap();
        assert_eq!(write_pag(&g), "pag 3\n0 o-> 1\n1 <-o 2\n");
    }

    #[test]
    fn rejects_bad_r0() {
        let cfg = IcdConfig { r0: 5, ..IcdConfig::default() };
        assert!(cfg.last_size(4).is_err());
        assert_eq!(IcdConfig::default().last_size(6).unwrap(), 4);
        assert_eq!(IcdConfig { n_max: Some(1), ..IcdConfig::default() }.last_size(6).unwrap(), 1);
    }
}
