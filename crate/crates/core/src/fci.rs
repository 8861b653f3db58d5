//! FCI baseline: PC-style adjacency search, Possible-D-Sep refinement and
//! complete orientation. Shares the CI cache and orientation engine with
//! ICD so test counts are directly comparable.

use itertools::Itertools;

use crate::citest::CachedTester;
use crate::error::Result;
use crate::graph::{EdgeMark, MixedGraph, NodeId};
use crate::orientation::{orient_from_scratch, orient_v_structures, ConflictPolicy, SepsetRecord};
use crate::pds::{shortest_paths, PathLimits};

/// Which adjacency sets supply conditioning sets in the adjacency search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdjacencySets {
    /// Subsets of `adj(x) \ {y}` and of `adj(y) \ {x}`.
    #[default]
    Both,
    /// Subsets of `adj(x) \ {y}` only, for `x < y`.
    First,
}

#[derive(Debug, Clone, Default)]
pub struct FciConfig {
    /// Largest conditioning set; `None` means `|O| − 2`.
    pub max_cond: Option<usize>,
    pub adjacency_sets: AdjacencySets,
    pub conflicts: ConflictPolicy,
}

impl FciConfig {
    fn cap(&self, vars: usize) -> usize {
        let full = vars.saturating_sub(2);
        self.max_cond.map_or(full, |c| c.min(full))
    }
}

/// Adjacency search from the complete `o-o` graph with growing
/// conditioning-set size `k`, drawn from current adjacencies.
pub fn fci_skeleton_phase1(ci: &mut CachedTester<'_>, cfg: &FciConfig) -> Result<(MixedGraph, SepsetRecord)> {
    let n = ci.num_vars();
    let mut g = MixedGraph::complete(n, EdgeMark::Circle);
    let mut seps = SepsetRecord::new();
    let cap = cfg.cap(n);
    for k in 0..=cap {
        let mut any_candidates = false;
        for (x, y) in g.edges() {
            let sides: &[(NodeId, NodeId)] = match cfg.adjacency_sets {
                AdjacencySets::Both => &[(x, y), (y, x)],
                AdjacencySets::First => &[(x, y)],
            };
            'edge: for &(a, b) in sides {
                let adj: Vec<NodeId> = g.neighbors(a).filter(|&v| v != b).collect();
                if adj.len() < k {
                    continue;
                }
                any_candidates = true;
                for z in adj.into_iter().combinations(k) {
                    if ci.test(x, y, &z)?.is_independent() {
                        g.remove_edge(x, y);
                        seps.insert(x, y, &z);
                        break 'edge;
                    }
                }
            }
        }
        if !any_candidates {
            break;
        }
    }
    Ok((g, seps))
}

/// Nodes reachable from `a` by a path on which every internal node is a
/// collider or part of a triangle, excluding `a` and `b`.
pub fn possible_d_sep(g: &MixedGraph, a: NodeId, b: NodeId) -> Result<Vec<NodeId>> {
    g.check_node(a)?;
    g.check_node(b)?;
    let dist = shortest_paths(g, a, &PathLimits::default());
    Ok((0..g.node_count()).filter(|&v| v != b && dist[v].is_some()).collect())
}

/// Complete FCI.
///
/// Adjacency search, v-structures, then every remaining edge `x *-* y` is
/// tested against all subsets of Possible-D-Sep(x, y) and of
/// Possible-D-Sep(y, x) in ascending size. Possible-D-Sep sets are taken
/// from the graph as it stands after the v-structure step. Finally marks are
/// reset and the graph is re-oriented with the full rule set.
pub fn fci(ci: &mut CachedTester<'_>, cfg: &FciConfig) -> Result<MixedGraph> {
    let (mut g, mut seps) = fci_skeleton_phase1(ci, cfg)?;
    let n = g.node_count();
    let cap = cfg.cap(n);
    orient_v_structures(&mut g, &seps, cfg.conflicts)?;

    let edges = g.edges();
    let mut pds = Vec::with_capacity(edges.len());
    for &(x, y) in &edges {
        pds.push([possible_d_sep(&g, x, y)?, possible_d_sep(&g, y, x)?]);
    }
    for (&(x, y), sets) in edges.iter().zip(&pds) {
        'edge: for set in sets {
            for k in 0..=set.len().min(cap) {
                for z in set.iter().copied().combinations(k) {
                    if ci.test(x, y, &z)?.is_independent() {
                        g.remove_edge(x, y);
                        seps.insert(x, y, &z);
                        break 'edge;
                    }
                }
            }
        }
    }

    orient_from_scratch(&mut g, &seps, cfg.conflicts)?;
    Ok(g)
}
