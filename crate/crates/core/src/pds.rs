//! Shortest simple paths whose internal nodes are each a collider or part
//! of a triangle. Both Possible-D-Sep (FCI) and PDS-path distances (ICD)
//! are instances.

use std::collections::HashMap;

use crate::graph::{MixedGraph, NodeId};

/// Largest graph the path search supports (visited sets are `u128` masks).
pub const MAX_NODES: usize = 128;

#[derive(Debug, Clone, Default)]
pub(crate) struct PathLimits<'a> {
    /// Node that may not appear anywhere on a path.
    pub forbid: Option<NodeId>,
    /// Only nodes with `allowed[v]` may appear on a path.
    pub allowed: Option<&'a [bool]>,
    /// Stop after paths of this many edges.
    pub max_len: Option<usize>,
}

/// `dist[z]` = edge count of the shortest qualifying simple path from
/// `start` to `z`; `None` if no such path exists. `dist[start]` is `None`.
///
/// Layered breadth-first search over partial paths `(prev, cur, visited)`.
/// A partial path is dropped when another with the same `(prev, cur)`, no
/// greater length and a subset of its visited nodes has been seen: every
/// continuation of the dropped one is also a continuation of the survivor.
pub(crate) fn shortest_paths(g: &MixedGraph, start: NodeId, limits: &PathLimits<'_>) -> Vec<Option<usize>> {
    let n = g.node_count();
    assert!(n <= MAX_NODES, "path search supports at most {MAX_NODES} nodes");
    let usable = |v: NodeId| Some(v) != limits.forbid && limits.allowed.is_none_or(|m| m[v]) && v != start;
    let mut dist = vec![None; n];
    let max_len = limits.max_len.unwrap_or(n);
    if max_len == 0 || !limits.allowed.is_none_or(|m| m[start]) {
        return dist;
    }

    let bit = |v: NodeId| 1u128 << v;
    let mut frontier: Vec<(NodeId, NodeId, u128)> = Vec::new();
    let mut seen: HashMap<(NodeId, NodeId), Vec<u128>> = HashMap::new();
    for w in g.neighbors(start).filter(|&w| usable(w)) {
        dist[w] = Some(1);
        let mask = bit(start) | bit(w);
        seen.entry((start, w)).or_default().push(mask);
        frontier.push((start, w, mask));
    }

    let mut len = 1;
    while !frontier.is_empty() && len < max_len {
        len += 1;
        let mut next = Vec::new();
        for (prev, cur, mask) in frontier {
            for w in g.neighbors(cur) {
                if mask & bit(w) != 0 || !usable(w) {
                    continue;
                }
                if !(g.collider_unchecked(prev, cur, w) || g.is_adjacent(prev, w)) {
                    continue;
                }
                let m = mask | bit(w);
                let masks = seen.entry((cur, w)).or_default();
                if masks.iter().any(|&old| old & m == old) {
                    continue;
                }
                masks.retain(|&old| old & m != m);
                masks.push(m);
                if dist[w].is_none() {
                    dist[w] = Some(len);
                }
                next.push((cur, w, m));
            }
        }
        frontier = next;
    }
    dist
}

/// Mask of nodes lying on some simple path between `a` and `b` in the
/// skeleton of `g` (`a` and `b` included).
///
/// A node other than `a`, `b` is on such a path iff it shares a
/// biconnected component with the edge `a–b` in the skeleton plus that edge.
pub(crate) fn on_paths_between(g: &MixedGraph, a: NodeId, b: NodeId) -> Vec<bool> {
    let n = g.node_count();
    let mut adj: Vec<Vec<NodeId>> = (0..n).map(|v| g.neighbors(v).collect()).collect();
    if !g.is_adjacent(a, b) {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut blocks = Blocks::new(n);
    blocks.dfs(&adj, a, usize::MAX);
    let mut mask = vec![false; n];
    for block in blocks.found {
        if block.iter().any(|&(x, y)| (x == a && y == b) || (x == b && y == a)) {
            for (x, y) in block {
                mask[x] = true;
                mask[y] = true;
            }
            break;
        }
    }
    mask[a] = true;
    mask[b] = true;
    mask
}

/// Tarjan's biconnected components over an edge stack.
struct Blocks {
    disc: Vec<usize>,
    low: Vec<usize>,
    time: usize,
    stack: Vec<(NodeId, NodeId)>,
    found: Vec<Vec<(NodeId, NodeId)>>,
}

impl Blocks {
    fn new(n: usize) -> Self {
        Blocks { disc: vec![usize::MAX; n], low: vec![0; n], time: 0, stack: Vec::new(), found: Vec::new() }
    }

    fn dfs(&mut self, adj: &[Vec<NodeId>], u: NodeId, parent: NodeId) {
        self.disc[u] = self.time;
        self.low[u] = self.time;
        self.time += 1;
        for &v in &adj[u] {
            if self.disc[v] == usize::MAX {
                self.stack.push((u, v));
                self.dfs(adj, v, u);
                self.low[u] = self.low[u].min(self.low[v]);
                if self.low[v] >= self.disc[u] {
                    let mut block = Vec::new();
                    while let Some(e) = self.stack.pop() {
                        block.push(e);
                        if e == (u, v) {
                            break;
                        }
                    }
                    self.found.push(block);
                }
            } else if v != parent && self.disc[v] < self.disc[u] {
                self.stack.push((u, v));
                self.low[u] = self.low[u].min(self.disc[v]);
            }
        }
    }
}
