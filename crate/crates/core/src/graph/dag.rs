use std::collections::VecDeque;

use crate::error::{Error, Result};

use super::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRole {
    Observed,
    Latent,
    Selection,
}

/// Ground-truth causal DAG over `V = O ∪ L ∪ S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalDag {
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
    roles: Vec<NodeRole>,
}

impl CausalDag {
    /// Builds a DAG from directed edges `(from, to)`. Rejects self-loops,
    /// cycles and out-of-range ids.
    pub fn new(n: usize, edges: &[(NodeId, NodeId)], roles: Vec<NodeRole>) -> Result<Self> {
        if roles.len() != n {
            return Err(Error::Partition(format!(
                "{} roles given for {n} nodes",
                roles.len()
            )));
        }
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::NodeOutOfRange { node: x, count: n });
                }
            }
            if a == b {
                return Err(Error::Cycle(a));
            }
            if !parents[b].contains(&a) {
                parents[b].push(a);
                children[a].push(b);
            }
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let dag = CausalDag { parents, children, roles };
        dag.topological_order()?;
        Ok(dag)
    }

    /// All nodes observed.
    pub fn observed_only(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        Self::new(n, edges, vec![NodeRole::Observed; n])
    }

    /// Builds from explicit observed/latent/selection lists, which must
    /// partition `0..n`.
    pub fn with_partition(
        n: usize,
        edges: &[(NodeId, NodeId)],
        observed: &[NodeId],
        latent: &[NodeId],
        selection: &[NodeId],
    ) -> Result<Self> {
        let mut roles: Vec<Option<NodeRole>> = vec![None; n];
        for (set, role) in [
            (observed, NodeRole::Observed),
            (latent, NodeRole::Latent),
            (selection, NodeRole::Selection),
        ] {
            for &v in set {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, count: n });
                }
                if roles[v].replace(role).is_some() {
                    return Err(Error::Partition(format!("node {v} assigned twice")));
                }
            }
        }
        let roles = roles
            .into_iter()
            .enumerate()
            .map(|(v, r)| r.ok_or_else(|| Error::Partition(format!("node {v} unassigned"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, edges, roles)
    }

    pub fn node_count(&self) -> usize {
        self.roles.len()
    }

    pub fn parents(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn role(&self, v: NodeId) -> NodeRole {
        self.roles[v]
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    /// Replaces node roles, keeping the edge set.
    pub fn with_roles(&self, roles: Vec<NodeRole>) -> Result<Self> {
        if roles.len() != self.node_count() {
            return Err(Error::Partition("role count mismatch".into()));
        }
        Ok(CausalDag { roles, ..self.clone() })
    }

    fn nodes_with(&self, role: NodeRole) -> Vec<NodeId> {
        (0..self.node_count()).filter(|&v| self.roles[v] == role).collect()
    }

    /// Observed nodes in ascending id order. Position in this list is the
    /// variable index used by CI testers and learned PAGs.
    pub fn observed(&self) -> Vec<NodeId> {
        self.nodes_with(NodeRole::Observed)
    }

    pub fn latent(&self) -> Vec<NodeId> {
        self.nodes_with(NodeRole::Latent)
    }

    pub fn selection(&self) -> Vec<NodeId> {
        self.nodes_with(NodeRole::Selection)
    }

    /// Directed edges `(from, to)` sorted lexicographically.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out: Vec<_> = self
            .children
            .iter()
            .enumerate()
            .flat_map(|(a, ch)| ch.iter().map(move |&b| (a, b)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Largest parent-set size; the `k` in the `O(n^{2k})` test bound.
    pub fn max_in_degree(&self) -> usize {
        self.parents.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Kahn's algorithm; errors with a node on a cycle if one exists.
    pub fn topological_order(&self) -> Result<Vec<NodeId>> {
        let n = self.node_count();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<NodeId> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        if order.len() < n {
            let v = (0..n).find(|&v| indeg[v] > 0).unwrap_or(0);
            return Err(Error::Cycle(v));
        }
        Ok(order)
    }

    /// Mask of strict descendants of `v`.
    pub fn descendants(&self, v: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = self.children[v].clone();
        while let Some(c) = stack.pop() {
            if !seen[c] {
                seen[c] = true;
                stack.extend_from_slice(&self.children[c]);
            }
        }
        seen
    }

    /// Mask of nodes that are ancestors of some node in `set` (including the set itself).
    pub fn ancestors_of(&self, set: &[NodeId]) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = set.to_vec();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend_from_slice(&self.parents[v]);
            }
        }
        seen
    }

    pub fn is_weakly_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in self.parents[v].iter().chain(&self.children[v]) {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }
}
