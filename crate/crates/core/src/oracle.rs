//! Perfect CI oracle from d-separation in the ground-truth DAG, and the
//! ground-truth PAG it induces.

use crate::citest::{CachedTester, CiTester, Verdict};
use crate::error::{Error, Result};
use crate::fci::{fci, FciConfig};
use crate::graph::{CausalDag, MixedGraph, NodeId, NodeRole};

/// True iff `x` and `y` are d-separated by `z` in `dag`.
///
/// Reachability over (node, direction) states, linear in the number of
/// edges: a trail may pass a non-collider outside `z`, and a collider that
/// is in `z` or has a descendant in `z`.
pub fn d_separated(dag: &CausalDag, x: NodeId, y: NodeId, z: &[NodeId]) -> Result<bool> {
    let n = dag.node_count();
    for &v in [x, y].iter().chain(z) {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, count: n });
        }
    }
    if x == y {
        return Err(Error::InvalidQuery(format!("x == y == {x}")));
    }
    if z.contains(&x) || z.contains(&y) {
        return Err(Error::InvalidQuery("endpoint in conditioning set".into()));
    }
    Ok(!reachable(dag, x, z)[y])
}

/// Nodes d-connected to `x` given `z`.
fn reachable(dag: &CausalDag, x: NodeId, z: &[NodeId]) -> Vec<bool> {
    let n = dag.node_count();
    let mut in_z = vec![false; n];
    for &v in z {
        in_z[v] = true;
    }
    // A collider is open iff it is an ancestor of (or in) z.
    let opens_collider = dag.ancestors_of(z);

    // visited[v][0]: entered v from a child (moving up);
    // visited[v][1]: entered v from a parent (moving down).
    let mut visited = vec![[false; 2]; n];
    let mut reached = vec![false; n];
    let mut stack = vec![(x, 0usize)];
    while let Some((v, dir)) = stack.pop() {
        if visited[v][dir] {
            continue;
        }
        visited[v][dir] = true;
        if !in_z[v] {
            reached[v] = true;
        }
        let up = dir == 0;
        if up && !in_z[v] {
            stack.extend(dag.parents(v).iter().map(|&p| (p, 0)));
            stack.extend(dag.children(v).iter().map(|&c| (c, 1)));
        } else if !up {
            if !in_z[v] {
                stack.extend(dag.children(v).iter().map(|&c| (c, 1)));
            }
            if opens_collider[v] {
                stack.extend(dag.parents(v).iter().map(|&p| (p, 0)));
            }
        }
    }
    reached
}

/// CI oracle over the observed variables of a DAG, implicitly conditioning
/// on the selection set.
///
/// As a [`CiTester`] its variables are the observed nodes in ascending id
/// order; [`DSepOracle::oracle_ci`] takes raw DAG ids instead.
#[derive(Debug, Clone)]
pub struct DSepOracle {
    dag: CausalDag,
    observed: Vec<NodeId>,
    selection: Vec<NodeId>,
}

impl DSepOracle {
    pub fn new(dag: CausalDag) -> Self {
        let observed = dag.observed();
        let selection = dag.selection();
        DSepOracle { dag, observed, selection }
    }

    pub fn dag(&self) -> &CausalDag {
        &self.dag
    }

    /// DAG id of each tester variable.
    pub fn observed(&self) -> &[NodeId] {
        &self.observed
    }

    /// `x ⊥ y | z ∪ S` for observed DAG nodes `x`, `y`, `z`.
    pub fn oracle_ci(&self, x: NodeId, y: NodeId, z: &[NodeId]) -> Result<Verdict> {
        for &v in [x, y].iter().chain(z) {
            if v >= self.dag.node_count() {
                return Err(Error::NodeOutOfRange { node: v, count: self.dag.node_count() });
            }
            if self.dag.role(v) != NodeRole::Observed {
                return Err(Error::NotObserved(v));
            }
        }
        let mut cond = z.to_vec();
        cond.extend_from_slice(&self.selection);
        Ok(if d_separated(&self.dag, x, y, &cond)? {
            Verdict::Independent
        } else {
            Verdict::Dependent
        })
    }
}

impl CiTester for DSepOracle {
    fn num_vars(&self) -> usize {
        self.observed.len()
    }

    fn test(&self, x: usize, y: usize, z: &[usize]) -> Result<Verdict> {
        let map = |i: usize| {
            self.observed
                .get(i)
                .copied()
                .ok_or(Error::NodeOutOfRange { node: i, count: self.observed.len() })
        };
        let z = z.iter().map(|&i| map(i)).collect::<Result<Vec<_>>>()?;
        self.oracle_ci(map(x)?, map(y)?, &z)
    }
}

/// PAG of the DAG's observable equivalence class, over the observed nodes
/// in ascending id order.
///
/// Obtained by running complete FCI against the perfect oracle.
pub fn true_pag(dag: &CausalDag) -> Result<MixedGraph> {
    let oracle = DSepOracle::new(dag.clone());
    let mut ci = CachedTester::new(&oracle);
    fci(&mut ci, &FciConfig::default())
}
