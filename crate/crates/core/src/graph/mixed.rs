use std::fmt;

use crate::error::{Error, Result};

use super::NodeId;

/// The symbol at one end of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeMark {
    Circle,
    Arrowhead,
    Tail,
}

/// Mixed graph over observed nodes with per-endpoint marks.
///
/// Storage is a dense `n × n` matrix where entry `(a, b)` is the mark at
/// `b`'s end of the edge between `a` and `b`. Reading `g.mark(a, b)` as the
/// right-hand symbol of `a *-* b` keeps the rule code close to the usual
/// arrow notation: `a *-> b` is `mark(a, b) == Some(Arrowhead)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MixedGraph {
    n: usize,
    marks: Vec<Option<EdgeMark>>,
}

impl MixedGraph {
    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        MixedGraph { n, marks: vec![None; n * n] }
    }

    /// Complete graph with `mark` at both ends of every edge.
    pub fn complete(n: usize, mark: EdgeMark) -> Self {
        let mut g = Self::empty(n);
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    g.marks[a * n + b] = Some(mark);
                }
            }
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, a: NodeId, b: NodeId) -> usize {
        debug_assert!(a < self.n && b < self.n);
        a * self.n + b
    }

    pub fn check_node(&self, a: NodeId) -> Result<()> {
        if a < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: a, count: self.n })
        }
    }

    #[inline]
    pub fn is_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.marks[self.idx(a, b)].is_some()
    }

    /// Mark at `b`'s end of the edge `a *-* b`, or `None` if not adjacent.
    #[inline]
    pub fn mark(&self, a: NodeId, b: NodeId) -> Option<EdgeMark> {
        self.marks[self.idx(a, b)]
    }

    /// `mark(a, b) == Some(m)`.
    #[inline]
    pub fn has_mark(&self, a: NodeId, b: NodeId, m: EdgeMark) -> bool {
        self.mark(a, b) == Some(m)
    }

    /// Adds (or replaces) the edge `a *-* b` with `at_a` at `a` and `at_b` at `b`.
    pub fn add_edge(&mut self, a: NodeId, b: NodeId, at_a: EdgeMark, at_b: EdgeMark) -> Result<()> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(Error::NotDistinct(vec![a, b]));
        }
        let (ab, ba) = (self.idx(a, b), self.idx(b, a));
        self.marks[ab] = Some(at_b);
        self.marks[ba] = Some(at_a);
        Ok(())
    }

    pub fn remove_edge(&mut self, a: NodeId, b: NodeId) {
        let (ab, ba) = (self.idx(a, b), self.idx(b, a));
        self.marks[ab] = None;
        self.marks[ba] = None;
    }

    /// Sets the mark at `b` on the existing edge `a *-* b`.
    pub fn set_mark(&mut self, a: NodeId, b: NodeId, m: EdgeMark) -> Result<()> {
        if !self.is_adjacent(a, b) {
            return Err(Error::NotAdjacent(a, b));
        }
        let i = self.idx(a, b);
        self.marks[i] = Some(m);
        Ok(())
    }

    /// Resets every end mark to `m`, keeping the skeleton.
    pub fn reset_marks(&mut self, m: EdgeMark) {
        for slot in self.marks.iter_mut().filter(|s| s.is_some()) {
            *slot = Some(m);
        }
    }

    pub fn neighbors(&self, a: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let row = &self.marks[a * self.n..(a + 1) * self.n];
        row.iter().enumerate().filter_map(|(b, m)| m.map(|_| b))
    }

    pub fn degree(&self, a: NodeId) -> usize {
        self.neighbors(a).count()
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.is_adjacent(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.marks.iter().filter(|m| m.is_some()).count() / 2
    }

    /// Same adjacencies, ignoring marks.
    pub fn same_skeleton(&self, other: &MixedGraph) -> bool {
        self.n == other.n
            && self
                .marks
                .iter()
                .zip(&other.marks)
                .all(|(a, b)| a.is_some() == b.is_some())
    }

    /// True iff `u *-> v <-* w`.
    ///
    /// Both `u`–`v` and `v`–`w` must be adjacent and `u != w`.
    pub fn is_collider(&self, u: NodeId, v: NodeId, w: NodeId) -> Result<bool> {
        for x in [u, v, w] {
            self.check_node(x)?;
        }
        if u == w {
            return Err(Error::NotDistinct(vec![u, w]));
        }
        if !self.is_adjacent(u, v) {
            return Err(Error::NotAdjacent(u, v));
        }
        if !self.is_adjacent(v, w) {
            return Err(Error::NotAdjacent(v, w));
        }
        Ok(self.collider_unchecked(u, v, w))
    }

    #[inline]
    pub(crate) fn collider_unchecked(&self, u: NodeId, v: NodeId, w: NodeId) -> bool {
        self.has_mark(u, v, EdgeMark::Arrowhead) && self.has_mark(w, v, EdgeMark::Arrowhead)
    }

    /// True iff all three pairs among `u`, `v`, `w` are adjacent.
    pub fn forms_triangle(&self, u: NodeId, v: NodeId, w: NodeId) -> Result<bool> {
        for x in [u, v, w] {
            self.check_node(x)?;
        }
        if u == v || v == w || u == w {
            return Err(Error::NotDistinct(vec![u, v, w]));
        }
        Ok(self.triangle_unchecked(u, v, w))
    }

    #[inline]
    pub(crate) fn triangle_unchecked(&self, u: NodeId, v: NodeId, w: NodeId) -> bool {
        self.is_adjacent(u, v) && self.is_adjacent(v, w) && self.is_adjacent(u, w)
    }

    pub fn has_circles(&self) -> bool {
        self.marks.contains(&Some(EdgeMark::Circle))
    }
}

/// Identical adjacency and identical end marks on every edge.
pub fn graph_equal(a: &MixedGraph, b: &MixedGraph) -> Result<bool> {
    if a.n != b.n {
        return Err(Error::NodeCountMismatch(a.n, b.n));
    }
    Ok(a.marks == b.marks)
}

impl fmt::Debug for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MixedGraph({}) {{", self.n)?;
        for (a, b) in self.edges() {
            write!(f, " {}", super::format::edge_token(self, a, b))?;
        }
        write!(f, " }}")
    }
}
