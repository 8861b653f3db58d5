//! V-structure detection from separating sets and the complete FCI
//! orientation rule set (R1–R10), applied to a fixpoint.
//!
//! Rules only ever turn a `Circle` into an `Arrowhead` or `Tail`. A rule
//! whose conclusion contradicts an existing non-circle mark is either
//! reported as [`Error::OrientationConflict`] or skipped, depending on the
//! [`ConflictPolicy`]. With a perfect oracle conflicts cannot happen; with
//! finite-sample tests they can.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{EdgeMark, MixedGraph, NodeId};

use EdgeMark::{Arrowhead, Circle, Tail};

/// Separating sets of removed edges, keyed by unordered pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SepsetRecord {
    map: HashMap<(NodeId, NodeId), Vec<NodeId>>,
}

impl SepsetRecord {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
        (a.min(b), a.max(b))
    }

    /// Records `set` for `{a, b}`, replacing any earlier entry.
    pub fn insert(&mut self, a: NodeId, b: NodeId, set: &[NodeId]) {
        let mut set = set.to_vec();
        set.sort_unstable();
        self.map.insert(Self::key(a, b), set);
    }

    pub fn get(&self, a: NodeId, b: NodeId) -> Option<&[NodeId]> {
        self.map.get(&Self::key(a, b)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Entries sorted by pair.
    pub fn entries(&self) -> Vec<((NodeId, NodeId), &[NodeId])> {
        let mut out: Vec<_> = self.map.iter().map(|(&k, v)| (k, v.as_slice())).collect();
        out.sort_by_key(|(k, _)| *k);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConflictPolicy {
    /// Return [`Error::OrientationConflict`].
    #[default]
    Fail,
    /// Leave the existing mark in place and carry on.
    KeepExisting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::R1,
        Rule::R2,
        Rule::R3,
        Rule::R4,
        Rule::R5,
        Rule::R6,
        Rule::R7,
        Rule::R8,
        Rule::R9,
        Rule::R10,
    ];
}

/// Sets `mark(a, b) = m`, honouring the circle-only contract.
fn orient(g: &mut MixedGraph, a: NodeId, b: NodeId, m: EdgeMark, policy: ConflictPolicy) -> Result<bool> {
    match g.mark(a, b) {
        None => Err(Error::NotAdjacent(a, b)),
        Some(cur) if cur == m => Ok(false),
        Some(Circle) => {
            g.set_mark(a, b, m)?;
            Ok(true)
        }
        Some(existing) => match policy {
            ConflictPolicy::Fail => Err(Error::OrientationConflict { from: a, to: b, existing, wanted: m }),
            ConflictPolicy::KeepExisting => Ok(false),
        },
    }
}

/// Orients every unshielded triple `u *-* v *-* w` with `v` outside the
/// separating set of `{u, w}` as `u *-> v <-* w`.
pub fn orient_v_structures(g: &mut MixedGraph, seps: &SepsetRecord, policy: ConflictPolicy) -> Result<()> {
    let n = g.node_count();
    let mut colliders = Vec::new();
    for v in 0..n {
        let nb: Vec<NodeId> = g.neighbors(v).collect();
        for (i, &u) in nb.iter().enumerate() {
            for &w in &nb[i + 1..] {
                if g.is_adjacent(u, w) {
                    continue;
                }
                let sep = seps.get(u, w).ok_or(Error::MissingSepset(u, w))?;
                if !sep.contains(&v) {
                    colliders.push((u, v, w));
                }
            }
        }
    }
    for (u, v, w) in colliders {
        orient(g, u, v, Arrowhead, policy)?;
        orient(g, w, v, Arrowhead, policy)?;
    }
    Ok(())
}

/// Applies R1–R10 until no rule fires.
pub fn apply_rules(g: &mut MixedGraph, seps: &SepsetRecord, policy: ConflictPolicy) -> Result<()> {
    apply_rules_in_order(g, seps, policy, &Rule::ALL)
}

/// Same fixpoint iteration with a caller-chosen rule order. Rules missing
/// from `order` are never applied.
pub fn apply_rules_in_order(
    g: &mut MixedGraph,
    seps: &SepsetRecord,
    policy: ConflictPolicy,
    order: &[Rule],
) -> Result<()> {
    let mut ctx = Ctx::new(g, seps, policy);
    loop {
        let mut changed = false;
        for &rule in order {
            changed |= ctx.apply(rule)?;
        }
        if !changed {
            return Ok(());
        }
    }
}

/// Resets marks to circles, then orients v-structures and closes under the rules.
pub fn orient_from_scratch(g: &mut MixedGraph, seps: &SepsetRecord, policy: ConflictPolicy) -> Result<()> {
    g.reset_marks(Circle);
    orient_v_structures(g, seps, policy)?;
    apply_rules(g, seps, policy)
}

struct Ctx<'a> {
    g: &'a mut MixedGraph,
    seps: &'a SepsetRecord,
    policy: ConflictPolicy,
    adj: Vec<Vec<NodeId>>,
}

impl<'a> Ctx<'a> {
    fn new(g: &'a mut MixedGraph, seps: &'a SepsetRecord, policy: ConflictPolicy) -> Self {
        let adj = (0..g.node_count()).map(|v| g.neighbors(v).collect()).collect();
        Ctx { g, seps, policy, adj }
    }

    fn set(&mut self, a: NodeId, b: NodeId, m: EdgeMark) -> Result<bool> {
        orient(self.g, a, b, m, self.policy)
    }

    fn is(&self, a: NodeId, b: NodeId, m: EdgeMark) -> bool {
        self.g.has_mark(a, b, m)
    }

    fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.g.is_adjacent(a, b)
    }

    fn common(&self, a: NodeId, b: NodeId) -> Vec<NodeId> {
        self.adj[a].iter().copied().filter(|&c| self.adjacent(c, b)).collect()
    }

    fn apply(&mut self, rule: Rule) -> Result<bool> {
        match rule {
            Rule::R1 => self.r1(),
            Rule::R2 => self.r2(),
            Rule::R3 => self.r3(),
            Rule::R4 => self.r4(),
            Rule::R5 => self.r5(),
            Rule::R6 => self.r6(),
            Rule::R7 => self.r7(),
            Rule::R8 => self.r8(),
            Rule::R9 => self.r9(),
            Rule::R10 => self.r10(),
        }
    }

    /// α *-> β o-* γ, α and γ non-adjacent ⇒ β -> γ.
    fn r1(&mut self) -> Result<bool> {
        let mut changed = false;
        for beta in 0..self.adj.len() {
            for ai in 0..self.adj[beta].len() {
                let alpha = self.adj[beta][ai];
                for gi in 0..self.adj[beta].len() {
                    let gamma = self.adj[beta][gi];
                    if gamma == alpha
                        || !self.is(alpha, beta, Arrowhead)
                        || !self.is(gamma, beta, Circle)
                        || self.adjacent(alpha, gamma)
                    {
                        continue;
                    }
                    changed |= self.set(gamma, beta, Tail)?;
                    changed |= self.set(beta, gamma, Arrowhead)?;
                }
            }
        }
        Ok(changed)
    }

    /// α -> β *-> γ or α *-> β -> γ, with α *-o γ ⇒ α *-> γ.
    fn r2(&mut self) -> Result<bool> {
        let mut changed = false;
        for alpha in 0..self.adj.len() {
            for gi in 0..self.adj[alpha].len() {
                let gamma = self.adj[alpha][gi];
                if !self.is(alpha, gamma, Circle) {
                    continue;
                }
                let fires = self.common(alpha, gamma).into_iter().any(|beta| {
                    let first = self.is(beta, alpha, Tail) && self.is(alpha, beta, Arrowhead) && self.is(beta, gamma, Arrowhead);
                    let second = self.is(alpha, beta, Arrowhead) && self.is(beta, gamma, Arrowhead) && self.is(gamma, beta, Tail);
                    first || second
                });
                if fires {
                    changed |= self.set(alpha, gamma, Arrowhead)?;
                }
            }
        }
        Ok(changed)
    }

    /// α *-> β <-* γ, α *-o θ o-* γ, α and γ non-adjacent, θ *-o β ⇒ θ *-> β.
    fn r3(&mut self) -> Result<bool> {
        let mut changed = false;
        for beta in 0..self.adj.len() {
            for ti in 0..self.adj[beta].len() {
                let theta = self.adj[beta][ti];
                if !self.is(theta, beta, Circle) {
                    continue;
                }
                let shared = self.common(beta, theta);
                let fires = shared.iter().enumerate().any(|(i, &alpha)| {
                    shared[i + 1..].iter().any(|&gamma| {
                        !self.adjacent(alpha, gamma)
                            && self.is(alpha, beta, Arrowhead)
                            && self.is(gamma, beta, Arrowhead)
                            && self.is(alpha, theta, Circle)
                            && self.is(gamma, theta, Circle)
                    })
                });
                if fires {
                    changed |= self.set(theta, beta, Arrowhead)?;
                }
            }
        }
        Ok(changed)
    }

    /// Discriminating path ⟨θ, …, α, β, γ⟩ for β with β o-* γ: β -> γ if β
    /// is in the separating set of {θ, γ}, otherwise α <-> β <-> γ.
    fn r4(&mut self) -> Result<bool> {
        let mut changed = false;
        for gamma in 0..self.adj.len() {
            for bi in 0..self.adj[gamma].len() {
                let beta = self.adj[gamma][bi];
                for alpha in self.common(beta, gamma) {
                    // Re-check: an earlier α may already have resolved the circle.
                    if !self.is(gamma, beta, Circle) {
                        break;
                    }
                    if !(self.is(beta, alpha, Arrowhead) && self.is(alpha, gamma, Arrowhead) && self.is(gamma, alpha, Tail)) {
                        continue;
                    }
                    let Some(theta) = self.discriminating_end(alpha, beta, gamma) else {
                        continue;
                    };
                    let sep = self.seps.get(theta, gamma).ok_or(Error::MissingSepset(theta, gamma))?;
                    if sep.contains(&beta) {
                        changed |= self.set(gamma, beta, Tail)?;
                        changed |= self.set(beta, gamma, Arrowhead)?;
                    } else {
                        changed |= self.set(alpha, beta, Arrowhead)?;
                        changed |= self.set(gamma, beta, Arrowhead)?;
                        changed |= self.set(beta, gamma, Arrowhead)?;
                    }
                }
            }
        }
        Ok(changed)
    }

    /// Breadth-first search backwards from α for the far end θ of a
    /// discriminating path: every node strictly between θ and β must be a
    /// collider on the path and a parent of γ.
    fn discriminating_end(&self, alpha: NodeId, beta: NodeId, gamma: NodeId) -> Option<NodeId> {
        let n = self.adj.len();
        let mut queued = vec![false; n];
        queued[alpha] = true;
        queued[beta] = true;
        queued[gamma] = true;
        let mut queue = std::collections::VecDeque::from([alpha]);
        while let Some(cur) = queue.pop_front() {
            for &t in &self.adj[cur] {
                if queued[t] || !self.is(t, cur, Arrowhead) {
                    continue;
                }
                if !self.adjacent(t, gamma) {
                    return Some(t);
                }
                if self.is(t, gamma, Arrowhead) && self.is(gamma, t, Tail) && self.is(cur, t, Arrowhead) {
                    queued[t] = true;
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// α o-o β with an uncovered circle path ⟨α, γ, …, θ, β⟩, α/θ and β/γ
    /// non-adjacent ⇒ α - β and every edge on the path become tail-tail.
    fn r5(&mut self) -> Result<bool> {
        let mut changed = false;
        let n = self.adj.len();
        for alpha in 0..n {
            for bi in 0..self.adj[alpha].len() {
                let beta = self.adj[alpha][bi];
                if beta < alpha || !self.is_circle_edge(alpha, beta) {
                    continue;
                }
                let mut found = None;
                for &gamma in &self.adj[alpha] {
                    if gamma == beta || self.adjacent(gamma, beta) || !self.is_circle_edge(alpha, gamma) {
                        continue;
                    }
                    let search = PathSearch {
                        ctx: self,
                        target: beta,
                        edge_ok: &|c: &Ctx, u, v| c.is_circle_edge(u, v),
                        last_ok: &|c: &Ctx, path: &[NodeId]| !c.adjacent(path[0], *path.last().unwrap()),
                    };
                    if let Some(path) = search.find(&[alpha, gamma]) {
                        found = Some(path);
                        break;
                    }
                }
                if let Some(path) = found {
                    changed |= self.set(alpha, beta, Tail)?;
                    changed |= self.set(beta, alpha, Tail)?;
                    for w in path.windows(2) {
                        changed |= self.set(w[0], w[1], Tail)?;
                        changed |= self.set(w[1], w[0], Tail)?;
                    }
                }
            }
        }
        Ok(changed)
    }

    fn is_circle_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.is(a, b, Circle) && self.is(b, a, Circle)
    }

    /// α - β o-* γ ⇒ β -* γ.
    fn r6(&mut self) -> Result<bool> {
        let mut changed = false;
        for beta in 0..self.adj.len() {
            for ai in 0..self.adj[beta].len() {
                let alpha = self.adj[beta][ai];
                if !(self.is(alpha, beta, Tail) && self.is(beta, alpha, Tail)) {
                    continue;
                }
                for gi in 0..self.adj[beta].len() {
                    let gamma = self.adj[beta][gi];
                    if gamma != alpha && self.is(gamma, beta, Circle) {
                        changed |= self.set(gamma, beta, Tail)?;
                    }
                }
            }
        }
        Ok(changed)
    }

    /// α -o β o-* γ, α and γ non-adjacent ⇒ β -* γ.
    fn r7(&mut self) -> Result<bool> {
        let mut changed = false;
        for beta in 0..self.adj.len() {
            for ai in 0..self.adj[beta].len() {
                let alpha = self.adj[beta][ai];
                for gi in 0..self.adj[beta].len() {
                    let gamma = self.adj[beta][gi];
                    if gamma != alpha
                        && self.is(beta, alpha, Tail)
                        && self.is(alpha, beta, Circle)
                        && self.is(gamma, beta, Circle)
                        && !self.adjacent(alpha, gamma)
                    {
                        changed |= self.set(gamma, beta, Tail)?;
                    }
                }
            }
        }
        Ok(changed)
    }

    /// α -> β -> γ or α -o β -> γ, with α o-> γ ⇒ α -> γ.
    fn r8(&mut self) -> Result<bool> {
        let mut changed = false;
        for alpha in 0..self.adj.len() {
            for gi in 0..self.adj[alpha].len() {
                let gamma = self.adj[alpha][gi];
                if !(self.is(alpha, gamma, Arrowhead) && self.is(gamma, alpha, Circle)) {
                    continue;
                }
                let fires = self.common(alpha, gamma).into_iter().any(|beta| {
                    self.is(beta, alpha, Tail)
                        && (self.is(alpha, beta, Arrowhead) || self.is(alpha, beta, Circle))
                        && self.is(beta, gamma, Arrowhead)
                        && self.is(gamma, beta, Tail)
                });
                if fires {
                    changed |= self.set(gamma, alpha, Tail)?;
                }
            }
        }
        Ok(changed)
    }

    /// Edge `u *-* v` can be traversed from `u` to `v` on a potentially
    /// directed path: no arrowhead at `u`, no tail at `v`.
    fn potentially_directed(&self, u: NodeId, v: NodeId) -> bool {
        !self.is(v, u, Arrowhead) && !self.is(u, v, Tail)
    }

    /// α o-> γ with an uncovered potentially directed path ⟨α, β, θ, …, γ⟩,
    /// β and γ non-adjacent ⇒ α -> γ.
    fn r9(&mut self) -> Result<bool> {
        let mut changed = false;
        for alpha in 0..self.adj.len() {
            for gi in 0..self.adj[alpha].len() {
                let gamma = self.adj[alpha][gi];
                if !(self.is(alpha, gamma, Arrowhead) && self.is(gamma, alpha, Circle)) {
                    continue;
                }
                let fires = self.adj[alpha].iter().any(|&beta| {
                    beta != gamma
                        && !self.adjacent(beta, gamma)
                        && self.potentially_directed(alpha, beta)
                        && PathSearch {
                            ctx: self,
                            target: gamma,
                            edge_ok: &|c: &Ctx, u, v| c.potentially_directed(u, v),
                            last_ok: &|_: &Ctx, _: &[NodeId]| true,
                        }
                        .find(&[alpha, beta])
                        .is_some()
                });
                if fires {
                    changed |= self.set(gamma, alpha, Tail)?;
                }
            }
        }
        Ok(changed)
    }

    /// α o-> γ, β -> γ <- θ, uncovered potentially directed paths from α to
    /// β and to θ whose second nodes μ ≠ ω are non-adjacent ⇒ α -> γ.
    fn r10(&mut self) -> Result<bool> {
        let mut changed = false;
        for gamma in 0..self.adj.len() {
            let into_gamma: Vec<NodeId> = self.adj[gamma]
                .iter()
                .copied()
                .filter(|&p| self.is(p, gamma, Arrowhead) && self.is(gamma, p, Tail))
                .collect();
            if into_gamma.len() < 2 {
                continue;
            }
            for ai in 0..self.adj[gamma].len() {
                let alpha = self.adj[gamma][ai];
                if !(self.is(alpha, gamma, Arrowhead) && self.is(gamma, alpha, Circle)) {
                    continue;
                }
                let firsts: Vec<Vec<NodeId>> =
                    into_gamma.iter().map(|&target| self.first_hops(alpha, target, gamma)).collect();
                let fires = (0..into_gamma.len()).any(|i| {
                    (i + 1..into_gamma.len()).any(|j| {
                        firsts[i].iter().any(|&mu| {
                            firsts[j].iter().any(|&omega| mu != omega && !self.adjacent(mu, omega))
                        })
                    })
                });
                if fires {
                    changed |= self.set(gamma, alpha, Tail)?;
                }
            }
        }
        Ok(changed)
    }

    /// Neighbours μ of α that start an uncovered potentially directed path
    /// from α to `target` avoiding `avoid`.
    fn first_hops(&self, alpha: NodeId, target: NodeId, avoid: NodeId) -> Vec<NodeId> {
        self.adj[alpha]
            .iter()
            .copied()
            .filter(|&mu| {
                if mu == avoid || !self.potentially_directed(alpha, mu) {
                    return false;
                }
                if mu == target {
                    return true;
                }
                PathSearch {
                    ctx: self,
                    target,
                    edge_ok: &|c: &Ctx, u, v| c.potentially_directed(u, v) && v != avoid,
                    last_ok: &|_: &Ctx, _: &[NodeId]| true,
                }
                .find(&[alpha, mu])
                .is_some()
            })
            .collect()
    }
}

type EdgePred<'p> = &'p dyn Fn(&Ctx, NodeId, NodeId) -> bool;
type PathPred<'p> = &'p dyn Fn(&Ctx, &[NodeId]) -> bool;

/// Depth-first search for an uncovered simple path extending `prefix` to
/// `target`, every edge satisfying `edge_ok`. `last_ok` sees the path
/// without the target before the final hop is accepted.
struct PathSearch<'c, 'a, 'p> {
    ctx: &'c Ctx<'a>,
    target: NodeId,
    edge_ok: EdgePred<'p>,
    last_ok: PathPred<'p>,
}

impl PathSearch<'_, '_, '_> {
    fn find(&self, prefix: &[NodeId]) -> Option<Vec<NodeId>> {
        let mut on_path = vec![false; self.ctx.adj.len()];
        for &v in prefix {
            on_path[v] = true;
        }
        let mut path = prefix.to_vec();
        self.extend(&mut path, &mut on_path).then_some(path)
    }

    fn extend(&self, path: &mut Vec<NodeId>, on_path: &mut [bool]) -> bool {
        let c = self.ctx;
        let cur = path[path.len() - 1];
        let prev = path[path.len() - 2];
        let t = self.target;
        if c.adjacent(cur, t) && !c.adjacent(prev, t) && prev != t && (self.edge_ok)(c, cur, t) && (self.last_ok)(c, path) {
            path.push(t);
            return true;
        }
        for &next in &c.adj[cur] {
            if on_path[next] || next == t || c.adjacent(prev, next) || !(self.edge_ok)(c, cur, next) {
                continue;
            }
            on_path[next] = true;
            path.push(next);
            if self.extend(path, on_path) {
                return true;
            }
            path.pop();
            on_path[next] = false;
        }
        false
    }
}
