use std::collections::BTreeSet;

use super::ConflictGraph;
use crate::cnf::{Clause, Lit};

/// A subconflict graph: a node set and the nodes that keep all their incoming
/// edges. The remaining nodes are its leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubGraph {
    nodes: BTreeSet<Lit>,
    internal: BTreeSet<Lit>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("{0} is not a node")]
    NotANode(Lit),
    #[error("{0} is a leaf")]
    Leaf(Lit),
    #[error("invalid decomposition: {0}")]
    Invalid(String),
}

impl SubGraph {
    /// `{x, ¬x}` with both as leaves.
    pub fn base(g: &ConflictGraph) -> SubGraph {
        let x = g.conflict_var();
        SubGraph { nodes: [x.pos(), x.neg()].into(), internal: BTreeSet::new() }
    }

    pub fn whole(g: &ConflictGraph) -> SubGraph {
        SubGraph { nodes: g.nodes().clone(), internal: g.non_leaves().collect() }
    }

    /// The subgraph whose internal nodes are `internal`; its leaves are their
    /// predecessors outside the set, plus `x` or `¬x` if not internal.
    pub fn from_internal(g: &ConflictGraph, internal: impl IntoIterator<Item = Lit>) -> SubGraph {
        let mut h = SubGraph::base(g);
        for l in internal {
            h.expand(g, l);
        }
        h
    }

    /// The nodes on the conflict side of a cut: a node is internal when it has
    /// a reason and all its predecessors are in the set.
    pub fn below_cut(g: &ConflictGraph, nodes: impl IntoIterator<Item = Lit>) -> SubGraph {
        let x = g.conflict_var();
        let mut set: BTreeSet<Lit> = nodes.into_iter().collect();
        set.insert(x.pos());
        set.insert(x.neg());
        let internal = set
            .iter()
            .copied()
            .filter(|&l| g.reason(l).is_some() && g.preds(l).iter().all(|p| set.contains(p)))
            .collect();
        SubGraph { nodes: set, internal }
    }

    /// Rebuilds a subgraph from its node and internal sets, as serialized.
    pub(crate) fn from_parts(nodes: BTreeSet<Lit>, internal: BTreeSet<Lit>) -> SubGraph {
        SubGraph { nodes, internal }
    }

    /// Makes `l` internal and adds its predecessors.
    pub(crate) fn expand(&mut self, g: &ConflictGraph, l: Lit) {
        self.nodes.insert(l);
        self.internal.insert(l);
        self.nodes.extend(g.preds(l));
    }

    pub fn nodes(&self) -> &BTreeSet<Lit> {
        &self.nodes
    }

    pub fn internal(&self) -> &BTreeSet<Lit> {
        &self.internal
    }

    pub fn is_internal(&self, l: Lit) -> bool {
        self.internal.contains(&l)
    }

    pub fn is_leaf(&self, l: Lit) -> bool {
        self.nodes.contains(&l) && !self.internal.contains(&l)
    }

    pub fn leaves(&self) -> impl Iterator<Item = Lit> + '_ {
        self.nodes.iter().copied().filter(|l| !self.internal.contains(l))
    }

    pub fn conflict_clause(&self) -> Clause {
        self.leaves().map(|l| !l).collect()
    }

    /// Leaves of the subgraph rooted at `l`.
    pub fn leaves_reaching(&self, g: &ConflictGraph, l: Lit) -> BTreeSet<Lit> {
        let mut seen = BTreeSet::new();
        let mut out = BTreeSet::new();
        let mut stack = vec![l];
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            if self.is_internal(v) {
                stack.extend(g.preds(v));
            } else {
                out.insert(v);
            }
        }
        out
    }

    /// `{l}` plus the negated leaves reaching `l`, or `None` if `l` has no predecessors.
    pub fn induced_clause(&self, g: &ConflictGraph, l: Lit) -> Result<Option<Clause>, DecompositionError> {
        if !self.nodes.contains(&l) {
            return Err(DecompositionError::NotANode(l));
        }
        if !self.is_internal(l) {
            return Err(DecompositionError::Leaf(l));
        }
        if g.preds(l).is_empty() {
            return Ok(None);
        }
        let leaves = self.leaves_reaching(g, l);
        Ok(Some(Clause::new(std::iter::once(l).chain(leaves.into_iter().map(|v| !v)))))
    }

    /// Longest path from a leaf of this subgraph to `l`, along its edges.
    pub fn depth(&self, g: &ConflictGraph, l: Lit) -> usize {
        let mut memo = std::collections::BTreeMap::new();
        for &v in g.topo_order() {
            if !self.nodes.contains(&v) {
                continue;
            }
            let d = if self.is_internal(v) {
                g.preds(v).iter().map(|p| memo.get(p).map_or(0, |d| d + 1)).max().unwrap_or(0)
            } else {
                0
            };
            memo.insert(v, d);
            if v == l {
                break;
            }
        }
        memo.get(&l).copied().unwrap_or(0)
    }

    /// Strict containment as graphs: nodes and edges, with at least one difference.
    pub fn strictly_within(&self, other: &SubGraph) -> bool {
        self != other && self.nodes.is_subset(&other.nodes) && self.internal.is_subset(&other.internal)
    }

    fn problems(&self, g: &ConflictGraph) -> Vec<String> {
        let mut out = Vec::new();
        let x = g.conflict_var();
        if !self.nodes.contains(&x.pos()) || !self.nodes.contains(&x.neg()) {
            out.push("missing a conflict literal".into());
        }
        for &l in &self.nodes {
            if !g.contains(l) {
                out.push(format!("{l} is not a node of the graph"));
            }
        }
        for &l in &self.internal {
            if g.reason(l).is_none() {
                out.push(format!("{l} is internal here but a leaf of the graph"));
            }
            if let Some(p) = g.preds(l).into_iter().find(|p| !self.nodes.contains(p)) {
                out.push(format!("{l} lost its incoming edge from {p}"));
            }
        }
        for &l in &self.nodes {
            if l.var() == x {
                continue;
            }
            if !g.succs(l).iter().any(|s| self.is_internal(*s)) {
                out.push(format!("{l} has no outgoing edge inside the subgraph"));
            }
        }
        // proper: no internal node reaches a leaf
        for l in self.leaves() {
            let anc = g.ancestors_of(&[l]);
            if let Some(v) = anc.iter().find(|&&v| v != l && self.is_internal(v)) {
                out.push(format!("internal {v} reaches leaf {l}"));
            }
        }
        out
    }
}

/// Parallel chain `H_0 ⊂ H_1 ⊂ … ⊂ H_k = G` refined by series chains:
/// `levels[i] = [H_{i,0} = H_i, …, H_{i,m_i} = H_{i+1}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub levels: Vec<Vec<SubGraph>>,
}

impl Decomposition {
    /// A single series chain; the first element should be the base graph and the last the whole graph.
    pub fn series(chain: Vec<SubGraph>) -> Decomposition {
        Decomposition { levels: vec![chain] }
    }

    /// `H_0 ⊂ G`.
    pub fn trivial(g: &ConflictGraph) -> Decomposition {
        Decomposition::series(vec![SubGraph::base(g), SubGraph::whole(g)])
    }

    /// Every `m_i = 1`.
    pub fn parallel(chain: Vec<SubGraph>) -> Decomposition {
        Decomposition { levels: chain.windows(2).map(|w| w.to_vec()).collect() }
    }

    /// Number of parallel steps `k`.
    pub fn k(&self) -> usize {
        self.levels.len()
    }

    /// `H_i` for `0 ≤ i ≤ k`.
    pub fn h(&self, i: usize) -> &SubGraph {
        if i < self.levels.len() {
            &self.levels[i][0]
        } else {
            self.levels[i - 1].last().unwrap()
        }
    }

    pub fn m(&self, i: usize) -> usize {
        self.levels[i].len() - 1
    }

    pub fn h_ij(&self, i: usize, j: usize) -> &SubGraph {
        &self.levels[i][j]
    }

    pub fn subgraphs(&self) -> impl Iterator<Item = &SubGraph> {
        self.levels.iter().flatten()
    }
}

pub fn validate_decomposition(g: &ConflictGraph, d: &Decomposition) -> Result<(), DecompositionError> {
    let mut problems = Vec::new();
    if d.levels.is_empty() || d.levels.iter().any(|l| l.len() < 2) {
        return Err(DecompositionError::Invalid("every chain needs at least two graphs".into()));
    }
    if d.h(0) != &SubGraph::base(g) {
        problems.push("H_0 is not {□, x, ¬x}".to_string());
    }
    if d.h(d.k()) != &SubGraph::whole(g) {
        problems.push("the last graph is not the whole conflict graph".to_string());
    }
    for i in 1..d.levels.len() {
        if d.levels[i - 1].last() != d.levels[i].first() {
            problems.push(format!("series chain {} does not end at H_{i}", i - 1));
        }
    }
    for (i, level) in d.levels.iter().enumerate() {
        for (j, h) in level.iter().enumerate() {
            for p in h.problems(g) {
                problems.push(format!("H_({i},{j}): {p}"));
            }
            if j > 0 && !level[j - 1].strictly_within(h) {
                problems.push(format!("H_({i},{}) is not strictly inside H_({i},{j})", j - 1));
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(DecompositionError::Invalid(problems.join("; ")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    /// Conflict clause of `H_{0,j}`.
    Conflict { j: usize },
    /// Induced clause of `lit` in `H_{i,j}`.
    Induced { lit: Lit, i: usize, j: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Learnable {
    pub clause: Clause,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LearnableSet {
    pub items: Vec<Learnable>,
}

impl LearnableSet {
    pub fn clauses(&self) -> BTreeSet<Clause> {
        self.items.iter().map(|l| l.clause.clone()).collect()
    }

    /// Distinct clauses in the order they were first listed.
    pub fn ordered_clauses(&self) -> Vec<Clause> {
        let mut seen = BTreeSet::new();
        self.items.iter().filter(|l| seen.insert(l.clause.clone())).map(|l| l.clause.clone()).collect()
    }
}

pub fn learnable_clauses(g: &ConflictGraph, d: &Decomposition) -> Result<LearnableSet, DecompositionError> {
    validate_decomposition(g, d)?;
    let mut items = Vec::new();
    for j in 1..=d.m(0) {
        items.push(Learnable { clause: d.h_ij(0, j).conflict_clause(), provenance: Provenance::Conflict { j } });
    }
    for i in 1..d.k() {
        let hi = d.h(i);
        for j in 1..=d.m(i) {
            let hij = d.h_ij(i, j);
            for l in hi.leaves().filter(|&l| hij.is_internal(l)) {
                if let Some(clause) = hij.induced_clause(g, l)? {
                    items.push(Learnable { clause, provenance: Provenance::Induced { lit: l, i, j } });
                }
            }
        }
    }
    Ok(LearnableSet { items })
}
