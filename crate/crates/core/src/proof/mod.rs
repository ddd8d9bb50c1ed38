//! Proof trees with lemma back-references.
//!
//! A proof is a vector of nodes in post-order: children precede their parent,
//! the left subtree precedes the right one, and the root is the last node.
//! Every non-root node is the child of exactly one node. Dags are encoded by
//! `Lemma` leaves that point back at an earlier node with the same clause.
//!
//! Binary rules carry a pivot literal `p` that occurs in the left clause; the
//! right clause contains `¬p`. The left edge is labeled `¬p`, the right edge `p`.
//! With a positive pivot this is the usual "x on the left, x̄ on the right".

mod format;
mod system;

use std::collections::BTreeSet;

use crate::cnf::{Clause, Lit, Var};

pub use format::{parse_proof, proof_system_tag, serialize_proof, serialize_proof_tagged, ProofParseError};
pub use system::{LemmaPolicy, RuleKind, RuleSet, Shape, SystemDescriptor, UnknownSystem};

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Axiom,
    Lemma { source: NodeId },
    Res { pivot: Lit, left: NodeId, right: NodeId },
    WRes { pivot: Lit, left: NodeId, right: NodeId },
    Weaken { child: NodeId },
}

impl Rule {
    pub fn kind(&self) -> RuleKind {
        match self {
            Rule::Axiom => RuleKind::Axiom,
            Rule::Lemma { .. } => RuleKind::Lemma,
            Rule::Res { .. } => RuleKind::Res,
            Rule::WRes { .. } => RuleKind::WRes,
            Rule::Weaken { .. } => RuleKind::Weaken,
        }
    }

    pub fn pivot(&self) -> Option<Lit> {
        match *self {
            Rule::Res { pivot, .. } | Rule::WRes { pivot, .. } => Some(pivot),
            _ => None,
        }
    }

    pub fn children(&self) -> Children {
        match *self {
            Rule::Res { left, right, .. } | Rule::WRes { left, right, .. } => Children::Two(left, right),
            Rule::Weaken { child } => Children::One(child),
            Rule::Axiom | Rule::Lemma { .. } => Children::None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Rule::Axiom | Rule::Lemma { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Children {
    None,
    One(NodeId),
    Two(NodeId, NodeId),
}

impl Children {
    pub fn to_vec(self) -> Vec<NodeId> {
        match self {
            Children::None => vec![],
            Children::One(c) => vec![c],
            Children::Two(l, r) => vec![l, r],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProofNode {
    pub rule: Rule,
    pub clause: Clause,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ProofError {
    #[error("proof has no nodes")]
    Empty,
    #[error("node {node}: child {child} does not precede it")]
    ChildOrder { node: NodeId, child: NodeId },
    #[error("node {node}: lemma source {target} does not precede it")]
    LemmaOrder { node: NodeId, target: NodeId },
    #[error("node {node}: children are not laid out in post-order")]
    NotPostOrder { node: NodeId },
    #[error("nodes before {first} are not part of the tree rooted at the last node")]
    Detached { first: NodeId },
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("pivot {pivot} missing: it must occur in the left clause and its negation in the right")]
pub struct PivotMissing {
    pub pivot: Lit,
}

/// Resolution: requires `pivot ∈ c0` and `¬pivot ∈ c1`.
pub fn resolve(c0: &Clause, c1: &Clause, pivot: Lit) -> Result<Clause, PivotMissing> {
    if !c0.contains(pivot) || !c1.contains(!pivot) {
        return Err(PivotMissing { pivot });
    }
    Ok(w_resolve(c0, c1, pivot))
}

/// `(c0 ∖ {pivot}) ∪ (c1 ∖ {¬pivot})`, without requiring either literal to be present.
pub fn w_resolve(c0: &Clause, c1: &Clause, pivot: Lit) -> Clause {
    Clause::new(c0.iter().filter(|&l| l != pivot).chain(c1.iter().filter(|&l| l != !pivot)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    num_vars: u32,
    nodes: Vec<ProofNode>,
    start: Vec<NodeId>,
}

impl Proof {
    /// Validates the post-order tree layout; clause contents are the checker's job.
    pub fn new(num_vars: u32, nodes: Vec<ProofNode>) -> Result<Proof, ProofError> {
        if nodes.is_empty() {
            return Err(ProofError::Empty);
        }
        let mut start = Vec::with_capacity(nodes.len());
        for (id, node) in nodes.iter().enumerate() {
            for c in node.rule.children().to_vec() {
                if c >= id {
                    return Err(ProofError::ChildOrder { node: id, child: c });
                }
            }
            let s = match node.rule {
                Rule::Axiom => id,
                Rule::Lemma { source } => {
                    if source >= id {
                        return Err(ProofError::LemmaOrder { node: id, target: source });
                    }
                    id
                }
                Rule::Weaken { child } => {
                    if child + 1 != id {
                        return Err(ProofError::NotPostOrder { node: id });
                    }
                    start[child]
                }
                Rule::Res { left, right, .. } | Rule::WRes { left, right, .. } => {
                    if right + 1 != id || left + 1 != start[right] {
                        return Err(ProofError::NotPostOrder { node: id });
                    }
                    start[left]
                }
            };
            start.push(s);
        }
        let root_start = *start.last().unwrap();
        if root_start != 0 {
            return Err(ProofError::Detached { first: root_start });
        }
        let num_vars = nodes
            .iter()
            .map(|n| n.clause.max_var().max(n.rule.pivot().map_or(0, |p| p.var().index())))
            .max()
            .unwrap_or(0)
            .max(num_vars);
        Ok(Proof { num_vars, nodes, start })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn nodes(&self) -> &[ProofNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &ProofNode {
        &self.nodes[id]
    }

    pub fn clause(&self, id: NodeId) -> &Clause {
        &self.nodes[id].clause
    }

    pub fn rule(&self, id: NodeId) -> Rule {
        self.nodes[id].rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> NodeId {
        self.nodes.len() - 1
    }

    pub fn root_clause(&self) -> &Clause {
        &self.nodes[self.root()].clause
    }

    /// First id of the subtree rooted at `id`; the subtree is `subtree_start(id)..=id`.
    pub fn subtree_start(&self, id: NodeId) -> NodeId {
        self.start[id]
    }

    /// Parent of each node; `None` for the root.
    pub fn parents(&self) -> Vec<Option<NodeId>> {
        let mut parent = vec![None; self.len()];
        for (id, n) in self.nodes.iter().enumerate() {
            for c in n.rule.children().to_vec() {
                parent[c] = Some(id);
            }
        }
        parent
    }

    /// Longest leaf-to-root edge count; leaves have depth 0.
    pub fn depth(&self) -> usize {
        self.node_depths()[self.root()]
    }

    pub fn node_depths(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.len()];
        for (id, n) in self.nodes.iter().enumerate() {
            d[id] = n.rule.children().to_vec().iter().map(|&c| d[c] + 1).max().unwrap_or(0);
        }
        d
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.clause.len()).max().unwrap_or(0)
    }

    /// Per node: whether its subtree is an input resolution tree, i.e. uses only
    /// resolution and every internal node has a leaf child. Leaves qualify.
    pub fn input_derived_flags(&self) -> Vec<bool> {
        let mut flag = vec![false; self.len()];
        for (id, n) in self.nodes.iter().enumerate() {
            flag[id] = match n.rule {
                Rule::Axiom | Rule::Lemma { .. } => true,
                Rule::Res { left, right, .. } => {
                    flag[left] && flag[right] && (self.rule(left).is_leaf() || self.rule(right).is_leaf())
                }
                Rule::WRes { .. } | Rule::Weaken { .. } => false,
            };
        }
        flag
    }

    pub fn input_derived_nodes(&self) -> BTreeSet<NodeId> {
        self.input_derived_flags()
            .into_iter()
            .enumerate()
            .filter_map(|(i, f)| f.then_some(i))
            .collect()
    }

    pub fn has_lemmas(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n.rule, Rule::Lemma { .. }))
    }

    pub fn uses(&self, kind: RuleKind) -> bool {
        self.nodes.iter().any(|n| n.rule.kind() == kind)
    }

    pub fn pivot_vars(&self) -> BTreeSet<Var> {
        self.nodes.iter().filter_map(|n| n.rule.pivot()).map(|p| p.var()).collect()
    }

    /// The subtree rooted at `id` as a standalone proof. Lemma leaves whose
    /// source lies outside the subtree become axioms.
    pub fn subproof(&self, id: NodeId) -> Proof {
        let s = self.start[id];
        let nodes = self.nodes[s..=id]
            .iter()
            .map(|n| {
                let rule = match n.rule {
                    Rule::Axiom => Rule::Axiom,
                    Rule::Lemma { source } if source >= s => Rule::Lemma { source: source - s },
                    Rule::Lemma { .. } => Rule::Axiom,
                    Rule::Res { pivot, left, right } => Rule::Res { pivot, left: left - s, right: right - s },
                    Rule::WRes { pivot, left, right } => Rule::WRes { pivot, left: left - s, right: right - s },
                    Rule::Weaken { child } => Rule::Weaken { child: child - s },
                };
                ProofNode { rule, clause: n.clause.clone() }
            })
            .collect();
        Proof::new(self.num_vars, nodes).expect("a subtree of a valid proof is valid")
    }
}

/// Appends nodes in post-order. Build the left subtree, then the right one,
/// then the parent.
#[derive(Clone, Debug, Default)]
pub struct ProofBuilder {
    num_vars: u32,
    nodes: Vec<ProofNode>,
}

impl ProofBuilder {
    pub fn new(num_vars: u32) -> ProofBuilder {
        ProofBuilder { num_vars, nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn clause(&self, id: NodeId) -> &Clause {
        &self.nodes[id].clause
    }

    pub fn push(&mut self, rule: Rule, clause: Clause) -> NodeId {
        self.nodes.push(ProofNode { rule, clause });
        self.nodes.len() - 1
    }

    pub fn axiom(&mut self, clause: Clause) -> NodeId {
        self.push(Rule::Axiom, clause)
    }

    pub fn lemma(&mut self, source: NodeId) -> NodeId {
        let clause = self.nodes[source].clause.clone();
        self.push(Rule::Lemma { source }, clause)
    }

    pub fn res(&mut self, pivot: Lit, left: NodeId, right: NodeId) -> Result<NodeId, PivotMissing> {
        let clause = resolve(&self.nodes[left].clause, &self.nodes[right].clause, pivot)?;
        Ok(self.push(Rule::Res { pivot, left, right }, clause))
    }

    pub fn wres(&mut self, pivot: Lit, left: NodeId, right: NodeId) -> NodeId {
        let clause = w_resolve(&self.nodes[left].clause, &self.nodes[right].clause, pivot);
        self.push(Rule::WRes { pivot, left, right }, clause)
    }

    pub fn weaken(&mut self, child: NodeId, clause: Clause) -> NodeId {
        self.push(Rule::Weaken { child }, clause)
    }

    /// Copies `p` in, shifting ids; returns the id of its root.
    pub fn append(&mut self, p: &Proof) -> NodeId {
        let off = self.nodes.len();
        for n in p.nodes() {
            let rule = match n.rule {
                Rule::Axiom => Rule::Axiom,
                Rule::Lemma { source } => Rule::Lemma { source: source + off },
                Rule::Res { pivot, left, right } => Rule::Res { pivot, left: left + off, right: right + off },
                Rule::WRes { pivot, left, right } => Rule::WRes { pivot, left: left + off, right: right + off },
                Rule::Weaken { child } => Rule::Weaken { child: child + off },
            };
            self.nodes.push(ProofNode { rule, clause: n.clause.clone() });
        }
        self.nodes.len() - 1
    }

    pub fn finish(self) -> Result<Proof, ProofError> {
        Proof::new(self.num_vars, self.nodes)
    }
}
