//! Conflict graphs built by unit propagation, their subgraphs and
//! decompositions, and the clauses they make learnable.

mod decomposition;
mod input_proof;
mod propagate;
mod strategy;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::cnf::{Assignment, Clause, Formula, Lit, Var};

pub use decomposition::{
    learnable_clauses, validate_decomposition, Decomposition, DecompositionError, Learnable, LearnableSet,
    Provenance, SubGraph,
};
pub use input_proof::{decomposition_from_input_proof, derive_learnables_proof, InputProofError};
pub use propagate::{find_conflict_graph, Propagation, PropagationOrder};
pub use strategy::{all_learnable_decomposition, expansion_chain, first_uip_decomposition, levels_from_trail};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("reason {clause} of {lit} does not contain it")]
    ReasonMissesLiteral { lit: Lit, clause: Clause },
    #[error("conflict variable {0} does not occur in both polarities")]
    MissingConflictPair(Var),
    #[error("variable {0} occurs in both polarities but is not the conflict variable")]
    ExtraComplementaryPair(Var),
    #[error("graph has a cycle through {0}")]
    Cycle(Lit),
    #[error("node {0} has no path to the conflict")]
    Dangling(Lit),
    #[error("leaf {0} is not true under the assignment")]
    LeafNotTrue(Lit),
    #[error("reason {0} is not a clause of the formula")]
    ReasonNotInFormula(Clause),
}

/// A literal dag whose non-leaf nodes carry the clause that implied them.
/// The conflict node has the two incoming edges from `x` and `¬x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictGraph {
    conflict_var: Var,
    nodes: BTreeSet<Lit>,
    reasons: BTreeMap<Lit, Clause>,
    /// Preds before succs.
    topo: Vec<Lit>,
    /// Order in which propagation assigned the literal; leaves get 0.
    stamps: BTreeMap<Lit, usize>,
}

impl ConflictGraph {
    /// Nodes are the reason keys plus their predecessors; nodes without a
    /// reason are leaves. Predecessors of `l` are the negations of
    /// `reason(l) ∖ {l}`.
    pub fn from_reasons(conflict_var: Var, reasons: BTreeMap<Lit, Clause>) -> Result<ConflictGraph, GraphError> {
        Self::with_stamps(conflict_var, reasons, BTreeMap::new())
    }

    /// Like [`ConflictGraph::from_reasons`], also recording propagation stamps.
    pub fn with_stamps(
        conflict_var: Var,
        reasons: BTreeMap<Lit, Clause>,
        stamps: BTreeMap<Lit, usize>,
    ) -> Result<ConflictGraph, GraphError> {
        let mut nodes: BTreeSet<Lit> = BTreeSet::new();
        for (&l, c) in &reasons {
            if !c.contains(l) {
                return Err(GraphError::ReasonMissesLiteral { lit: l, clause: c.clone() });
            }
            nodes.insert(l);
            nodes.extend(c.iter().filter(|&m| m != l).map(|m| !m));
        }
        nodes.insert(conflict_var.pos());
        nodes.insert(conflict_var.neg());
        for &l in &nodes {
            if l.var() != conflict_var && !l.is_negated() && nodes.contains(&!l) {
                return Err(GraphError::ExtraComplementaryPair(l.var()));
            }
        }
        let mut g = ConflictGraph { conflict_var, nodes, reasons, topo: Vec::new(), stamps };
        g.topo = g.topological()?;
        let reach = g.ancestors_of(&[conflict_var.pos(), conflict_var.neg()]);
        if let Some(&l) = g.nodes.iter().find(|l| !reach.contains(l)) {
            return Err(GraphError::Dangling(l));
        }
        Ok(g)
    }

    fn topological(&self) -> Result<Vec<Lit>, GraphError> {
        // 0 = unseen, 1 = on stack, 2 = done
        let mut state: BTreeMap<Lit, u8> = BTreeMap::new();
        let mut order = Vec::new();
        for &start in &self.nodes {
            if state.get(&start).copied().unwrap_or(0) != 0 {
                continue;
            }
            let mut stack = vec![(start, false)];
            while let Some((l, expanded)) = stack.pop() {
                if expanded {
                    state.insert(l, 2);
                    order.push(l);
                    continue;
                }
                match state.get(&l).copied().unwrap_or(0) {
                    2 => continue,
                    1 => return Err(GraphError::Cycle(l)),
                    _ => {}
                }
                state.insert(l, 1);
                stack.push((l, true));
                for p in self.preds(l) {
                    match state.get(&p).copied().unwrap_or(0) {
                        0 => stack.push((p, false)),
                        1 => return Err(GraphError::Cycle(p)),
                        _ => {}
                    }
                }
            }
        }
        Ok(order)
    }

    /// Checks leaves against the assignment and reasons against the formula.
    pub fn validate(&self, f: &Formula, a: &Assignment) -> Result<(), GraphError> {
        for l in self.leaves() {
            if a.lit_value(l) != Some(true) {
                return Err(GraphError::LeafNotTrue(l));
            }
        }
        let clauses = f.clause_set();
        for c in self.reasons.values() {
            if !clauses.contains(c) {
                return Err(GraphError::ReasonNotInFormula(c.clone()));
            }
        }
        Ok(())
    }

    pub fn conflict_var(&self) -> Var {
        self.conflict_var
    }

    /// Literal nodes; the conflict node is implicit.
    pub fn nodes(&self) -> &BTreeSet<Lit> {
        &self.nodes
    }

    /// Number of literal nodes.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, l: Lit) -> bool {
        self.nodes.contains(&l)
    }

    pub fn reason(&self, l: Lit) -> Option<&Clause> {
        self.reasons.get(&l)
    }

    pub fn reasons(&self) -> &BTreeMap<Lit, Clause> {
        &self.reasons
    }

    pub fn is_leaf(&self, l: Lit) -> bool {
        self.nodes.contains(&l) && !self.reasons.contains_key(&l)
    }

    pub fn leaves(&self) -> impl Iterator<Item = Lit> + '_ {
        self.nodes.iter().copied().filter(|l| !self.reasons.contains_key(l))
    }

    pub fn non_leaves(&self) -> impl Iterator<Item = Lit> + '_ {
        self.reasons.keys().copied()
    }

    pub fn preds(&self, l: Lit) -> Vec<Lit> {
        match self.reasons.get(&l) {
            Some(c) => c.iter().filter(|&m| m != l).map(|m| !m).collect(),
            None => Vec::new(),
        }
    }

    pub fn succs(&self, l: Lit) -> Vec<Lit> {
        self.reasons
            .iter()
            .filter(|(&k, c)| k != !l && c.contains(!l))
            .map(|(&k, _)| k)
            .collect()
    }

    /// Nodes in an order where predecessors come first.
    pub fn topo_order(&self) -> &[Lit] {
        &self.topo
    }

    pub fn stamps(&self) -> &BTreeMap<Lit, usize> {
        &self.stamps
    }

    pub fn stamp(&self, l: Lit) -> usize {
        self.stamps.get(&l).copied().unwrap_or(0)
    }

    /// Nodes from which some node of `targets` is reachable, including the targets.
    pub fn ancestors_of(&self, targets: &[Lit]) -> BTreeSet<Lit> {
        let mut seen: BTreeSet<Lit> = BTreeSet::new();
        let mut stack: Vec<Lit> = targets.to_vec();
        while let Some(l) = stack.pop() {
            if seen.insert(l) {
                stack.extend(self.preds(l));
            }
        }
        seen
    }

    /// Negations of the leaves.
    pub fn conflict_clause(&self) -> Clause {
        self.leaves().map(|l| !l).collect()
    }

    /// `{l}` plus the negated leaves that reach `l`; `None` when `l` has no predecessors.
    pub fn induced_clause(&self, l: Lit) -> Result<Option<Clause>, DecompositionError> {
        SubGraph::whole(self).induced_clause(self, l)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph conflict {\n  box [label=\"□\"];\n");
        for &l in &self.nodes {
            let shape = if self.is_leaf(l) { "box" } else { "ellipse" };
            let _ = writeln!(s, "  \"{l}\" [shape={shape}];");
            for p in self.preds(l) {
                let _ = writeln!(s, "  \"{p}\" -> \"{l}\";");
            }
        }
        let x = self.conflict_var;
        let _ = writeln!(s, "  \"{}\" -> box;\n  \"{}\" -> box;\n}}", x.pos(), x.neg());
        s
    }
}
