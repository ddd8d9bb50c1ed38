use std::collections::BTreeMap;

use super::{validate_decomposition, ConflictGraph, Decomposition, DecompositionError, GraphError, SubGraph};
use crate::checker::check_regularity;
use crate::cnf::{clause_status, Assignment, Lit, Restricted};
use crate::proof::{NodeId, Proof, ProofBuilder, ProofError, Rule};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum InputProofError {
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("the proof is a single leaf")]
    NoResolution,
    #[error("the proof is not an input resolution tree")]
    NotInput,
    #[error("the proof is not regular")]
    NotRegular,
    #[error("the final clause is not falsified by the assignment")]
    NotFalsified,
    #[error("variable {0} of the final clause is a resolution variable")]
    PivotInFinalClause(crate::cnf::Var),
}

struct Chain<'a> {
    g: &'a ConflictGraph,
    b: &'a mut ProofBuilder,
    node: NodeId,
}

impl Chain<'_> {
    /// Resolves away every literal whose negation is internal in `h`, taking the
    /// deepest first. `keep` is never resolved.
    fn saturate(&mut self, h: &SubGraph, keep: Option<Lit>) -> Result<(), InputProofError> {
        loop {
            let clause = self.b.clause(self.node).clone();
            let pick = clause
                .iter()
                .filter(|&m| Some(m) != keep && h.is_internal(!m))
                .max_by_key(|&m| (h.depth(self.g, !m), std::cmp::Reverse(m)));
            let Some(m) = pick else { return Ok(()) };
            let reason = self.g.reason(!m).expect("internal nodes have reasons").clone();
            let ax = self.b.axiom(reason);
            self.node = self.b.res(m, self.node, ax).map_err(|e| InputProofError::Construction(e.to_string()))?;
        }
    }
}

fn expect_clause(b: &ProofBuilder, node: NodeId, want: &crate::cnf::Clause, what: &str) -> Result<(), InputProofError> {
    if b.clause(node) == want {
        Ok(())
    } else {
        Err(InputProofError::Construction(format!("derived {:?} instead of {what} {:?}", b.clause(node), want)))
    }
}

/// A regular input-lemma proof ending in the conflict clause of `g` in which
/// every learnable clause of `d` is input-derived. Leaves are reason clauses.
pub fn derive_learnables_proof(g: &ConflictGraph, d: &Decomposition) -> Result<Proof, InputProofError> {
    validate_decomposition(g, d)?;
    let num_vars = g.nodes().iter().map(|l| l.var().index()).max().unwrap_or(0);
    let mut b = ProofBuilder::new(num_vars);
    let x = g.conflict_var();
    let h01 = d.h_ij(0, 1);
    let start = if h01.is_internal(x.pos()) { x.pos() } else { x.neg() };
    let first = b.axiom(g.reason(start).expect("expanded conflict literal has a reason").clone());
    let mut spine = Chain { g, b: &mut b, node: first };
    for j in 1..=d.m(0) {
        let h = d.h_ij(0, j);
        spine.saturate(h, None)?;
        expect_clause(spine.b, spine.node, &h.conflict_clause(), "conflict clause")?;
    }
    let mut top = spine.node;
    for i in 1..d.k() {
        let (hi, next) = (d.h(i), d.h(i + 1));
        let mut us: Vec<Lit> = hi.leaves().filter(|&u| next.is_internal(u)).collect();
        us.sort_by_key(|&u| (next.depth(g, u), u));
        for u in us {
            let ax = b.axiom(g.reason(u).unwrap().clone());
            let mut chain = Chain { g, b: &mut b, node: ax };
            for j in 1..=d.m(i) {
                let hij = d.h_ij(i, j);
                if hij.is_internal(u) {
                    chain.saturate(hij, Some(u))?;
                    if let Some(want) = hij.induced_clause(g, u)? {
                        expect_clause(chain.b, chain.node, &want, "induced clause")?;
                    }
                }
            }
            let tu = chain.node;
            top = b.res(!u, top, tu).map_err(|e| InputProofError::Construction(e.to_string()))?;
        }
        expect_clause(&b, top, &next.conflict_clause(), "conflict clause")?;
    }
    Ok(b.finish()?)
}

/// Reads a regular input proof as a conflict graph with a series decomposition
/// whose learnable clauses are the derived clauses of the proof.
pub fn decomposition_from_input_proof(
    t: &Proof,
    a: &Assignment,
) -> Result<(ConflictGraph, Decomposition), InputProofError> {
    let root = t.root();
    if t.rule(root).is_leaf() {
        return Err(InputProofError::NoResolution);
    }
    if !t.input_derived_flags()[root] {
        return Err(InputProofError::NotInput);
    }
    if !check_regularity(t).is_empty() {
        return Err(InputProofError::NotRegular);
    }
    let final_clause = t.root_clause();
    if !matches!(clause_status(final_clause, a), Restricted::Zero) {
        return Err(InputProofError::NotFalsified);
    }
    if let Some(v) = t.pivot_vars().into_iter().find(|&v| final_clause.contains_var(v)) {
        return Err(InputProofError::PivotInFinalClause(v));
    }
    // (l_i, D_i) from the root down, then C_1
    let mut steps = Vec::new();
    let mut node = root;
    let c1 = loop {
        let Rule::Res { pivot, left, right } = t.rule(node) else {
            return Err(InputProofError::NotInput);
        };
        let (l_leaf, r_leaf) = (t.rule(left).is_leaf(), t.rule(right).is_leaf());
        if r_leaf {
            steps.push((!pivot, t.clause(right).clone()));
            if l_leaf {
                break t.clause(left).clone();
            }
            node = left;
        } else {
            steps.push((pivot, t.clause(left).clone()));
            node = right;
        }
    };
    steps.reverse();
    let l1 = steps[0].0;
    let mut reasons = BTreeMap::new();
    reasons.insert(!l1, c1);
    for (l, dcl) in &steps {
        reasons.insert(*l, dcl.clone());
    }
    let g = ConflictGraph::from_reasons(l1.var(), reasons)?;
    let mut chain = vec![SubGraph::base(&g)];
    let mut internal = vec![!l1];
    for (l, _) in &steps {
        internal.push(*l);
        chain.push(SubGraph::from_internal(&g, internal.iter().copied()));
    }
    let d = Decomposition::series(chain);
    validate_decomposition(&g, &d)?;
    Ok((g, d))
}
