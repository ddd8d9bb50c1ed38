use std::collections::HashMap;

use super::{validate, TransformError};
use crate::cnf::{Clause, Formula, Lit, VariableExtension};
use crate::proof::{resolve, NodeId, Proof, ProofBuilder, Rule, SystemDescriptor};

/// Where a premise of a chain comes from.
#[derive(Clone, Copy)]
enum Premise<'a> {
    Axiom(&'a Clause),
    Lemma(NodeId),
}

fn push_premise(b: &mut ProofBuilder, prem: Premise) -> NodeId {
    match prem {
        Premise::Axiom(c) => b.axiom(c.clone()),
        Premise::Lemma(id) => b.lemma(id),
    }
}

/// Resolves `d` and `e`, then the resolvent `C` against `{q, ¬l}` for each
/// `l ∈ C` in literal order, ending in `{q}` (or in `□` when `C` is empty).
/// Returns the resolvent's node id and the chain's last node.
fn chain(
    b: &mut ProofBuilder,
    d: Premise,
    e: Premise,
    pivot: Lit,
    ve: &VariableExtension,
    have: &std::collections::HashSet<&Clause>,
) -> Result<(NodeId, NodeId), TransformError> {
    let q = ve.q.ok_or(TransformError::NoExtension)?;
    let dn = push_premise(b, d);
    let en = push_premise(b, e);
    let c = b.res(pivot, dn, en).map_err(|e| TransformError::PivotMissing(e.pivot))?;
    let resolvent = b.clause(c).clone();
    if resolvent.is_tautology() {
        return Err(TransformError::Tautology(resolvent));
    }
    let mut cur = c;
    for l in resolvent.iter() {
        let ext = Clause::new([q.pos(), !l]);
        if !have.contains(&ext) {
            return Err(TransformError::MissingExtensionClause(ext));
        }
        let ax = b.axiom(ext);
        cur = b.res(l, cur, ax).map_err(|e| TransformError::PivotMissing(e.pivot))?;
    }
    Ok((c, cur))
}

/// Input proof of `{q}` from `d`, `e` and the extension clauses, passing
/// through the resolvent of `d` and `e`. Its size is `2|C| + 3`.
pub fn build_input_chain(d: &Clause, e: &Clause, pivot: Lit, ve: &VariableExtension) -> Result<Proof, TransformError> {
    resolve(d, e, pivot).map_err(|e| TransformError::PivotMissing(e.pivot))?;
    let have = ve.formula.clauses().iter().collect();
    let mut b = ProofBuilder::new(ve.formula.num_vars());
    chain(&mut b, Premise::Axiom(d), Premise::Axiom(e), pivot, ve, &have)?;
    Ok(b.finish().expect("chains are input trees"))
}

/// Turns a resolution dag deriving `C` from `F` into a regular tree with input
/// lemmas and w-resolution deriving `C` from the variable extension of `F`.
///
/// Each distinct derived clause gets an input chain ending in `{q}`; the
/// chains hang from a binary tree of w-resolutions on `p_1, p_2, …` by level,
/// and the root w-resolves on `q` against a lemma of `C`.
pub fn ve_simulate(p: &Proof, f: &Formula, ve: &VariableExtension) -> Result<Proof, TransformError> {
    validate(p, f, &SystemDescriptor::rd())?;
    let q = ve.q.ok_or(TransformError::NoExtension)?;
    let mut steps: Vec<(Lit, &Clause, &Clause)> = Vec::new();
    let mut derived_at: HashMap<&Clause, usize> = HashMap::new();
    for id in 0..p.len() {
        if let Rule::Res { pivot, left, right } = p.rule(id) {
            let c = p.clause(id);
            if !derived_at.contains_key(c) {
                derived_at.insert(c, steps.len());
                steps.push((pivot, p.clause(left), p.clause(right)));
            }
        }
    }
    let t = steps.len();
    if t == 0 {
        return Err(TransformError::NothingDerived);
    }
    let n = ve.p.len();
    if n < usize::BITS as usize && t >= 1usize << n {
        return Err(TransformError::TooManyClauses { t, n });
    }
    let axioms: std::collections::HashSet<&Clause> = f.clauses().iter().collect();
    let have = ve.formula.clauses().iter().collect();
    let mut b = ProofBuilder::new(ve.formula.num_vars());
    // output node deriving each chain's resolvent
    let mut resolvent_node: Vec<NodeId> = Vec::with_capacity(t);
    let mut sim = Sim { steps: &steps, derived_at: &derived_at, axioms: &axioms, have: &have, ve, resolvent_node: &mut resolvent_node };
    let top = sim.tree(&mut b, 0, t, 0)?;
    let target = derived_at[p.root_clause()];
    let lem = b.lemma(resolvent_node[target]);
    b.wres(q.pos(), top, lem);
    Ok(b.finish().expect("emission follows post-order"))
}

struct Sim<'a, 'b> {
    steps: &'a [(Lit, &'a Clause, &'a Clause)],
    derived_at: &'a HashMap<&'a Clause, usize>,
    axioms: &'a std::collections::HashSet<&'a Clause>,
    have: &'a std::collections::HashSet<&'a Clause>,
    ve: &'a VariableExtension,
    resolvent_node: &'b mut Vec<NodeId>,
}

impl Sim<'_, '_> {
    fn premise<'c>(&self, c: &'c Clause) -> Premise<'c> {
        if self.axioms.contains(c) {
            Premise::Axiom(c)
        } else {
            Premise::Lemma(self.resolvent_node[self.derived_at[c]])
        }
    }

    /// Chains `lo..hi` under a tree whose root sits at `level`.
    fn tree(&mut self, b: &mut ProofBuilder, lo: usize, hi: usize, level: usize) -> Result<NodeId, TransformError> {
        if hi - lo == 1 {
            let (pivot, d, e) = self.steps[lo];
            let (dp, ep) = (self.premise(d), self.premise(e));
            let (c, end) = chain(b, dp, ep, pivot, self.ve, self.have)?;
            self.resolvent_node.push(c);
            return Ok(end);
        }
        let size = hi - lo;
        let left = size.next_power_of_two() / 2;
        let l = self.tree(b, lo, lo + left, level + 1)?;
        let r = self.tree(b, lo + left, hi, level + 1)?;
        Ok(b.wres(self.ve.p[level].pos(), l, r))
    }
}
