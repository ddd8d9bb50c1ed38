use super::TransformError;
use crate::cnf::{restrict_clause, Assignment, Clause};
use crate::proof::{resolve, NodeId, Proof, ProofBuilder, Rule};

/// Restricts a tree proof with resolution and weakening by `rho`. The result
/// derives a subclause of the restricted root clause from the restricted
/// axioms (falsified axioms become the empty clause) and is no larger than
/// the input. Weakening steps weaken to the restricted clause of the original
/// step, so the empty restriction returns the input unchanged.
pub fn restrict_proof(p: &Proof, rho: &Assignment) -> Result<Proof, TransformError> {
    if let Some(n) = p.nodes().iter().find(|n| matches!(n.rule, Rule::Lemma { .. } | Rule::WRes { .. })) {
        return Err(TransformError::Unsupported(format!("{:?}", n.rule.kind())));
    }
    // per node: the clause it ends up deriving and how, or None when satisfied
    let mut plan: Vec<Option<(Clause, Step)>> = Vec::with_capacity(p.len());
    for id in 0..p.len() {
        let restricted = restrict_clause(p.clause(id), rho);
        let entry = if restricted.is_one() {
            None
        } else {
            let here = restricted.into_clause().unwrap_or_default();
            Some(match p.rule(id) {
                Rule::Axiom => (here, Step::Keep),
                Rule::Weaken { .. } => (here, Step::Keep),
                Rule::Res { pivot, left, right } => {
                    let survivor = match rho.lit_value(pivot) {
                        Some(true) => Some(right),
                        Some(false) => Some(left),
                        None => None,
                    };
                    let get = |c: NodeId| plan[c].as_ref().map(|(cl, _): &(Clause, Step)| cl.clone()).ok_or(TransformError::Satisfied);
                    match survivor {
                        Some(c) => (get(c)?, Step::Forward(c)),
                        None => {
                            let (lc, rc) = (get(left)?, get(right)?);
                            if let Ok(r) = resolve(&lc, &rc, pivot) {
                                (r, Step::Keep)
                            } else if !lc.contains(pivot) {
                                (lc, Step::Forward(left))
                            } else {
                                (rc, Step::Forward(right))
                            }
                        }
                    }
                }
                Rule::Lemma { .. } | Rule::WRes { .. } => unreachable!(),
            })
        };
        plan.push(entry);
    }
    if plan[p.root()].is_none() {
        return Err(TransformError::Satisfied);
    }
    let mut b = ProofBuilder::new(p.num_vars());
    emit(p, &plan, p.root(), &mut b);
    Ok(b.finish().expect("emission follows post-order"))
}

#[derive(Clone, Copy)]
enum Step {
    Keep,
    Forward(NodeId),
}

fn emit(p: &Proof, plan: &[Option<(Clause, Step)>], id: NodeId, b: &mut ProofBuilder) -> NodeId {
    let (clause, step) = plan[id].as_ref().expect("only unsatisfied nodes are emitted");
    match (*step, p.rule(id)) {
        (Step::Forward(c), _) => emit(p, plan, c, b),
        (Step::Keep, Rule::Weaken { child }) => {
            let c = emit(p, plan, child, b);
            b.weaken(c, clause.clone())
        }
        (Step::Keep, Rule::Res { pivot, left, right }) => {
            let l = emit(p, plan, left, b);
            let r = emit(p, plan, right, b);
            b.res(pivot, l, r).expect("planned resolution is valid")
        }
        _ => b.axiom(clause.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::check_proof;
    use crate::cnf::{restrict_clauses, Formula, Var};
    use crate::proof::tests::{balanced_tree, c, unit_refutation};
    use crate::proof::SystemDescriptor;

    #[test]
    fn empty_restriction_is_identity() {
        let p = balanced_tree();
        assert_eq!(restrict_proof(&p, &Assignment::new()).unwrap(), p);
    }

    #[test]
    fn falsified_axiom_becomes_empty_leaf() {
        let p = unit_refutation();
        let rho = Assignment::from_pairs([(Var::new(1), false)]);
        let out = restrict_proof(&p, &rho).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out.root_clause().is_empty());
    }

    #[test]
    fn restricted_tree_checks() {
        let p = balanced_tree();
        let f = Formula::from_clauses(vec![c(&[1, 2]), c(&[1, -2]), c(&[-1, 3]), c(&[-1, -3])]);
        for v in 1..=3 {
            for val in [false, true] {
                let rho = Assignment::from_pairs([(Var::new(v), val)]);
                let out = restrict_proof(&p, &rho).unwrap();
                assert!(out.len() <= p.len());
                let fr = restrict_clauses(&f, &rho);
                assert!(check_proof(&out, &fr, &SystemDescriptor::rtw(), true).accepted());
            }
        }
    }

    #[test]
    fn satisfied_root_is_an_error() {
        let mut b = ProofBuilder::new(1);
        b.axiom(c(&[1]));
        let p = b.finish().unwrap();
        let rho = Assignment::from_pairs([(Var::new(1), true)]);
        assert_eq!(restrict_proof(&p, &rho), Err(TransformError::Satisfied));
    }
}
