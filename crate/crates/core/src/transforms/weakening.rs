use super::{validate, TransformError, ANY_PROOF};
use crate::cnf::{Clause, Formula};
use crate::proof::{resolve, NodeId, Proof, ProofBuilder, Rule};

#[derive(Clone, Copy)]
enum Step {
    Keep,
    Forward(NodeId),
    Refer(NodeId),
}

/// A resolution-only proof of a subclause of the root clause, no larger than
/// the input. Each w-resolution either resolves the shrunken premises or
/// passes on a premise that lacks its pivot literal; weakening passes on its
/// premise. Lemmas whose source gets dropped are re-derived at first use.
pub fn eliminate_weakening(p: &Proof, f: &Formula) -> Result<Proof, TransformError> {
    validate(p, f, &ANY_PROOF)?;
    let n = p.len();
    let mut primed: Vec<Clause> = Vec::with_capacity(n);
    let mut step = Vec::with_capacity(n);
    for id in 0..n {
        let (c, s) = match p.rule(id) {
            Rule::Axiom => (p.clause(id).clone(), Step::Keep),
            Rule::Lemma { source } => (primed[source].clone(), Step::Refer(source)),
            Rule::Weaken { child } => (primed[child].clone(), Step::Forward(child)),
            Rule::Res { pivot, left, right } | Rule::WRes { pivot, left, right } => {
                let (cl, cr) = (&primed[left], &primed[right]);
                if let Ok(r) = resolve(cl, cr, pivot) {
                    (r, Step::Keep)
                } else if !cl.contains(pivot) {
                    (cl.clone(), Step::Forward(left))
                } else {
                    (cr.clone(), Step::Forward(right))
                }
            }
        };
        primed.push(c);
        step.push(s);
    }
    // the node that actually derives primed[id]
    let mut canon = vec![0; n];
    for id in 0..n {
        canon[id] = match step[id] {
            Step::Keep => id,
            Step::Forward(c) | Step::Refer(c) => canon[c],
        };
    }
    let mut out = Emitter { p, step: &step, canon: &canon, b: ProofBuilder::new(p.num_vars()), done: vec![None; n] };
    out.emit(p.root());
    Ok(out.b.finish().expect("emission follows post-order"))
}

struct Emitter<'a> {
    p: &'a Proof,
    step: &'a [Step],
    canon: &'a [NodeId],
    b: ProofBuilder,
    done: Vec<Option<NodeId>>,
}

impl Emitter<'_> {
    fn emit(&mut self, id: NodeId) -> NodeId {
        match self.step[id] {
            Step::Forward(c) => self.emit(c),
            Step::Refer(_) => {
                let t = self.canon[id];
                match self.done[t] {
                    Some(o) => self.b.lemma(o),
                    None => self.emit(t),
                }
            }
            Step::Keep => {
                let o = match self.p.rule(id) {
                    Rule::Res { pivot, left, right } | Rule::WRes { pivot, left, right } => {
                        let l = self.emit(left);
                        let r = self.emit(right);
                        self.b.res(pivot, l, r).expect("kept nodes resolve")
                    }
                    _ => self.b.axiom(self.p.clause(id).clone()),
                };
                self.done[id] = Some(o);
                o
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::tests::{balanced_tree, c, lit};
    use crate::proof::RuleKind;

    fn f(cs: &[&[i64]]) -> Formula {
        Formula::from_clauses(cs.iter().map(|x| c(x)).collect())
    }

    #[test]
    fn forwards_premise_without_pivot() {
        let mut b = ProofBuilder::new(3);
        let l = b.axiom(c(&[2]));
        let r = b.axiom(c(&[3, -1]));
        b.wres(lit(1), l, r);
        let p = b.finish().unwrap();
        let out = eliminate_weakening(&p, &f(&[&[2], &[3, -1]])).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.root_clause(), &c(&[2]));
    }

    #[test]
    fn resolution_proof_unchanged() {
        let p = balanced_tree();
        let fm = f(&[&[1, 2], &[1, -2], &[-1, 3], &[-1, -3]]);
        assert_eq!(eliminate_weakening(&p, &fm).unwrap(), p);
    }

    #[test]
    fn weakening_is_dropped() {
        let mut b = ProofBuilder::new(2);
        let x = b.axiom(c(&[1]));
        let w = b.weaken(x, c(&[1, 2]));
        let nx = b.axiom(c(&[-1]));
        b.res(lit(1), w, nx).unwrap();
        let p = b.finish().unwrap();
        let out = eliminate_weakening(&p, &f(&[&[1], &[-1]])).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.root_clause().is_empty());
        assert!(!out.uses(RuleKind::Weaken));
    }

    #[test]
    fn dropped_lemma_source_is_rederived() {
        // left: WRES on 3 of {4} and ({1} from {1,2},{1,-2}) forwards {4}, dropping {1}
        // right: lemma {1} resolved with {-1}
        let mut b = ProofBuilder::new(4);
        let four = b.axiom(c(&[4]));
        let a = b.axiom(c(&[1, 2]));
        let bb = b.axiom(c(&[1, -2]));
        let one = b.res(lit(2), a, bb).unwrap();
        let left = b.wres(lit(3), four, one);
        let lem = b.lemma(one);
        let neg = b.axiom(c(&[-1]));
        let right = b.res(lit(1), lem, neg).unwrap();
        b.wres(lit(4), left, right);
        let p = b.finish().unwrap();
        let fm = f(&[&[1, 2], &[1, -2], &[4], &[-1]]);
        let out = eliminate_weakening(&p, &fm).unwrap();
        assert_eq!(out.len(), 5);
        assert!(out.root_clause().is_empty());
        assert!(crate::checker::check_proof(&out, &fm, &crate::proof::SystemDescriptor::rtl(), false).accepted());
    }
}
