//! Proof checking against a formula and a proof system.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::cnf::{clause_status, Assignment, Clause, Formula, Restricted, Var};
use crate::proof::{resolve, w_resolve, LemmaPolicy, NodeId, Proof, Rule, Shape, SystemDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    BadAxiom,
    BadLemmaRef,
    LemmaNotInputDerived,
    LemmaTooLarge,
    RuleNotAllowed,
    RuleMismatch,
    PivotMissing,
    /// The same pivot variable occurs again at `other`, on one path with this node.
    Irregular { var: Var, other: NodeId },
    NotFalsified,
    NotRefutation,
}

impl ViolationKind {
    pub fn code(&self) -> &'static str {
        match self {
            ViolationKind::BadAxiom => "BAD_AXIOM",
            ViolationKind::BadLemmaRef => "BAD_LEMMA_REF",
            ViolationKind::LemmaNotInputDerived => "LEMMA_NOT_INPUT_DERIVED",
            ViolationKind::LemmaTooLarge => "LEMMA_TOO_LARGE",
            ViolationKind::RuleNotAllowed => "RULE_NOT_ALLOWED",
            ViolationKind::RuleMismatch => "RULE_MISMATCH",
            ViolationKind::PivotMissing => "PIVOT_MISSING",
            ViolationKind::Irregular { .. } => "IRREGULAR",
            ViolationKind::NotFalsified => "NOT_FALSIFIED",
            ViolationKind::NotRefutation => "NOT_REFUTATION",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: NodeId,
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.node, self.kind.code(), self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    fn from_violations(mut violations: Vec<Violation>) -> Verdict {
        violations.sort_by(|a, b| (a.node, a.kind).cmp(&(b.node, b.kind)));
        Verdict { violations }
    }

    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.kind.code() == code)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

fn violation(node: NodeId, kind: ViolationKind, message: impl Into<String>) -> Violation {
    Violation { node, kind, message: message.into() }
}

pub fn check_proof(p: &Proof, f: &Formula, sys: &SystemDescriptor, require_refutation: bool) -> Verdict {
    let axioms: HashSet<&Clause> = f.clauses().iter().collect();
    let input = p.input_derived_flags();
    let lemmas = if sys.shape == Shape::Dag { LemmaPolicy::Any } else { sys.lemmas };
    let mut out = Vec::new();
    for (id, node) in p.nodes().iter().enumerate() {
        let clause = &node.clause;
        if !sys.rules.allows(node.rule.kind()) {
            out.push(violation(id, ViolationKind::RuleNotAllowed, format!("{:?} is not a rule of {sys}", node.rule.kind())));
        }
        match node.rule {
            Rule::Axiom => {
                if !axioms.contains(clause) {
                    out.push(violation(id, ViolationKind::BadAxiom, format!("{clause} is not an initial clause")));
                }
            }
            Rule::Lemma { source } => {
                if lemmas == LemmaPolicy::None {
                    out.push(violation(id, ViolationKind::RuleNotAllowed, format!("lemmas are not allowed in {sys}")));
                }
                if p.clause(source) != clause {
                    out.push(violation(
                        id,
                        ViolationKind::BadLemmaRef,
                        format!("node {source} derives {}, not {clause}", p.clause(source)),
                    ));
                }
                if lemmas == LemmaPolicy::InputOnly && !input[source] {
                    out.push(violation(
                        id,
                        ViolationKind::LemmaNotInputDerived,
                        format!("node {source} is not input-derived"),
                    ));
                }
                if let Some(k) = sys.max_lemma_size {
                    if clause.len() > k && !axioms.contains(clause) {
                        out.push(violation(
                            id,
                            ViolationKind::LemmaTooLarge,
                            format!("lemma {clause} has {} literals, bound is {k}", clause.len()),
                        ));
                    }
                }
            }
            Rule::Res { pivot, left, right } => match resolve(p.clause(left), p.clause(right), pivot) {
                Err(_) => out.push(violation(
                    id,
                    ViolationKind::PivotMissing,
                    format!("{pivot} must be in node {left} and {} in node {right}", !pivot),
                )),
                Ok(r) if &r != clause => {
                    out.push(violation(id, ViolationKind::RuleMismatch, format!("resolvent is {r}, node says {clause}")))
                }
                Ok(_) => {}
            },
            Rule::WRes { pivot, left, right } => {
                let r = w_resolve(p.clause(left), p.clause(right), pivot);
                if &r != clause {
                    out.push(violation(id, ViolationKind::RuleMismatch, format!("w-resolvent is {r}, node says {clause}")));
                }
            }
            Rule::Weaken { child } => {
                if !p.clause(child).is_subset(clause) {
                    out.push(violation(
                        id,
                        ViolationKind::RuleMismatch,
                        format!("{clause} does not contain {}", p.clause(child)),
                    ));
                }
            }
        }
    }
    if sys.regular {
        match sys.shape {
            Shape::Tree => out.extend(check_regularity(p)),
            Shape::Dag => out.extend(check_dag_regularity(p)),
        }
    }
    if require_refutation && !p.root_clause().is_empty() {
        out.push(violation(p.root(), ViolationKind::NotRefutation, format!("root clause is {}", p.root_clause())));
    }
    Verdict::from_violations(out)
}

/// Regularity along tree paths; lemma leaves start fresh.
pub fn check_regularity(p: &Proof) -> Vec<Violation> {
    let parent = p.parents();
    let mut out = Vec::new();
    for id in 0..p.len() {
        let Some(var) = p.rule(id).pivot().map(|l| l.var()) else { continue };
        let mut up = parent[id];
        while let Some(a) = up {
            if p.rule(a).pivot().map(|l| l.var()) == Some(var) {
                out.push(violation(
                    id,
                    ViolationKind::Irregular { var, other: a },
                    format!("variable {var} is a pivot at nodes {id} and {a} on one path"),
                ));
                break;
            }
            up = parent[a];
        }
    }
    out
}

/// Regularity along dag paths: a lemma leaf continues into the subproof of its source.
pub fn check_dag_regularity(p: &Proof) -> Vec<Violation> {
    let mut below: Vec<BTreeMap<Var, NodeId>> = Vec::with_capacity(p.len());
    let mut out = Vec::new();
    for id in 0..p.len() {
        let mut set = BTreeMap::new();
        match p.rule(id) {
            Rule::Lemma { source } => set = below[source].clone(),
            rule => {
                for c in rule.children().to_vec() {
                    for (&v, &n) in &below[c] {
                        set.entry(v).or_insert(n);
                    }
                }
            }
        }
        if let Some(var) = p.rule(id).pivot().map(|l| l.var()) {
            if let Some(&other) = set.get(&var) {
                out.push(violation(
                    id,
                    ViolationKind::Irregular { var, other },
                    format!("variable {var} is a pivot at nodes {id} and {other} on one dag path"),
                ));
            }
            set.insert(var, id);
        }
        below.push(set);
    }
    out
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PathCheckError {
    #[error("proof is not regular")]
    NotRegular,
    #[error("proof is not a refutation")]
    NotRefutation,
    #[error("proof uses weakening")]
    UsesWeakening,
}

/// Every clause must be falsified by the assignment read off the edge labels
/// between its node and the root.
pub fn check_path_falsification(p: &Proof) -> Result<Verdict, PathCheckError> {
    if !check_regularity(p).is_empty() {
        return Err(PathCheckError::NotRegular);
    }
    if !p.root_clause().is_empty() {
        return Err(PathCheckError::NotRefutation);
    }
    if p.nodes().iter().any(|n| matches!(n.rule, Rule::Weaken { .. })) {
        return Err(PathCheckError::UsesWeakening);
    }
    let mut alpha: Vec<Option<Assignment>> = vec![None; p.len()];
    alpha[p.root()] = Some(Assignment::new());
    let mut out = Vec::new();
    for id in (0..p.len()).rev() {
        let a = alpha[id].take().expect("parents are visited first");
        if clause_status(p.clause(id), &a) != Restricted::Zero {
            out.push(violation(
                id,
                ViolationKind::NotFalsified,
                format!("{} is not falsified by the path assignment", p.clause(id)),
            ));
        }
        if let Some(pivot) = p.rule(id).pivot() {
            if let Rule::Res { left, right, .. } | Rule::WRes { left, right, .. } = p.rule(id) {
                let mut la = a.clone();
                la.assign_lit(!pivot);
                let mut ra = a;
                ra.assign_lit(pivot);
                alpha[left] = Some(la);
                alpha[right] = Some(ra);
            }
        }
    }
    Ok(Verdict::from_violations(out))
}
