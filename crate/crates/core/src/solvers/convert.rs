use std::collections::{BTreeMap, HashMap, HashSet};

use super::{first_side_pivot, Algorithm, Analysis, Event, Schedule, ScheduleLearning, SearchTrace, Step};
use crate::checker::{check_proof, check_regularity, Verdict};
use crate::cnf::{clause_status, Assignment, Clause, Formula, Lit};
use crate::conflict::{
    decomposition_from_input_proof, derive_learnables_proof, learnable_clauses, ConflictGraph, Decomposition,
    DecompositionError, GraphError, InputProofError,
};
use crate::proof::{resolve, NodeId, Proof, ProofBuilder, ProofError, Rule, SystemDescriptor};

#[derive(Debug, thiserror::Error)]
pub enum ConvertError {
    #[error("the trace found a model")]
    Sat,
    #[error("trace was recorded by {found}, expected {expected}")]
    WrongAlgorithm { found: Algorithm, expected: Algorithm },
    #[error("proof rejected:\n{0}")]
    Invalid(Verdict),
    #[error("{0}")]
    Precondition(String),
    #[error("malformed trace: {0}")]
    Malformed(String),
    #[error(transparent)]
    InputProof(#[from] InputProofError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Proof(#[from] ProofError),
}

fn expect_algorithm(t: &SearchTrace, expected: Algorithm) -> Result<(), ConvertError> {
    if t.algorithm != expected {
        return Err(ConvertError::WrongAlgorithm { found: t.algorithm, expected });
    }
    if !t.is_unsat() {
        return Err(ConvertError::Sat);
    }
    Ok(())
}

fn two_children(ev: &Event) -> Result<(&Event, &Event), ConvertError> {
    match ev {
        Event::Branch { children, .. } if children.len() == 2 => Ok((&children[0], &children[1])),
        _ => Err(ConvertError::Malformed("branch without two children".into())),
    }
}

enum Plan {
    Leaf(Clause),
    Res { pivot: Lit, left: Box<Plan>, right: Box<Plan>, clause: Clause },
}

impl Plan {
    fn clause(&self) -> &Clause {
        match self {
            Plan::Leaf(c) | Plan::Res { clause: c, .. } => c,
        }
    }

    fn emit(&self, b: &mut ProofBuilder) -> NodeId {
        match self {
            Plan::Leaf(c) => b.axiom(c.clone()),
            Plan::Res { pivot, left, right, .. } => {
                let l = left.emit(b);
                let r = right.emit(b);
                b.res(*pivot, l, r).expect("planned resolutions have their pivot")
            }
        }
    }
}

fn plan_rt(ev: &Event) -> Result<Plan, ConvertError> {
    match ev {
        Event::Falsified { clause } => Ok(Plan::Leaf(clause.clone())),
        Event::Branch { var, first, .. } => {
            let (c0, c1) = two_children(ev)?;
            let (l, r) = (plan_rt(c0)?, plan_rt(c1)?);
            let pivot = first_side_pivot(*var, *first);
            if !l.clause().contains(pivot) {
                return Ok(l);
            }
            if !r.clause().contains(!pivot) {
                return Ok(r);
            }
            let clause = resolve(l.clause(), r.clause(), pivot).expect("both sides hold the pivot");
            Ok(Plan::Res { pivot, left: Box::new(l), right: Box::new(r), clause })
        }
        Event::Sat { .. } => Err(ConvertError::Sat),
        Event::Conflict { .. } => Err(ConvertError::Malformed("conflict event in a basic search trace".into())),
    }
}

/// Regular resolution tree of a clause falsified by `a` from an unsatisfiable
/// basic search trace. A branch whose child clause lacks the branch variable
/// forwards that child instead of resolving.
pub fn trace_to_rt(t: &SearchTrace, f: &Formula, a: &Assignment) -> Result<Proof, ConvertError> {
    expect_algorithm(t, Algorithm::Dll)?;
    let plan = plan_rt(&t.root)?;
    let mut b = ProofBuilder::new(f.num_vars());
    plan.emit(&mut b);
    let p = b.finish()?;
    if !clause_status(p.root_clause(), a).is_zero() {
        return Err(ConvertError::Precondition("derived clause is not falsified by the assignment".into()));
    }
    Ok(p)
}

fn branch_step(pivot: Lit) -> Step {
    Step::Branch { var: pivot.var(), first: pivot.is_negated() }
}

/// Walks the internal nodes of `p`, recording a branch on each pivot with the
/// left edge first; `leaf` handles the remaining nodes.
fn walk(
    p: &Proof,
    id: NodeId,
    decisions: &mut Vec<Lit>,
    leaf: &mut dyn FnMut(NodeId, &[Lit]) -> Result<Option<Step>, ConvertError>,
    steps: &mut HashMap<Vec<Lit>, Step>,
) -> Result<(), ConvertError> {
    if let Some(step) = leaf(id, decisions)? {
        steps.insert(decisions.clone(), step);
        return Ok(());
    }
    match p.rule(id) {
        Rule::Res { pivot, left, right } | Rule::WRes { pivot, left, right } => {
            steps.insert(decisions.clone(), branch_step(pivot));
            for (child, lit) in [(left, !pivot), (right, pivot)] {
                decisions.push(lit);
                let r = walk(p, child, decisions, leaf, steps);
                decisions.pop();
                r?;
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Branching script that replays a regular resolution tree of a clause
/// falsified by `a`, with at most `|p| - 1` recursive calls.
pub fn rt_to_schedule(p: &Proof, a: &Assignment) -> Result<Schedule, ConvertError> {
    if p.nodes().iter().any(|n| !matches!(n.rule, Rule::Axiom | Rule::Res { .. })) {
        return Err(ConvertError::Precondition("only axioms and resolution are allowed".into()));
    }
    if let Some(v) = check_regularity(p).first() {
        return Err(ConvertError::Precondition(format!("proof is not regular: {v}")));
    }
    if !clause_status(p.root_clause(), a).is_zero() {
        return Err(ConvertError::Precondition("final clause is not falsified by the assignment".into()));
    }
    if let Some(v) = p.pivot_vars().into_iter().find(|&v| a.contains(v)) {
        return Err(ConvertError::Precondition(format!("pivot variable {v} is assigned")));
    }
    let mut steps = HashMap::new();
    walk(p, p.root(), &mut Vec::new(), &mut |id, _| Ok(p.rule(id).is_leaf().then_some(Step::Stop)), &mut steps)?;
    steps.retain(|_, s| *s != Step::Stop);
    Ok(Schedule { steps })
}

/// Copies proofs into one builder, turning axioms outside `f` into lemmas
/// pointing at the first input-derived node with the same clause.
struct Splicer<'a> {
    f: HashSet<&'a Clause>,
    b: ProofBuilder,
    derived: HashMap<Clause, NodeId>,
}

impl<'a> Splicer<'a> {
    fn new(f: &'a Formula) -> Splicer<'a> {
        Splicer { f: f.clauses().iter().collect(), b: ProofBuilder::new(f.num_vars()), derived: HashMap::new() }
    }

    fn leaf(&mut self, c: &Clause) -> Result<NodeId, ConvertError> {
        if self.f.contains(c) {
            return Ok(self.b.axiom(c.clone()));
        }
        match self.derived.get(c) {
            Some(&src) => Ok(self.b.lemma(src)),
            None => Err(ConvertError::Malformed(format!("clause {c} is used before it is derived"))),
        }
    }

    fn splice(&mut self, t: &Proof) -> Result<NodeId, ConvertError> {
        let mut map = Vec::with_capacity(t.len());
        for (i, n) in t.nodes().iter().enumerate() {
            let id = match n.rule {
                Rule::Axiom => self.leaf(&n.clause)?,
                Rule::Lemma { source } => self.b.lemma(map[source]),
                Rule::Res { pivot, left, right } => self
                    .b
                    .res(pivot, map[left], map[right])
                    .map_err(|e| ConvertError::Malformed(e.to_string()))?,
                Rule::WRes { pivot, left, right } => self.b.wres(pivot, map[left], map[right]),
                Rule::Weaken { child } => self.b.weaken(map[child], n.clause.clone()),
            };
            debug_assert!(i == map.len());
            map.push(id);
        }
        for (i, input) in t.input_derived_flags().into_iter().enumerate() {
            if input && !t.rule(i).is_leaf() {
                self.derived.entry(t.clause(i).clone()).or_insert(map[i]);
            }
        }
        Ok(*map.last().expect("proofs are non-empty"))
    }
}

/// Regular w-resolution tree with input lemmas refuting `f`, from an
/// unsatisfiable conflict-learning trace. Branches become w-resolution steps;
/// every conflict contributes a proof in which all its learnable clauses are
/// input-derived.
pub fn trace_to_regwrti(t: &SearchTrace, f: &Formula) -> Result<Proof, ConvertError> {
    expect_algorithm(t, Algorithm::DllLUp)?;
    let mut s = Splicer::new(f);
    emit_regwrti(&mut s, &t.root)?;
    Ok(s.b.finish()?)
}

fn emit_regwrti(s: &mut Splicer, ev: &Event) -> Result<NodeId, ConvertError> {
    match ev {
        Event::Branch { var, first, .. } => {
            let (c0, c1) = two_children(ev)?;
            let l = emit_regwrti(s, c0)?;
            let r = emit_regwrti(s, c1)?;
            Ok(s.b.wres(first_side_pivot(*var, *first), l, r))
        }
        Event::Conflict { graph, decomposition, .. } => {
            let tu = derive_learnables_proof(graph, decomposition)?;
            s.splice(&tu)
        }
        Event::Falsified { clause } => s.leaf(clause),
        Event::Sat { .. } => Err(ConvertError::Sat),
    }
}

/// Conflict graph of a single falsified clause: its first literal is implied
/// by the clause and clashes with the assignment.
fn single_clause_graph(c: &Clause) -> Result<ConflictGraph, GraphError> {
    let y = c.lits()[0];
    ConflictGraph::from_reasons(y.var(), BTreeMap::from([(y, c.clone())]))
}

/// Branching script and learning script for the non-greedy conflict-learning
/// search that replays a regular w-resolution refutation with input lemmas.
/// Nodes that are not input-derived become branches; at every maximal
/// input-derived node, the search learns all clauses of its input subproof.
pub fn regwrti_to_schedule(p: &Proof, f: &Formula) -> Result<(Schedule, ScheduleLearning), ConvertError> {
    let v = check_proof(p, f, &SystemDescriptor::wrti().regular(), true);
    if !v.accepted() {
        return Err(ConvertError::Invalid(v));
    }
    let flags = p.input_derived_flags();
    let mut analyses = HashMap::new();
    let mut steps = HashMap::new();
    let mut leaf = |id: NodeId, decisions: &[Lit]| -> Result<Option<Step>, ConvertError> {
        if !flags[id] {
            return Ok(None);
        }
        let c = p.clause(id);
        if c.is_empty() {
            return Ok(Some(Step::Stop));
        }
        let (graph, decomposition) = if p.rule(id).is_leaf() {
            let g = single_clause_graph(c)?;
            let d = Decomposition::trivial(&g);
            (g, d)
        } else {
            decomposition_from_input_proof(&p.subproof(id), &Assignment::from_lits(decisions.iter().copied()))?
        };
        let learned = if p.rule(id).is_leaf() {
            Vec::new()
        } else {
            learnable_clauses(&graph, &decomposition)?.ordered_clauses()
        };
        analyses.insert(decisions.to_vec(), Analysis { graph, decomposition, learned });
        Ok(Some(Step::Stop))
    };
    walk(p, p.root(), &mut Vec::new(), &mut leaf, &mut steps)?;
    Ok((Schedule { steps }, ScheduleLearning { analyses, ..Default::default() }))
}

/// Regular w-resolution tree with lemmas refuting `f` whose nodes are exactly
/// the calls of a generalized-learning trace. Leaves whose clause is not in
/// `f` become lemmas of the first node that learned it.
pub fn trace_to_regwrtl(t: &SearchTrace, f: &Formula) -> Result<Proof, ConvertError> {
    expect_algorithm(t, Algorithm::DllLearn)?;
    let mut s = Splicer::new(f);
    emit_regwrtl(&mut s, &t.root)?;
    Ok(s.b.finish()?)
}

fn emit_regwrtl(s: &mut Splicer, ev: &Event) -> Result<NodeId, ConvertError> {
    match ev {
        Event::Branch { var, first, learned, .. } => {
            let (c0, c1) = two_children(ev)?;
            let l = emit_regwrtl(s, c0)?;
            let r = emit_regwrtl(s, c1)?;
            let id = s.b.wres(first_side_pivot(*var, *first), l, r);
            if learned.as_ref() != Some(s.b.clause(id)) {
                return Err(ConvertError::Malformed("learned clause differs from the w-resolvent".into()));
            }
            s.derived.entry(s.b.clause(id).clone()).or_insert(id);
            Ok(id)
        }
        Event::Falsified { clause } => s.leaf(clause),
        Event::Sat { .. } => Err(ConvertError::Sat),
        Event::Conflict { .. } => Err(ConvertError::Malformed("conflict event in a generalized-learning trace".into())),
    }
}

/// Script whose non-greedy replay of the generalized-learning search performs
/// exactly `|p| - 1` recursive calls: branch on every pivot, tag every leaf.
pub fn regwrtl_to_schedule(p: &Proof, f: &Formula) -> Result<Schedule, ConvertError> {
    let v = check_proof(p, f, &SystemDescriptor::wrtl().regular(), true);
    if !v.accepted() {
        return Err(ConvertError::Invalid(v));
    }
    let mut steps = HashMap::new();
    walk(
        p,
        p.root(),
        &mut Vec::new(),
        &mut |id, _| Ok(p.rule(id).is_leaf().then(|| Step::Tag(p.clause(id).clone()))),
        &mut steps,
    )?;
    Ok(Schedule { steps })
}
