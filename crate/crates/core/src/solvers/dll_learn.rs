use super::{first_side_pivot, Event, Heuristic, Outcome, Run, Search, SearchTrace, SolveError};
use crate::cnf::{formula_status, Assignment, Clause, Formula, Restricted};
use crate::proof::w_resolve;
use crate::solvers::Algorithm;

/// Search that learns the w-resolvent of the clauses tagged by both children
/// of every branch. A falsified node may keep branching when `non_greedy` is
/// set, unless every variable is assigned.
pub fn dll_learn(f: &Formula, a: &Assignment, h: &mut dyn Heuristic, non_greedy: bool) -> Result<Run, SolveError> {
    let mut s = Search::new(f, a);
    let (root, result) = node(&mut s, h, non_greedy, None)?;
    let trace = SearchTrace {
        algorithm: Algorithm::DllLearn,
        num_vars: f.num_vars(),
        seed: 0,
        heuristic: h.name(),
        learning: "w-resolvent".into(),
        root,
    };
    let outcome = match result {
        Ok(m) => Outcome::Sat(m),
        Err(_) => Outcome::Unsat,
    };
    Ok(Run { outcome, formula: s.formula, trace })
}

/// Model, or the tagged clause.
type NodeResult = Result<Assignment, Clause>;

fn node(
    s: &mut Search,
    h: &mut dyn Heuristic,
    non_greedy: bool,
    past: Option<usize>,
) -> Result<(Event, NodeResult), SolveError> {
    let status = formula_status(&s.formula, &s.alpha);
    if status.is_one() {
        return Ok((Event::Sat { assignment: s.alpha.clone() }, Ok(s.alpha.clone())));
    }
    let candidates = s.unassigned_vars();
    let mut choice = None;
    let mut next_past = None;
    if let Restricted::Zero = status {
        let past = past.unwrap_or(0);
        if non_greedy && !s.is_total() {
            choice = h.branch_past_conflict(&s.ctx(&candidates, past));
            next_past = Some(past + 1);
        }
        if choice.is_none() {
            let falsified = s.falsified();
            let i = h.choose_tag(&s.ctx(&[], past), &falsified);
            let clause = (*falsified.get(i).ok_or(SolveError::BadTag(i))?).clone();
            return Ok((Event::Falsified { clause: clause.clone() }, Err(clause)));
        }
    }
    let (var, first) = match choice {
        Some(c) => c,
        None => h.branch(&s.ctx(&candidates, 0)),
    };
    s.check_branch(var)?;
    let mut children = Vec::new();
    let mut tags = Vec::new();
    for value in [first, !first] {
        s.decide(var, value);
        let r = node(s, h, non_greedy, next_past);
        s.undo(var);
        let (ev, res) = r?;
        children.push(ev);
        match res {
            Ok(m) => return Ok((Event::Branch { var, first, learned: None, children }, Ok(m))),
            Err(c) => tags.push(c),
        }
    }
    let learned = w_resolve(&tags[0], &tags[1], first_side_pivot(var, first));
    s.learn(&learned);
    Ok((Event::Branch { var, first, learned: Some(learned.clone()), children }, Err(learned)))
}
