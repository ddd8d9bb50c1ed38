use super::{Event, Heuristic, Outcome, Run, Search, SearchTrace, SolveError};
use crate::cnf::{formula_status, Assignment, Formula, Restricted};
use crate::solvers::Algorithm;

/// Basic backtracking search. A node whose formula is falsified records the
/// first falsified clause.
pub fn dll(f: &Formula, a: &Assignment, h: &mut dyn Heuristic) -> Result<Run, SolveError> {
    let mut s = Search::new(f, a);
    let (root, model) = node(&mut s, h)?;
    let trace = SearchTrace {
        algorithm: Algorithm::Dll,
        num_vars: f.num_vars(),
        seed: 0,
        heuristic: h.name(),
        learning: "none".into(),
        root,
    };
    let outcome = model.map_or(Outcome::Unsat, Outcome::Sat);
    Ok(Run { outcome, formula: s.formula, trace })
}

fn node(s: &mut Search, h: &mut dyn Heuristic) -> Result<(Event, Option<Assignment>), SolveError> {
    match formula_status(&s.formula, &s.alpha) {
        Restricted::Zero => {
            let clause = s.falsified()[0].clone();
            return Ok((Event::Falsified { clause }, None));
        }
        Restricted::One => return Ok((Event::Sat { assignment: s.alpha.clone() }, Some(s.alpha.clone()))),
        Restricted::Residual(()) => {}
    }
    let candidates = s.open_vars();
    let (var, first) = h.branch(&s.ctx(&candidates, 0));
    s.check_branch(var)?;
    let mut children = Vec::new();
    for value in [first, !first] {
        s.decide(var, value);
        let r = node(s, h);
        s.undo(var);
        let (ev, model) = r?;
        children.push(ev);
        if model.is_some() {
            return Ok((Event::Branch { var, first, learned: None, children }, model));
        }
    }
    Ok((Event::Branch { var, first, learned: None, children }, None))
}
