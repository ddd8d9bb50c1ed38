use super::{Analysis, Event, Heuristic, LearningStrategy, Outcome, Run, Search, SearchTrace, SolveError};
use crate::cnf::{formula_status, Assignment, Clause, Formula, Var};
use crate::conflict::{find_conflict_graph, learnable_clauses, validate_decomposition, Propagation, PropagationOrder};
use crate::solvers::Algorithm;

/// Search with conflict-graph learning. A node with a conflict learns the
/// clauses chosen by `ls` and returns. When `non_greedy` is set, the heuristic
/// may keep branching past a conflict until every variable is assigned.
pub fn dll_l_up(
    f: &Formula,
    a: &Assignment,
    h: &mut dyn Heuristic,
    ls: &mut dyn LearningStrategy,
    non_greedy: bool,
) -> Result<Run, SolveError> {
    let mut s = Search::new(f, a);
    let mut run = Runner { s: &mut s, h, ls, non_greedy };
    let (root, model) = run.node(None)?;
    let trace = SearchTrace {
        algorithm: Algorithm::DllLUp,
        num_vars: f.num_vars(),
        seed: 0,
        heuristic: run.h.name(),
        learning: run.ls.name(),
        root,
    };
    let outcome = model.map_or(Outcome::Unsat, Outcome::Sat);
    Ok(Run { outcome, formula: s.formula, trace })
}

struct Runner<'a> {
    s: &'a mut Search,
    h: &'a mut dyn Heuristic,
    ls: &'a mut dyn LearningStrategy,
    non_greedy: bool,
}

impl Runner<'_> {
    /// `past` counts decisions since the first conflict on this path.
    fn node(&mut self, past: Option<usize>) -> Result<(Event, Option<Assignment>), SolveError> {
        if formula_status(&self.s.formula, &self.s.alpha).is_one() {
            let a = self.s.alpha.clone();
            return Ok((Event::Sat { assignment: a.clone() }, Some(a)));
        }
        let prop = find_conflict_graph(&self.s.formula, &self.s.alpha, PropagationOrder::Fifo);
        if matches!(prop, Propagation::Quiescent(_)) {
            let candidates = self.s.open_vars();
            let choice = self.h.branch(&self.s.ctx(&candidates, 0));
            return self.branch(choice, None);
        }
        let past = past.unwrap_or(0);
        if self.non_greedy && !self.s.is_total() {
            let candidates = self.s.unassigned_vars();
            if let Some(choice) = self.h.branch_past_conflict(&self.s.ctx(&candidates, past)) {
                return self.branch(choice, Some(past + 1));
            }
        }
        match prop {
            Propagation::Conflict(g) => {
                let analysis = self.ls.analyze(&self.s.ctx(&[], past), g);
                self.check(&analysis)?;
                for c in &analysis.learned {
                    self.s.learn(c);
                }
                let Analysis { graph, decomposition, learned } = analysis;
                Ok((Event::Conflict { graph, decomposition, learned }, None))
            }
            _ => Ok((Event::Falsified { clause: Clause::empty() }, None)),
        }
    }


    fn check(&self, a: &Analysis) -> Result<(), SolveError> {
        a.graph.validate(&self.s.formula, &self.s.alpha)?;
        validate_decomposition(&a.graph, &a.decomposition)?;
        let learnable = learnable_clauses(&a.graph, &a.decomposition)?.clauses();
        match a.learned.iter().find(|c| !learnable.contains(*c)) {
            Some(c) => Err(SolveError::NotLearnable(c.clone())),
            None => Ok(()),
        }
    }

    fn branch(
        &mut self,
        (var, first): (Var, bool),
        past: Option<usize>,
    ) -> Result<(Event, Option<Assignment>), SolveError> {
        self.s.check_branch(var)?;
        let mut children = Vec::new();
        for value in [first, !first] {
            self.s.decide(var, value);
            let r = self.node(past);
            self.s.undo(var);
            let (ev, model) = r?;
            children.push(ev);
            if model.is_some() {
                return Ok((Event::Branch { var, first, learned: None, children }, model));
            }
        }
        Ok((Event::Branch { var, first, learned: None, children }, None))
    }
}
