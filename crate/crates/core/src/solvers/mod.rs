//! DLL search procedures, their recorded execution trees, and the conversions
//! between executions and resolution trees.

mod convert;
mod dll;
mod dll_l_up;
mod dll_learn;
mod policy;
mod trc;

use std::collections::BTreeSet;
use std::fmt;

use crate::cnf::{Assignment, Clause, Formula, Lit, Var};
use crate::conflict::{ConflictGraph, Decomposition, DecompositionError, GraphError};

pub use convert::{
    regwrti_to_schedule, regwrtl_to_schedule, rt_to_schedule, trace_to_regwrti, trace_to_regwrtl, trace_to_rt,
    ConvertError,
};
pub use dll::dll;
pub use dll_l_up::dll_l_up;
pub use dll_learn::dll_learn;
pub use policy::{
    Analysis, Ctx, Heuristic, Learning, LearningStrategy, NonGreedy, Schedule, ScheduleLearning, Seeded, Smallest,
    Step, UnitFirst,
};
pub use trc::{parse_trace, write_trace, TraceParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Dll,
    DllLUp,
    DllLearn,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dll => "dll",
            Algorithm::DllLUp => "dll-l-up",
            Algorithm::DllLearn => "dll-learn",
        }
    }

    pub fn from_name(s: &str) -> Option<Algorithm> {
        [Algorithm::Dll, Algorithm::DllLUp, Algorithm::DllLearn].into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One call of a search procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    /// Branch on `var`, trying `first` before its complement. Has one child
    /// when the first branch found a model. `learned` is the w-resolvent
    /// recorded by the generalized learning procedure.
    Branch { var: Var, first: bool, learned: Option<Clause>, children: Vec<Event> },
    /// A conflict graph was analysed and `learned` added to the formula.
    Conflict { graph: ConflictGraph, decomposition: Decomposition, learned: Vec<Clause> },
    /// A clause falsified by the current assignment ends the call.
    Falsified { clause: Clause },
    Sat { assignment: Assignment },
}

impl Event {
    fn count(&self) -> usize {
        match self {
            Event::Branch { children, .. } => 1 + children.iter().map(Event::count).sum::<usize>(),
            _ => 1,
        }
    }

    fn collect_learned(&self, out: &mut Vec<Clause>) {
        match self {
            Event::Branch { learned, children, .. } => {
                for c in children {
                    c.collect_learned(out);
                }
                out.extend(learned.iter().cloned());
            }
            Event::Conflict { learned, .. } => out.extend(learned.iter().cloned()),
            _ => {}
        }
    }

    fn find_sat(&self) -> Option<&Assignment> {
        match self {
            Event::Sat { assignment } => Some(assignment),
            Event::Branch { children, .. } => children.iter().find_map(Event::find_sat),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchTrace {
    pub algorithm: Algorithm,
    pub num_vars: u32,
    pub seed: u64,
    pub heuristic: String,
    pub learning: String,
    pub root: Event,
}

impl SearchTrace {
    /// Recursive calls made: every event but the outermost one.
    pub fn calls(&self) -> usize {
        self.root.count() - 1
    }

    pub fn is_unsat(&self) -> bool {
        self.root.find_sat().is_none()
    }

    pub fn model(&self) -> Option<&Assignment> {
        self.root.find_sat()
    }

    /// Clauses added to the formula, in the order they were learned. May
    /// repeat a clause that was already present.
    pub fn learned(&self) -> Vec<Clause> {
        let mut out = Vec::new();
        self.root.collect_learned(&mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Sat(Assignment),
    Unsat,
}

impl Outcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, Outcome::Sat(_))
    }
}

/// Result of a search: the verdict, the formula with learned clauses, and the trace.
#[derive(Clone, Debug)]
pub struct Run {
    pub outcome: Outcome,
    pub formula: Formula,
    pub trace: SearchTrace,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("heuristic chose variable {0}, which is assigned or out of range")]
    BadBranch(Var),
    #[error("tag choice {0} is out of range")]
    BadTag(usize),
    #[error("learning strategy returned an invalid conflict graph: {0}")]
    Graph(#[from] GraphError),
    #[error("learning strategy returned an invalid decomposition: {0}")]
    Decomposition(#[from] DecompositionError),
    #[error("clause {0} is not learnable from the chosen decomposition")]
    NotLearnable(Clause),
}

/// State shared by the three procedures: the growing formula and the
/// assignment built from the caller's assignment and the decisions so far.
struct Search {
    formula: Formula,
    present: BTreeSet<Clause>,
    alpha: Assignment,
    decisions: Vec<Lit>,
}

impl Search {
    fn new(f: &Formula, a: &Assignment) -> Search {
        Search { formula: f.clone(), present: f.clauses().iter().cloned().collect(), alpha: a.clone(), decisions: Vec::new() }
    }

    fn learn(&mut self, c: &Clause) {
        if self.present.insert(c.clone()) {
            self.formula.push(c.clone());
        }
    }

    fn decide(&mut self, var: Var, value: bool) {
        self.alpha.set(var, value);
        self.decisions.push(Lit::new(var, !value));
    }

    fn undo(&mut self, var: Var) {
        self.alpha.unset(var);
        self.decisions.pop();
    }

    /// Unassigned variables of clauses not yet satisfied.
    fn open_vars(&self) -> Vec<Var> {
        let mut vars = BTreeSet::new();
        for c in self.formula.clauses() {
            if c.iter().any(|l| self.alpha.lit_value(l) == Some(true)) {
                continue;
            }
            vars.extend(c.vars().filter(|&v| !self.alpha.contains(v)));
        }
        vars.into_iter().collect()
    }

    /// Variables of the formula the assignment leaves open.
    fn unassigned_vars(&self) -> Vec<Var> {
        self.formula.vars().into_iter().filter(|&v| !self.alpha.contains(v)).collect()
    }

    /// Every variable up to the declared count is assigned.
    fn is_total(&self) -> bool {
        (1..=self.formula.num_vars()).all(|v| self.alpha.contains(Var::new(v)))
    }

    fn check_branch(&self, var: Var) -> Result<(), SolveError> {
        if var.index() == 0 || var.index() > self.formula.num_vars() || self.alpha.contains(var) {
            return Err(SolveError::BadBranch(var));
        }
        Ok(())
    }

    fn ctx<'a>(&'a self, candidates: &'a [Var], past: usize) -> Ctx<'a> {
        Ctx { formula: &self.formula, assignment: &self.alpha, decisions: &self.decisions, candidates, past_conflict: past }
    }

    fn falsified(&self) -> Vec<&Clause> {
        self.formula
            .clauses()
            .iter()
            .filter(|c| c.iter().all(|l| self.alpha.lit_value(l) == Some(false)))
            .collect()
    }
}

/// The literal a branch falsifies on its first side: the resolution pivot
/// that keeps the left child on the first side.
pub fn first_side_pivot(var: Var, first: bool) -> Lit {
    var.falsified_by(first)
}
