use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{Assignment, Clause, Formula, Lit, Var};
use crate::conflict::{
    all_learnable_decomposition, first_uip_decomposition, learnable_clauses, levels_from_trail, ConflictGraph,
    Decomposition,
};

/// What a policy sees when asked for a choice.
pub struct Ctx<'a> {
    /// The formula including clauses learned so far.
    pub formula: &'a Formula,
    pub assignment: &'a Assignment,
    /// Decision literals (made true) from the root, excluding the caller's assignment.
    pub decisions: &'a [Lit],
    /// Variables a built-in policy may branch on here.
    pub candidates: &'a [Var],
    /// Decisions made on this path since the formula first had a conflict.
    pub past_conflict: usize,
}

/// Chooses branching variables and their first value.
pub trait Heuristic {
    fn name(&self) -> String;

    /// Called with at least one candidate.
    fn branch(&mut self, ctx: &Ctx) -> (Var, bool);

    /// Whether to keep branching although the formula already has a conflict.
    /// Only consulted by non-greedy runs.
    fn branch_past_conflict(&mut self, _ctx: &Ctx) -> Option<(Var, bool)> {
        None
    }

    /// Which falsified clause to tag at a leaf of the generalized learning
    /// procedure. Defaults to the shortest, earliest one.
    fn choose_tag(&mut self, _ctx: &Ctx, falsified: &[&Clause]) -> usize {
        shortest(falsified)
    }
}

impl<H: Heuristic + ?Sized> Heuristic for Box<H> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn branch(&mut self, ctx: &Ctx) -> (Var, bool) {
        (**self).branch(ctx)
    }

    fn branch_past_conflict(&mut self, ctx: &Ctx) -> Option<(Var, bool)> {
        (**self).branch_past_conflict(ctx)
    }

    fn choose_tag(&mut self, ctx: &Ctx, falsified: &[&Clause]) -> usize {
        (**self).choose_tag(ctx, falsified)
    }
}

fn shortest(falsified: &[&Clause]) -> usize {
    (0..falsified.len()).min_by_key(|&i| (falsified[i].len(), i)).unwrap_or(0)
}

/// Smallest candidate, value 0 first.
#[derive(Clone, Debug, Default)]
pub struct Smallest;

impl Heuristic for Smallest {
    fn name(&self) -> String {
        "smallest".into()
    }

    fn branch(&mut self, ctx: &Ctx) -> (Var, bool) {
        (ctx.candidates[0], false)
    }
}

/// Makes the literal of the first unit clause true, otherwise behaves like [`Smallest`].
#[derive(Clone, Debug, Default)]
pub struct UnitFirst;

impl Heuristic for UnitFirst {
    fn name(&self) -> String {
        "unit".into()
    }

    fn branch(&mut self, ctx: &Ctx) -> (Var, bool) {
        for c in ctx.formula.clauses() {
            let mut open = c.iter().filter(|&l| ctx.assignment.lit_value(l) != Some(false));
            if let (Some(l), None) = (open.next(), open.next()) {
                if ctx.assignment.lit_value(l).is_none() && ctx.candidates.contains(&l.var()) {
                    return (l.var(), !l.is_negated());
                }
            }
        }
        Smallest.branch(ctx)
    }
}

/// Uniformly random candidate and value from a seeded generator.
#[derive(Clone, Debug)]
pub struct Seeded {
    seed: u64,
    rng: ChaCha8Rng,
}

impl Seeded {
    pub fn new(seed: u64) -> Seeded {
        Seeded { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Heuristic for Seeded {
    fn name(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn branch(&mut self, ctx: &Ctx) -> (Var, bool) {
        let i = self.rng.gen_range(0..ctx.candidates.len());
        (ctx.candidates[i], self.rng.gen())
    }
}

/// Keeps branching for up to `levels` decisions after a conflict appears.
#[derive(Clone, Debug)]
pub struct NonGreedy<H> {
    pub inner: H,
    pub levels: usize,
}

impl<H: Heuristic> Heuristic for NonGreedy<H> {
    fn name(&self) -> String {
        format!("{}+{}", self.inner.name(), self.levels)
    }

    fn branch(&mut self, ctx: &Ctx) -> (Var, bool) {
        self.inner.branch(ctx)
    }

    fn branch_past_conflict(&mut self, ctx: &Ctx) -> Option<(Var, bool)> {
        (ctx.past_conflict < self.levels && !ctx.candidates.is_empty()).then(|| self.inner.branch(ctx))
    }

    fn choose_tag(&mut self, ctx: &Ctx, falsified: &[&Clause]) -> usize {
        self.inner.choose_tag(ctx, falsified)
    }
}

/// A scripted choice at the node reached by a given decision sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Branch { var: Var, first: bool },
    Tag(Clause),
    Stop,
}

/// Replays choices keyed by the decisions leading to each node. Nodes the
/// script does not mention fall back to [`Smallest`] and greedy stopping.
#[derive(Clone, Debug, Default)]
pub struct Schedule {
    pub steps: HashMap<Vec<Lit>, Step>,
}

impl Schedule {
    pub fn get(&self, decisions: &[Lit]) -> Option<&Step> {
        self.steps.get(decisions)
    }
}

impl Heuristic for Schedule {
    fn name(&self) -> String {
        "script".into()
    }

    fn branch(&mut self, ctx: &Ctx) -> (Var, bool) {
        match self.steps.get(ctx.decisions) {
            Some(&Step::Branch { var, first }) => (var, first),
            _ => Smallest.branch(ctx),
        }
    }

    fn branch_past_conflict(&mut self, ctx: &Ctx) -> Option<(Var, bool)> {
        match self.steps.get(ctx.decisions) {
            Some(&Step::Branch { var, first }) => Some((var, first)),
            _ => None,
        }
    }

    fn choose_tag(&mut self, ctx: &Ctx, falsified: &[&Clause]) -> usize {
        match self.steps.get(ctx.decisions) {
            Some(Step::Tag(c)) => falsified.iter().position(|&d| d == c).unwrap_or_else(|| shortest(falsified)),
            _ => shortest(falsified),
        }
    }
}

/// A conflict graph, one of its decompositions, and the clauses to learn from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub graph: ConflictGraph,
    pub decomposition: Decomposition,
    pub learned: Vec<Clause>,
}

pub trait LearningStrategy {
    fn name(&self) -> String;

    /// `found` is the graph unit propagation produced for the current node.
    fn analyze(&mut self, ctx: &Ctx, found: ConflictGraph) -> Analysis;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Learning {
    /// The conflict clause of the whole graph.
    #[default]
    Trivial,
    /// The clause of the first unique implication point.
    FirstUip,
    /// The clause of the decisions responsible for the conflict.
    Decision,
    /// Every learnable clause of the decomposition along the expansion chain.
    AllLearnable,
}

impl Learning {
    pub const ALL: [Learning; 4] = [Learning::Trivial, Learning::FirstUip, Learning::Decision, Learning::AllLearnable];

    pub fn from_name(s: &str) -> Option<Learning> {
        Self::ALL.into_iter().find(|l| l.name() == s)
    }
}

impl LearningStrategy for Learning {
    fn name(&self) -> String {
        match self {
            Learning::Trivial => "trivial",
            Learning::FirstUip => "first-uip",
            Learning::Decision => "decision",
            Learning::AllLearnable => "all-learnable",
        }
        .into()
    }

    fn analyze(&mut self, ctx: &Ctx, g: ConflictGraph) -> Analysis {
        let levels = levels_from_trail(&g, ctx.decisions);
        let (decomposition, learned) = match self {
            Learning::Trivial | Learning::Decision => (Decomposition::trivial(&g), vec![g.conflict_clause()]),
            Learning::FirstUip => {
                let d = first_uip_decomposition(&g, &levels);
                let uip = d.h_ij(0, 1).conflict_clause();
                (d, vec![uip])
            }
            Learning::AllLearnable => {
                let d = all_learnable_decomposition(&g, &levels);
                let all = learnable_clauses(&g, &d).expect("expansion chains are valid decompositions").ordered_clauses();
                (d, all)
            }
        };
        Analysis { graph: g, decomposition, learned }
    }
}

/// Replays analyses keyed by decisions; other conflicts fall back to `fallback`.
#[derive(Clone, Debug, Default)]
pub struct ScheduleLearning {
    pub analyses: HashMap<Vec<Lit>, Analysis>,
    pub fallback: Learning,
}

impl LearningStrategy for ScheduleLearning {
    fn name(&self) -> String {
        "script".into()
    }

    fn analyze(&mut self, ctx: &Ctx, found: ConflictGraph) -> Analysis {
        match self.analyses.get(ctx.decisions) {
            Some(a) => a.clone(),
            None => self.fallback.analyze(ctx, found),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_parts() -> (Formula, Assignment, Vec<Var>) {
        let f = Formula::from_clauses(vec![Clause::from_dimacs(&[1, 2, 3]), Clause::from_dimacs(&[-2])]);
        (f, Assignment::new(), vec![Var::new(1), Var::new(2), Var::new(3)])
    }

    #[test]
    fn seeded_runs_repeat() {
        let (f, a, cands) = ctx_parts();
        let ctx = Ctx { formula: &f, assignment: &a, decisions: &[], candidates: &cands, past_conflict: 0 };
        let picks = |seed| {
            let mut h = Seeded::new(seed);
            (0..20).map(|_| h.branch(&ctx)).collect::<Vec<_>>()
        };
        assert_eq!(picks(5), picks(5));
        assert_eq!(Seeded::new(5).name(), "random:5");
    }

    #[test]
    fn unit_first_satisfies_unit_clause() {
        let (f, a, cands) = ctx_parts();
        let ctx = Ctx { formula: &f, assignment: &a, decisions: &[], candidates: &cands, past_conflict: 0 };
        assert_eq!(UnitFirst.branch(&ctx), (Var::new(2), false));
        assert_eq!(Smallest.branch(&ctx), (Var::new(1), false));
    }

    #[test]
    fn non_greedy_stops_after_levels() {
        let (f, a, cands) = ctx_parts();
        let mut h = NonGreedy { inner: Smallest, levels: 2 };
        for (past, want) in [(0, true), (1, true), (2, false)] {
            let ctx = Ctx { formula: &f, assignment: &a, decisions: &[], candidates: &cands, past_conflict: past };
            assert_eq!(h.branch_past_conflict(&ctx).is_some(), want);
        }
        let ctx = Ctx { formula: &f, assignment: &a, decisions: &[], candidates: &[], past_conflict: 0 };
        assert!(h.branch_past_conflict(&ctx).is_none());
    }

    #[test]
    fn schedule_tags_named_clause() {
        let (f, a, cands) = ctx_parts();
        let ctx = Ctx { formula: &f, assignment: &a, decisions: &[], candidates: &cands, past_conflict: 0 };
        let long = Clause::from_dimacs(&[1, 2, 3]);
        let short = Clause::from_dimacs(&[-2]);
        let mut s = Schedule::default();
        assert_eq!(s.choose_tag(&ctx, &[&long, &short]), 1);
        s.steps.insert(Vec::new(), Step::Tag(long.clone()));
        assert_eq!(s.choose_tag(&ctx, &[&long, &short]), 0);
    }

    #[test]
    fn learning_names_round_trip() {
        for l in Learning::ALL {
            assert_eq!(Learning::from_name(&l.name()), Some(l));
        }
        assert_eq!(Learning::from_name("none"), None);
    }
}
