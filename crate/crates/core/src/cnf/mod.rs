//! Literals, clauses, formulas, partial assignments and restriction.

mod dimacs;
mod generate;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::Not;

pub use dimacs::{parse_dimacs, serialize_dimacs, DimacsError};
pub use generate::{
    fphp_matching, generate_fphp, generate_php, generate_random_kcnf, php_var, variable_extension,
    GenerateError, VariableExtension,
};

/// A propositional variable, indexed from 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    /// Panics on index 0.
    pub fn new(index: u32) -> Var {
        assert!(index >= 1, "variables are indexed from 1");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, false)
    }

    pub fn neg(self) -> Lit {
        Lit::new(self, true)
    }

    /// The literal that is false when the variable takes `value`.
    pub fn falsified_by(self, value: bool) -> Lit {
        Lit::new(self, value)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal. Orders by variable first, positive before negative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Lit {
        Lit(var.0 << 1 | negated as u32)
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn from_dimacs(value: i64) -> Option<Lit> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 >> 1 {
            return None;
        }
        Some(Lit::new(Var(value.unsigned_abs() as u32), value < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    /// Truth value under `value` for the underlying variable.
    pub fn eval(self, value: bool) -> bool {
        value != self.is_negated()
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A set of literals kept sorted and duplicate-free. Tautologies are allowed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Clause {
        let mut v: Vec<Lit> = lits.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Clause(v)
    }

    pub fn empty() -> Clause {
        Clause(Vec::new())
    }

    pub fn from_dimacs(values: &[i64]) -> Clause {
        Clause::new(values.iter().map(|&v| Lit::from_dimacs(v).expect("nonzero literal")))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Lit> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.0.binary_search(&lit).is_ok()
    }

    pub fn contains_var(&self, var: Var) -> bool {
        self.contains(var.pos()) || self.contains(var.neg())
    }

    pub fn is_subset(&self, other: &Clause) -> bool {
        self.0.iter().all(|&l| other.contains(l))
    }

    pub fn is_tautology(&self) -> bool {
        self.0.windows(2).any(|w| w[0].var() == w[1].var())
    }

    pub fn without(&self, lit: Lit) -> Clause {
        Clause(self.0.iter().copied().filter(|&l| l != lit).collect())
    }

    pub fn union(&self, other: &Clause) -> Clause {
        Clause::new(self.iter().chain(other.iter()))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|l| l.var())
    }

    pub fn max_var(&self) -> u32 {
        self.0.last().map_or(0, |l| l.var().0)
    }

    pub fn to_dimacs(&self) -> Vec<i64> {
        self.0.iter().map(|l| l.to_dimacs()).collect()
    }
}

impl FromIterator<Lit> for Clause {
    fn from_iter<T: IntoIterator<Item = Lit>>(iter: T) -> Self {
        Clause::new(iter)
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("literal {lit} exceeds the declared {num_vars} variables")]
    VarOutOfRange { lit: i64, num_vars: u32 },
    #[error("assignment is not total: variable {0} is unassigned")]
    NotTotal(Var),
}

/// An ordered list of clauses over variables `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Formula {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Formula, FormulaError> {
        for c in &clauses {
            if c.max_var() > num_vars {
                let lit = c.lits().last().unwrap().to_dimacs();
                return Err(FormulaError::VarOutOfRange { lit, num_vars });
            }
        }
        Ok(Formula { num_vars, clauses })
    }

    /// Sizes `num_vars` to the largest variable used.
    pub fn from_clauses(clauses: Vec<Clause>) -> Formula {
        let num_vars = clauses.iter().map(Clause::max_var).max().unwrap_or(0);
        Formula { num_vars, clauses }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn push(&mut self, clause: Clause) {
        self.num_vars = self.num_vars.max(clause.max_var());
        self.clauses.push(clause);
    }

    pub fn with_num_vars(mut self, num_vars: u32) -> Formula {
        self.num_vars = self.num_vars.max(num_vars);
        self
    }

    /// Variables that occur in some clause.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.clauses.iter().flat_map(|c| c.vars()).collect()
    }

    pub fn contains_clause(&self, clause: &Clause) -> bool {
        self.clauses.iter().any(|c| c == clause)
    }

    pub fn clause_set(&self) -> HashSet<Clause> {
        self.clauses.iter().cloned().collect()
    }
}

/// A partial map from variables to truth values.
#[derive(Clone, Default)]
pub struct Assignment {
    values: Vec<Option<bool>>,
    assigned: usize,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, bool)>) -> Assignment {
        let mut a = Assignment::new();
        for (v, b) in pairs {
            a.set(v, b);
        }
        a
    }

    /// Makes every literal in `lits` true.
    pub fn from_lits(lits: impl IntoIterator<Item = Lit>) -> Assignment {
        Assignment::from_pairs(lits.into_iter().map(|l| (l.var(), !l.is_negated())))
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.values.get(var.0 as usize).copied().flatten()
    }

    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.get(lit.var()).map(|b| lit.eval(b))
    }

    pub fn set(&mut self, var: Var, value: bool) {
        let i = var.0 as usize;
        if self.values.len() <= i {
            self.values.resize(i + 1, None);
        }
        if self.values[i].is_none() {
            self.assigned += 1;
        }
        self.values[i] = Some(value);
    }

    /// Makes `lit` true.
    pub fn assign_lit(&mut self, lit: Lit) {
        self.set(lit.var(), !lit.is_negated());
    }

    pub fn unset(&mut self, var: Var) {
        let i = var.0 as usize;
        if let Some(slot) = self.values.get_mut(i) {
            if slot.take().is_some() {
                self.assigned -= 1;
            }
        }
    }

    pub fn contains(&self, var: Var) -> bool {
        self.get(var).is_some()
    }

    pub fn len(&self) -> usize {
        self.assigned
    }

    pub fn is_empty(&self) -> bool {
        self.assigned == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| (Var(i as u32), b)))
    }

    /// The literals made true.
    pub fn true_lits(&self) -> Vec<Lit> {
        self.iter().map(|(v, b)| Lit::new(v, !b)).collect()
    }

    pub fn is_total_on(&self, vars: impl IntoIterator<Item = Var>) -> bool {
        vars.into_iter().all(|v| self.contains(v))
    }

    pub fn extended(&self, var: Var, value: bool) -> Assignment {
        let mut a = self.clone();
        a.set(var, value);
        a
    }
}

impl PartialEq for Assignment {
    fn eq(&self, other: &Self) -> bool {
        self.iter().eq(other.iter())
    }
}

impl Eq for Assignment {}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter().map(|(v, b)| (v, b as u8))).finish()
    }
}

/// Result of restricting a clause or formula by an assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restricted<T> {
    Zero,
    One,
    Residual(T),
}

impl<T> Restricted<T> {
    pub fn is_zero(&self) -> bool {
        matches!(self, Restricted::Zero)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Restricted::One)
    }
}

impl Restricted<Clause> {
    /// The restricted clause as a clause, with Zero read as the empty clause.
    pub fn into_clause(self) -> Option<Clause> {
        match self {
            Restricted::Zero => Some(Clause::empty()),
            Restricted::One => None,
            Restricted::Residual(c) => Some(c),
        }
    }
}

pub fn restrict_clause(c: &Clause, a: &Assignment) -> Restricted<Clause> {
    let mut rest = Vec::new();
    for l in c.iter() {
        match a.lit_value(l) {
            Some(true) => return Restricted::One,
            Some(false) => {}
            None => rest.push(l),
        }
    }
    if rest.is_empty() {
        Restricted::Zero
    } else {
        Restricted::Residual(Clause(rest))
    }
}

/// Clause status without building the residual.
pub fn clause_status(c: &Clause, a: &Assignment) -> Restricted<()> {
    let mut open = false;
    for l in c.iter() {
        match a.lit_value(l) {
            Some(true) => return Restricted::One,
            Some(false) => {}
            None => open = true,
        }
    }
    if open {
        Restricted::Residual(())
    } else {
        Restricted::Zero
    }
}

pub fn restrict_formula(f: &Formula, a: &Assignment) -> Restricted<Formula> {
    let mut seen = HashSet::new();
    let mut rest = Vec::new();
    for c in f.clauses() {
        match restrict_clause(c, a) {
            Restricted::Zero => return Restricted::Zero,
            Restricted::One => {}
            Restricted::Residual(r) => {
                if seen.insert(r.clone()) {
                    rest.push(r);
                }
            }
        }
    }
    if rest.is_empty() {
        Restricted::One
    } else {
        Restricted::Residual(Formula { num_vars: f.num_vars, clauses: rest })
    }
}

/// Formula status without building the residual.
pub fn formula_status(f: &Formula, a: &Assignment) -> Restricted<()> {
    let mut open = false;
    for c in f.clauses() {
        match clause_status(c, a) {
            Restricted::Zero => return Restricted::Zero,
            Restricted::One => {}
            Restricted::Residual(()) => open = true,
        }
    }
    if open {
        Restricted::Residual(())
    } else {
        Restricted::One
    }
}

/// Restricts clause by clause: satisfied clauses are dropped, falsified ones
/// become the empty clause. This is the initial clause set of a restricted proof.
pub fn restrict_clauses(f: &Formula, a: &Assignment) -> Formula {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for c in f.clauses() {
        if let Some(r) = restrict_clause(c, a).into_clause() {
            if seen.insert(r.clone()) {
                out.push(r);
            }
        }
    }
    Formula { num_vars: f.num_vars, clauses: out }
}

/// Truth value of `f` under an assignment total on `var(f)`.
pub fn evaluate(f: &Formula, a: &Assignment) -> Result<bool, FormulaError> {
    for v in f.vars() {
        if !a.contains(v) {
            return Err(FormulaError::NotTotal(v));
        }
    }
    Ok(formula_status(f, a).is_one())
}
