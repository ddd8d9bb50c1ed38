use std::collections::HashSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Assignment, Clause, Formula, Var};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("pigeonhole size must be at least 1")]
    BadPigeonholeSize,
    #[error("clause width {k} exceeds the {n} available variables")]
    WidthTooLarge { k: u32, n: u32 },
    #[error("pair ({pigeon}, {hole}) is outside the pigeonhole grid or clashes with the matching")]
    BadMatching { pigeon: u32, hole: u32 },
}

/// Variable for "pigeon `i` sits in hole `j`" (both 1-based) in a size-`n` pigeonhole formula.
pub fn php_var(n: u32, i: u32, j: u32) -> Var {
    Var::new((i - 1) * n + j)
}

pub fn generate_php(n: u32) -> Result<Formula, GenerateError> {
    if n < 1 {
        return Err(GenerateError::BadPigeonholeSize);
    }
    let mut clauses = Vec::new();
    for i in 1..=n + 1 {
        clauses.push(Clause::new((1..=n).map(|j| php_var(n, i, j).pos())));
    }
    for k in 1..=n {
        for i in 1..=n + 1 {
            for j in i + 1..=n + 1 {
                clauses.push(Clause::new([php_var(n, i, k).neg(), php_var(n, j, k).neg()]));
            }
        }
    }
    Ok(Formula::new((n + 1) * n, clauses).expect("indices in range"))
}

/// The pigeonhole formula plus clauses forbidding a pigeon from two holes.
pub fn generate_fphp(n: u32) -> Result<Formula, GenerateError> {
    let mut f = generate_php(n)?;
    for i in 1..=n + 1 {
        for j in 1..=n {
            for k in j + 1..=n {
                f.push(Clause::new([php_var(n, i, j).neg(), php_var(n, i, k).neg()]));
            }
        }
    }
    Ok(f)
}

/// The restriction induced by a partial matching of pigeons to holes: a matched
/// pair is set true, and every other variable in its row or column false.
pub fn fphp_matching(n: u32, pairs: &[(u32, u32)]) -> Result<Assignment, GenerateError> {
    let mut a = Assignment::new();
    let mut pigeons = HashSet::new();
    let mut holes = HashSet::new();
    for &(p, h) in pairs {
        if p < 1 || p > n + 1 || h < 1 || h > n || !pigeons.insert(p) || !holes.insert(h) {
            return Err(GenerateError::BadMatching { pigeon: p, hole: h });
        }
        for j in 1..=n {
            a.set(php_var(n, p, j), j == h);
        }
        for i in 1..=n + 1 {
            if i != p {
                a.set(php_var(n, i, h), false);
            }
        }
    }
    Ok(a)
}

/// `m` clauses over `n` variables, each on `k` distinct variables with random signs.
pub fn generate_random_kcnf(n: u32, m: u32, k: u32, seed: u64) -> Result<Formula, GenerateError> {
    if k > n {
        return Err(GenerateError::WidthTooLarge { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let vars = sample(&mut rng, n as usize, k as usize);
        clauses.push(Clause::new(
            vars.iter().map(|v| Var::new(v as u32 + 1).falsified_by(rng.gen())),
        ));
    }
    Ok(Formula::new(n, clauses).expect("indices in range"))
}

/// The variable extension of a formula together with its fresh variables.
#[derive(Clone, Debug)]
pub struct VariableExtension {
    pub formula: Formula,
    /// `None` when the source formula has no variables.
    pub q: Option<Var>,
    pub p: Vec<Var>,
}

/// Adds `{q, ¬l}` for every literal `l` of every clause and the clause `{p_1..p_n}`,
/// where `n = |var(F)|`, `q = n+1`, `p_i = n+1+i`.
///
/// Fresh indices assume the variables of `f` are `1..=n`; if they are not,
/// `q` is placed above `num_vars` instead so it stays fresh.
pub fn variable_extension(f: &Formula) -> VariableExtension {
    let n = f.vars().len() as u32;
    if n == 0 {
        return VariableExtension { formula: f.clone(), q: None, p: Vec::new() };
    }
    let base = n.max(f.num_vars());
    let q = Var::new(base + 1);
    let p: Vec<Var> = (1..=n).map(|i| Var::new(base + 1 + i)).collect();
    let mut out = f.clone();
    let mut seen = HashSet::new();
    for c in f.clauses() {
        for l in c.iter() {
            let ext = Clause::new([q.pos(), !l]);
            if seen.insert(ext.clone()) {
                out.push(ext);
            }
        }
    }
    out.push(Clause::new(p.iter().map(|v| v.pos())));
    VariableExtension { formula: out.with_num_vars(base + 1 + n), q: Some(q), p }
}
