//! Brute-force oracles and random instance generators shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wrti::cnf::{Assignment, Clause, Formula, Lit, Var};
use wrti::conflict::{
    find_conflict_graph, ConflictGraph, Decomposition, Propagation, PropagationOrder, SubGraph,
};
use wrti::proof::{Proof, ProofBuilder};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn lit(v: i64) -> Lit {
    Lit::from_dimacs(v).unwrap()
}

pub fn c(v: &[i64]) -> Clause {
    Clause::from_dimacs(v)
}

pub fn formula(cs: &[&[i64]]) -> Formula {
    Formula::from_clauses(cs.iter().map(|c| Clause::from_dimacs(c)).collect())
}

fn clause_mask(c: &Clause) -> (u32, u32) {
    // (positive vars, negative vars) as bit masks over 0-based indices
    let (mut pos, mut neg) = (0u32, 0u32);
    for l in c.iter() {
        let bit = 1u32 << (l.var().index() - 1);
        if l.is_negated() {
            neg |= bit;
        } else {
            pos |= bit;
        }
    }
    (pos, neg)
}

fn satisfied(masks: &[(u32, u32)], m: u32) -> bool {
    masks.iter().all(|&(pos, neg)| pos & m != 0 || neg & !m != 0)
}

/// Satisfying total assignment over variables `1..=num_vars`, by enumeration.
pub fn brute_sat(f: &Formula) -> Option<u32> {
    let n = f.num_vars();
    assert!(n <= 24, "oracle limited to 24 variables");
    let masks: Vec<_> = f.clauses().iter().map(clause_mask).collect();
    (0..(1u32 << n)).find(|&m| satisfied(&masks, m))
}

pub fn is_sat(f: &Formula) -> bool {
    brute_sat(f).is_some()
}

/// Whether every total assignment satisfying `f` satisfies `c`.
pub fn implies(f: &Formula, c: &Clause) -> bool {
    let n = f.num_vars().max(c.max_var());
    let masks: Vec<_> = f.clauses().iter().map(clause_mask).collect();
    let target = [clause_mask(c)];
    (0..(1u32 << n)).all(|m| !satisfied(&masks, m) || satisfied(&target, m))
}

pub fn random_kcnf(r: &mut impl Rng, n: u32, m: usize, k: usize) -> Formula {
    let vars: Vec<u32> = (1..=n).collect();
    let clauses = (0..m)
        .map(|_| {
            let pick: Vec<u32> = vars.choose_multiple(r, k).copied().collect();
            Clause::new(pick.into_iter().map(|v| Lit::new(Var::new(v), r.gen())))
        })
        .collect();
    Formula::new(n, clauses).unwrap()
}

/// A conflict reached by assigning random decisions one by one, with the
/// decision trail.
pub fn random_conflict(r: &mut impl Rng) -> (Formula, Assignment, Vec<Lit>, ConflictGraph) {
    loop {
        let n = r.gen_range(4..=12);
        let m = r.gen_range(n as usize..=4 * n as usize);
        let f = random_kcnf(r, n, m, 3.min(n as usize));
        let mut order: Vec<u32> = (1..=n).collect();
        order.shuffle(r);
        let mut a = Assignment::new();
        let mut trail = Vec::new();
        for v in order {
            if a.contains(Var::new(v)) {
                continue;
            }
            match find_conflict_graph(&f, &a, PropagationOrder::Fifo) {
                Propagation::Conflict(g) => return (f, a, trail, g),
                Propagation::EmptyClause => break,
                Propagation::Quiescent(implied) => {
                    if implied.contains(Var::new(v)) {
                        continue;
                    }
                }
            }
            let l = Lit::new(Var::new(v), r.gen());
            a.assign_lit(l);
            trail.push(l);
        }
        if let Propagation::Conflict(g) = find_conflict_graph(&f, &a, PropagationOrder::Fifo) {
            return (f, a, trail, g);
        }
    }
}

/// A random expansion chain followed by random series and parallel cuts.
pub fn random_decomposition(r: &mut impl Rng, g: &ConflictGraph) -> Decomposition {
    let mut h = SubGraph::base(g);
    let mut chain = vec![h.clone()];
    loop {
        let leaves: BTreeSet<Lit> = h.leaves().collect();
        let options: Vec<Lit> = leaves
            .iter()
            .copied()
            .filter(|&l| !g.is_leaf(l))
            .filter(|&l| leaves.iter().all(|&w| w == l || !g.ancestors_of(&[w]).contains(&l)))
            .collect();
        let Some(&l) = options.choose(r) else { break };
        h = SubGraph::from_internal(g, h.internal().iter().copied().chain([l]));
        chain.push(h);
        h = chain.last().unwrap().clone();
    }
    let last = chain.len() - 1;
    let mut keep: Vec<usize> = (1..last).filter(|_| r.gen_bool(0.6)).collect();
    keep.insert(0, 0);
    keep.push(last);
    let picked: Vec<SubGraph> = keep.iter().map(|&i| chain[i].clone()).collect();
    let mut cuts = vec![0];
    cuts.extend((1..picked.len() - 1).filter(|_| r.gen_bool(0.4)));
    cuts.push(picked.len() - 1);
    Decomposition { levels: cuts.windows(2).map(|w| picked[w[0]..=w[1]].to_vec()).collect() }
}

/// A regular input proof with `steps` resolutions together with an assignment
/// falsifying its final clause. Pivot variables come first, side variables after.
pub fn random_input_proof(r: &mut impl Rng, steps: usize, sides: u32) -> (Proof, Assignment) {
    let pivots: Vec<Lit> = (1..=steps as u32).map(|v| Lit::new(Var::new(v), r.gen())).collect();
    let side: Vec<Lit> = (0..sides).map(|i| Lit::new(Var::new(steps as u32 + 1 + i), r.gen())).collect();
    // clauses[0] = C_1, clauses[i] = D_i; l_i ∈ D_i, ¬l_i in an earlier clause
    let mut clauses: Vec<Vec<Lit>> = vec![vec![!pivots[0]]];
    for i in 0..steps {
        clauses.push(vec![pivots[i]]);
        if i + 1 < steps {
            let host = r.gen_range(0..clauses.len());
            clauses[host].push(!pivots[i + 1]);
        }
    }
    for cl in clauses.iter_mut() {
        for &s in &side {
            if r.gen_bool(0.3) {
                cl.push(s);
            }
        }
    }
    let num_vars = steps as u32 + sides;
    let clauses: Vec<Clause> = clauses.into_iter().map(Clause::new).collect();
    let orient: Vec<bool> = (0..steps).map(|_| r.gen_bool(0.5)).collect();
    let mut b = ProofBuilder::new(num_vars);
    emit_input(&mut b, &clauses, &pivots, &orient, steps);
    let p = b.finish().unwrap();
    let a = Assignment::from_lits(p.root_clause().iter().map(|l| !l));
    (p, a)
}

/// Derives `C_{i+1}`; the spine is the left child where `orient` says so.
fn emit_input(b: &mut ProofBuilder, clauses: &[Clause], pivots: &[Lit], orient: &[bool], i: usize) -> usize {
    if i == 0 {
        return b.axiom(clauses[0].clone());
    }
    let l = pivots[i - 1];
    if orient[i - 1] {
        let s = emit_input(b, clauses, pivots, orient, i - 1);
        let d = b.axiom(clauses[i].clone());
        b.res(!l, s, d).unwrap()
    } else {
        let d = b.axiom(clauses[i].clone());
        let s = emit_input(b, clauses, pivots, orient, i - 1);
        b.res(l, d, s).unwrap()
    }
}

pub fn random_clause(r: &mut impl Rng, n: u32, max_width: usize) -> Clause {
    let vars: Vec<u32> = (1..=n).collect();
    let k = r.gen_range(1..=max_width.min(n as usize));
    Clause::new(vars.choose_multiple(r, k).map(|&v| Lit::new(Var::new(v), r.gen())))
}

/// A random resolution dag (lemma-encoded) over a random formula, deriving
/// `steps` distinct non-tautological clauses; the root is the last one.
pub fn random_rd(r: &mut impl Rng, n: u32, steps: usize) -> (Proof, Formula) {
    use wrti::proof::resolve;
    loop {
        let m = r.gen_range(n as usize..=3 * n as usize);
        let f = Formula::new(n, (0..m).map(|_| random_clause(r, n, 3)).collect()).unwrap();
        let mut pool: Vec<(Clause, Option<(Lit, usize, usize)>)> = Vec::new();
        for c in f.clauses() {
            if !pool.iter().any(|(d, _)| d == c) {
                pool.push((c.clone(), None));
            }
        }
        let mut derived = 0;
        for _ in 0..steps * 40 {
            if derived == steps {
                break;
            }
            let i = r.gen_range(0..pool.len());
            let j = r.gen_range(0..pool.len());
            let clashes: Vec<Lit> = pool[i].0.iter().filter(|&l| pool[j].0.contains(!l)).collect();
            if clashes.len() != 1 {
                continue;
            }
            let c = resolve(&pool[i].0, &pool[j].0, clashes[0]).unwrap();
            if c.is_tautology() || pool.iter().any(|(d, _)| d == &c) {
                continue;
            }
            pool.push((c, Some((clashes[0], i, j))));
            derived += 1;
        }
        if derived == 0 {
            continue;
        }
        let mut b = ProofBuilder::new(n);
        let mut done = vec![None; pool.len()];
        fn emit(b: &mut ProofBuilder, pool: &[(Clause, Option<(Lit, usize, usize)>)], done: &mut [Option<usize>], k: usize) -> usize {
            match (&pool[k].1, done[k]) {
                (None, _) => b.axiom(pool[k].0.clone()),
                (Some(_), Some(o)) => b.lemma(o),
                (Some((p, i, j)), None) => {
                    let l = emit(b, pool, done, *i);
                    let rr = emit(b, pool, done, *j);
                    let o = b.res(*p, l, rr).unwrap();
                    done[k] = Some(o);
                    o
                }
            }
        }
        emit(&mut b, &pool, &mut done, pool.len() - 1);
        return (b.finish().unwrap(), f);
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TreeShape {
    pub wres: bool,
    pub weaken: bool,
    pub lemma_prob: f64,
}

/// A random regular tree over `n` variables using w-resolution and/or
/// weakening, with lemma leaves pointing at earlier nodes. The formula is the
/// set of its axioms.
pub fn random_w_tree(r: &mut impl Rng, n: u32, depth: usize, shape: TreeShape) -> (Proof, Formula) {
    let mut b = ProofBuilder::new(n);
    let mut used = Vec::new();
    let mut axioms = Vec::new();
    grow(r, &mut b, n, depth, shape, &mut used, &mut axioms);
    (b.finish().unwrap(), Formula::new(n, axioms).unwrap())
}

fn grow(
    r: &mut impl Rng,
    b: &mut ProofBuilder,
    n: u32,
    depth: usize,
    shape: TreeShape,
    used: &mut Vec<u32>,
    axioms: &mut Vec<Clause>,
) -> usize {
    let free: Vec<u32> = (1..=n).filter(|v| !used.contains(v)).collect();
    let node = if depth == 0 || free.is_empty() || r.gen_bool(0.2) {
        if !b.is_empty() && r.gen_bool(shape.lemma_prob) {
            let src = r.gen_range(0..b.len());
            b.lemma(src)
        } else {
            let c = random_clause(r, n, 3);
            axioms.push(c.clone());
            b.axiom(c)
        }
    } else {
        let x = *free.choose(r).unwrap();
        let pivot = Lit::new(Var::new(x), r.gen());
        used.push(x);
        let use_wres = shape.wres && (!shape.weaken || r.gen_bool(0.5));
        let mut l = grow(r, b, n, depth - 1, shape, used, axioms);
        if !use_wres && !b.clause(l).contains(pivot) {
            let c = Clause::new(b.clause(l).iter().chain([pivot]));
            l = b.weaken(l, c);
        }
        let mut rr = grow(r, b, n, depth - 1, shape, used, axioms);
        if !use_wres && !b.clause(rr).contains(!pivot) {
            let c = Clause::new(b.clause(rr).iter().chain([!pivot]));
            rr = b.weaken(rr, c);
        }
        used.pop();
        if use_wres {
            b.wres(pivot, l, rr)
        } else {
            b.res(pivot, l, rr).unwrap()
        }
    };
    if shape.weaken && r.gen_bool(0.15) {
        let extra = Lit::new(Var::new(r.gen_range(1..=n)), r.gen());
        let c = Clause::new(b.clause(node).iter().chain([extra]));
        b.weaken(node, c)
    } else {
        node
    }
}

/// Renames the restriction of FPHP_n by a partial matching onto the
/// unmatched pigeons and holes, and compares it with FPHP_{n-r} as clause sets.
pub fn matching_restriction_is_smaller_fphp(n: u32, pairs: &[(u32, u32)]) -> bool {
    use wrti::cnf::{fphp_matching, generate_fphp, php_var, restrict_clauses};
    let r = pairs.len() as u32;
    let f = generate_fphp(n).unwrap();
    let rho = fphp_matching(n, pairs).unwrap();
    let restricted = restrict_clauses(&f, &rho);
    if r >= n {
        // the leftover pigeons have no holes at all
        return restricted.clauses().iter().any(Clause::is_empty);
    }
    let pigeons: Vec<u32> = (1..=n + 1).filter(|i| pairs.iter().all(|p| p.0 != *i)).collect();
    let holes: Vec<u32> = (1..=n).filter(|j| pairs.iter().all(|p| p.1 != *j)).collect();
    let m = n - r;
    let mut rename = std::collections::HashMap::new();
    for (a, &i) in pigeons.iter().enumerate() {
        for (b, &j) in holes.iter().enumerate() {
            rename.insert(php_var(n, i, j), php_var(m, a as u32 + 1, b as u32 + 1));
        }
    }
    let mut renamed = BTreeSet::new();
    for c in restricted.clauses() {
        let mut lits = Vec::new();
        for l in c.iter() {
            match rename.get(&l.var()) {
                Some(&v) => lits.push(Lit::new(v, l.is_negated())),
                None => return false,
            }
        }
        renamed.insert(Clause::new(lits));
    }
    let target: BTreeSet<Clause> = generate_fphp(m).unwrap().clauses().iter().cloned().collect();
    renamed == target
}

/// Every partial matching of at most `max` pairs in the size-`n` grid.
pub fn partial_matchings(n: u32, max: usize) -> Vec<Vec<(u32, u32)>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for m in &frontier {
            let last = m.last().map_or(0, |&(p, _): &(u32, u32)| p);
            for p in last + 1..=n + 1 {
                for h in 1..=n {
                    if m.iter().all(|&(_, mh)| mh != h) {
                        let mut e: Vec<(u32, u32)> = m.clone();
                        e.push((p, h));
                        next.push(e);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Layered example: a..m are variables 1..13, conflict on a, leaves l and m.
pub fn layered_graph() -> ConflictGraph {
    let reasons: &[(i64, &[i64])] = &[
        (1, &[1, -2]),
        (-1, &[-1, -2, -3]),
        (3, &[3, -4]),
        (2, &[2, -5]),
        (4, &[4, -5]),
        (5, &[5, -6, -7]),
        (6, &[6, -8, -9]),
        (7, &[7, -9]),
        (8, &[8, -10]),
        (9, &[9, -10, -11]),
        (10, &[10, -12]),
        (11, &[11, -12, -13]),
    ];
    let map = reasons.iter().map(|&(l, r)| (lit(l), c(r))).collect();
    ConflictGraph::from_reasons(Var::new(1), map).unwrap()
}

pub fn layered_decomposition(g: &ConflictGraph) -> Decomposition {
    let h = |lits: &[i64]| SubGraph::from_internal(g, lits.iter().map(|&v| lit(v)));
    let h1 = h(&[1, -1, 3, 2, 4]);
    let h2 = h(&[1, -1, 3, 2, 4, 5, 7, 6]);
    Decomposition {
        levels: vec![
            vec![SubGraph::base(g), h(&[1, -1]), h(&[1, -1, 3]), h1.clone()],
            vec![h1, h(&[1, -1, 3, 2, 4, 5]), h(&[1, -1, 3, 2, 4, 5, 7]), h2.clone()],
            vec![h2, SubGraph::whole(g)],
        ],
    }
}

/// Derives {1,2,3} once and reuses it as a lemma after weakening both copies.
pub fn wide_lemma_witness() -> (Proof, Formula) {
    let f = formula(&[&[1, 2, 3, 4], &[1, 2, 3, -4]]);
    let mut b = ProofBuilder::new(5);
    let x = b.axiom(c(&[1, 2, 3, 4]));
    let y = b.axiom(c(&[1, 2, 3, -4]));
    let d = b.res(lit(4), x, y).unwrap();
    let left = b.weaken(d, c(&[1, 2, 3, 5]));
    let again = b.lemma(d);
    let right = b.weaken(again, c(&[1, 2, 3, -5]));
    b.res(lit(5), left, right).unwrap();
    (b.finish().unwrap(), f)
}
