use std::collections::{BTreeMap, VecDeque};

use super::ConflictGraph;
use crate::cnf::{Assignment, Formula, Lit};

/// Order in which implied literals are processed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PropagationOrder {
    #[default]
    Fifo,
    Lifo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Conflict(ConflictGraph),
    /// Propagation reached a fixpoint; the assignment includes the implied literals.
    Quiescent(Assignment),
    /// The formula contains the empty clause, which has no conflict graph.
    EmptyClause,
}

impl Propagation {
    pub fn graph(&self) -> Option<&ConflictGraph> {
        match self {
            Propagation::Conflict(g) => Some(g),
            _ => None,
        }
    }
}

struct State<'a> {
    f: &'a Formula,
    cur: Assignment,
    reason: BTreeMap<Lit, usize>,
    stamp: BTreeMap<Lit, usize>,
    next_stamp: usize,
}

enum Scan {
    Falsified,
    Unit(Lit),
    Other,
}

impl State<'_> {
    fn scan(&self, ci: usize) -> Scan {
        let mut open = None;
        let mut count = 0;
        for l in self.f.clauses()[ci].iter() {
            match self.cur.lit_value(l) {
                Some(true) => return Scan::Other,
                Some(false) => {}
                None => {
                    count += 1;
                    open = Some(l);
                }
            }
        }
        match count {
            0 => Scan::Falsified,
            1 => Scan::Unit(open.unwrap()),
            _ => Scan::Other,
        }
    }

    fn imply(&mut self, l: Lit, ci: usize) {
        self.cur.assign_lit(l);
        self.reason.insert(l, ci);
        self.next_stamp += 1;
        self.stamp.insert(l, self.next_stamp);
    }

    /// Graph for a clause all of whose literals are false.
    fn graph(&self, ci: usize) -> ConflictGraph {
        let clause = &self.f.clauses()[ci];
        let stamp_of = |l: Lit| self.stamp.get(&!l).copied().unwrap_or(0);
        let conflict = clause.iter().max_by_key(|&l| (stamp_of(l), std::cmp::Reverse(l))).unwrap();
        let mut reasons = BTreeMap::new();
        let mut stamps = BTreeMap::new();
        reasons.insert(conflict, clause.clone());
        stamps.insert(conflict, self.next_stamp + 1);
        let mut stack: Vec<Lit> = clause.iter().map(|l| !l).collect();
        while let Some(l) = stack.pop() {
            if reasons.contains_key(&l) || stamps.contains_key(&l) {
                continue;
            }
            stamps.insert(l, self.stamp.get(&l).copied().unwrap_or(0));
            if let Some(&r) = self.reason.get(&l) {
                let c = &self.f.clauses()[r];
                reasons.insert(l, c.clone());
                stack.extend(c.iter().filter(|&m| m != l).map(|m| !m));
            }
        }
        ConflictGraph::with_stamps(conflict.var(), reasons, stamps)
            .expect("propagation always yields a well-formed graph")
    }
}

/// Runs unit propagation from `a`. Clauses are first scanned in index order;
/// implied literals are then processed in `order`, visiting the clauses that
/// contain their negation in index order. The first falsified clause found
/// yields the conflict; its literal assigned last becomes the conflict variable.
pub fn find_conflict_graph(f: &Formula, a: &Assignment, order: PropagationOrder) -> Propagation {
    if f.clauses().iter().any(|c| c.is_empty()) {
        return Propagation::EmptyClause;
    }
    let mut occurs: BTreeMap<Lit, Vec<usize>> = BTreeMap::new();
    for (i, c) in f.clauses().iter().enumerate() {
        for l in c.iter() {
            occurs.entry(l).or_default().push(i);
        }
    }
    let mut st = State { f, cur: a.clone(), reason: BTreeMap::new(), stamp: BTreeMap::new(), next_stamp: 0 };
    let mut queue = VecDeque::new();
    for ci in 0..f.len() {
        match st.scan(ci) {
            Scan::Falsified => return Propagation::Conflict(st.graph(ci)),
            Scan::Unit(l) => {
                st.imply(l, ci);
                queue.push_back(l);
            }
            Scan::Other => {}
        }
    }
    loop {
        let next = match order {
            PropagationOrder::Fifo => queue.pop_front(),
            PropagationOrder::Lifo => queue.pop_back(),
        };
        let Some(l) = next else { break };
        for &ci in occurs.get(&!l).map(Vec::as_slice).unwrap_or(&[]) {
            match st.scan(ci) {
                Scan::Falsified => return Propagation::Conflict(st.graph(ci)),
                Scan::Unit(u) => {
                    st.imply(u, ci);
                    queue.push_back(u);
                }
                Scan::Other => {}
            }
        }
    }
    Propagation::Quiescent(st.cur)
}
