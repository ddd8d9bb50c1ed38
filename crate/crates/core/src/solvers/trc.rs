//! Line-oriented trace files. After the header
//! `p trace <algorithm> <vars> seed=<n> heuristic=<name> learning=<name>`,
//! events follow in preorder:
//!
//! ```text
//! b <var> <0|1> <children> [<learned clause> 0]
//! f <clause> 0
//! s <true literals> 0
//! k <conflict var> <reasons> <stamps> <levels> <learned>
//!   r <lit> <reason clause> 0      one per reason
//!   t <lit> <stamp>                one per stamp
//!   h <subgraphs>                  one per level, followed by
//!   g <internal> 0 <other nodes> 0 one per subgraph
//!   l <clause> 0                   one per learned clause
//! ```
//!
//! Lines starting with `c` are comments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::{Algorithm, Event, SearchTrace};
use crate::cnf::{Assignment, Clause, Lit, Var};
use crate::conflict::{ConflictGraph, Decomposition, SubGraph};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

fn lits(out: &mut String, ls: impl IntoIterator<Item = Lit>) {
    for l in ls {
        write!(out, " {}", l.to_dimacs()).unwrap();
    }
    out.push_str(" 0");
}

pub fn write_trace(t: &SearchTrace) -> String {
    let mut out = format!(
        "p trace {} {} seed={} heuristic={} learning={}\n",
        t.algorithm, t.num_vars, t.seed, t.heuristic, t.learning
    );
    write_event(&mut out, &t.root);
    out
}

fn write_event(out: &mut String, ev: &Event) {
    match ev {
        Event::Branch { var, first, learned, children } => {
            write!(out, "b {} {} {}", var.index(), u8::from(*first), children.len()).unwrap();
            if let Some(c) = learned {
                lits(out, c.iter());
            }
            out.push('\n');
            for c in children {
                write_event(out, c);
            }
        }
        Event::Falsified { clause } => {
            out.push('f');
            lits(out, clause.iter());
            out.push('\n');
        }
        Event::Sat { assignment } => {
            out.push('s');
            lits(out, assignment.true_lits());
            out.push('\n');
        }
        Event::Conflict { graph, decomposition, learned } => {
            writeln!(
                out,
                "k {} {} {} {} {}",
                graph.conflict_var().index(),
                graph.reasons().len(),
                graph.stamps().len(),
                decomposition.levels.len(),
                learned.len()
            )
            .unwrap();
            for (l, c) in graph.reasons() {
                write!(out, "r {}", l.to_dimacs()).unwrap();
                lits(out, c.iter());
                out.push('\n');
            }
            for (l, s) in graph.stamps() {
                writeln!(out, "t {} {}", l.to_dimacs(), s).unwrap();
            }
            for level in &decomposition.levels {
                writeln!(out, "h {}", level.len()).unwrap();
                for h in level {
                    out.push('g');
                    lits(out, h.internal().iter().copied());
                    lits(out, h.nodes().difference(h.internal()).copied());
                    out.push('\n');
                }
            }
            for c in learned {
                out.push('l');
                lits(out, c.iter());
                out.push('\n');
            }
        }
    }
}

struct Lines<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, message: impl Into<String>) -> TraceParseError {
        let line = self.lines.get(self.pos.saturating_sub(1)).map_or(0, |l| l.0);
        TraceParseError { line, message: message.into() }
    }

    fn next(&mut self, tag: &str) -> Result<Vec<&'a str>, TraceParseError> {
        let Some((_, toks)) = self.lines.get(self.pos) else {
            return Err(TraceParseError { line: 0, message: format!("expected `{tag}` line, found end of input") });
        };
        self.pos += 1;
        if tag != "*" && toks[0] != tag {
            return Err(self.err(format!("expected `{tag}` line")));
        }
        Ok(toks.clone())
    }

    fn num<T: std::str::FromStr>(&self, tok: Option<&&str>) -> Result<T, TraceParseError> {
        tok.and_then(|t| t.parse().ok()).ok_or_else(|| self.err("expected a number"))
    }

    fn lit(&self, tok: &str) -> Result<Lit, TraceParseError> {
        tok.parse::<i64>().ok().and_then(Lit::from_dimacs).ok_or_else(|| self.err(format!("bad literal `{tok}`")))
    }

    /// Reads zero-terminated literal lists from `toks`.
    fn lists(&self, toks: &[&str], count: usize) -> Result<Vec<Vec<Lit>>, TraceParseError> {
        let mut out = vec![Vec::new()];
        for &t in toks {
            if t == "0" {
                out.push(Vec::new());
            } else {
                out.last_mut().unwrap().push(self.lit(t)?);
            }
        }
        if out.pop().is_some_and(|rest| !rest.is_empty()) || out.len() != count {
            return Err(self.err("malformed literal list"));
        }
        Ok(out)
    }
}

pub fn parse_trace(text: &str) -> Result<SearchTrace, TraceParseError> {
    let lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty() && t[0] != "c")
        .collect();
    let mut ls = Lines { lines, pos: 0 };
    let head = ls.next("p")?;
    if head.get(1) != Some(&"trace") || head.len() != 7 {
        return Err(ls.err("expected `p trace <algorithm> <vars> seed=… heuristic=… learning=…`"));
    }
    let algorithm = Algorithm::from_name(head[2]).ok_or_else(|| ls.err(format!("unknown algorithm `{}`", head[2])))?;
    let num_vars = ls.num(head.get(3))?;
    let field = |i: usize, key: &str| head[i].strip_prefix(key).map(str::to_string);
    let (Some(seed), Some(heuristic), Some(learning)) =
        (field(4, "seed="), field(5, "heuristic="), field(6, "learning="))
    else {
        return Err(ls.err("malformed header fields"));
    };
    let seed = seed.parse().map_err(|_| ls.err("bad seed"))?;
    let root = parse_event(&mut ls)?;
    if ls.pos != ls.lines.len() {
        ls.pos += 1;
        return Err(ls.err("trailing lines after the root event"));
    }
    Ok(SearchTrace { algorithm, num_vars, seed, heuristic, learning, root })
}

fn parse_event(ls: &mut Lines) -> Result<Event, TraceParseError> {
    let toks = ls.next("*")?;
    match toks[0] {
        "b" => {
            let var: u32 = ls.num(toks.get(1))?;
            let first: u8 = ls.num(toks.get(2))?;
            let n: usize = ls.num(toks.get(3))?;
            if var == 0 || first > 1 || n == 0 || n > 2 {
                return Err(ls.err("malformed branch"));
            }
            let learned = if toks.len() > 4 {
                Some(Clause::new(ls.lists(&toks[4..], 1)?.remove(0)))
            } else {
                None
            };
            let children = (0..n).map(|_| parse_event(ls)).collect::<Result<_, _>>()?;
            Ok(Event::Branch { var: Var::new(var), first: first == 1, learned, children })
        }
        "f" => Ok(Event::Falsified { clause: Clause::new(ls.lists(&toks[1..], 1)?.remove(0)) }),
        "s" => Ok(Event::Sat { assignment: Assignment::from_lits(ls.lists(&toks[1..], 1)?.remove(0)) }),
        "k" => parse_conflict(ls, &toks),
        other => Err(ls.err(format!("unknown event `{other}`"))),
    }
}

fn parse_conflict(ls: &mut Lines, toks: &[&str]) -> Result<Event, TraceParseError> {
    let x: u32 = ls.num(toks.get(1))?;
    let counts: Vec<usize> = (2..6).map(|i| ls.num(toks.get(i))).collect::<Result<_, _>>()?;
    if x == 0 {
        return Err(ls.err("conflict variable must be positive"));
    }
    let mut reasons = BTreeMap::new();
    for _ in 0..counts[0] {
        let r = ls.next("r")?;
        let l = ls.lit(r.get(1).ok_or_else(|| ls.err("missing literal"))?)?;
        reasons.insert(l, Clause::new(ls.lists(&r[2..], 1)?.remove(0)));
    }
    let mut stamps = BTreeMap::new();
    for _ in 0..counts[1] {
        let t = ls.next("t")?;
        let l = ls.lit(t.get(1).ok_or_else(|| ls.err("missing literal"))?)?;
        stamps.insert(l, ls.num(t.get(2))?);
    }
    let graph = ConflictGraph::with_stamps(Var::new(x), reasons, stamps).map_err(|e| ls.err(e.to_string()))?;
    let mut levels = Vec::new();
    for _ in 0..counts[2] {
        let h = ls.next("h")?;
        let n: usize = ls.num(h.get(1))?;
        let mut level = Vec::new();
        for _ in 0..n {
            let g = ls.next("g")?;
            let mut parts = ls.lists(&g[1..], 2)?;
            let rest: BTreeSet<Lit> = parts.pop().unwrap().into_iter().collect();
            let internal: BTreeSet<Lit> = parts.pop().unwrap().into_iter().collect();
            let nodes = internal.union(&rest).copied().collect();
            level.push(SubGraph::from_parts(nodes, internal));
        }
        levels.push(level);
    }
    let mut learned = Vec::new();
    for _ in 0..counts[3] {
        let l = ls.next("l")?;
        learned.push(Clause::new(ls.lists(&l[1..], 1)?.remove(0)));
    }
    Ok(Event::Conflict { graph, decomposition: Decomposition { levels }, learned })
}
