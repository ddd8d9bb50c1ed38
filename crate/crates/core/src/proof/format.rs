//! Text format: `p proof <nvars>` then one node per line in id order.
//!
//! ```text
//! a <lits> 0                        axiom
//! l <source> <lits> 0               lemma
//! r <pivot> <left> <right> <lits> 0 resolution
//! w <pivot> <left> <right> <lits> 0 w-resolution
//! k <child> <lits> 0                weakening
//! ```
//!
//! Lines starting with `c` are comments; `c system <name>` records the proof system.

use super::{Proof, ProofError, ProofNode, Rule};
use crate::cnf::{Clause, Lit};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ProofParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ProofParseError {
    ProofParseError { line, message: message.into() }
}

pub fn serialize_proof(p: &Proof) -> String {
    render(p, None)
}

/// Like [`serialize_proof`] with a `c system <name>` line after the header.
pub fn serialize_proof_tagged(p: &Proof, system: &str) -> String {
    render(p, Some(system))
}

fn render(p: &Proof, system: Option<&str>) -> String {
    let mut out = format!("p proof {}\n", p.num_vars());
    if let Some(s) = system {
        out.push_str(&format!("c system {s}\n"));
    }
    for n in p.nodes() {
        let head = match n.rule {
            Rule::Axiom => "a".to_string(),
            Rule::Lemma { source } => format!("l {source}"),
            Rule::Res { pivot, left, right } => format!("r {pivot} {left} {right}"),
            Rule::WRes { pivot, left, right } => format!("w {pivot} {left} {right}"),
            Rule::Weaken { child } => format!("k {child}"),
        };
        out.push_str(&head);
        for l in n.clause.iter() {
            out.push(' ');
            out.push_str(&l.to_string());
        }
        out.push_str(" 0\n");
    }
    out
}

/// The name given by a `c system <name>` comment, if any.
pub fn proof_system_tag(text: &str) -> Option<String> {
    text.lines().find_map(|l| {
        let mut it = l.split_whitespace();
        (it.next() == Some("c") && it.next() == Some("system")).then(|| it.next().map(str::to_string)).flatten()
    })
}

pub fn parse_proof(text: &str) -> Result<Proof, ProofParseError> {
    let mut num_vars = None;
    let mut nodes = Vec::new();
    let mut lines_of = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let tokens: Vec<&str> = t.split_whitespace().collect();
        if tokens[0] == "p" {
            if num_vars.is_some() || tokens.len() != 3 || tokens[1] != "proof" {
                return Err(err(line, "malformed header, expected `p proof <nvars>`"));
            }
            num_vars = Some(tokens[2].parse::<u32>().map_err(|_| err(line, "bad variable count"))?);
            continue;
        }
        let nv = num_vars.ok_or_else(|| err(line, "node before `p proof` header"))?;
        let id = nodes.len();
        let ints = tokens[1..]
            .iter()
            .map(|s| s.parse::<i64>().map_err(|_| err(line, format!("bad integer `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let arity = match tokens[0] {
            "a" => 0,
            "l" | "k" => 1,
            "r" | "w" => 3,
            other => return Err(err(line, format!("unknown rule `{other}`"))),
        };
        if ints.len() < arity + 1 || *ints.last().unwrap() != 0 {
            return Err(err(line, "node line must end with 0"));
        }
        let lits = &ints[arity..ints.len() - 1];
        if lits.contains(&0) {
            return Err(err(line, "0 inside literal list"));
        }
        if let Some(l) = lits.iter().find(|l| l.unsigned_abs() > nv as u64) {
            return Err(err(line, format!("literal {l} exceeds {nv} variables")));
        }
        let clause = Clause::new(lits.iter().map(|&v| Lit::from_dimacs(v).unwrap()));
        let node_ref = |v: i64| -> Result<usize, ProofParseError> {
            if v < 0 || v as usize >= id {
                Err(err(line, format!("reference {v} does not point to an earlier node")))
            } else {
                Ok(v as usize)
            }
        };
        let rule = match tokens[0] {
            "a" => Rule::Axiom,
            "l" => Rule::Lemma { source: node_ref(ints[0])? },
            "k" => Rule::Weaken { child: node_ref(ints[0])? },
            kind => {
                let pivot = Lit::from_dimacs(ints[0]).ok_or_else(|| err(line, "pivot must be nonzero"))?;
                if pivot.var().index() > nv {
                    return Err(err(line, "pivot exceeds variable count"));
                }
                let (left, right) = (node_ref(ints[1])?, node_ref(ints[2])?);
                if kind == "r" {
                    Rule::Res { pivot, left, right }
                } else {
                    Rule::WRes { pivot, left, right }
                }
            }
        };
        nodes.push(ProofNode { rule, clause });
        lines_of.push(line);
    }
    let nv = num_vars.ok_or_else(|| err(0, "missing `p proof` header"))?;
    Proof::new(nv, nodes).map_err(|e| {
        let line = match e {
            ProofError::Empty => 0,
            ProofError::ChildOrder { node, .. }
            | ProofError::LemmaOrder { node, .. }
            | ProofError::NotPostOrder { node } => lines_of[node],
            ProofError::Detached { .. } => lines_of[0],
        };
        err(line, e.to_string())
    })
}
