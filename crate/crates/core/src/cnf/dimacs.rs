use super::{Clause, Formula, Lit};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed header, expected `p cnf <vars> <clauses>`")]
    BadHeader { line: usize },
    #[error("line {line}: missing `p cnf` header before clauses")]
    MissingHeader { line: usize },
    #[error("line {line}: invalid literal `{token}`")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: literal {lit} exceeds the declared {num_vars} variables")]
    VarOutOfRange { line: usize, lit: i64, num_vars: u32 },
    #[error("last clause is not terminated by 0")]
    Unterminated,
}

pub fn parse_dimacs(text: &str) -> Result<Formula, DimacsError> {
    let mut num_vars: Option<u32> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut open = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if num_vars.is_some() || parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(DimacsError::BadHeader { line: line_no });
            }
            let v = parts[2].parse::<u32>().map_err(|_| DimacsError::BadHeader { line: line_no })?;
            parts[3].parse::<u64>().map_err(|_| DimacsError::BadHeader { line: line_no })?;
            num_vars = Some(v);
            continue;
        }
        let nv = num_vars.ok_or(DimacsError::MissingHeader { line: line_no })?;
        for token in trimmed.split_whitespace() {
            let value: i64 = token
                .parse()
                .map_err(|_| DimacsError::BadLiteral { line: line_no, token: token.to_string() })?;
            if value == 0 {
                clauses.push(Clause::new(current.drain(..)));
                open = false;
                continue;
            }
            if value.unsigned_abs() > nv as u64 {
                return Err(DimacsError::VarOutOfRange { line: line_no, lit: value, num_vars: nv });
            }
            current.push(Lit::from_dimacs(value).expect("nonzero"));
            open = true;
        }
    }
    if open {
        return Err(DimacsError::Unterminated);
    }
    let nv = num_vars.ok_or(DimacsError::MissingHeader { line: 0 })?;
    Ok(Formula::new(nv, clauses).expect("ranges checked while parsing"))
}

pub fn serialize_dimacs(f: &Formula) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars(), f.len());
    for c in f.clauses() {
        for l in c.iter() {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}
