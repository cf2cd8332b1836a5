use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{Error, Result};

/// A signed variable index; variable numbering starts at 1.
pub type Lit = i32;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub variable_count: u32,
    pub clauses: Vec<Vec<Lit>>,
    pub comment_map: BTreeMap<u32, String>,
}

impl CnfFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_var(&mut self, name: impl Into<String>) -> Lit {
        self.variable_count += 1;
        self.comment_map.insert(self.variable_count, name.into());
        self.variable_count as Lit
    }

    pub fn add_clause(&mut self, clause: Vec<Lit>) {
        assert!(!clause.is_empty(), "empty clause");
        debug_assert!(clause
            .iter()
            .all(|&l| l != 0 && l.unsigned_abs() <= self.variable_count));
        self.clauses.push(clause);
    }

    /// `model[v - 1]` is the value of variable `v`.
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| model[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    pub fn var_named(&self, name: &str) -> Option<Lit> {
        self.comment_map
            .iter()
            .find(|(_, n)| n.as_str() == name)
            .map(|(&v, _)| v as Lit)
    }
}

pub fn export_dimacs(f: &CnfFormula) -> String {
    let mut out = String::new();
    for (v, name) in &f.comment_map {
        writeln!(out, "c {v} {name}").unwrap();
    }
    writeln!(out, "p cnf {} {}", f.variable_count, f.clauses.len()).unwrap();
    for c in &f.clauses {
        for l in c {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Reads DIMACS CNF. Comment lines of the form `c <var> <name>` are
/// collected into the comment map; other comments are skipped.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let err = |line: usize, message: String| Error::Syntax {
        line: line + 1,
        column: 1,
        message,
    };
    let mut f = CnfFormula::new();
    let mut header: Option<(u32, usize)> = None;
    let mut current = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if header.is_none() {
                let mut parts = rest.trim().splitn(2, ' ');
                if let (Some(v), Some(name)) = (parts.next(), parts.next()) {
                    if let Ok(v) = v.parse::<u32>() {
                        f.comment_map.insert(v, name.trim().to_string());
                    }
                }
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            if header.is_some() {
                return Err(err(ln, "duplicate problem line".into()));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| err(ln, format!("bad problem line `{line}`")))?);
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(err(ln, "clause before problem line".into()));
        };
        for tok in line.split_whitespace() {
            let l: Lit = tok.parse().map_err(|_| err(ln, format!("bad literal `{tok}`")))?;
            if l == 0 {
                if current.is_empty() {
                    return Err(err(ln, "empty clause".into()));
                }
                f.clauses.push(std::mem::take(&mut current));
            } else if l.unsigned_abs() > vars {
                return Err(err(ln, format!("literal {l} exceeds variable count {vars}")));
            } else {
                current.push(l);
            }
        }
    }
    let Some((vars, clauses)) = header else {
        return Err(err(0, "missing problem line".into()));
    };
    if !current.is_empty() {
        return Err(err(text.lines().count().saturating_sub(1), "unterminated clause".into()));
    }
    if clauses != f.clauses.len() {
        return Err(Error::semantic(format!(
            "problem line declares {clauses} clauses, found {}",
            f.clauses.len()
        )));
    }
    f.variable_count = vars;
    f.comment_map.retain(|&v, _| v >= 1 && v <= vars);
    Ok(f)
}
