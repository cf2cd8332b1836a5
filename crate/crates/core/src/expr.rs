//! Boolean expressions over features.
//!
//! The concrete syntax is a small S-expression language:
//!
//! ```text
//! E := true | false | <feature> | (not E) | (and E E+) | (or E E+)
//!    | (implies E E) | (iff E E) | (= <feature> <const>)
//!    | (le <feature> <int>) | (lt <feature> <int>)
//! ```
//!
//! A bare feature name is only valid for boolean features and means
//! "feature = true". Expressions are resolved against a [`FeatureSpace`]
//! at parse time, so a parsed [`BoolExpr`] refers to features by index and
//! to `=` constants by domain index.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{FeatureSet, FeatureSpace, Value};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Const(bool),
    /// Boolean feature is `true`.
    Var(usize),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Implies(Box<BoolExpr>, Box<BoolExpr>),
    Iff(Box<BoolExpr>, Box<BoolExpr>),
    /// Feature takes the value at the given domain index.
    Eq(usize, u8),
    Le(usize, i64),
    Lt(usize, i64),
}

impl BoolExpr {
    pub fn not(e: BoolExpr) -> BoolExpr {
        BoolExpr::Not(Box::new(e))
    }

    pub fn implies(a: BoolExpr, b: BoolExpr) -> BoolExpr {
        BoolExpr::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: BoolExpr, b: BoolExpr) -> BoolExpr {
        BoolExpr::Iff(Box::new(a), Box::new(b))
    }

    /// Evaluates on an instance given as domain indices.
    pub fn eval(&self, space: &FeatureSpace, x: &[u8]) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Var(f) => space.feature(*f).domain[x[*f] as usize] == Value::Bool(true),
            BoolExpr::Not(e) => !e.eval(space, x),
            BoolExpr::And(es) => es.iter().all(|e| e.eval(space, x)),
            BoolExpr::Or(es) => es.iter().any(|e| e.eval(space, x)),
            BoolExpr::Implies(a, b) => !a.eval(space, x) || b.eval(space, x),
            BoolExpr::Iff(a, b) => a.eval(space, x) == b.eval(space, x),
            BoolExpr::Eq(f, v) => x[*f] == *v,
            BoolExpr::Le(f, c) => int_value(space, *f, x[*f]) <= *c,
            BoolExpr::Lt(f, c) => int_value(space, *f, x[*f]) < *c,
        }
    }

    /// Features that occur syntactically.
    pub fn scope(&self) -> FeatureSet {
        let mut set = FeatureSet::empty();
        self.collect_scope(&mut set);
        set
    }

    fn collect_scope(&self, set: &mut FeatureSet) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Var(f) | BoolExpr::Eq(f, _) | BoolExpr::Le(f, _) | BoolExpr::Lt(f, _) => {
                set.insert(*f)
            }
            BoolExpr::Not(e) => e.collect_scope(set),
            BoolExpr::And(es) | BoolExpr::Or(es) => es.iter().for_each(|e| e.collect_scope(set)),
            BoolExpr::Implies(a, b) | BoolExpr::Iff(a, b) => {
                a.collect_scope(set);
                b.collect_scope(set);
            }
        }
    }

    /// The set of domain indices of feature `f` for which an atom holds.
    /// Used by encoders that work per value rather than per integer.
    pub fn atom_values(&self, space: &FeatureSpace) -> Option<(usize, Vec<u8>)> {
        let feature = |f: usize| space.feature(f);
        let pick = |f: usize, pred: &dyn Fn(&Value) -> bool| {
            let vals = feature(f)
                .domain
                .iter()
                .enumerate()
                .filter(|(_, v)| pred(v))
                .map(|(i, _)| i as u8)
                .collect();
            (f, vals)
        };
        match self {
            BoolExpr::Var(f) => Some(pick(*f, &|v| *v == Value::Bool(true))),
            BoolExpr::Eq(f, v) => Some((*f, vec![*v])),
            BoolExpr::Le(f, c) => Some(pick(*f, &|v| v.as_int().is_some_and(|i| i <= *c))),
            BoolExpr::Lt(f, c) => Some(pick(*f, &|v| v.as_int().is_some_and(|i| i < *c))),
            _ => None,
        }
    }

    /// Renders in the concrete syntax using the space's feature names.
    pub fn display<'a>(&'a self, space: &'a FeatureSpace) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, space }
    }
}

fn int_value(space: &FeatureSpace, f: usize, idx: u8) -> i64 {
    // le/lt are only resolved against integer features
    space.feature(f).domain[idx as usize]
        .as_int()
        .expect("ordering comparison on a non-integer feature")
}

pub struct ExprDisplay<'a> {
    expr: &'a BoolExpr,
    space: &'a FeatureSpace,
}

impl<'a> fmt::Display for ExprDisplay<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |i: usize| self.space.feature(i).name.as_str();
        let sub = |e: &'a BoolExpr| ExprDisplay {
            expr: e,
            space: self.space,
        };
        match self.expr {
            BoolExpr::Const(b) => write!(f, "{b}"),
            BoolExpr::Var(i) => f.write_str(name(*i)),
            BoolExpr::Not(e) => write!(f, "(not {})", sub(e)),
            BoolExpr::And(es) | BoolExpr::Or(es) => {
                let op = if matches!(self.expr, BoolExpr::And(_)) { "and" } else { "or" };
                write!(f, "({op}")?;
                for e in es {
                    write!(f, " {}", sub(e))?;
                }
                f.write_str(")")
            }
            BoolExpr::Implies(a, b) => write!(f, "(implies {} {})", sub(a), sub(b)),
            BoolExpr::Iff(a, b) => write!(f, "(iff {} {})", sub(a), sub(b)),
            BoolExpr::Eq(i, v) => {
                write!(f, "(= {} {})", name(*i), self.space.feature(*i).domain[*v as usize])
            }
            BoolExpr::Le(i, c) => write!(f, "(le {} {c})", name(*i)),
            BoolExpr::Lt(i, c) => write!(f, "(lt {} {c})", name(*i)),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '(' | ')' => {
                chars.next();
                column += 1;
                let tok = if c == '(' { Tok::Open } else { Tok::Close };
                out.push(Token { tok, line: l, column: col });
            }
            c if c.is_alphanumeric() || matches!(c, '_' | '-' | '=') => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || matches!(c, '_' | '-' | '=') {
                        atom.push(c);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                out.push(Token {
                    tok: Tok::Atom(atom),
                    line: l,
                    column: col,
                });
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    column,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    space: &'a FeatureSpace,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn syntax<T>(&self, at: Option<&Token>, message: impl Into<String>) -> Result<T> {
        let (line, column) = at.map(|t| (t.line, t.column)).unwrap_or(self.end);
        Err(Error::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn feature(&self, tok: &Token) -> Result<usize> {
        match &tok.tok {
            Tok::Atom(name) => self
                .space
                .index_of(name)
                .ok_or_else(|| Error::semantic(format!("unknown feature `{name}` at {}:{}", tok.line, tok.column))),
            _ => self.syntax(Some(tok), "expected a feature name"),
        }
    }

    fn expr(&mut self) -> Result<BoolExpr> {
        let Some(tok) = self.next() else {
            return self.syntax(None, "unexpected end of expression");
        };
        match &tok.tok {
            Tok::Close => self.syntax(Some(&tok), "unexpected `)`"),
            Tok::Atom(a) if a == "true" => Ok(BoolExpr::Const(true)),
            Tok::Atom(a) if a == "false" => Ok(BoolExpr::Const(false)),
            Tok::Atom(_) => {
                let f = self.feature(&tok)?;
                if !self.space.feature(f).is_boolean() {
                    return Err(Error::semantic(format!(
                        "feature `{}` is not boolean and cannot be used as a bare condition",
                        self.space.feature(f).name
                    )));
                }
                Ok(BoolExpr::Var(f))
            }
            Tok::Open => {
                let Some(head) = self.next() else {
                    return self.syntax(None, "expected an operator");
                };
                let op = match &head.tok {
                    Tok::Atom(op) => op.clone(),
                    _ => return self.syntax(Some(&head), "expected an operator"),
                };
                let e = match op.as_str() {
                    "not" => BoolExpr::not(self.expr()?),
                    "and" | "or" => {
                        let mut args = vec![self.expr()?];
                        while !matches!(self.peek().map(|t| &t.tok), Some(Tok::Close) | None) {
                            args.push(self.expr()?);
                        }
                        if args.len() < 2 {
                            return self.syntax(Some(&head), format!("`{op}` needs at least two operands"));
                        }
                        if op == "and" {
                            BoolExpr::And(args)
                        } else {
                            BoolExpr::Or(args)
                        }
                    }
                    "implies" => {
                        let a = self.expr()?;
                        BoolExpr::implies(a, self.expr()?)
                    }
                    "iff" => {
                        let a = self.expr()?;
                        BoolExpr::iff(a, self.expr()?)
                    }
                    "=" | "le" | "lt" => self.comparison(&op)?,
                    _ => return self.syntax(Some(&head), format!("unknown operator `{op}`")),
                };
                match self.next() {
                    Some(Token { tok: Tok::Close, .. }) => Ok(e),
                    other => self.syntax(other.as_ref(), "expected `)`"),
                }
            }
        }
    }

    fn comparison(&mut self, op: &str) -> Result<BoolExpr> {
        let Some(ftok) = self.next() else {
            return self.syntax(None, "expected a feature name");
        };
        let f = self.feature(&ftok)?;
        let Some(ctok) = self.next() else {
            return self.syntax(None, "expected a constant");
        };
        let Tok::Atom(text) = &ctok.tok else {
            return self.syntax(Some(&ctok), "expected a constant");
        };
        let feature = self.space.feature(f);
        let mismatch = || {
            Error::semantic(format!(
                "type mismatch at {}:{}: `{text}` does not fit the domain of `{}`",
                ctok.line, ctok.column, feature.name
            ))
        };
        if op == "=" {
            let value = if feature.is_boolean() {
                match text.as_str() {
                    "true" | "1" => Value::Bool(true),
                    "false" | "0" => Value::Bool(false),
                    _ => return Err(mismatch()),
                }
            } else {
                Value::Int(text.parse().map_err(|_| mismatch())?)
            };
            let idx = feature.value_index(&value).ok_or_else(|| {
                Error::semantic(format!(
                    "constant {value} at {}:{} is outside the domain of `{}`",
                    ctok.line, ctok.column, feature.name
                ))
            })?;
            return Ok(BoolExpr::Eq(f, idx));
        }
        if feature.is_boolean() {
            return Err(Error::semantic(format!(
                "type mismatch: `{op}` needs an integer feature, `{}` is boolean",
                feature.name
            )));
        }
        let c: i64 = text.parse().map_err(|_| mismatch())?;
        if feature.value_index(&Value::Int(c)).is_none() {
            return Err(Error::semantic(format!(
                "constant {c} at {}:{} is outside the domain of `{}`",
                ctok.line, ctok.column, feature.name
            )));
        }
        Ok(if op == "le" { BoolExpr::Le(f, c) } else { BoolExpr::Lt(f, c) })
    }
}

/// Parses an expression and resolves it against `space`.
pub fn parse_expr(text: &str, space: &FeatureSpace) -> Result<BoolExpr> {
    let tokens = tokenize(text)?;
    let end = text
        .lines()
        .enumerate()
        .last()
        .map(|(i, l)| (i + 1, l.chars().count() + 1))
        .unwrap_or((1, 1));
    let mut p = Parser {
        tokens,
        pos: 0,
        space,
        end,
    };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        let t = t.clone();
        return p.syntax(Some(&t), "trailing input after expression");
    }
    Ok(e)
}
