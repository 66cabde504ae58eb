//! Terms over an algebra's signature.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::algebra::{Elem, FiniteAlgebra};
use crate::error::{Error, Result};

/// A syntax tree over operation symbols and variables `x0, x1, ..`.
///
/// `Const` only appears in polynomial (as opposed to term) witnesses: it
/// names a fixed element of the universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    Const(Elem),
    Apply(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Self {
        Term::Var(i)
    }

    pub fn apply(symbol: impl Into<String>, children: Vec<Term>) -> Self {
        Term::Apply(symbol.into(), children)
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::Apply(_, ch) => 1 + ch.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// One more than the largest variable index, or 0 for ground terms.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Const(_) => 0,
            Term::Apply(_, ch) => ch.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    /// Checks every symbol exists with matching arity.
    pub fn check(&self, alg: &FiniteAlgebra) -> Result<()> {
        match self {
            Term::Var(_) => Ok(()),
            Term::Const(c) => {
                if *c < alg.size() {
                    Ok(())
                } else {
                    Err(Error::ElementOutOfRange(*c))
                }
            }
            Term::Apply(s, ch) => {
                let op = alg.operation(s).ok_or_else(|| Error::UnknownSymbol(s.clone()))?;
                if op.arity != ch.len() {
                    return Err(Error::ArityMismatch {
                        symbol: s.clone(),
                        expected: op.arity,
                        found: ch.len(),
                    });
                }
                ch.iter().try_for_each(|c| c.check(alg))
            }
        }
    }

    /// Value of the induced term function at `args`.
    pub fn eval(&self, alg: &FiniteAlgebra, args: &[Elem]) -> Result<Elem> {
        match self {
            Term::Var(i) => args.get(*i).copied().ok_or(Error::UnboundVariable {
                index: *i,
                available: args.len(),
            }),
            Term::Const(c) => Ok(*c),
            Term::Apply(s, ch) => {
                let op = alg.operation(s).ok_or_else(|| Error::UnknownSymbol(s.clone()))?;
                if op.arity != ch.len() {
                    return Err(Error::ArityMismatch {
                        symbol: s.clone(),
                        expected: op.arity,
                        found: ch.len(),
                    });
                }
                let vals = ch.iter().map(|c| c.eval(alg, args)).collect::<Result<Vec<_>>>()?;
                Ok(op.apply(alg.size(), &vals))
            }
        }
    }

    /// Parses the S-expression form produced by `Display`.
    pub fn parse(src: &str) -> Result<Term> {
        let tokens = tokenize(src);
        let mut pos = 0;
        let t = parse_tokens(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!("trailing input in `{src}`")));
        }
        Ok(t)
    }
}

fn tokenize(src: &str) -> Vec<String> {
    src.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn parse_atom(tok: &str) -> Result<Term> {
    if let Some(rest) = tok.strip_prefix('x') {
        if let Ok(i) = rest.parse() {
            return Ok(Term::Var(i));
        }
    }
    if let Some(rest) = tok.strip_prefix('#') {
        if let Ok(c) = rest.parse() {
            return Ok(Term::Const(c));
        }
    }
    // a bare symbol is a nullary application
    Ok(Term::Apply(tok.to_string(), vec![]))
}

fn parse_tokens(tokens: &[String], pos: &mut usize) -> Result<Term> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| Error::Parse("unexpected end of term".into()))?;
    *pos += 1;
    if tok == "(" {
        let head = tokens
            .get(*pos)
            .ok_or_else(|| Error::Parse("missing operation symbol".into()))?
            .clone();
        *pos += 1;
        let mut children = Vec::new();
        loop {
            match tokens.get(*pos).map(String::as_str) {
                Some(")") => {
                    *pos += 1;
                    return Ok(Term::Apply(head, children));
                }
                Some(_) => children.push(parse_tokens(tokens, pos)?),
                None => return Err(Error::Parse("unbalanced parentheses".into())),
            }
        }
    } else if tok == ")" {
        Err(Error::Parse("unexpected `)`".into()))
    } else {
        parse_atom(tok)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Const(c) => write!(f, "#{c}"),
            Term::Apply(s, ch) if ch.is_empty() => write!(f, "{s}"),
            Term::Apply(s, ch) => {
                write!(f, "({s}")?;
                for c in ch {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
