//! Finite algebras given by full operation tables.
//!
//! The universe is always `{0, .., size - 1}`. Tables are flattened row-major
//! with the leftmost argument most significant, so the entry for
//! `(a_1, .., a_n)` lives at `sum a_j * size^(n - j)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::congruence::Congruence;
use crate::error::{Error, Result};

pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    #[serde(rename = "name")]
    pub symbol: String,
    pub arity: usize,
    pub table: Vec<Elem>,
}

impl Operation {
    pub fn new(symbol: impl Into<String>, arity: usize, table: Vec<Elem>) -> Self {
        Operation {
            symbol: symbol.into(),
            arity,
            table,
        }
    }

    /// Builds the table by evaluating `f` on every argument tuple.
    pub fn from_fn(symbol: impl Into<String>, arity: usize, size: usize, mut f: impl FnMut(&[Elem]) -> Elem) -> Self {
        let mut table = Vec::with_capacity(size.pow(arity as u32));
        let mut args = vec![0; arity];
        for_each_tuple(size, &mut args, |t| table.push(f(t)));
        Operation::new(symbol, arity, table)
    }

    #[inline]
    pub fn apply(&self, size: usize, args: &[Elem]) -> Elem {
        self.table[tuple_index(size, args)]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    operations: Vec<Operation>,
}

impl FiniteAlgebra {
    /// Validates table lengths, entry ranges and symbol uniqueness.
    pub fn new(name: impl Into<String>, size: usize, operations: Vec<Operation>) -> Result<Self> {
        if size == 0 {
            return Err(Error::Malformed("universe size must be positive".into()));
        }
        let mut seen = HashMap::new();
        for op in &operations {
            if seen.insert(op.symbol.clone(), ()).is_some() {
                return Err(Error::DuplicateSymbol(op.symbol.clone()));
            }
            let expected = size
                .checked_pow(op.arity as u32)
                .ok_or_else(|| Error::Malformed(format!("table of `{}` is too large", op.symbol)))?;
            if op.table.len() != expected {
                return Err(Error::TableLength {
                    symbol: op.symbol.clone(),
                    expected,
                    found: op.table.len(),
                });
            }
            if let Some((index, &value)) = op.table.iter().enumerate().find(|(_, &v)| v >= size) {
                return Err(Error::EntryOutOfRange {
                    symbol: op.symbol.clone(),
                    index,
                    value,
                    size,
                });
            }
        }
        Ok(FiniteAlgebra {
            name: name.into(),
            size,
            operations,
        })
    }

    /// Parses the JSON interchange format
    /// `{"name": .., "size": .., "operations": [{"name", "arity", "table"}]}`.
    pub fn from_json(source: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            name: String,
            size: usize,
            #[serde(default)]
            operations: Vec<Operation>,
        }
        let doc: Doc = serde_json::from_str(source).map_err(|e| Error::Malformed(e.to_string()))?;
        FiniteAlgebra::new(doc.name, doc.size, doc.operations)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("algebra serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn operations(&self) -> &[Operation] {
        &self.operations
    }

    pub fn operation(&self, symbol: &str) -> Option<&Operation> {
        self.operations.iter().find(|op| op.symbol == symbol)
    }

    pub fn operation_index(&self, symbol: &str) -> Option<usize> {
        self.operations.iter().position(|op| op.symbol == symbol)
    }

    /// The largest arity among the fundamental operations (0 if there are none).
    pub fn max_arity(&self) -> usize {
        self.operations.iter().map(|op| op.arity).max().unwrap_or(0)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Returns a copy with `extra` appended; clashing symbols get primes added.
    pub fn expand(&self, name: impl Into<String>, extra: Vec<Operation>) -> Result<Self> {
        let mut ops = self.operations.clone();
        for mut op in extra {
            while ops.iter().any(|o| o.symbol == op.symbol) {
                op.symbol.push('\'');
            }
            ops.push(op);
        }
        FiniteAlgebra::new(name, self.size, ops)
    }

    /// The reduct keeping only the listed operation symbols.
    pub fn reduct(&self, symbols: &[&str]) -> Result<Self> {
        let mut ops = Vec::new();
        for s in symbols {
            ops.push(
                self.operation(s)
                    .cloned()
                    .ok_or_else(|| Error::UnknownSymbol((*s).to_string()))?,
            );
        }
        FiniteAlgebra::new(format!("{}-reduct", self.name), self.size, ops)
    }

    /// The quotient by `theta`. Blocks are numbered by increasing minimum
    /// element; the returned vector maps each element to its block number.
    pub fn quotient(&self, theta: &Congruence) -> (FiniteAlgebra, Vec<Elem>) {
        let reps = theta.representatives();
        let mut block_of = vec![0; self.size];
        for a in 0..self.size {
            block_of[a] = reps.binary_search(&theta.rep(a)).expect("representative");
        }
        let k = reps.len();
        let ops = self
            .operations
            .iter()
            .map(|op| {
                let mut lifted = vec![0; op.arity];
                Operation::from_fn(op.symbol.clone(), op.arity, k, |args| {
                    for (l, &b) in lifted.iter_mut().zip(args) {
                        *l = reps[b];
                    }
                    block_of[op.apply(self.size, &lifted)]
                })
            })
            .collect();
        let q = FiniteAlgebra {
            name: format!("{}/theta", self.name),
            size: k,
            operations: ops,
        };
        (q, block_of)
    }

    /// The subalgebra of `A x A` whose universe is the set of pairs related
    /// by `theta`. Returns the algebra and the list of pairs (element `i`
    /// of the subalgebra is `pairs[i]`).
    pub fn pair_subalgebra(&self, theta: &Congruence) -> (FiniteAlgebra, Vec<(Elem, Elem)>) {
        let n = self.size;
        let pairs: Vec<(Elem, Elem)> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| theta.related(x, y))
            .collect();
        let mut index = vec![usize::MAX; n * n];
        for (i, &(x, y)) in pairs.iter().enumerate() {
            index[x * n + y] = i;
        }
        let k = pairs.len();
        let ops = self
            .operations
            .iter()
            .map(|op| {
                let mut left = vec![0; op.arity];
                let mut right = vec![0; op.arity];
                Operation::from_fn(op.symbol.clone(), op.arity, k, |args| {
                    for (j, &p) in args.iter().enumerate() {
                        left[j] = pairs[p].0;
                        right[j] = pairs[p].1;
                    }
                    let i = index[op.apply(n, &left) * n + op.apply(n, &right)];
                    debug_assert!(i != usize::MAX, "theta must be compatible");
                    i
                })
            })
            .collect();
        let sub = FiniteAlgebra {
            name: format!("{}(theta)", self.name),
            size: k,
            operations: ops,
        };
        (sub, pairs)
    }
}

/// Row-major index of `args` (leftmost most significant).
#[inline]
pub fn tuple_index(size: usize, args: &[Elem]) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

/// Inverse of [`tuple_index`], writing the digits into `out`.
#[inline]
pub fn index_tuple(size: usize, mut index: usize, out: &mut [Elem]) {
    for slot in out.iter_mut().rev() {
        *slot = index % size;
        index /= size;
    }
}

/// Calls `f` on every tuple of `A^len` in row-major order, reusing `buf`.
pub fn for_each_tuple(size: usize, buf: &mut [Elem], mut f: impl FnMut(&[Elem])) {
    buf.iter_mut().for_each(|x| *x = 0);
    loop {
        f(buf);
        let mut i = buf.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            buf[i] += 1;
            if buf[i] < size {
                break;
            }
            buf[i] = 0;
        }
    }
}
