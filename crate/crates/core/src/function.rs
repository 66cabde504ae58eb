//! Finitary functions on a finite universe stored as value vectors.

use std::fmt;

use serde::Serialize;

use crate::algebra::{index_tuple, tuple_index, Elem};
use crate::error::{Error, Result};

/// An `n`-ary function `A^n -> A` with `|A| <= 256`, stored as its value
/// vector in row-major order. Two functions are equal iff they have the
/// same arity and the same values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FiniteFunction {
    arity: usize,
    size: usize,
    values: Box<[u8]>,
}

impl FiniteFunction {
    pub fn new(arity: usize, size: usize, values: Vec<Elem>) -> Result<Self> {
        check_size(size)?;
        if values.len() != size.pow(arity as u32) {
            return Err(Error::Precondition(format!(
                "value vector has length {}, expected {}",
                values.len(),
                size.pow(arity as u32)
            )));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= size) {
            return Err(Error::ElementOutOfRange(v));
        }
        Ok(FiniteFunction {
            arity,
            size,
            values: values.into_iter().map(|v| v as u8).collect(),
        })
    }

    pub(crate) fn from_raw(arity: usize, size: usize, values: Box<[u8]>) -> Self {
        debug_assert_eq!(values.len(), size.pow(arity as u32));
        FiniteFunction { arity, size, values }
    }

    pub fn from_fn(arity: usize, size: usize, mut f: impl FnMut(&[Elem]) -> Elem) -> Result<Self> {
        check_size(size)?;
        let len = size.pow(arity as u32);
        let mut args = vec![0; arity];
        let values = (0..len)
            .map(|i| {
                index_tuple(size, i, &mut args);
                f(&args) as u8
            })
            .collect();
        Ok(FiniteFunction { arity, size, values })
    }

    pub fn projection(arity: usize, size: usize, coord: usize) -> Self {
        assert!(coord < arity);
        FiniteFunction::from_fn(arity, size, |a| a[coord]).expect("valid size")
    }

    pub fn constant(arity: usize, size: usize, c: Elem) -> Self {
        FiniteFunction::from_raw(arity, size, vec![c as u8; size.pow(arity as u32)].into())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn raw(&self) -> &[u8] {
        &self.values
    }

    pub fn values(&self) -> Vec<Elem> {
        self.values.iter().map(|&v| v as Elem).collect()
    }

    #[inline]
    pub fn at_index(&self, i: usize) -> Elem {
        self.values[i] as Elem
    }

    pub fn eval(&self, args: &[Elem]) -> Elem {
        self.at_index(tuple_index(self.size, args))
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// Whether the function depends on argument `i`.
    pub fn depends_on(&self, i: usize) -> bool {
        let stride = self.size.pow((self.arity - 1 - i) as u32);
        let block = stride * self.size;
        (0..self.values.len()).step_by(block).any(|start| {
            (0..stride).any(|off| {
                let base = self.values[start + off];
                (1..self.size).any(|v| self.values[start + off + v * stride] != base)
            })
        })
    }

    /// Number of argument positions the function genuinely depends on.
    pub fn essential_arity(&self) -> usize {
        (0..self.arity).filter(|&i| self.depends_on(i)).count()
    }

    /// The function of arity `m >= n` that ignores the trailing arguments.
    pub fn cylindrify(&self, m: usize) -> FiniteFunction {
        assert!(m >= self.arity);
        let shift = self.size.pow((m - self.arity) as u32);
        let values = (0..self.size.pow(m as u32)).map(|i| self.values[i / shift]).collect();
        FiniteFunction::from_raw(m, self.size, values)
    }
}

pub(crate) fn check_size(size: usize) -> Result<()> {
    if size == 0 || size > 256 {
        Err(Error::UniverseTooLarge(size))
    } else {
        Ok(())
    }
}

impl fmt::Debug for FiniteFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteFunction[{}; {}]{:?}", self.arity, self.size, &self.values[..])
    }
}
