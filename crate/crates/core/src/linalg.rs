//! Spans of sparse vectors over a prime field.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type SparseVec<C> = BTreeMap<C, usize>;

/// A subspace of `F_p^C` kept in echelon form. Each row is stored under
/// its pivot, the smallest coordinate it touches, with coefficient 1 there.
#[derive(Debug, Clone)]
pub struct SparseSpan<C: Ord + Clone> {
    p: usize,
    rows: BTreeMap<C, SparseVec<C>>,
}

impl<C: Ord + Clone> SparseSpan<C> {
    pub fn new(p: usize) -> Self {
        SparseSpan {
            p,
            rows: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> impl Iterator<Item = &SparseVec<C>> {
        self.rows.values()
    }

    fn inverse(&self, a: usize) -> usize {
        (1..self.p)
            .find(|b| a * b % self.p == 1)
            .expect("nonzero element of a prime field")
    }

    /// The remainder of `v` after eliminating pivots from the front.
    pub fn reduce(&self, mut v: SparseVec<C>) -> SparseVec<C> {
        v.retain(|_, c| {
            *c %= self.p;
            *c != 0
        });
        while let Some((lead, &c)) = v.first_key_value() {
            let Some(row) = self.rows.get(lead) else { break };
            for (k, &r) in row {
                let e = v.entry(k.clone()).or_insert(0);
                *e = (*e + (self.p - c) * r) % self.p;
                if *e == 0 {
                    v.remove(k);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: SparseVec<C>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: SparseVec<C>) -> bool {
        let mut r = self.reduce(v);
        let Some((lead, &c)) = r.first_key_value() else {
            return false;
        };
        let lead = lead.clone();
        let inv = self.inverse(c);
        for x in r.values_mut() {
            *x = *x * inv % self.p;
        }
        self.rows.insert(lead, r);
        true
    }

    /// Rows whose pivot satisfies `keep`. When the coordinates failing
    /// `keep` all precede those satisfying it, these rows span the
    /// intersection with the coordinate subspace `keep`.
    pub fn rows_with_pivot(&self, keep: impl Fn(&C) -> bool) -> Vec<SparseVec<C>> {
        self.rows
            .iter()
            .filter(|(k, _)| keep(k))
            .map(|(_, r)| r.clone())
            .collect()
    }

    /// Every element of the span, or an error if there are more than `cap`.
    pub fn elements(&self, cap: usize) -> Result<Vec<SparseVec<C>>> {
        combinations(self.p, &self.rows.values().cloned().collect::<Vec<_>>(), cap)
    }
}

/// All `F_p`-combinations of `basis`.
pub fn combinations<C: Ord + Clone>(p: usize, basis: &[SparseVec<C>], cap: usize) -> Result<Vec<SparseVec<C>>> {
    let count = (p as f64).powi(basis.len() as i32);
    if count > cap as f64 {
        return Err(Error::CapExceeded(format!(
            "span of dimension {} over F_{p}",
            basis.len()
        )));
    }
    let mut out = vec![SparseVec::new()];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * p);
        for v in &out {
            for k in 0..p {
                let mut w = v.clone();
                if k > 0 {
                    for (c, &x) in b {
                        let e = w.entry(c.clone()).or_insert(0);
                        *e = (*e + k * x) % p;
                        if *e == 0 {
                            w.remove(c);
                        }
                    }
                }
                next.push(w);
            }
        }
        out = next;
    }
    Ok(out)
}
