//! Small finite groups given by multiplication tables.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::Elem;
use crate::clone::group_structure;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupTable {
    n: usize,
    mul: Vec<Elem>,
    identity: Elem,
    inverse: Vec<Elem>,
    /// Names of the elements in some ambient universe (defaults to `0..n`).
    labels: Vec<Elem>,
}

impl GroupTable {
    pub fn from_mul(n: usize, mul: Vec<Elem>) -> Option<Self> {
        if n == 0 || mul.len() != n * n || mul.iter().any(|&x| x >= n) {
            return None;
        }
        let (identity, inverse) = group_structure(n, &mul)?;
        Some(GroupTable {
            n,
            mul,
            identity,
            inverse,
            labels: (0..n).collect(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<Elem>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = labels;
        self
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[Elem] {
        &self.labels
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn op(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a * self.n + b]
    }

    pub fn inverse(&self, a: Elem) -> Elem {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Elem] {
        &self.mul
    }

    pub fn inverse_table(&self) -> &[Elem] {
        &self.inverse
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.op(a, b) == self.op(b, a)))
    }

    pub fn order_of(&self, a: Elem) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.op(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        (0..self.n).map(|a| self.order_of(a)).fold(1, lcm)
    }

    /// Number of elements of each order.
    pub fn order_profile(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for a in 0..self.n {
            *m.entry(self.order_of(a)).or_insert(0) += 1;
        }
        m
    }

    /// `(p, rank)` when the group is elementary abelian of order `p^rank`.
    pub fn elementary_abelian(&self) -> Option<(usize, usize)> {
        if self.n == 1 {
            return Some((1, 0));
        }
        let e = self.exponent();
        if !is_prime(e) || !self.is_abelian() {
            return None;
        }
        let mut rank = 0;
        let mut m = self.n;
        while m.is_multiple_of(e) {
            m /= e;
            rank += 1;
        }
        (m == 1).then_some((e, rank))
    }

    /// For an elementary abelian group, a basis and the coordinates of
    /// every element with respect to it.
    pub fn coordinates(&self) -> Option<(usize, Vec<Elem>, Vec<Vec<usize>>)> {
        let (p, rank) = self.elementary_abelian()?;
        let mut basis = Vec::new();
        let mut span: Vec<Option<Vec<usize>>> = vec![None; self.n];
        span[self.identity] = Some(vec![0; rank]);
        for a in 0..self.n {
            if span[a].is_some() {
                continue;
            }
            let j = basis.len();
            basis.push(a);
            // add every multiple of `a` to each element already spanned
            let current: Vec<(Elem, Vec<usize>)> =
                (0..self.n).filter_map(|x| span[x].clone().map(|c| (x, c))).collect();
            for (x, c) in current {
                let mut y = x;
                for k in 1..p {
                    y = self.op(y, a);
                    let mut cy = c.clone();
                    cy[j] = k;
                    span[y] = Some(cy);
                }
            }
        }
        debug_assert_eq!(basis.len(), rank);
        Some((p, basis, span.into_iter().map(|c| c.expect("spanned")).collect()))
    }

    pub fn direct_product(factors: &[GroupTable]) -> GroupTable {
        let sizes: Vec<usize> = factors.iter().map(|g| g.n).collect();
        let n: usize = sizes.iter().product();
        let split = |mut x: usize| {
            let mut parts = vec![0; sizes.len()];
            for (slot, &s) in parts.iter_mut().zip(&sizes).rev() {
                *slot = x % s;
                x /= s;
            }
            parts
        };
        let mut mul = Vec::with_capacity(n * n);
        for a in 0..n {
            let pa = split(a);
            for b in 0..n {
                let pb = split(b);
                let c = factors
                    .iter()
                    .zip(pa.iter().zip(&pb))
                    .fold(0, |acc, (g, (&x, &y))| acc * g.n + g.op(x, y));
                mul.push(c);
            }
        }
        GroupTable::from_mul(n, mul).expect("product of groups")
    }

    /// An isomorphism `self -> other` as a map on indices, if one exists.
    pub fn isomorphism_to(&self, other: &GroupTable) -> Option<Vec<Elem>> {
        if self.n != other.n || self.order_profile() != other.order_profile() {
            return None;
        }
        let gens = self.generators();
        let mut images = Vec::with_capacity(gens.len());
        self.extend_isomorphism(other, &gens, &mut images)
    }

    fn generators(&self) -> Vec<Elem> {
        let mut gens = Vec::new();
        let mut sub = vec![false; self.n];
        sub[self.identity] = true;
        // prefer elements of large order to keep the generating set small
        let mut order: Vec<Elem> = (0..self.n).collect();
        order.sort_by_key(|&a| std::cmp::Reverse(self.order_of(a)));
        for a in order {
            if !sub[a] {
                gens.push(a);
                sub = self.subgroup(&gens);
            }
        }
        gens
    }

    fn subgroup(&self, gens: &[Elem]) -> Vec<bool> {
        let mut sub = vec![false; self.n];
        sub[self.identity] = true;
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.op(x, g);
                if !sub[y] {
                    sub[y] = true;
                    stack.push(y);
                }
            }
        }
        sub
    }

    fn extend_isomorphism(&self, other: &GroupTable, gens: &[Elem], images: &mut Vec<Elem>) -> Option<Vec<Elem>> {
        if images.len() == gens.len() {
            return self.homomorphism_from(other, gens, images);
        }
        let g = gens[images.len()];
        let order = self.order_of(g);
        for h in 0..other.n {
            if other.order_of(h) == order {
                images.push(h);
                if let Some(map) = self.extend_isomorphism(other, gens, images) {
                    return Some(map);
                }
                images.pop();
            }
        }
        None
    }

    fn homomorphism_from(&self, other: &GroupTable, gens: &[Elem], images: &[Elem]) -> Option<Vec<Elem>> {
        let mut map = vec![usize::MAX; self.n];
        map[self.identity] = other.identity;
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for (&g, &h) in gens.iter().zip(images) {
                let y = self.op(x, g);
                let fy = other.op(map[x], h);
                if map[y] == usize::MAX {
                    map[y] = fy;
                    stack.push(y);
                } else if map[y] != fy {
                    return None;
                }
            }
        }
        let mut hit = vec![false; other.n];
        for &v in &map {
            if hit[v] {
                return None;
            }
            hit[v] = true;
        }
        let hom = (0..self.n).all(|a| (0..self.n).all(|b| map[self.op(a, b)] == other.op(map[a], map[b])));
        hom.then_some(map)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// `(p, e)` with `n = p^e` for a prime `p`, if `n` is a prime power.
pub fn prime_power(n: usize) -> Option<(usize, u32)> {
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut m = n;
    let mut e = 0;
    while m.is_multiple_of(p) {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> GroupTable {
        GroupTable::from_mul(n, (0..n * n).map(|i| (i / n + i % n) % n).collect()).unwrap()
    }

    #[test]
    fn cyclic_basics() {
        let z4 = cyclic(4);
        assert!(z4.is_abelian());
        assert_eq!(z4.exponent(), 4);
        assert_eq!(z4.elementary_abelian(), None);
        assert_eq!(cyclic(5).elementary_abelian(), Some((5, 1)));
    }

    #[test]
    fn klein_is_not_cyclic() {
        let v = GroupTable::direct_product(&[cyclic(2), cyclic(2)]);
        assert_eq!(v.elementary_abelian(), Some((2, 2)));
        assert!(v.isomorphism_to(&cyclic(4)).is_none());
        let (p, basis, coords) = v.coordinates().unwrap();
        assert_eq!(p, 2);
        assert_eq!(basis.len(), 2);
        let mut seen = coords.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn isomorphism_search() {
        let a = GroupTable::direct_product(&[cyclic(2), cyclic(4)]);
        let b = GroupTable::direct_product(&[cyclic(4), cyclic(2)]);
        let map = a.isomorphism_to(&b).unwrap();
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(map[a.op(x, y)], b.op(map[x], map[y]));
            }
        }
        assert!(a.isomorphism_to(&cyclic(8)).is_none());
    }

    #[test]
    fn rejects_non_groups() {
        assert!(GroupTable::from_mul(2, vec![0, 0, 0, 1]).is_none());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
