//! Finite fields given by addition and multiplication tables.
//!
//! Element `a` of `F_{p^e}` is the residue polynomial `Σ c_i t^i` with
//! `a = Σ c_i p^i`, so addition is digitwise modulo `p` and the prime
//! subfield is `0..p`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::Elem;
use crate::error::{Error, Result};
use crate::group::prime_power;

/// Largest supported order; elements must fit the byte-valued tables.
pub const MAX_ORDER: usize = 256;

#[derive(Clone, Serialize)]
pub struct FiniteField {
    order: usize,
    characteristic: usize,
    degree: u32,
    /// Coefficients of the defining polynomial, constant term first.
    modulus: Vec<usize>,
    #[serde(skip)]
    add: Vec<Elem>,
    #[serde(skip)]
    mul: Vec<Elem>,
    #[serde(skip)]
    neg: Vec<Elem>,
    #[serde(skip)]
    inv: Vec<Elem>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

impl FiniteField {
    pub fn new(order: usize) -> Result<Self> {
        let (p, e) = prime_power(order).ok_or_else(|| Error::FieldMismatch(format!("{order} is not a prime power")))?;
        if order > MAX_ORDER {
            return Err(Error::UniverseTooLarge(order));
        }
        let modulus = match (p, e) {
            (_, 1) => vec![0, 1],
            (2, 2) => vec![1, 1, 1],
            (2, 3) => vec![1, 1, 0, 1],
            (3, 2) => vec![1, 0, 1],
            _ => find_irreducible(p, e),
        };
        let field = Self::with_modulus(p, modulus)?;
        field.check_axioms()?;
        Ok(field)
    }

    /// The field `F_p[t] / (modulus)`; `modulus` must be monic.
    pub fn with_modulus(p: usize, modulus: Vec<usize>) -> Result<Self> {
        let e = modulus.len() as u32 - 1;
        if e == 0 || modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) {
            return Err(Error::FieldMismatch(format!("bad modulus {modulus:?}")));
        }
        let q = p.pow(e);
        let digits = |a: usize| base_digits(a, p, e);
        let from_digits = |d: &[usize]| d.iter().rev().fold(0, |acc, &c| acc * p + c);
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = from_digits(&sum);
                let mut prod = vec![0; 2 * e as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for k in (e as usize..prod.len()).rev() {
                    let c = prod[k];
                    if c != 0 {
                        for (i, m) in modulus.iter().enumerate() {
                            let slot = k - e as usize + i;
                            prod[slot] = (prod[slot] + (p - c) * m) % p;
                        }
                    }
                }
                mul[a * q + b] = from_digits(&prod[..e as usize]);
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap_or(0))
            .collect();
        let inv = (0..q)
            .map(|a| (1..q).find(|&b| mul[a * q + b] == 1).unwrap_or(0))
            .collect();
        Ok(FiniteField {
            order: q,
            characteristic: p,
            degree: e,
            modulus,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn characteristic(&self) -> usize {
        self.characteristic
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> &[usize] {
        &self.modulus
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a * self.order + b]
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg[b])
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a]
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (a != 0).then(|| self.inv[a])
    }

    pub fn pow(&self, a: Elem, mut k: u64) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// `k · 1`, an element of the prime subfield.
    pub fn from_int(&self, k: i64) -> Elem {
        k.rem_euclid(self.characteristic as i64) as Elem
    }

    /// Coordinates of `a` over the prime subfield.
    pub fn digits(&self, a: Elem) -> Vec<usize> {
        base_digits(a, self.characteristic, self.degree)
    }

    pub fn add_table(&self) -> &[Elem] {
        &self.add
    }

    pub fn mul_table(&self) -> &[Elem] {
        &self.mul
    }

    pub fn check_axioms(&self) -> Result<()> {
        let q = self.order;
        let fail = |what: &str| Err(Error::FieldMismatch(format!("GF({q}): {what}")));
        for a in 0..q {
            if self.add(a, 0) != a || self.mul(a, 1) != a {
                return fail("identities");
            }
            if self.add(a, self.neg(a)) != 0 {
                return fail("additive inverses");
            }
            if a != 0 && self.mul(a, self.inv[a]) != 1 {
                return fail("multiplicative inverses");
            }
            for b in 0..q {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return fail("commutativity");
                }
                for c in 0..q {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return fail("additive associativity");
                    }
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return fail("multiplicative associativity");
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return fail("distributivity");
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for FiniteField {
    type Err = Error;

    /// Accepts `q` or `p^e`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("field order '{s}'"));
        let order = match s.trim().split_once('^') {
            Some((p, e)) => {
                let p: usize = p.trim().parse().map_err(|_| bad())?;
                let e: u32 = e.trim().parse().map_err(|_| bad())?;
                p.checked_pow(e).ok_or_else(bad)?
            }
            None => s.trim().parse().map_err(|_| bad())?,
        };
        FiniteField::new(order)
    }
}

fn base_digits(mut a: usize, p: usize, e: u32) -> Vec<usize> {
    let mut d = Vec::with_capacity(e as usize);
    for _ in 0..e {
        d.push(a % p);
        a /= p;
    }
    d
}

/// Smallest monic irreducible of degree `e` over `F_p` in the order of
/// coefficient vectors read as base-`p` numbers.
fn find_irreducible(p: usize, e: u32) -> Vec<usize> {
    let q = p.pow(e);
    for low in 0..q {
        let mut modulus = base_digits(low, p, e);
        modulus.push(1);
        if modulus[0] == 0 {
            continue;
        }
        let f = FiniteField::with_modulus(p, modulus.clone()).expect("monic");
        let domain = (1..q).all(|a| (1..q).all(|b| f.mul(a, b) != 0));
        if domain {
            return modulus;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields_satisfy_axioms() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 17, 25, 27] {
            let f = FiniteField::new(q).unwrap();
            assert_eq!(f.order(), q);
            f.check_axioms().unwrap();
        }
    }

    #[test]
    fn f4_multiplication() {
        let f = FiniteField::new(4).unwrap();
        // t * t = t + 1
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1);
        assert_eq!(f.add(2, 3), 1);
    }

    #[test]
    fn f9_has_square_root_of_minus_one() {
        let f = FiniteField::new(9).unwrap();
        let t = 3;
        assert_eq!(f.mul(t, t), f.neg(1));
    }

    #[test]
    fn parse_orders() {
        assert_eq!("2^3".parse::<FiniteField>().unwrap().order(), 8);
        assert_eq!("17".parse::<FiniteField>().unwrap().characteristic(), 17);
        assert!("6".parse::<FiniteField>().is_err());
        assert!("2^x".parse::<FiniteField>().is_err());
    }

    #[test]
    fn reducible_modulus_is_rejected() {
        // t^2 + 1 = (t + 1)^2 over F_2
        let f = FiniteField::with_modulus(2, vec![1, 0, 1]).unwrap();
        assert!(f.check_axioms().is_err());
    }

    #[test]
    fn frobenius_fixes_prime_subfield() {
        let f = FiniteField::new(8).unwrap();
        for a in 0..8 {
            assert_eq!(f.pow(a, 8), a);
            assert_eq!(f.pow(a, 2) == a, a < 2);
        }
    }
}
