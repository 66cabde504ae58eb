//! Multivariate polynomials over a finite field in the variables
//! `x1, x2, ...`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::algebra::{for_each_tuple, Elem};
use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::function::FiniteFunction;

/// A power product `Π x_i^{e_i}`; variable indices start at 1 and no
/// zero exponent is stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(BTreeMap<usize, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(i: usize) -> Self {
        assert!(i >= 1, "variables are numbered from 1");
        Monomial(BTreeMap::from([(i, 1)]))
    }

    pub fn from_exponents(exps: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut m = BTreeMap::new();
        for (v, e) in exps {
            assert!(v >= 1, "variables are numbered from 1");
            if e > 0 {
                *m.entry(v).or_insert(0) += e;
            }
        }
        Monomial(m)
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0.get(&var).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &BTreeMap<usize, u32> {
        &self.0
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.0.keys().copied().collect()
    }

    pub fn max_var(&self) -> usize {
        self.0.keys().next_back().copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = self.0.clone();
        for (&v, &e) in &other.0 {
            *m.entry(v).or_insert(0) += e;
        }
        Monomial(m)
    }

    fn eval(&self, field: &FiniteField, point: &[Elem]) -> Elem {
        self.0
            .iter()
            .fold(1, |acc, (&v, &e)| field.mul(acc, field.pow(point[v - 1], e as u64)))
    }
}

/// Graded: lower total degree first, then larger exponent of the
/// lowest-indexed variable first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let mut a = self.0.iter();
            let mut b = other.0.iter();
            loop {
                match (a.next(), b.next()) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Less,
                    (None, Some(_)) => return Ordering::Greater,
                    (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                        Ordering::Equal if ea == eb => continue,
                        Ordering::Equal => return eb.cmp(ea),
                        o => return o,
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "x{v}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone)]
pub struct FieldPolynomial {
    field: Arc<FiniteField>,
    terms: BTreeMap<Monomial, Elem>,
}

impl PartialEq for FieldPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.field.order() == other.field.order() && self.terms == other.terms
    }
}

impl Eq for FieldPolynomial {}

impl Ord for FieldPolynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.field
            .order()
            .cmp(&other.field.order())
            .then_with(|| self.total_degree().cmp(&other.total_degree()))
            .then_with(|| self.terms.len().cmp(&other.terms.len()))
            .then_with(|| self.terms.iter().cmp(other.terms.iter()))
    }
}

impl PartialOrd for FieldPolynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::hash::Hash for FieldPolynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.order().hash(state);
        self.terms.hash(state);
    }
}

impl FieldPolynomial {
    pub fn zero(field: &Arc<FiniteField>) -> Self {
        FieldPolynomial {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Arc<FiniteField>, c: Elem) -> Self {
        Self::from_terms(field, [(Monomial::one(), c)])
    }

    pub fn var(field: &Arc<FiniteField>, i: usize) -> Self {
        Self::from_terms(field, [(Monomial::var(i), 1)])
    }

    /// Sums the given terms, dropping zero coefficients.
    pub fn from_terms(field: &Arc<FiniteField>, terms: impl IntoIterator<Item = (Monomial, Elem)>) -> Self {
        let mut p = Self::zero(field);
        for (m, c) in terms {
            assert!(c < field.order(), "coefficient {c} outside GF({})", field.order());
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Elem) {
        if c == 0 {
            return;
        }
        let f = &self.field;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = f.add(*e.get(), c);
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// Parses sums like `5*x2^2*x3 - x1 + 3`. Coefficient literals are
    /// field elements, so they must be below the field order.
    pub fn parse(field: &Arc<FiniteField>, src: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("polynomial '{src}': {why}"));
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad("empty"));
        }
        let mut p = Self::zero(field);
        let mut rest = s.as_str();
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        loop {
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let mut coeff = 1;
            let mut mono = Monomial::one();
            for factor in term.split('*') {
                if let Some(v) = factor.strip_prefix('x') {
                    let (var, exp) = match v.split_once('^') {
                        Some((v, e)) => (v, e.parse::<u32>().map_err(|_| bad("exponent"))?),
                        None => (v, 1),
                    };
                    let var: usize = var.parse().map_err(|_| bad("variable index"))?;
                    if var == 0 {
                        return Err(bad("variables are numbered from 1"));
                    }
                    mono = mono.mul(&Monomial::from_exponents([(var, exp)]));
                } else {
                    let c: usize = factor.parse().map_err(|_| bad("coefficient"))?;
                    if c >= field.order() {
                        return Err(bad("coefficient is not a field element"));
                    }
                    coeff = field.mul(coeff, c);
                }
            }
            if negative {
                coeff = field.neg(coeff);
            }
            p.add_term(mono, coeff);
            if end == rest.len() {
                break;
            }
            negative = rest[end..].starts_with('-');
            rest = &rest[end + 1..];
        }
        Ok(p)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Elem> {
        &self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> Elem {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree of a monomial; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.exponents().keys().copied()).collect()
    }

    pub fn max_var(&self) -> usize {
        self.terms.keys().map(Monomial::max_var).max().unwrap_or(0)
    }

    pub fn in_window(&self, n: usize) -> bool {
        self.max_var() <= n
    }

    pub fn is_homovariate(&self) -> bool {
        let mut sets = self.terms.keys().map(Monomial::variables);
        match sets.next() {
            None => true,
            Some(first) => sets.all(|s| s == first),
        }
    }

    fn check_field(&self, other: &FieldPolynomial) -> Result<()> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch(format!(
                "GF({}) and GF({})",
                self.field.order(),
                other.field.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldPolynomial) -> Result<FieldPolynomial> {
        self.check_field(other)?;
        let mut p = self.clone();
        for (m, &c) in &other.terms {
            p.add_term(m.clone(), c);
        }
        Ok(p)
    }

    pub fn sub(&self, other: &FieldPolynomial) -> Result<FieldPolynomial> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FieldPolynomial {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, c: Elem) -> FieldPolynomial {
        let f = &self.field;
        FieldPolynomial::from_terms(f, self.terms.iter().map(|(m, &a)| (m.clone(), f.mul(a, c))))
    }

    /// `k · p` for an integer `k`.
    pub fn times(&self, k: i64) -> FieldPolynomial {
        self.scale(self.field.from_int(k))
    }

    pub fn mul(&self, other: &FieldPolynomial) -> Result<FieldPolynomial> {
        self.check_field(other)?;
        let f = &self.field;
        let mut p = FieldPolynomial::zero(f);
        for (ma, &a) in &self.terms {
            for (mb, &b) in &other.terms {
                p.add_term(ma.mul(mb), f.mul(a, b));
            }
        }
        Ok(p)
    }

    pub fn pow(&self, k: u32) -> FieldPolynomial {
        let mut acc = FieldPolynomial::constant(&self.field, 1);
        for _ in 0..k {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Simultaneous substitution of `subs[i - 1]` for `x_i`.
    pub fn substitute(&self, subs: &[FieldPolynomial]) -> Result<FieldPolynomial> {
        if self.max_var() > subs.len() {
            return Err(Error::UnboundVariable {
                index: self.max_var(),
                available: subs.len(),
            });
        }
        for s in subs {
            self.check_field(s)?;
        }
        let f = &self.field;
        // powers are shared between monomials
        let mut powers: BTreeMap<(usize, u32), FieldPolynomial> = BTreeMap::new();
        let mut out = FieldPolynomial::zero(f);
        for (m, &c) in &self.terms {
            let mut term = FieldPolynomial::constant(f, c);
            for (&v, &e) in m.exponents() {
                let pw = powers.entry((v, e)).or_insert_with(|| subs[v - 1].pow(e));
                term = term.mul(pw)?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Renames `x_i` to `x_{map(i)}`.
    pub fn rename(&self, map: impl Fn(usize) -> usize) -> FieldPolynomial {
        FieldPolynomial::from_terms(
            &self.field,
            self.terms.iter().map(|(m, &c)| {
                (
                    Monomial::from_exponents(m.exponents().iter().map(|(&v, &e)| (map(v), e))),
                    c,
                )
            }),
        )
    }

    pub fn eval(&self, point: &[Elem]) -> Elem {
        let f = &self.field;
        self.terms
            .iter()
            .fold(0, |acc, (m, &c)| f.add(acc, f.mul(c, m.eval(f, point))))
    }

    /// `H_I(p)`: the sum of the monomials whose variable set is `I`.
    pub fn component(&self, vars: &BTreeSet<usize>) -> FieldPolynomial {
        FieldPolynomial {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponents().keys().eq(vars.iter()))
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
        }
    }

    /// The nonzero homovariate components keyed by their variable sets.
    pub fn components(&self) -> BTreeMap<BTreeSet<usize>, FieldPolynomial> {
        let mut out: BTreeMap<BTreeSet<usize>, FieldPolynomial> = BTreeMap::new();
        for (m, &c) in &self.terms {
            out.entry(m.variables())
                .or_insert_with(|| FieldPolynomial::zero(&self.field))
                .terms
                .insert(m.clone(), c);
        }
        out
    }

    /// The function `K^m -> K` induced by the polynomial.
    pub fn induced_function(&self, m: usize) -> Result<FiniteFunction> {
        if self.max_var() > m {
            return Err(Error::UnboundVariable {
                index: self.max_var(),
                available: m,
            });
        }
        FiniteFunction::from_fn(m, self.field.order(), |pt| self.eval(pt))
    }
}

impl fmt::Display for FieldPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, &c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match (c, m.degree()) {
                (_, 0) => write!(f, "{c}")?,
                (1, _) => write!(f, "{m}")?,
                _ => write!(f, "{c}*{m}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FieldPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for FieldPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The unique polynomial with every variable degree below `q` that
/// induces `f`.
pub fn interpolate(field: &Arc<FiniteField>, f: &FiniteFunction) -> Result<FieldPolynomial> {
    let q = field.order();
    if f.size() != q {
        return Err(Error::FieldMismatch(format!(
            "function on {} elements, field of order {q}",
            f.size()
        )));
    }
    // delta[c][k]: coefficient of x^k in 1 - (x - c)^(q-1)
    let x = FieldPolynomial::var(field, 1);
    let delta: Vec<Vec<Elem>> = (0..q)
        .map(|c| {
            let d = FieldPolynomial::constant(field, 1)
                .sub(
                    &x.sub(&FieldPolynomial::constant(field, c))
                        .expect("field")
                        .pow(q as u32 - 1),
                )
                .expect("field");
            (0..q as u32)
                .map(|k| d.coefficient(&Monomial::from_exponents([(1, k)])))
                .collect()
        })
        .collect();
    let m = f.arity();
    // transform the value tensor axis by axis into the coefficient tensor
    let mut coeffs: Vec<Elem> = f.values();
    let stride: Vec<usize> = (0..m).map(|i| q.pow((m - 1 - i) as u32)).collect();
    for axis in 0..m {
        let s = stride[axis];
        let mut next = vec![0; coeffs.len()];
        for (idx, slot) in next.iter_mut().enumerate() {
            let k = idx / s % q;
            let base = idx - k * s;
            let mut acc = 0;
            for (c, row) in delta.iter().enumerate() {
                acc = field.add(acc, field.mul(coeffs[base + c * s], row[k]));
            }
            *slot = acc;
        }
        coeffs = next;
    }
    let mut exps = vec![0; m];
    let mut terms = Vec::new();
    for_each_tuple(q, &mut exps, |e| {
        let idx: usize = e.iter().zip(&stride).map(|(a, s)| a * s).sum();
        if coeffs[idx] != 0 {
            terms.push((
                Monomial::from_exponents(e.iter().enumerate().map(|(i, &k)| (i + 1, k as u32))),
                coeffs[idx],
            ));
        }
    });
    Ok(FieldPolynomial::from_terms(field, terms))
}
