//! Sets of polynomials under substitution: products, integer spans,
//! homovariate components, clone closure and the construction of a
//! homovariate generating set `H` with `L·Clop(H) = Clop(F ∪ {x1+x2, -x1, 0})`.
//!
//! Every computation is confined to a window of variables `x1..xn`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::algebra::{for_each_tuple, Elem, FiniteAlgebra, Operation};
use crate::clone::{closure, CloneOptions};
use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::function::FiniteFunction;
use crate::linalg::{combinations, SparseSpan, SparseVec};
use crate::poly::{FieldPolynomial, Monomial};

pub const DEFAULT_POLY_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySet {
    field: Arc<FiniteField>,
    tag: String,
    elements: BTreeSet<FieldPolynomial>,
}

impl PolySet {
    pub fn new(
        field: &Arc<FiniteField>,
        tag: impl Into<String>,
        elements: impl IntoIterator<Item = FieldPolynomial>,
    ) -> Result<Self> {
        let elements: BTreeSet<FieldPolynomial> = elements.into_iter().collect();
        if let Some(p) = elements.iter().find(|p| **p.field() != **field) {
            return Err(Error::FieldMismatch(format!(
                "{p} is over GF({}), set is over GF({})",
                p.field().order(),
                field.order()
            )));
        }
        Ok(PolySet {
            field: field.clone(),
            tag: tag.into(),
            elements,
        })
    }

    pub fn parse(field: &Arc<FiniteField>, tag: impl Into<String>, sources: &[&str]) -> Result<Self> {
        let polys = sources
            .iter()
            .map(|s| FieldPolynomial::parse(field, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, tag, polys)
    }

    pub fn empty(field: &Arc<FiniteField>, tag: impl Into<String>) -> Self {
        PolySet {
            field: field.clone(),
            tag: tag.into(),
            elements: BTreeSet::new(),
        }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FieldPolynomial> {
        self.elements.iter()
    }

    pub fn contains(&self, p: &FieldPolynomial) -> bool {
        self.elements.contains(p)
    }

    pub fn elements(&self) -> &BTreeSet<FieldPolynomial> {
        &self.elements
    }

    pub fn is_subset(&self, other: &PolySet) -> bool {
        self.elements.is_subset(&other.elements)
    }

    pub fn max_var(&self) -> usize {
        self.elements.iter().map(FieldPolynomial::max_var).max().unwrap_or(0)
    }

    pub fn max_degree(&self) -> u32 {
        self.elements
            .iter()
            .map(FieldPolynomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn restrict(&self, n: usize) -> PolySet {
        PolySet {
            field: self.field.clone(),
            tag: self.tag.clone(),
            elements: self.elements.iter().filter(|p| p.in_window(n)).cloned().collect(),
        }
    }

    fn check_field(&self, other: &PolySet) -> Result<()> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch(format!(
                "GF({}) and GF({})",
                self.field.order(),
                other.field.order()
            )));
        }
        Ok(())
    }
}

impl Serialize for PolySet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PolySet", 3)?;
        st.serialize_field("tag", &self.tag)?;
        st.serialize_field("field", &self.field.order())?;
        st.serialize_field("elements", &self.elements)?;
        st.end()
    }
}

/// Coordinates of a polynomial over the prime subfield. Coordinates
/// outside the window sort first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PolyCoord {
    inside: bool,
    monomial: Monomial,
    digit: u32,
}

pub fn poly_vector(p: &FieldPolynomial, window: usize) -> SparseVec<PolyCoord> {
    let f = p.field();
    let mut v = SparseVec::new();
    for (m, &c) in p.terms() {
        for (d, x) in f.digits(c).into_iter().enumerate() {
            if x != 0 {
                let coord = PolyCoord {
                    inside: m.max_var() <= window,
                    monomial: m.clone(),
                    digit: d as u32,
                };
                v.insert(coord, x);
            }
        }
    }
    v
}

pub fn vector_poly(field: &Arc<FiniteField>, v: &SparseVec<PolyCoord>) -> FieldPolynomial {
    let p = field.characteristic();
    let mut coeffs: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for (c, &x) in v {
        *coeffs.entry(&c.monomial).or_insert(0) += x * p.pow(c.digit);
    }
    FieldPolynomial::from_terms(field, coeffs.into_iter().map(|(m, c)| (m.clone(), c)))
}

/// The additive subgroup generated by `polys`, as a span over the prime
/// subfield.
pub fn span_of<'a>(
    field: &Arc<FiniteField>,
    polys: impl IntoIterator<Item = &'a FieldPolynomial>,
    window: usize,
) -> SparseSpan<PolyCoord> {
    let mut s = SparseSpan::new(field.characteristic());
    for p in polys {
        s.insert(poly_vector(p, window));
    }
    s
}

/// `AB`: all `p(q1, ..., qn)` with `p ∈ A`, `n` the largest variable of
/// `p` (at least 1) and `qi ∈ B`.
pub fn set_product(a: &PolySet, b: &PolySet, cap: usize) -> Result<PolySet> {
    a.check_field(b)?;
    let bs: Vec<&FieldPolynomial> = b.iter().collect();
    let mut out = BTreeSet::new();
    for p in a.iter() {
        let n = p.max_var().max(1);
        if (bs.len() as f64).powi(n as i32) > cap as f64 {
            return Err(Error::CapExceeded(format!("{}^{n} substitutions into {p}", bs.len())));
        }
        if bs.is_empty() {
            continue;
        }
        let mut pick = vec![0; n];
        let mut failure = None;
        for_each_tuple(bs.len(), &mut pick, |t| {
            if failure.is_some() {
                return;
            }
            let subs: Vec<FieldPolynomial> = t.iter().map(|&i| bs[i].clone()).collect();
            match p.substitute(&subs) {
                Ok(r) => {
                    out.insert(r);
                }
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    PolySet::new(a.field(), format!("({})({})", a.tag(), b.tag()), out)
}

/// `LF ∩ K[x1..xn]`.
pub fn l_span(f: &PolySet, n: usize, cap: usize) -> Result<PolySet> {
    let span = span_of(f.field(), f.iter(), n);
    let inside = span.rows_with_pivot(|c| c.inside);
    let elems = combinations(f.field().characteristic(), &inside, cap)?;
    PolySet::new(
        f.field(),
        format!("L({}) in x1..x{n}", f.tag()),
        elems.iter().map(|v| vector_poly(f.field(), v)),
    )
}

/// `L ∩ K[x1..xn]`: all `Σ ai xi` with `ai` in the prime subfield.
pub fn linear_forms(field: &Arc<FiniteField>, n: usize) -> Vec<FieldPolynomial> {
    let p = field.characteristic();
    let mut coeffs = vec![0; n];
    let mut out = Vec::with_capacity(p.pow(n as u32));
    for_each_tuple(p, &mut coeffs, |a| {
        out.push(FieldPolynomial::from_terms(
            field,
            a.iter().enumerate().map(|(i, &c)| (Monomial::var(i + 1), c)),
        ));
    });
    out
}

/// `FL` with linear arguments in `x1..xn`.
pub fn fl_substitutions(f: &PolySet, n: usize, cap: usize) -> Result<PolySet> {
    let forms = PolySet::new(f.field(), format!("L in x1..x{n}"), linear_forms(f.field(), n))?;
    set_product(f, &forms, cap).map(|s| s.with_tag(format!("({})L in x1..x{n}", f.tag())))
}

pub fn hoc_component(p: &FieldPolynomial, vars: &BTreeSet<usize>) -> FieldPolynomial {
    p.component(vars)
}

/// The homovariate components of `p` together with 0.
pub fn hoc(p: &FieldPolynomial) -> BTreeSet<FieldPolynomial> {
    let mut out: BTreeSet<FieldPolynomial> = p.components().into_values().collect();
    out.insert(FieldPolynomial::zero(p.field()));
    out
}

pub fn hoc_set(f: &PolySet) -> PolySet {
    let mut out = BTreeSet::new();
    for p in f.iter() {
        out.extend(hoc(p));
    }
    PolySet {
        field: f.field().clone(),
        tag: format!("Hoc({})", f.tag()),
        elements: out,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClopClosure {
    pub set: PolySet,
    /// First round in which each polynomial appeared.
    pub depth: BTreeMap<String, usize>,
    pub rounds: usize,
    pub capped: bool,
}

impl ClopClosure {
    pub fn depth_of(&self, p: &FieldPolynomial) -> Option<usize> {
        self.depth.get(&p.to_string()).copied()
    }
}

/// `C^(0) = {x1..xn}`, `C^(k+1) = C^(k) ∪ C·C^(k)`, everything restricted
/// to the window `x1..xn`.
pub fn clop_closure(c: &PolySet, n: usize, depth_cap: Option<usize>, size_cap: usize) -> Result<ClopClosure> {
    let field = c.field();
    let mut current: BTreeSet<FieldPolynomial> = (1..=n).map(|i| FieldPolynomial::var(field, i)).collect();
    let mut depth: BTreeMap<FieldPolynomial, usize> = current.iter().map(|p| (p.clone(), 0)).collect();
    let mut rounds = 0;
    let mut capped = false;
    loop {
        if depth_cap.is_some_and(|d| rounds >= d) {
            // one more round decides whether the fixed point was reached
            let level = PolySet::new(field, "", current.iter().cloned())?;
            let next = set_product(c, &level, size_cap)?;
            capped = next.iter().any(|p| p.in_window(n) && !current.contains(p));
            break;
        }
        let level = PolySet::new(field, "", current.iter().cloned())?;
        let next = match set_product(c, &level, size_cap) {
            Ok(s) => s,
            Err(Error::CapExceeded(_)) => {
                capped = true;
                break;
            }
            Err(e) => return Err(e),
        };
        rounds += 1;
        let mut grew = false;
        for p in next.elements.into_iter().filter(|p| p.in_window(n)) {
            if !current.contains(&p) {
                depth.insert(p.clone(), rounds);
                current.insert(p);
                grew = true;
            }
        }
        if !grew {
            rounds -= 1;
            break;
        }
        if current.len() > size_cap {
            capped = true;
            break;
        }
    }
    Ok(ClopClosure {
        set: PolySet::new(field, format!("Clop({}) in x1..x{n}", c.tag()), current)?,
        depth: depth.into_iter().map(|(p, d)| (p.to_string(), d)).collect(),
        rounds,
        capped,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HConstruction {
    pub window: usize,
    /// A basis of `S = L(FL) ∩ K[x1..xn]`.
    pub s_basis: Vec<FieldPolynomial>,
    pub h: PolySet,
}

/// `H = Hoc(L(FL) ∩ K[x1..xn])`, or `H = ∅` for `F = ∅`.
pub fn build_h(f: &PolySet, n: usize, cap: usize) -> Result<HConstruction> {
    if let Some(p) = f.iter().find(|p| p.total_degree() as usize > n) {
        return Err(Error::Precondition(format!("{p} has total degree above {n}")));
    }
    let field = f.field();
    if f.is_empty() {
        return Ok(HConstruction {
            window: n,
            s_basis: Vec::new(),
            h: PolySet::empty(field, "H"),
        });
    }
    let fl = fl_substitutions(f, n, cap)?;
    let span = span_of(field, fl.iter(), n);
    let s_basis: Vec<FieldPolynomial> = span.basis().map(|v| vector_poly(field, v)).collect();
    // H_I is linear, so H_I(S) is spanned by the components of a basis
    let mut h = BTreeSet::from([FieldPolynomial::zero(field)]);
    let mut by_vars: BTreeMap<BTreeSet<usize>, Vec<FieldPolynomial>> = BTreeMap::new();
    for b in &s_basis {
        for (vars, comp) in b.components() {
            by_vars.entry(vars).or_default().push(comp);
        }
    }
    for comps in by_vars.values() {
        let sub = span_of(field, comps, n);
        for v in sub.elements(cap)? {
            h.insert(vector_poly(field, &v));
        }
        if h.len() > cap {
            return Err(Error::CapExceeded(format!("|H| above {cap}")));
        }
    }
    Ok(HConstruction {
        window: n,
        s_basis,
        h: PolySet::new(field, "H", h)?,
    })
}

pub fn induced_function(p: &FieldPolynomial, m: usize) -> Result<FiniteFunction> {
    p.induced_function(m)
}

pub fn is_absorbing_at_zero(f: &FiniteFunction) -> bool {
    let mut args = vec![0; f.arity()];
    let mut ok = true;
    for_each_tuple(f.size(), &mut args, |a| {
        if ok && a.contains(&0) && f.eval(a) != 0 {
            ok = false;
        }
    });
    ok
}

/// `H_{1..n}(p)` for a polynomial inducing an absorbing function; the two
/// induced functions are compared before returning.
pub fn top_homovariate_of_absorbing(p: &FieldPolynomial, n: usize) -> Result<FieldPolynomial> {
    let f = p.induced_function(n)?;
    if !is_absorbing_at_zero(&f) {
        return Err(Error::Precondition(format!(
            "{p} does not induce an absorbing function"
        )));
    }
    let top = p.component(&(1..=n).collect());
    if top.induced_function(n)? != f {
        return Err(Error::Precondition(format!("{top} and {p} induce different functions")));
    }
    Ok(top)
}

#[derive(Debug, Clone, Serialize)]
pub struct LcloArity {
    pub arity: usize,
    /// Dimensions over the prime subfield of the two function spaces.
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    pub equal: bool,
    /// `"span"` when the right side was closed linearly, `"clone"` otherwise.
    pub rhs_method: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct LcloCheck {
    pub window: usize,
    pub h: PolySet,
    pub degree_bound_holds: bool,
    pub h_homovariate: bool,
    /// `H ⊆ L(FL)`, decided inside the window.
    pub h_in_lfl: bool,
    pub arities: Vec<LcloArity>,
}

impl LcloCheck {
    pub fn passed(&self) -> bool {
        self.degree_bound_holds && self.h_homovariate && self.h_in_lfl && self.arities.iter().all(|a| a.equal)
    }
}

/// Compares the functions induced by `L·Clop(H)` and by
/// `Clop(F ∪ {x1+x2, -x1, 0})` at arities `1..=max_arity`.
pub fn lclo_check(f: &PolySet, n: usize, max_arity: usize, size_cap: usize) -> Result<LcloCheck> {
    let field = f.field().clone();
    let q = field.order();
    let hc = build_h(f, n, size_cap)?;
    let degree_bound_holds = hc.h.iter().all(|h| h.total_degree() as usize <= n && h.in_window(n));
    let h_homovariate = hc.h.iter().all(FieldPolynomial::is_homovariate);
    let fl = fl_substitutions(f, n, size_cap)?;
    let s = span_of(&field, fl.iter(), n);
    let h_in_lfl = hc.h.iter().all(|h| h.is_zero() || s.contains(poly_vector(h, n)));

    let dedup = |polys: Vec<(usize, &FieldPolynomial)>| -> Result<Vec<Operation>> {
        let mut seen = BTreeSet::new();
        let mut ops = Vec::new();
        for (arity, p) in polys {
            let func = p.induced_function(arity)?;
            if seen.insert((arity, func.values())) {
                ops.push(Operation::new(format!("h{}", ops.len()), arity, func.values()));
            }
        }
        Ok(ops)
    };
    let h_ops = dedup(hc.h.iter().map(|h| (n.max(1), h)).collect())?;
    let f_ops = dedup(f.iter().map(|p| (p.max_var().max(1), p)).collect())?;
    let h_alg = FiniteAlgebra::new("H", q, h_ops)?;
    let multiadditive = f_ops.iter().all(|op| is_multiadditive(&field, op));

    let mut arities = Vec::new();
    for a in 1..=max_arity {
        let clone = closure(&h_alg, CloneOptions::clo(a).with_size_cap(size_cap))?;
        if clone.capped() {
            return Err(Error::CapExceeded(format!("Clo_{a}(H)")));
        }
        let lhs = function_span(&field, clone.functions().map(|g| g.values()));
        let (rhs, method) = if multiadditive {
            (additive_clone_span(&field, &f_ops, a), "span")
        } else {
            let mut ops = f_ops.clone();
            ops.push(Operation::new(
                "+",
                2,
                (0..q * q).map(|i| field.add(i / q, i % q)).collect(),
            ));
            ops.push(Operation::new("-", 1, (0..q).map(|x| field.neg(x)).collect()));
            ops.push(Operation::new("0", 0, vec![0]));
            let alg = FiniteAlgebra::new("F+L", q, ops)?;
            let clone = closure(&alg, CloneOptions::clo(a).with_size_cap(size_cap))?;
            if clone.capped() {
                return Err(Error::CapExceeded(format!("Clo_{a}(F, +, -, 0)")));
            }
            (function_span(&field, clone.functions().map(|g| g.values())), "clone")
        };
        let equal = lhs.dim() == rhs.dim() && lhs.basis().all(|v| rhs.contains(v.clone()));
        arities.push(LcloArity {
            arity: a,
            lhs_dim: lhs.dim(),
            rhs_dim: rhs.dim(),
            equal,
            rhs_method: method,
        });
    }
    Ok(LcloCheck {
        window: n,
        h: hc.h,
        degree_bound_holds,
        h_homovariate,
        h_in_lfl,
        arities,
    })
}

fn function_vector(field: &FiniteField, values: &[Elem]) -> SparseVec<usize> {
    let e = field.degree() as usize;
    let mut v = SparseVec::new();
    for (pt, &x) in values.iter().enumerate() {
        for (d, c) in field.digits(x).into_iter().enumerate() {
            if c != 0 {
                v.insert(pt * e + d, c);
            }
        }
    }
    v
}

fn vector_function(field: &FiniteField, v: &SparseVec<usize>, len: usize) -> Vec<Elem> {
    let e = field.degree() as usize;
    let p = field.characteristic();
    let mut out = vec![0; len];
    for (&c, &x) in v {
        out[c / e] += x * p.pow((c % e) as u32);
    }
    out
}

fn function_span(field: &FiniteField, funcs: impl Iterator<Item = Vec<Elem>>) -> SparseSpan<usize> {
    let mut s = SparseSpan::new(field.characteristic());
    for f in funcs {
        s.insert(function_vector(field, &f));
    }
    s
}

/// Additive in each argument separately.
fn is_multiadditive(field: &FiniteField, op: &Operation) -> bool {
    let q = field.order();
    let k = op.arity;
    let mut args = vec![0; k + 1];
    let mut ok = true;
    for_each_tuple(q, &mut args, |t| {
        if !ok {
            return;
        }
        let rest = &t[1..];
        for i in 0..k {
            let mut a = rest.to_vec();
            let mut b = rest.to_vec();
            let mut s = rest.to_vec();
            a[i] = t[0];
            b[i] = rest[i];
            s[i] = field.add(t[0], rest[i]);
            if op.apply(q, &s) != field.add(op.apply(q, &a), op.apply(q, &b)) {
                ok = false;
                return;
            }
        }
    });
    ok
}

/// The smallest space of `a`-ary functions containing the projections
/// and closed under the multiadditive operations `ops`.
fn additive_clone_span(field: &FiniteField, ops: &[Operation], a: usize) -> SparseSpan<usize> {
    let q = field.order();
    let len = q.pow(a as u32);
    let mut s = function_span(field, (0..a).map(|i| FiniteFunction::projection(a, q, i).values()));
    loop {
        let basis: Vec<Vec<Elem>> = s.basis().map(|v| vector_function(field, v, len)).collect();
        let mut grew = false;
        for op in ops {
            let mut pick = vec![0; op.arity];
            let mut found = Vec::new();
            for_each_tuple(basis.len(), &mut pick, |t| {
                let mut args = vec![0; t.len()];
                let g: Vec<Elem> = (0..len)
                    .map(|pt| {
                        for (slot, &b) in args.iter_mut().zip(t) {
                            *slot = basis[b][pt];
                        }
                        op.apply(q, &args)
                    })
                    .collect();
                found.push(g);
            });
            for g in found {
                grew |= s.insert(function_vector(field, &g));
            }
        }
        if !grew {
            return s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: usize) -> Arc<FiniteField> {
        Arc::new(FiniteField::new(q).unwrap())
    }

    fn set(f: &Arc<FiniteField>, s: &[&str]) -> PolySet {
        PolySet::parse(f, "test", s).unwrap()
    }

    fn strings(s: &PolySet) -> Vec<String> {
        s.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn product_of_sum_with_variables() {
        let f = gf(2);
        let r = set_product(&set(&f, &["x1 + x2"]), &set(&f, &["x1", "x2"]), DEFAULT_POLY_CAP).unwrap();
        assert_eq!(strings(&r), ["0", "x1 + x2"]);
        let z = set_product(&set(&f, &["0"]), &set(&f, &["x1"]), DEFAULT_POLY_CAP).unwrap();
        assert_eq!(strings(&z), ["0"]);
    }

    #[test]
    fn projections_act_as_identity() {
        let f = gf(3);
        let b = set(&f, &["x1", "x2", "x1*x2", "x2*x1^2"]);
        let p = set(&f, &["x1", "x2"]);
        let r = set_product(&p, &b, DEFAULT_POLY_CAP).unwrap();
        assert_eq!(r.elements(), b.elements());
    }

    #[test]
    fn spans() {
        let f = gf(2);
        assert_eq!(l_span(&set(&f, &["x1"]), 2, 100).unwrap().len(), 2);
        assert_eq!(
            strings(&l_span(&set(&f, &["x1", "x2"]), 2, 100).unwrap()),
            ["0", "x1", "x2", "x1 + x2"]
        );
        assert_eq!(strings(&l_span(&PolySet::empty(&f, "e"), 2, 100).unwrap()), ["0"]);
        // x3 cancels: x1 = (x1 + x3) - x3
        assert_eq!(
            strings(&l_span(&set(&f, &["x3", "x1 + x3"]), 2, 100).unwrap()),
            ["0", "x1"]
        );
    }

    #[test]
    fn fl_of_product() {
        let f = gf(2);
        let r = fl_substitutions(&set(&f, &["x1*x2"]), 2, DEFAULT_POLY_CAP).unwrap();
        let expected = set(
            &f,
            &[
                "0",
                "x1^2",
                "x2^2",
                "x1*x2",
                "x1^2 + x1*x2",
                "x1*x2 + x2^2",
                "x1^2 + x2^2",
            ],
        );
        assert_eq!(r.elements(), expected.elements());
        let lin = fl_substitutions(&set(&f, &["x1"]), 2, DEFAULT_POLY_CAP).unwrap();
        assert_eq!(lin.len(), 4);
        assert!(fl_substitutions(&PolySet::empty(&f, "e"), 2, 100).unwrap().is_empty());
    }

    #[test]
    fn hoc_of_homovariate() {
        let f = gf(5);
        let p = FieldPolynomial::parse(&f, "2*x1*x2 + x1^2*x2").unwrap();
        let h = hoc(&p);
        assert_eq!(h.len(), 2);
        assert!(h.contains(&p));
        let q = FieldPolynomial::parse(&f, "x2^2 + x3").unwrap();
        assert!(hoc_component(&q, &[2, 3].into()).is_zero());
    }

    #[test]
    fn clop_of_addition() {
        let f = gf(2);
        let c = clop_closure(&set(&f, &["x1 + x2"]), 2, None, 1000).unwrap();
        assert_eq!(strings(&c.set), ["0", "x1", "x2", "x1 + x2"]);
        assert_eq!(c.depth_of(&FieldPolynomial::parse(&f, "x1 + x2").unwrap()), Some(1));
        assert!(!c.capped);
        let e = clop_closure(&PolySet::empty(&f, "e"), 2, None, 1000).unwrap();
        assert_eq!(strings(&e.set), ["x1", "x2"]);
    }

    #[test]
    fn clop_of_product_to_depth_two() {
        let f = gf(2);
        let c = clop_closure(&set(&f, &["x1*x2"]), 2, Some(2), 1000).unwrap();
        let sq = FieldPolynomial::parse(&f, "x1^2*x2^2").unwrap();
        assert_eq!(c.depth_of(&sq), Some(2));
        assert!(c.capped);
    }

    #[test]
    fn h_for_product() {
        let f = gf(2);
        let h = build_h(&set(&f, &["x1*x2"]), 2, DEFAULT_POLY_CAP).unwrap().h;
        for s in ["0", "x1*x2", "x1^2", "x2^2"] {
            assert!(h.contains(&FieldPolynomial::parse(&f, s).unwrap()), "{s}");
        }
        assert!(h.iter().all(|p| p.is_homovariate() && p.total_degree() <= 2));
        let empty = build_h(&PolySet::empty(&f, "F"), 1, 10).unwrap();
        assert!(empty.h.is_empty());
        assert!(build_h(&set(&f, &["x1^3"]), 2, 10).is_err());
    }

    #[test]
    fn h_for_linear() {
        let f = gf(3);
        let h = build_h(&set(&f, &["x1 + x2"]), 2, DEFAULT_POLY_CAP).unwrap().h;
        assert!(h.iter().all(|p| p.variables().len() <= 1));
        assert!(h.contains(&FieldPolynomial::var(&f, 1)));
    }

    #[test]
    fn top_component_of_absorbing() {
        let f = gf(2);
        let p = |s| FieldPolynomial::parse(&f, s).unwrap();
        assert!(top_homovariate_of_absorbing(&p("x1*x2 + x1^2"), 2).is_err());
        assert_eq!(top_homovariate_of_absorbing(&p("x1*x2"), 2).unwrap(), p("x1*x2"));
        let q = p("x1*x2 + x1^2*x2^2");
        assert_eq!(top_homovariate_of_absorbing(&q, 2).unwrap(), q);
    }

    #[test]
    fn lclo_on_small_sets() {
        let f2 = gf(2);
        for (fs, n) in [(vec![], 1), (vec!["x1*x2"], 2), (vec!["x1*x2 + x1"], 2)] {
            let r = lclo_check(&set(&f2, &fs), n, 2, DEFAULT_POLY_CAP).unwrap();
            assert!(r.passed(), "{fs:?}: {r:?}");
        }
    }

    #[test]
    fn multiadditivity() {
        let f = gf(3);
        let mul = Operation::new("*", 2, (0..9).map(|i| f.mul(i / 3, i % 3)).collect());
        assert!(is_multiadditive(&f, &mul));
        let sq = Operation::new("sq", 1, (0..3).map(|x| f.mul(x, x)).collect());
        assert!(!is_multiadditive(&f, &sq));
    }
}
