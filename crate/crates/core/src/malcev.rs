//! Mal'cev terms and the derived operations `x +_o y = d(x,o,y)`,
//! `x -_o y = d(x,y,o)` and `-_o y = d(o,y,o)`.

use serde::Serialize;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::clone::{closure_breadth_first, CloneOptions, DEFAULT_SIZE_CAP};
use crate::congruence::{commutator, Congruence};
use crate::error::{Error, Result};
use crate::function::FiniteFunction;
use crate::group::GroupTable;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalcevWitness {
    pub term: Term,
    pub verified: bool,
}

impl MalcevWitness {
    /// Checks the identities exhaustively before wrapping `term`.
    pub fn new(alg: &FiniteAlgebra, term: Term) -> Result<Self> {
        ensure_malcev(alg, &term)?;
        Ok(MalcevWitness { term, verified: true })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MalcevSearch {
    Found {
        witness: MalcevWitness,
        depth: usize,
    },
    /// The ternary clone was enumerated completely without a hit.
    NoneExists {
        clone_size: usize,
    },
    /// A cap stopped the search first.
    Unknown {
        explored: usize,
    },
}

impl MalcevSearch {
    pub fn witness(&self) -> Option<&MalcevWitness> {
        match self {
            MalcevSearch::Found { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// The usual group Mal'cev term `x y^-1 z` in the given symbols.
pub fn group_malcev_term(mul: &str, inv: &str) -> Term {
    Term::apply(
        mul,
        vec![
            Term::apply(mul, vec![Term::var(0), Term::apply(inv, vec![Term::var(1)])]),
            Term::var(2),
        ],
    )
}

fn is_malcev_values(n: usize, v: &[u8]) -> bool {
    (0..n).all(|x| (0..n).all(|y| v[(x * n + x) * n + y] as usize == y && v[(x * n + y) * n + y] as usize == x))
}

/// Breadth-first search of `Clo_3` for a Mal'cev function; the first hit
/// has minimal depth.
pub fn find_malcev_term(
    alg: &FiniteAlgebra,
    depth_cap: Option<usize>,
    size_cap: Option<usize>,
) -> Result<MalcevSearch> {
    let n = alg.size();
    let opts = CloneOptions::clo(3)
        .with_depth_cap(depth_cap)
        .with_size_cap(size_cap.unwrap_or(DEFAULT_SIZE_CAP));
    let c = closure_breadth_first(alg, opts, |v| is_malcev_values(n, v))?;
    Ok(match c.hit() {
        Some(i) => {
            let term = c.term(i);
            let depth = term.depth();
            MalcevSearch::Found {
                witness: MalcevWitness::new(alg, term)?,
                depth,
            }
        }
        None if c.capped() => MalcevSearch::Unknown { explored: c.len() },
        None => MalcevSearch::NoneExists { clone_size: c.len() },
    })
}

/// Value table of a ternary term, indexed `(x * n + y) * n + z`.
pub fn ternary_table(alg: &FiniteAlgebra, d: &Term) -> Result<Vec<Elem>> {
    d.check(alg)?;
    let n = alg.size();
    let mut out = Vec::with_capacity(n * n * n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                out.push(d.eval(alg, &[x, y, z])?);
            }
        }
    }
    Ok(out)
}

pub fn ensure_malcev(alg: &FiniteAlgebra, d: &Term) -> Result<()> {
    let n = alg.size();
    let t = ternary_table(alg, d)?;
    for x in 0..n {
        for y in 0..n {
            if t[(x * n + x) * n + y] != y {
                return Err(Error::NotMalcev(format!("d({x},{x},{y}) != {y}")));
            }
            if t[(x * n + y) * n + y] != x {
                return Err(Error::NotMalcev(format!("d({x},{y},{y}) != {x}")));
            }
        }
    }
    Ok(())
}

/// Tables of `+_o`, binary `-_o` and unary `-_o`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NearGroupOps {
    pub zero: Elem,
    pub plus: FiniteFunction,
    pub minus: FiniteFunction,
    pub neg: FiniteFunction,
}

pub fn plus_minus_o(alg: &FiniteAlgebra, d: &MalcevWitness, o: Elem) -> Result<NearGroupOps> {
    let n = alg.size();
    if o >= n {
        return Err(Error::ElementOutOfRange(o));
    }
    let t = ternary_table(alg, &d.term)?;
    Ok(NearGroupOps::from_table(n, &t, o))
}

impl NearGroupOps {
    pub(crate) fn from_table(n: usize, d: &[Elem], o: Elem) -> Self {
        let at = |x: Elem, y: Elem, z: Elem| d[(x * n + y) * n + z];
        NearGroupOps {
            zero: o,
            plus: FiniteFunction::from_fn(2, n, |a| at(a[0], o, a[1])).expect("size checked"),
            minus: FiniteFunction::from_fn(2, n, |a| at(a[0], a[1], o)).expect("size checked"),
            neg: FiniteFunction::from_fn(1, n, |a| at(o, a[0], o)).expect("size checked"),
        }
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.plus.eval(&[a, b])
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.minus.eval(&[a, b])
    }

    pub fn negate(&self, a: Elem) -> Elem {
        self.neg.eval(&[a])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlusItem {
    /// Item label; the labels skip 5.
    pub item: u8,
    pub statement: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub counterexample: Option<Vec<Elem>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlusReport {
    pub zero: Elem,
    pub items: Vec<PlusItem>,
}

impl PlusReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

/// Exhaustively checks the compatibility properties of `+_o` and `-_o`
/// with the commutator for the congruences `alpha` and `beta`.
pub fn check_plus_properties(
    alg: &FiniteAlgebra,
    d: &MalcevWitness,
    o: Elem,
    alpha: &Congruence,
    beta: &Congruence,
) -> Result<PlusReport> {
    let n = alg.size();
    let t = ternary_table(alg, &d.term)?;
    let ops = NearGroupOps::from_table(n, &t, o);
    let dd = |x: Elem, y: Elem, z: Elem| t[(x * n + y) * n + z];
    let ab = commutator(alg, alpha, beta)?;
    let aa = commutator(alg, alpha, alpha)?;
    let p = |a, b| ops.add(a, b);
    let m = |a, b| ops.sub(a, b);

    let mut items = Vec::new();
    let mut run = |item: u8, statement: &'static str, tuples: Vec<Vec<Elem>>, holds: &dyn Fn(&[Elem]) -> bool| {
        let counterexample = tuples.iter().find(|v| !holds(v)).cloned();
        items.push(PlusItem {
            item,
            statement,
            passed: counterexample.is_none(),
            checked: tuples.len(),
            counterexample,
        });
    };

    let singles: Vec<Vec<Elem>> = (0..n).map(|a| vec![a]).collect();
    // a alpha b beta o
    let chain_ab: Vec<Vec<Elem>> = pairs_where(n, |a, b| alpha.related(a, b) && beta.related(b, o));
    // a alpha o beta b
    let cross: Vec<Vec<Elem>> = pairs_where(n, |a, b| alpha.related(a, o) && beta.related(o, b));
    let cross_c: Vec<Vec<Elem>> = cross
        .iter()
        .flat_map(|v| (0..n).map(move |c| vec![v[0], v[1], c]))
        .collect();
    let in_alpha: Vec<Vec<Elem>> = (0..n).filter(|&a| alpha.related(a, o)).map(|a| vec![a]).collect();

    run(1, "a + o = o + a = a - o = a", singles.clone(), &|v| {
        let a = v[0];
        p(a, o) == a && p(o, a) == a && m(a, o) == a
    });
    run(2, "a - a = o", singles, &|v| m(v[0], v[0]) == o);
    run(
        3,
        "a alpha b beta o => (a - b) + b == a mod [alpha,beta]",
        chain_ab,
        &|v| ab.related(p(m(v[0], v[1]), v[1]), v[0]),
    );
    run(
        4,
        "a alpha o beta b => (a + b) - b == a mod [alpha,beta]",
        cross.clone(),
        &|v| ab.related(m(p(v[0], v[1]), v[1]), v[0]),
    );
    run(6, "a alpha o beta b => a + b == b + a mod [alpha,beta]", cross, &|v| {
        ab.related(p(v[0], v[1]), p(v[1], v[0]))
    });
    run(
        7,
        "a alpha o beta b => (a + b) + c == a + (b + c) mod [alpha,beta]",
        cross_c.clone(),
        &|v| ab.related(p(p(v[0], v[1]), v[2]), p(v[0], p(v[1], v[2]))),
    );
    run(
        8,
        "a alpha o beta b => d(a + b, b, c) == a + c mod [alpha,beta]",
        cross_c,
        &|v| ab.related(dd(p(v[0], v[1]), v[1], v[2]), p(v[0], v[2])),
    );
    run(9, "a alpha o => (-a) + a == o mod [alpha,alpha]", in_alpha, &|v| {
        aa.related(p(ops.negate(v[0]), v[0]), o)
    });
    Ok(PlusReport { zero: o, items })
}

fn pairs_where(n: usize, keep: impl Fn(Elem, Elem) -> bool) -> Vec<Vec<Elem>> {
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| keep(a, b))
        .map(|(a, b)| vec![a, b])
        .collect()
}

/// The block `o/alpha` under `+_o`, `-_o`, `o` as a group table, provided
/// the operations restrict to it and satisfy the group axioms.
pub fn block_group(alg: &FiniteAlgebra, d: &MalcevWitness, o: Elem, alpha: &Congruence) -> Result<GroupTable> {
    let n = alg.size();
    let t = ternary_table(alg, &d.term)?;
    let ops = NearGroupOps::from_table(n, &t, o);
    let block = alpha.block_of(o);
    let pos = |x: Elem| block.binary_search(&x).ok();
    let k = block.len();
    let mut mul = Vec::with_capacity(k * k);
    for &a in &block {
        for &b in &block {
            mul.push(pos(ops.add(a, b)).ok_or_else(|| Error::Precondition("block not closed under +_o".into()))?);
        }
    }
    let g = GroupTable::from_mul(k, mul).ok_or_else(|| Error::Precondition("block is not a group under +_o".into()))?;
    Ok(g.with_labels(block))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn z4_has_group_term() {
        let z4 = fixtures::z4();
        let s = find_malcev_term(&z4, None, None).unwrap();
        let w = s.witness().unwrap();
        assert!(w.verified);
        for (x, y, z) in [(1, 2, 3), (0, 3, 2), (3, 3, 1)] {
            let expected = (x + 4 - y + z) % 4;
            assert_eq!(w.term.eval(&z4, &[x, y, z]).unwrap(), expected);
        }
    }

    #[test]
    fn semilattice_has_none() {
        let s = find_malcev_term(&fixtures::semilattice2(), None, None).unwrap();
        assert!(matches!(s, MalcevSearch::NoneExists { .. }));
        let s = find_malcev_term(&fixtures::lattice2(), None, None).unwrap();
        assert!(matches!(s, MalcevSearch::NoneExists { .. }));
    }

    #[test]
    fn trivial_algebra_uses_a_projection() {
        let s = find_malcev_term(&fixtures::trivial(), None, None).unwrap();
        assert_eq!(s.witness().unwrap().term, Term::var(0));
    }

    #[test]
    fn depth_cap_gives_unknown() {
        let s = find_malcev_term(&fixtures::d4(), Some(1), None).unwrap();
        assert!(matches!(s, MalcevSearch::Unknown { .. }));
    }

    #[test]
    fn near_group_operations() {
        let z4 = fixtures::z4();
        let d = MalcevWitness::new(&z4, group_malcev_term("mul", "inv")).unwrap();
        let ops = plus_minus_o(&z4, &d, 0).unwrap();
        assert_eq!(ops.plus.values(), z4.operation("mul").unwrap().table);
        let ops1 = plus_minus_o(&z4, &d, 1).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(ops1.add(x, y), (x + 3 + y) % 4);
            }
            assert_eq!(ops1.add(x, 1), x);
        }
    }

    #[test]
    fn rejects_non_malcev_terms() {
        let z4 = fixtures::z4();
        assert!(matches!(
            MalcevWitness::new(&z4, Term::var(0)),
            Err(Error::NotMalcev(_))
        ));
    }

    #[test]
    fn plus_properties_on_groups() {
        for alg in [fixtures::z4(), fixtures::d4()] {
            let n = alg.size();
            let d = MalcevWitness::new(&alg, group_malcev_term("mul", "inv")).unwrap();
            let one = Congruence::one(n);
            let r = check_plus_properties(&alg, &d, 0, &one, &one).unwrap();
            assert_eq!(r.items.len(), 8);
            assert!(r.all_passed(), "{r:?}");
        }
    }

    #[test]
    fn abelian_block_groups() {
        let z4 = fixtures::z4();
        let d = MalcevWitness::new(&z4, group_malcev_term("mul", "inv")).unwrap();
        let g = block_group(&z4, &d, 0, &Congruence::one(4)).unwrap();
        assert!(g.is_abelian());
        assert_eq!(g.exponent(), 4);
        let half = Congruence::principal(&z4, 0, 2);
        assert_eq!(block_group(&z4, &d, 0, &half).unwrap().exponent(), 2);
    }
}
