//! Congruences, the congruence lattice, the commutator and central series.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::algebra::{for_each_tuple, Elem, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::term::Term;

/// A partition of `{0..size-1}` stored as the map sending each element to
/// the minimum of its block.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    rep: Vec<Elem>,
}

impl Congruence {
    pub fn zero(size: usize) -> Self {
        Congruence {
            rep: (0..size).collect(),
        }
    }

    pub fn one(size: usize) -> Self {
        Congruence { rep: vec![0; size] }
    }

    /// Builds the partition with the given blocks; unmentioned elements are
    /// singletons.
    pub fn from_blocks(size: usize, blocks: &[Vec<Elem>]) -> Self {
        let mut uf = UnionFind::new(size);
        for b in blocks {
            for w in b.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        uf.into_congruence()
    }

    /// The equivalence relation generated by `pairs` (no compatibility closure).
    pub fn equivalence_from_pairs(size: usize, pairs: &[(Elem, Elem)]) -> Self {
        let mut uf = UnionFind::new(size);
        for &(a, b) in pairs {
            uf.union(a, b);
        }
        uf.into_congruence()
    }

    /// Accepts an arbitrary block labelling and canonicalizes it.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut first = std::collections::HashMap::new();
        let rep = labels
            .iter()
            .enumerate()
            .map(|(a, l)| *first.entry(*l).or_insert(a))
            .collect();
        Congruence { rep }
    }

    pub fn size(&self) -> usize {
        self.rep.len()
    }

    #[inline]
    pub fn rep(&self, a: Elem) -> Elem {
        self.rep[a]
    }

    #[inline]
    pub fn related(&self, a: Elem, b: Elem) -> bool {
        self.rep[a] == self.rep[b]
    }

    pub fn block_ids(&self) -> &[Elem] {
        &self.rep
    }

    /// Block minima in increasing order.
    pub fn representatives(&self) -> Vec<Elem> {
        (0..self.size()).filter(|&a| self.rep[a] == a).collect()
    }

    pub fn num_blocks(&self) -> usize {
        self.representatives().len()
    }

    pub fn block_of(&self, a: Elem) -> Vec<Elem> {
        (0..self.size()).filter(|&b| self.related(a, b)).collect()
    }

    /// Blocks as sorted lists, ordered by minimum element.
    pub fn blocks(&self) -> Vec<Vec<Elem>> {
        self.representatives().into_iter().map(|r| self.block_of(r)).collect()
    }

    /// Number of related ordered pairs.
    pub fn pair_count(&self) -> usize {
        self.blocks().iter().map(|b| b.len() * b.len()).sum()
    }

    pub fn pairs(&self) -> Vec<(Elem, Elem)> {
        let n = self.size();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.related(a, b))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rep.iter().enumerate().all(|(a, &r)| a == r)
    }

    pub fn is_one(&self) -> bool {
        self.rep.iter().all(|&r| r == 0)
    }

    pub fn leq(&self, other: &Congruence) -> bool {
        (0..self.size()).all(|a| other.related(a, self.rep[a]))
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let labels: Vec<usize> = (0..self.size())
            .map(|a| self.rep[a] * self.size() + other.rep[a])
            .collect();
        Congruence::from_labels(&labels)
    }

    /// Join in the lattice of equivalence relations, which for congruences
    /// is again a congruence.
    pub fn join(&self, other: &Congruence) -> Congruence {
        let mut uf = UnionFind::new(self.size());
        for a in 0..self.size() {
            uf.union(a, self.rep[a]);
            uf.union(a, other.rep[a]);
        }
        uf.into_congruence()
    }

    pub fn is_compatible(&self, alg: &FiniteAlgebra) -> bool {
        compatibility_witness(alg, self).is_none()
    }

    fn ensure(&self, alg: &FiniteAlgebra) -> Result<()> {
        if self.size() != alg.size() {
            return Err(Error::NotCongruence(format!(
                "partition of a {}-element set on an algebra of size {}",
                self.size(),
                alg.size()
            )));
        }
        if let Some((symbol, a, b)) = compatibility_witness(alg, self) {
            return Err(Error::NotCongruence(format!(
                "`{symbol}` maps related tuples {a:?} and {b:?} to unrelated values"
            )));
        }
        Ok(())
    }

    /// The congruence generated by `pairs`: union-find closed under the
    /// basic translations of every merged pair.
    pub fn generate(alg: &FiniteAlgebra, pairs: &[(Elem, Elem)]) -> Congruence {
        let n = alg.size();
        let mut uf = UnionFind::new(n);
        let mut queue: Vec<(Elem, Elem)> = pairs.iter().copied().filter(|&(a, b)| uf.union(a, b)).collect();
        let mut rest = Vec::new();
        let mut args = Vec::new();
        while let Some((a, b)) = queue.pop() {
            for op in alg.operations() {
                let k = op.arity;
                if k == 0 {
                    continue;
                }
                rest.resize(k - 1, 0);
                args.resize(k, 0);
                for pos in 0..k {
                    for_each_tuple(n, &mut rest, |r| {
                        args[..pos].copy_from_slice(&r[..pos]);
                        args[pos + 1..].copy_from_slice(&r[pos..]);
                        args[pos] = a;
                        let x = op.apply(n, &args);
                        args[pos] = b;
                        let y = op.apply(n, &args);
                        if uf.union(x, y) {
                            queue.push((x, y));
                        }
                    });
                }
            }
        }
        uf.into_congruence()
    }

    /// `Cg(a, b)`.
    pub fn principal(alg: &FiniteAlgebra, a: Elem, b: Elem) -> Congruence {
        Congruence::generate(alg, &[(a, b)])
    }
}

/// Some operation and pair of blockwise related argument tuples whose
/// images are unrelated, if any.
fn compatibility_witness(alg: &FiniteAlgebra, theta: &Congruence) -> Option<(String, Vec<Elem>, Vec<Elem>)> {
    let n = alg.size();
    let pairs = theta.pairs();
    for op in alg.operations() {
        let k = op.arity;
        if k == 0 {
            continue;
        }
        // changing one argument at a time suffices
        let mut rest = vec![0; k - 1];
        let mut found = None;
        for pos in 0..k {
            for_each_tuple(n, &mut rest, |r| {
                if found.is_some() {
                    return;
                }
                let mut x = Vec::with_capacity(k);
                x.extend_from_slice(&r[..pos]);
                x.push(0);
                x.extend_from_slice(&r[pos..]);
                for &(a, b) in &pairs {
                    x[pos] = a;
                    let fa = op.apply(n, &x);
                    x[pos] = b;
                    let fb = op.apply(n, &x);
                    if !theta.related(fa, fb) {
                        let mut y = x.clone();
                        y[pos] = a;
                        found = Some((op.symbol.clone(), y, x.clone()));
                        return;
                    }
                }
            });
            if found.is_some() {
                return found;
            }
        }
    }
    None
}

impl fmt::Debug for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{{{}}}", blocks.join("|"))
    }
}

impl Serialize for Congruence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks().serialize(s)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two distinct classes were merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller root so roots are block minima
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }

    fn into_congruence(mut self) -> Congruence {
        let rep = (0..self.parent.len()).map(|a| self.find(a)).collect();
        Congruence { rep }
    }
}

/// All congruences of an algebra, finest first.
#[derive(Debug, Clone)]
pub struct CongruenceLattice {
    elements: Vec<Congruence>,
}

impl CongruenceLattice {
    pub fn of(alg: &FiniteAlgebra) -> Self {
        let n = alg.size();
        let mut set: BTreeSet<Congruence> = BTreeSet::new();
        set.insert(Congruence::zero(n));
        let mut principals = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let c = Congruence::principal(alg, a, b);
                if set.insert(c.clone()) {
                    principals.push(c);
                }
            }
        }
        // every congruence is a join of principal ones
        let mut frontier: Vec<Congruence> = set.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for c in &frontier {
                for p in &principals {
                    let j = c.join(p);
                    if set.insert(j.clone()) {
                        next.push(j);
                    }
                }
            }
            frontier = next;
        }
        let mut elements: Vec<Congruence> = set.into_iter().collect();
        elements.sort_by_key(|c| (std::cmp::Reverse(c.num_blocks()), c.rep.clone()));
        CongruenceLattice { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Congruence] {
        &self.elements
    }

    pub fn contains(&self, c: &Congruence) -> bool {
        self.elements.contains(c)
    }

    /// Longest chain length minus one.
    pub fn height(&self) -> usize {
        self.longest_chain().len().saturating_sub(1)
    }

    /// A chain of maximal length from 0 to 1.
    pub fn longest_chain(&self) -> Vec<Congruence> {
        let k = self.elements.len();
        if k == 0 {
            return Vec::new();
        }
        // elements are sorted finest first, so predecessors come earlier
        let mut best = vec![0usize; k];
        let mut prev = vec![usize::MAX; k];
        for j in 0..k {
            for i in 0..j {
                if self.elements[i] != self.elements[j]
                    && self.elements[i].leq(&self.elements[j])
                    && best[i] + 1 > best[j]
                {
                    best[j] = best[i] + 1;
                    prev[j] = i;
                }
            }
        }
        let mut at = k - 1;
        let mut chain = vec![self.elements[at].clone()];
        while prev[at] != usize::MAX {
            at = prev[at];
            chain.push(self.elements[at].clone());
        }
        chain.reverse();
        chain
    }

    /// Elements covering `c`.
    pub fn covers(&self, c: &Congruence) -> Vec<Congruence> {
        let above: Vec<&Congruence> = self.elements.iter().filter(|d| *d != c && c.leq(d)).collect();
        above
            .iter()
            .filter(|d| !above.iter().any(|e| e != *d && e.leq(d)))
            .map(|d| (*d).clone())
            .collect()
    }
}

/// Height of the congruence lattice of `alg`.
pub fn lattice_height(alg: &FiniteAlgebra) -> usize {
    CongruenceLattice::of(alg).height()
}

/// `[alpha, beta]` by the Δ-construction on the subalgebra of `A^2` formed
/// by the `beta`-related pairs.
pub fn commutator(alg: &FiniteAlgebra, alpha: &Congruence, beta: &Congruence) -> Result<Congruence> {
    alpha.ensure(alg)?;
    beta.ensure(alg)?;
    let n = alg.size();
    let (ab, pairs) = alg.pair_subalgebra(beta);
    let mut index = vec![usize::MAX; n * n];
    for (i, &(x, y)) in pairs.iter().enumerate() {
        index[x * n + y] = i;
    }
    let generators: Vec<(Elem, Elem)> = alpha
        .pairs()
        .into_iter()
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (index[a * n + a], index[b * n + b]))
        .collect();
    let delta = Congruence::generate(&ab, &generators);
    let result: Vec<(Elem, Elem)> = pairs
        .iter()
        .filter(|&&(x, y)| delta.related(index[x * n + y], index[y * n + y]))
        .copied()
        .collect();
    Ok(Congruence::generate(alg, &result))
}

/// The lower central series `λ_1 = 1, λ_{k+1} = [1, λ_k]` up to stabilization.
#[derive(Debug, Clone, Serialize)]
pub struct LowerCentralSeries {
    pub terms: Vec<Congruence>,
    /// Least `k` with `λ_{k+1} = 0`, or `None` when the series stabilizes above 0.
    pub class: Option<usize>,
}

pub fn lower_central_series(alg: &FiniteAlgebra) -> Result<LowerCentralSeries> {
    let n = alg.size();
    let one = Congruence::one(n);
    let mut terms = vec![one.clone()];
    loop {
        let last = terms.last().expect("nonempty");
        if last.is_zero() {
            let class = terms.len() - 1;
            return Ok(LowerCentralSeries {
                terms,
                class: Some(class),
            });
        }
        let next = commutator(alg, &one, last)?;
        if &next == last {
            return Ok(LowerCentralSeries { terms, class: None });
        }
        terms.push(next);
    }
}

/// Whether every fundamental operation preserves
/// `ρ = {(a1,a2,a3,a4) : a1 ζ a2, d(a1,a2,a3) = a4}`.
pub fn centrality_check(alg: &FiniteAlgebra, zeta: &Congruence, d: &Term) -> Result<bool> {
    zeta.ensure(alg)?;
    crate::malcev::ensure_malcev(alg, d)?;
    let n = alg.size();
    let dt = crate::malcev::ternary_table(alg, d)?;
    Ok(preserves_rho(alg, zeta, &dt, n))
}

pub(crate) fn preserves_rho(alg: &FiniteAlgebra, zeta: &Congruence, dt: &[Elem], n: usize) -> bool {
    let rho: Vec<[Elem; 4]> = zeta
        .pairs()
        .into_iter()
        .flat_map(|(a1, a2)| (0..n).map(move |a3| (a1, a2, a3)))
        .map(|(a1, a2, a3)| [a1, a2, a3, dt[(a1 * n + a2) * n + a3]])
        .collect();
    let member = |t: [Elem; 4]| zeta.related(t[0], t[1]) && dt[(t[0] * n + t[1]) * n + t[2]] == t[3];
    for op in alg.operations() {
        let k = op.arity;
        if k == 0 {
            continue;
        }
        let mut pick = vec![0; k];
        let mut ok = true;
        let mut args = vec![0; k];
        for_each_tuple(rho.len(), &mut pick, |p| {
            if !ok {
                return;
            }
            let mut image = [0; 4];
            for (row, slot) in image.iter_mut().enumerate() {
                for (j, &r) in p.iter().enumerate() {
                    args[j] = rho[r][row];
                }
                *slot = op.apply(n, &args);
            }
            ok = member(image);
        });
        if !ok {
            return false;
        }
    }
    true
}

pub fn is_congruence_uniform(alg: &FiniteAlgebra) -> bool {
    CongruenceLattice::of(alg).elements().iter().all(|c| {
        let sizes: BTreeSet<usize> = c.blocks().iter().map(Vec::len).collect();
        sizes.len() <= 1
    })
}

/// A chain `0 = α_0 ≤ .. ≤ α_m = 1` with `[1, α_i] ≤ α_{i-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralSeries {
    congruences: Vec<Congruence>,
}

impl CentralSeries {
    pub fn new(alg: &FiniteAlgebra, congruences: Vec<Congruence>) -> Result<Self> {
        let n = alg.size();
        let (Some(first), Some(last)) = (congruences.first(), congruences.last()) else {
            return Err(Error::NotCentral("empty series".into()));
        };
        if !first.is_zero() || !last.is_one() || first.size() != n {
            return Err(Error::NotCentral("series must run from 0 to 1".into()));
        }
        let one = Congruence::one(n);
        for (i, w) in congruences.windows(2).enumerate() {
            if !w[0].leq(&w[1]) {
                return Err(Error::NotCentral(format!("alpha_{} is not below alpha_{}", i, i + 1)));
            }
            if !commutator(alg, &one, &w[1])?.leq(&w[0]) {
                return Err(Error::NotCentral(format!(
                    "[1, alpha_{}] is not below alpha_{}",
                    i + 1,
                    i
                )));
            }
        }
        Ok(CentralSeries { congruences })
    }

    pub fn congruences(&self) -> &[Congruence] {
        &self.congruences
    }

    /// The number of steps `m`.
    pub fn length(&self) -> usize {
        self.congruences.len() - 1
    }

    pub fn get(&self, i: usize) -> &Congruence {
        &self.congruences[i]
    }

    /// A maximal chain of the lattice that is a central series, if the
    /// algebra is nilpotent.
    pub fn maximal_chain(alg: &FiniteAlgebra) -> Result<Option<CentralSeries>> {
        let lattice = CongruenceLattice::of(alg);
        let n = alg.size();
        let one = Congruence::one(n);
        let mut chain = vec![Congruence::zero(n)];
        if extend_central(alg, &lattice, &one, &mut chain)? {
            Ok(Some(CentralSeries { congruences: chain }))
        } else {
            Ok(None)
        }
    }
}

fn extend_central(
    alg: &FiniteAlgebra,
    lattice: &CongruenceLattice,
    one: &Congruence,
    chain: &mut Vec<Congruence>,
) -> Result<bool> {
    let top = chain.last().expect("nonempty").clone();
    if top.is_one() {
        return Ok(true);
    }
    for c in lattice.covers(&top) {
        if commutator(alg, one, &c)?.leq(&top) {
            chain.push(c);
            if extend_central(alg, lattice, one, chain)? {
                return Ok(true);
            }
            chain.pop();
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn principal_examples() {
        let z4 = fixtures::z4();
        assert_eq!(Congruence::principal(&z4, 0, 2).blocks(), vec![vec![0, 2], vec![1, 3]]);
        assert!(Congruence::principal(&z4, 1, 1).is_zero());
        let z8 = fixtures::z8();
        assert!(Congruence::principal(&z8, 0, 1).is_one());
        assert!(Congruence::principal(&z8, 0, 4).num_blocks() == 4);
    }

    #[test]
    fn lattice_examples() {
        let z4 = CongruenceLattice::of(&fixtures::z4());
        assert_eq!(z4.len(), 3);
        assert_eq!(z4.height(), 2);
        assert_eq!(CongruenceLattice::of(&fixtures::z2xz2()).len(), 5);
        assert_eq!(CongruenceLattice::of(&fixtures::z2xz2()).height(), 2);
        assert_eq!(CongruenceLattice::of(&fixtures::trivial()).len(), 1);
        assert_eq!(CongruenceLattice::of(&fixtures::trivial()).height(), 0);
        // D4 has six normal subgroups, longest chain 1 < Z < V < D4
        let d4 = CongruenceLattice::of(&fixtures::d4());
        assert_eq!(d4.len(), 6);
        assert_eq!(d4.height(), 3);
    }

    #[test]
    fn chain_height() {
        // every partition into intervals is a congruence of a chain under min
        let c = CongruenceLattice::of(&fixtures::chain3());
        assert_eq!(c.height(), 2);
    }

    #[test]
    fn commutator_examples() {
        let z4 = fixtures::z4();
        let one = Congruence::one(4);
        assert!(commutator(&z4, &one, &one).unwrap().is_zero());
        let d4 = fixtures::d4();
        let c = commutator(&d4, &Congruence::one(8), &Congruence::one(8)).unwrap();
        // cosets of {1, r^2}: r^i s^j has index i + 4j
        assert_eq!(c.block_of(0), vec![0, 2]);
        assert_eq!(c.num_blocks(), 4);
        assert!(commutator(&d4, &Congruence::zero(8), &Congruence::one(8))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn lower_central_series_examples() {
        assert_eq!(lower_central_series(&fixtures::z4()).unwrap().class, Some(1));
        assert_eq!(lower_central_series(&fixtures::d4()).unwrap().class, Some(2));
        assert_eq!(lower_central_series(&fixtures::q8()).unwrap().class, Some(2));
        assert_eq!(lower_central_series(&fixtures::lattice2()).unwrap().class, None);
        assert_eq!(lower_central_series(&fixtures::trivial()).unwrap().class, Some(0));
        assert_eq!(lower_central_series(&fixtures::m_ring()).unwrap().class, Some(2));
    }

    #[test]
    fn centrality_examples() {
        let z4 = fixtures::z4();
        let d = crate::malcev::group_malcev_term("mul", "inv");
        assert!(centrality_check(&z4, &Congruence::one(4), &d).unwrap());
        let d4 = fixtures::d4();
        assert!(!centrality_check(&d4, &Congruence::one(8), &d).unwrap());
        assert!(centrality_check(&d4, &Congruence::zero(8), &d).unwrap());
        let center = Congruence::from_blocks(8, &[vec![0, 2], vec![1, 3], vec![4, 6], vec![5, 7]]);
        assert!(centrality_check(&d4, &center, &d).unwrap());
    }

    #[test]
    fn uniformity() {
        assert!(is_congruence_uniform(&fixtures::d4()));
        assert!(is_congruence_uniform(&fixtures::trivial()));
        assert!(!is_congruence_uniform(&fixtures::chain3()));
    }

    #[test]
    fn series_validation() {
        let z4 = fixtures::z4();
        let mid = Congruence::principal(&z4, 0, 2);
        assert!(CentralSeries::new(&z4, vec![Congruence::zero(4), mid, Congruence::one(4)]).is_ok());
        let d4 = fixtures::d4();
        assert!(CentralSeries::new(&d4, vec![Congruence::zero(8), Congruence::one(8)]).is_err());
        let s = CentralSeries::maximal_chain(&d4).unwrap().unwrap();
        assert_eq!(s.length(), 3);
        assert!(CentralSeries::maximal_chain(&fixtures::lattice2()).unwrap().is_none());
    }

    #[test]
    fn non_congruence_is_rejected() {
        let z4 = fixtures::z4();
        let bad = Congruence::from_blocks(4, &[vec![0, 1]]);
        assert!(matches!(
            commutator(&z4, &bad, &Congruence::one(4)),
            Err(Error::NotCongruence(_))
        ));
    }
}
