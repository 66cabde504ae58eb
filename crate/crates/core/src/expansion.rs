//! Expanding a nilpotent Mal'cev algebra by abelian group operations that
//! keep a given central series central.

use serde::Serialize;

use crate::algebra::{Elem, FiniteAlgebra, Operation};
use crate::congruence::{lower_central_series, CentralSeries, Congruence};
use crate::error::{Error, Result};
use crate::function::FiniteFunction;
use crate::group::GroupTable;
use crate::malcev::{find_malcev_term, ternary_table, MalcevSearch, MalcevWitness};

/// One factor `G_i = {x/α_{i-1} : x α_i o}` of the associated group.
#[derive(Debug, Clone, Serialize)]
pub struct GroupFactor {
    pub level: usize,
    /// Minimum elements of the `α_{i-1}`-blocks making up `G_i`.
    pub elements: Vec<Elem>,
    pub group: GroupTable,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssociatedGroup {
    pub factors: Vec<GroupFactor>,
}

impl AssociatedGroup {
    pub fn order(&self) -> usize {
        self.factors.iter().map(|f| f.group.size()).product()
    }

    pub fn product(&self) -> GroupTable {
        let groups: Vec<GroupTable> = self.factors.iter().map(|f| f.group.clone()).collect();
        if groups.is_empty() {
            return GroupTable::from_mul(1, vec![0]).expect("trivial group");
        }
        GroupTable::direct_product(&groups)
    }
}

pub fn associated_abelian_group(
    alg: &FiniteAlgebra,
    series: &CentralSeries,
    o: Elem,
    d: &MalcevWitness,
) -> Result<AssociatedGroup> {
    let n = alg.size();
    if o >= n {
        return Err(Error::ElementOutOfRange(o));
    }
    let t = ternary_table(alg, &d.term)?;
    let dd = |x: Elem, y: Elem, z: Elem| t[(x * n + y) * n + z];
    let mut factors = Vec::new();
    for i in 1..=series.length() {
        let below = series.get(i - 1);
        let here = series.get(i);
        let mut elements: Vec<Elem> = (0..n).filter(|&x| here.related(x, o)).map(|x| below.rep(x)).collect();
        elements.sort_unstable();
        elements.dedup();
        let k = elements.len();
        let index = |x: Elem| elements.binary_search(&below.rep(x)).ok();
        let mut mul = Vec::with_capacity(k * k);
        for &g in &elements {
            for &h in &elements {
                let s = index(dd(g, o, h))
                    .ok_or_else(|| Error::NotCentral(format!("G_{i} is not closed under addition")))?;
                mul.push(s);
            }
        }
        let group = GroupTable::from_mul(k, mul)
            .filter(GroupTable::is_abelian)
            .ok_or_else(|| Error::NotCentral(format!("G_{i} is not an abelian group")))?;
        factors.push(GroupFactor {
            level: i,
            group: group.with_labels(elements.clone()),
            elements,
        });
    }
    Ok(AssociatedGroup { factors })
}

/// Identities of the construction checked at one recursion level.
#[derive(Debug, Clone, Serialize)]
pub struct LevelCheck {
    pub size: usize,
    pub psi_phi_inverse: bool,
    /// `q + a = q +_o a = a +_o q` for `q ∈ o/α_1`.
    pub qprops: bool,
    /// `d(q +_o a, a, b) = q +_o b` for `q ∈ o/α_1`.
    pub dprops: bool,
    /// `a -_o b = a + (-b)` and `d(a,b,c) = a + (-b) + c` for `a α_1 b`.
    pub ab: bool,
}

impl LevelCheck {
    pub fn passed(&self) -> bool {
        self.psi_phi_inverse && self.qprops && self.dprops && self.ab
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpandedAlgebra {
    pub base: FiniteAlgebra,
    pub plus: FiniteFunction,
    pub minus: FiniteFunction,
    pub zero: Elem,
    pub levels: Vec<LevelCheck>,
}

impl ExpandedAlgebra {
    /// The base algebra with `+`, `neg` and nullary `zero` appended
    /// (primed on a symbol clash).
    pub fn to_algebra(&self) -> FiniteAlgebra {
        let n = self.base.size();
        self.base
            .expand(
                format!("{}+", self.base.name()),
                vec![
                    Operation::new("+", 2, self.plus.values()),
                    Operation::new("neg", 1, self.minus.values()),
                    Operation::new("zero", 0, vec![self.zero]),
                ],
            )
            .unwrap_or_else(|_| unreachable!("tables of size {n} are valid"))
    }

    pub fn additive_group(&self) -> Option<GroupTable> {
        GroupTable::from_mul(self.base.size(), self.plus.values())
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.plus.eval(&[a, b])
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.minus.eval(&[a])
    }
}

pub fn expand_with_group(
    alg: &FiniteAlgebra,
    series: &CentralSeries,
    o: Elem,
    d: &MalcevWitness,
) -> Result<ExpandedAlgebra> {
    let n = alg.size();
    if o >= n {
        return Err(Error::ElementOutOfRange(o));
    }
    if !d.verified {
        return Err(Error::NotMalcev("witness was not verified".into()));
    }
    let t = ternary_table(alg, &d.term)?;
    let mut levels = Vec::new();
    let (plus, neg) = expand_level(n, &t, series.congruences(), o, &mut levels)?;
    Ok(ExpandedAlgebra {
        base: alg.clone(),
        plus: FiniteFunction::new(2, n, plus)?,
        minus: FiniteFunction::new(1, n, neg)?,
        zero: o,
        levels,
    })
}

/// One step of the recursion: returns the tables of `+` and `-` on a set
/// of size `n` carrying the Mal'cev table `d` and the series `alphas`.
fn expand_level(
    n: usize,
    d: &[Elem],
    alphas: &[Congruence],
    o: Elem,
    levels: &mut Vec<LevelCheck>,
) -> Result<(Vec<Elem>, Vec<Elem>)> {
    if n == 1 {
        return Ok((vec![0], vec![0]));
    }
    if alphas.len() < 2 {
        return Err(Error::NotCentral("series ends before the algebra is trivial".into()));
    }
    let dd = |x: Elem, y: Elem, z: Elem| d[(x * n + y) * n + z];
    let plus_o = |x, y| dd(x, o, y);
    let minus_o = |x, y| dd(x, y, o);
    let alpha = &alphas[1];

    // the quotient by α with blocks numbered by increasing minimum
    let reps = alpha.representatives();
    let k = reps.len();
    let block = |a: Elem| reps.binary_search(&alpha.rep(a)).expect("block");
    let mut dq = Vec::with_capacity(k * k * k);
    for &x in &reps {
        for &y in &reps {
            for &z in &reps {
                dq.push(block(dd(x, y, z)));
            }
        }
    }
    let quotient_series: Vec<Congruence> = alphas[1..]
        .iter()
        .map(|c| Congruence::from_labels(&reps.iter().map(|&r| c.rep(r)).collect::<Vec<_>>()))
        .collect();
    let ob = block(o);
    let (qplus, qneg) = expand_level(k, &dq, &quotient_series, ob, levels)?;

    // R holds the block minima except that o represents its own block
    let rep_of_block = |b: usize| if b == ob { o } else { reps[b] };
    let r = |a: Elem| rep_of_block(block(a));
    let psi2 = |a: Elem| minus_o(a, r(a));
    let phi = |b: usize, q: Elem| plus_o(q, rep_of_block(b));

    let q_block: Vec<Elem> = alpha.block_of(o);
    let mut psi_phi_inverse = (0..n).all(|a| phi(block(a), psi2(a)) == a);
    for b in 0..k {
        for &q in &q_block {
            let a = phi(b, q);
            psi_phi_inverse &= block(a) == b && psi2(a) == q;
        }
    }
    if !psi_phi_inverse {
        return Err(Error::NotCentral(format!(
            "psi and phi are not inverse on a level of size {n}"
        )));
    }

    let mut plus = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            plus[a * n + b] = phi(qplus[block(a) * k + block(b)], plus_o(psi2(a), psi2(b)));
        }
    }
    let neg: Vec<Elem> = (0..n).map(|b| phi(qneg[block(b)], dd(o, psi2(b), o))).collect();
    let add = |a: Elem, b: Elem| plus[a * n + b];

    let qprops = q_block
        .iter()
        .all(|&q| (0..n).all(|a| add(q, a) == plus_o(q, a) && plus_o(q, a) == plus_o(a, q)));
    let dprops = q_block
        .iter()
        .all(|&q| (0..n).all(|a| (0..n).all(|b| dd(plus_o(q, a), a, b) == plus_o(q, b))));
    let ab = alpha
        .pairs()
        .into_iter()
        .all(|(a, b)| minus_o(a, b) == add(a, neg[b]) && (0..n).all(|c| dd(a, b, c) == add(add(a, neg[b]), c)));
    levels.push(LevelCheck {
        size: n,
        psi_phi_inverse,
        qprops,
        dprops,
        ab,
    });
    Ok((plus, neg))
}

/// A 4-tuple of each argument row witnessing that an operation leaves a
/// relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationWitness {
    pub operation: String,
    pub arguments: Vec<[Elem; 4]>,
    pub image: [Elem; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionReport {
    pub series_length: usize,
    pub alpha_preserved: Vec<bool>,
    pub additive_group_is_abelian: bool,
    pub isomorphic_to_associated_group: bool,
    pub associated_group_order: usize,
    /// `(p, rank)` if the additive group is elementary abelian.
    pub elementary_abelian: Option<(usize, usize)>,
    pub gamma_preserved: Vec<bool>,
    pub gamma_witness: Option<(usize, RelationWitness)>,
    pub expanded_class: Option<usize>,
    pub class_within_bound: bool,
    pub levels: Vec<LevelCheck>,
}

impl ExpansionReport {
    /// Everything required of the construction holds. Elementary
    /// abelianness is reported separately since it needs prime power order.
    pub fn passed(&self) -> bool {
        self.alpha_preserved.iter().all(|&b| b)
            && self.additive_group_is_abelian
            && self.isomorphic_to_associated_group
            && self.gamma_preserved.iter().all(|&b| b)
            && self.class_within_bound
            && self.levels.iter().all(LevelCheck::passed)
    }
}

pub fn verify_expansion(exp: &ExpandedAlgebra, series: &CentralSeries, d: &MalcevWitness) -> Result<ExpansionReport> {
    let alg = &exp.base;
    let n = alg.size();
    let t = ternary_table(alg, &d.term)?;
    let additive = exp.additive_group();
    let group_only = FiniteAlgebra::new(
        "additive",
        n,
        vec![
            Operation::new("+", 2, exp.plus.values()),
            Operation::new("neg", 1, exp.minus.values()),
        ],
    )?;
    let alpha_preserved = series
        .congruences()
        .iter()
        .map(|c| c.is_compatible(&group_only))
        .collect();

    let g = associated_abelian_group(alg, series, exp.zero, d)?;
    let isomorphic = additive
        .as_ref()
        .is_some_and(|a| a.identity() == exp.zero && a.isomorphism_to(&g.product()).is_some());

    let mut gamma_preserved = Vec::new();
    let mut gamma_witness = None;
    for i in 1..=series.length() {
        let w = gamma_violation(&group_only, &t, series.get(i), series.get(i - 1));
        gamma_preserved.push(w.is_none());
        if gamma_witness.is_none() {
            gamma_witness = w.map(|w| (i, w));
        }
    }

    let expanded = exp.to_algebra();
    let class = lower_central_series(&expanded)?.class;
    Ok(ExpansionReport {
        series_length: series.length(),
        alpha_preserved,
        additive_group_is_abelian: additive.as_ref().is_some_and(GroupTable::is_abelian),
        isomorphic_to_associated_group: isomorphic,
        associated_group_order: g.order(),
        elementary_abelian: additive.as_ref().and_then(GroupTable::elementary_abelian),
        gamma_preserved,
        gamma_witness,
        expanded_class: class,
        class_within_bound: class.is_some_and(|c| c <= series.length()),
        levels: exp.levels.clone(),
    })
}

/// First violation of `γ = {(x1,x2,x3,x4) : x1 α x2, d(x1,x2,x3) α' x4}` by
/// an operation of `alg`.
fn gamma_violation(alg: &FiniteAlgebra, d: &[Elem], alpha: &Congruence, below: &Congruence) -> Option<RelationWitness> {
    let n = alg.size();
    let dd = |x: Elem, y: Elem, z: Elem| d[(x * n + y) * n + z];
    let member = |t: &[Elem; 4]| alpha.related(t[0], t[1]) && below.related(dd(t[0], t[1], t[2]), t[3]);
    let mut gamma = Vec::new();
    for (x1, x2) in alpha.pairs() {
        for x3 in 0..n {
            let v = dd(x1, x2, x3);
            for x4 in below.block_of(v) {
                gamma.push([x1, x2, x3, x4]);
            }
        }
    }
    for op in alg.operations() {
        let k = op.arity;
        if k == 0 {
            continue;
        }
        let mut pick = vec![0; k];
        let mut found = None;
        let mut args = vec![0; k];
        crate::algebra::for_each_tuple(gamma.len(), &mut pick, |p| {
            if found.is_some() {
                return;
            }
            let mut image = [0; 4];
            for (row, slot) in image.iter_mut().enumerate() {
                for (j, &g) in p.iter().enumerate() {
                    args[j] = gamma[g][row];
                }
                *slot = op.apply(n, &args);
            }
            if !member(&image) {
                found = Some(RelationWitness {
                    operation: op.symbol.clone(),
                    arguments: p.iter().map(|&g| gamma[g]).collect(),
                    image,
                });
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Everything produced by running the construction on an algebra.
#[derive(Debug, Clone, Serialize)]
pub struct Expansion {
    pub witness: MalcevWitness,
    pub series: CentralSeries,
    pub expanded: ExpandedAlgebra,
    pub report: ExpansionReport,
}

/// Finds a Mal'cev term and a maximal central chain, expands, verifies.
/// Refuses algebras without a Mal'cev term and non-nilpotent ones.
pub fn expand_algebra(
    alg: &FiniteAlgebra,
    o: Elem,
    depth_cap: Option<usize>,
    size_cap: Option<usize>,
) -> Result<Expansion> {
    let witness = match find_malcev_term(alg, depth_cap, size_cap)? {
        MalcevSearch::Found { witness, .. } => witness,
        MalcevSearch::NoneExists { .. } => {
            return Err(Error::Precondition(format!("{} has no Mal'cev term", alg.name())))
        }
        MalcevSearch::Unknown { .. } => return Err(Error::CapExceeded("no Mal'cev term found within the caps".into())),
    };
    let series = CentralSeries::maximal_chain(alg)?
        .ok_or_else(|| Error::Precondition(format!("{} is not nilpotent", alg.name())))?;
    let expanded = expand_with_group(alg, &series, o, &witness)?;
    let report = verify_expansion(&expanded, &series, &witness)?;
    Ok(Expansion {
        witness,
        series,
        expanded,
        report,
    })
}
