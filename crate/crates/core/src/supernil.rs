//! Supernilpotency: absorbing polynomial functions, the higher term
//! condition, commutator terms, free spectra, and the bound
//! `s = (m(q-1))^(h-1)`.
//!
//! Every "verified" verdict here is bounded by the arity or depth cap it
//! carries; only refutations are certificates.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::algebra::{for_each_tuple, tuple_index, Elem, FiniteAlgebra, Operation};
use crate::clone::{closure, group_structure, CloneOptions, FunctionClone};
use crate::congruence::{lower_central_series, CongruenceLattice};
use crate::error::{Error, Result};
use crate::expansion::{expand_algebra, ExpansionReport};
use crate::field::FiniteField;
use crate::function::FiniteFunction;
use crate::group::{prime_power, GroupTable};
use crate::poly::{interpolate, FieldPolynomial};
use crate::polyclone::linear_forms;
use crate::term::Term;

fn big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn big_opt<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

/// `(m(q-1))^(h-1)`.
pub fn bound_s(q: usize, m: usize, h: usize) -> Result<BigUint> {
    if q < 2 || m < 1 || h < 1 {
        return Err(Error::Precondition(format!(
            "bound needs q >= 2, m >= 1, h >= 1 (got q={q}, m={m}, h={h})"
        )));
    }
    Ok(BigUint::from(m * (q - 1)).pow(h as u32 - 1))
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryBound {
    pub exponent: f64,
    pub value: f64,
    pub ceiling: f64,
    /// The exact integer when `q` is a power of two.
    #[serde(serialize_with = "big_opt")]
    pub exact: Option<BigUint>,
}

/// `(m(q-1))^(log2(q) - 1)`.
pub fn bound_cor(q: usize, m: usize) -> Result<CorollaryBound> {
    if q < 2 || m < 1 {
        return Err(Error::Precondition(format!(
            "bound needs q >= 2, m >= 1 (got q={q}, m={m})"
        )));
    }
    let exponent = (q as f64).log2() - 1.0;
    let value = ((m * (q - 1)) as f64).powf(exponent);
    let exact = q
        .is_power_of_two()
        .then(|| BigUint::from(m * (q - 1)).pow(q.trailing_zeros() - 1));
    Ok(CorollaryBound {
        exponent,
        value,
        ceiling: value.ceil(),
        exact,
    })
}

/// Every tuple containing `zero` is mapped to `zero`.
pub fn is_absorbing(f: &FiniteFunction, zero: Elem) -> bool {
    let mut args = vec![0; f.arity()];
    let mut ok = true;
    for_each_tuple(f.size(), &mut args, |a| {
        if ok && a.contains(&zero) && f.eval(a) != zero {
            ok = false;
        }
    });
    ok
}

/// A binary operation of the algebra forming a group, preferably an
/// elementary abelian one, with the operations that are not part of it.
#[derive(Debug, Clone, Serialize)]
pub struct GroupReduct {
    pub operation: String,
    pub zero: Elem,
    pub abelian: bool,
    pub elementary: Option<(usize, usize)>,
    /// Operations other than the group operation, its inverse and identity.
    pub others: Vec<String>,
}

pub fn group_reduct(alg: &FiniteAlgebra) -> Option<GroupReduct> {
    let n = alg.size();
    let mut best: Option<(GroupTable, usize)> = None;
    for (i, op) in alg.operations().iter().enumerate() {
        if op.arity != 2 {
            continue;
        }
        if let Some(g) = GroupTable::from_mul(n, op.table.clone()) {
            let better = match &best {
                None => true,
                Some((b, _)) => b.elementary_abelian().is_none() && g.elementary_abelian().is_some(),
            };
            if better {
                best = Some((g, i));
            }
        }
    }
    let (g, i) = best?;
    let others = alg
        .operations()
        .iter()
        .enumerate()
        .filter(|&(j, op)| {
            j != i
                && !(op.arity == 1 && op.table == g.inverse_table())
                && !(op.arity == 0 && op.table[0] == g.identity())
        })
        .map(|(_, op)| op.symbol.clone())
        .collect();
    Some(GroupReduct {
        operation: alg.operations()[i].symbol.clone(),
        zero: g.identity(),
        abelian: g.is_abelian(),
        elementary: g.elementary_abelian(),
        others,
    })
}

fn require_group(alg: &FiniteAlgebra, zero: Elem) -> Result<GroupReduct> {
    let g = group_reduct(alg).ok_or_else(|| Error::Precondition(format!("{} has no group operation", alg.name())))?;
    if zero != g.zero {
        // another group operation may have `zero` as identity
        let ok = alg
            .operations()
            .iter()
            .any(|op| op.arity == 2 && group_structure(alg.size(), &op.table).is_some_and(|(e, _)| e == zero));
        if !ok {
            return Err(Error::Precondition(format!(
                "{zero} is not the identity of a group operation"
            )));
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Serialize)]
pub struct AbsorbingFunction {
    pub arity: usize,
    pub essential_arity: usize,
    pub values: Vec<Elem>,
    /// A polynomial inducing the function; `#c` denotes the constant `c`.
    pub term: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AbsorbingSurvey {
    pub arity: usize,
    pub zero: Elem,
    pub pol_size: usize,
    /// Absorbing members of `Pol_n`, the zero function included.
    pub functions: Vec<AbsorbingFunction>,
    pub partial: bool,
}

impl AbsorbingSurvey {
    pub fn nonzero(&self) -> impl Iterator<Item = &AbsorbingFunction> {
        self.functions.iter().filter(|f| f.essential_arity > 0)
    }

    pub fn max_essential_arity(&self) -> usize {
        self.functions.iter().map(|f| f.essential_arity).max().unwrap_or(0)
    }
}

/// All absorbing members of `Pol_n(A)` for an expanded group `A`.
pub fn absorbing_survey(alg: &FiniteAlgebra, zero: Elem, arity: usize, size_cap: usize) -> Result<AbsorbingSurvey> {
    require_group(alg, zero)?;
    let pol = closure(alg, CloneOptions::pol(arity).with_size_cap(size_cap))?;
    Ok(survey_from(&pol, zero))
}

fn survey_from(pol: &FunctionClone, zero: Elem) -> AbsorbingSurvey {
    let mut functions = Vec::new();
    for i in 0..pol.len() {
        let f = pol.function(i);
        if is_absorbing(&f, zero) {
            functions.push(AbsorbingFunction {
                arity: f.arity(),
                essential_arity: f.essential_arity(),
                values: f.values(),
                term: pol.term(i).to_string(),
            });
        }
    }
    AbsorbingSurvey {
        arity: pol.arity(),
        zero,
        pol_size: pol.len(),
        functions,
        partial: pol.capped(),
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SupernilVerdict {
    /// No nonzero absorbing polynomial function of arity `s+1..=up_to`.
    Verified {
        up_to: usize,
    },
    Refuted {
        witness: AbsorbingFunction,
    },
    /// The closure at `arity` hit the size cap.
    Capped {
        arity: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct SupernilCheck {
    pub degree: usize,
    pub arity_cap: usize,
    pub result: SupernilVerdict,
}

impl SupernilCheck {
    pub fn verified(&self) -> bool {
        matches!(self.result, SupernilVerdict::Verified { .. })
    }

    pub fn refuted(&self) -> bool {
        matches!(self.result, SupernilVerdict::Refuted { .. })
    }
}

/// Looks for a nonzero absorbing polynomial function of arity
/// `s+1..=arity_cap`.
pub fn check_supernilpotent(alg: &FiniteAlgebra, s: usize, arity_cap: usize, size_cap: usize) -> Result<SupernilCheck> {
    if arity_cap < s + 1 {
        return Err(Error::Precondition(format!(
            "arity cap {arity_cap} is below s + 1 = {}",
            s + 1
        )));
    }
    let g = require_group(alg, group_reduct(alg).map(|g| g.zero).unwrap_or(0))?;
    for t in s + 1..=arity_cap {
        let survey = absorbing_survey(alg, g.zero, t, size_cap)?;
        if let Some(w) = survey.nonzero().next() {
            return Ok(SupernilCheck {
                degree: s,
                arity_cap,
                result: SupernilVerdict::Refuted { witness: w.clone() },
            });
        }
        if survey.partial {
            return Ok(SupernilCheck {
                degree: s,
                arity_cap,
                result: SupernilVerdict::Capped { arity: t },
            });
        }
    }
    Ok(SupernilCheck {
        degree: s,
        arity_cap,
        result: SupernilVerdict::Verified { up_to: arity_cap },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SupernilReport {
    pub algebra: String,
    pub order: usize,
    pub class: Option<usize>,
    pub height: usize,
    pub max_arity: usize,
    #[serde(serialize_with = "big_opt")]
    pub bound: Option<BigUint>,
    /// Largest arity with a nonzero absorbing polynomial function, when it
    /// is below the cap.
    pub verified_degree: Option<usize>,
    pub arity_cap: usize,
    /// Number of nonzero absorbing members of `Pol_t` for `t = 1..`.
    pub absorbing_counts: Vec<usize>,
    pub counterexample: Option<AbsorbingFunction>,
    pub capped: bool,
}

pub fn supernil_report(alg: &FiniteAlgebra, arity_cap: usize, size_cap: usize) -> Result<SupernilReport> {
    let g = require_group(alg, group_reduct(alg).map(|g| g.zero).unwrap_or(0))?;
    let q = alg.size();
    let height = CongruenceLattice::of(alg).height();
    let m = alg.max_arity();
    let class = lower_central_series(alg)?.class;
    let mut counts = Vec::new();
    let mut top = 0;
    let mut counterexample = None;
    let mut capped = false;
    for t in 1..=arity_cap {
        let survey = absorbing_survey(alg, g.zero, t, size_cap)?;
        if survey.partial {
            capped = true;
            break;
        }
        let nonzero: Vec<&AbsorbingFunction> = survey.nonzero().collect();
        counts.push(nonzero.len());
        if let Some(w) = nonzero.first() {
            top = t;
            counterexample = Some((*w).clone());
        }
    }
    Ok(SupernilReport {
        algebra: alg.name().to_string(),
        order: q,
        class,
        height,
        max_arity: m,
        bound: bound_s(q, m.max(1), height).ok(),
        verified_degree: (!capped && top < arity_cap).then_some(top),
        arity_cap,
        absorbing_counts: counts,
        counterexample,
        capped,
    })
}

/// A violation of the `k`-supernilpotency term condition: `t` agrees on
/// the last tuple pair for every pattern not constantly 2 on the first
/// `k` tuples, but not for the constantly-2 pattern.
#[derive(Debug, Clone, Serialize)]
pub struct TcWitness {
    pub term: String,
    pub block_sizes: Vec<usize>,
    /// `(a_1^(i), a_2^(i))` for `i = 1..=k+1`.
    pub tuples: Vec<(Vec<Elem>, Vec<Elem>)>,
    pub values: (Elem, Elem),
}

#[derive(Debug, Clone, Serialize)]
pub struct TcSearch {
    pub degree: usize,
    pub tuple_bound: usize,
    pub depth_bound: usize,
    pub functions_checked: usize,
    pub witness: Option<TcWitness>,
    pub capped: bool,
}

/// Bounded search for a violation of the term condition of degree `k`
/// among term functions of depth at most `depth_bound` and tuples of
/// length at most `tuple_bound`.
pub fn term_condition_falsify(
    alg: &FiniteAlgebra,
    k: usize,
    tuple_bound: usize,
    depth_bound: usize,
    size_cap: usize,
) -> Result<TcSearch> {
    let q = alg.size();
    let mut checked = 0;
    let mut capped = false;
    let mut sizes = vec![0; k + 1];
    let mut splits = Vec::new();
    for_each_tuple(tuple_bound, &mut sizes, |s| {
        splits.push(s.iter().map(|x| x + 1).collect::<Vec<_>>())
    });
    splits.sort_by_key(|s: &Vec<usize>| (s.iter().sum::<usize>(), s.clone()));
    let mut cache: Option<(usize, FunctionClone)> = None;
    for split in splits {
        let n: usize = split.iter().sum();
        if cache.as_ref().is_none_or(|(a, _)| *a != n) {
            let opts = CloneOptions::clo(n)
                .with_size_cap(size_cap)
                .with_depth_cap(Some(depth_bound));
            cache = Some((n, crate::clone::closure_breadth_first(alg, opts, |_| false)?));
        }
        let clone = &cache.as_ref().expect("cached").1;
        capped |= clone.capped();
        for i in 0..clone.len() {
            checked += 1;
            if let Some((tuples, values)) = tc_violation(clone.raw(i), q, &split, k) {
                return Ok(TcSearch {
                    degree: k,
                    tuple_bound,
                    depth_bound,
                    functions_checked: checked,
                    witness: Some(TcWitness {
                        term: clone.term(i).to_string(),
                        block_sizes: split,
                        tuples,
                        values,
                    }),
                    capped,
                });
            }
        }
    }
    Ok(TcSearch {
        degree: k,
        tuple_bound,
        depth_bound,
        functions_checked: checked,
        witness: None,
        capped,
    })
}

type TcViolation = (Vec<(Vec<Elem>, Vec<Elem>)>, (Elem, Elem));

fn tc_violation(t: &[u8], q: usize, split: &[usize], k: usize) -> Option<TcViolation> {
    let n: usize = split.iter().sum();
    let mut choice = vec![0; 2 * n];
    let mut args = vec![0; n];
    let mut found = None;
    let offsets: Vec<usize> = split
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    // choice[..n] holds every a_1^(i), choice[n..] every a_2^(i)
    let eval = |choice: &[Elem], pattern: &[usize], last: usize, args: &mut Vec<Elem>| {
        for (b, (&off, &len)) in offsets.iter().zip(split).enumerate() {
            let side = if b < k { pattern[b] } else { last };
            for j in 0..len {
                args[off + j] = choice[side * n + off + j];
            }
        }
        t[tuple_index(q, args)] as Elem
    };
    let patterns: Vec<Vec<usize>> = {
        let mut ps = Vec::new();
        let mut p = vec![0; k];
        for_each_tuple(2, &mut p, |x| {
            if x.contains(&0) {
                ps.push(x.to_vec());
            }
        });
        ps
    };
    let all_two = vec![1; k];
    for_each_tuple(q, &mut choice, |c| {
        if found.is_some() {
            return;
        }
        let hyp = patterns
            .iter()
            .all(|p| eval(c, p, 0, &mut args) == eval(c, p, 1, &mut args));
        if hyp {
            let a = eval(c, &all_two, 0, &mut args);
            let b = eval(c, &all_two, 1, &mut args);
            if a != b {
                let tuples = offsets
                    .iter()
                    .zip(split)
                    .map(|(&off, &len)| (c[off..off + len].to_vec(), c[n + off..n + off + len].to_vec()))
                    .collect();
                found = Some((tuples, (a, b)));
            }
        }
    });
    found
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorTerm {
    pub term: String,
    pub rank: usize,
    pub trivial: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorSurvey {
    pub rank: usize,
    pub depth_bound: Option<usize>,
    pub explored: usize,
    pub terms: Vec<CommutatorTerm>,
    pub capped: bool,
}

impl CommutatorSurvey {
    pub fn nontrivial(&self) -> impl Iterator<Item = &CommutatorTerm> {
        self.terms.iter().filter(|t| !t.trivial)
    }
}

/// `None` unless `w(x_1..x_r, z)` becomes `z` whenever some `x_i` is `z`;
/// otherwise whether `w` is trivial.
fn commutator_shape(w: &[u8], q: usize, r: usize) -> Option<bool> {
    let n = r + 1;
    let mut args = vec![0; n];
    let mut is_commutator = true;
    let mut trivial = true;
    for_each_tuple(q, &mut args, |a| {
        let z = a[r];
        let v = w[tuple_index(q, a)] as Elem;
        if v != z {
            trivial = false;
            if a[..r].contains(&z) {
                is_commutator = false;
            }
        }
    });
    is_commutator.then_some(trivial)
}

/// Whether `term` (in `r + 1` variables, `z` last) is a commutator term
/// of rank `r`; if so, whether it is trivial.
pub fn is_commutator_term(alg: &FiniteAlgebra, term: &Term, r: usize) -> Result<Option<bool>> {
    term.check(alg)?;
    if term.var_bound() > r + 1 {
        return Err(Error::Precondition(format!("{term} has more than {} variables", r + 1)));
    }
    let f = FiniteFunction::from_fn(r + 1, alg.size(), |a| term.eval(alg, a).expect("checked term"))?;
    Ok(commutator_shape(f.raw(), alg.size(), r))
}

/// Commutator terms of rank `r` among the term functions in `r + 1`
/// variables, one term per function.
pub fn commutator_term_survey(
    alg: &FiniteAlgebra,
    r: usize,
    depth_bound: Option<usize>,
    size_cap: usize,
) -> Result<CommutatorSurvey> {
    let opts = CloneOptions::clo(r + 1)
        .with_size_cap(size_cap)
        .with_depth_cap(depth_bound);
    let clone = closure(alg, opts)?;
    let q = alg.size();
    let terms = (0..clone.len())
        .filter_map(|i| {
            commutator_shape(clone.raw(i), q, r).map(|trivial| CommutatorTerm {
                term: clone.term(i).to_string(),
                rank: r,
                trivial,
            })
        })
        .collect();
    Ok(CommutatorSurvey {
        rank: r,
        depth_bound,
        explored: clone.len(),
        terms,
        capped: clone.capped(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumProbe {
    pub counts: Vec<usize>,
    pub log2: Vec<f64>,
    /// `differences[j]` is the `(j+1)`-st finite difference of `log2`.
    pub differences: Vec<Vec<f64>>,
    /// Highest order with a nonzero finite difference.
    pub degree_estimate: usize,
    /// The estimate uses the highest available order, so it is only a
    /// lower bound.
    pub saturated: bool,
}

const SPECTRUM_TOL: f64 = 1e-9;

pub fn spectrum_degree_probe(alg: &FiniteAlgebra, max_arity: usize, size_cap: usize) -> Result<SpectrumProbe> {
    let mut counts = Vec::new();
    for n in 1..=max_arity {
        let c = closure(alg, CloneOptions::clo(n).with_size_cap(size_cap))?;
        if c.capped() {
            return Err(Error::CapExceeded(format!("Clo_{n} exceeds {size_cap}")));
        }
        counts.push(c.len());
    }
    Ok(probe_counts(counts))
}

pub fn probe_counts(counts: Vec<usize>) -> SpectrumProbe {
    let log2: Vec<f64> = counts.iter().map(|&c| (c as f64).log2()).collect();
    let mut differences = Vec::new();
    let mut cur = log2.clone();
    while cur.len() > 1 {
        cur = cur.windows(2).map(|w| w[1] - w[0]).collect();
        differences.push(cur.clone());
    }
    let nonzero = |d: &Vec<f64>| d.iter().any(|x| x.abs() > SPECTRUM_TOL);
    let top = differences.iter().rposition(nonzero);
    let degree_estimate = match top {
        Some(j) => j + 1,
        None if log2.iter().any(|x| x.abs() > SPECTRUM_TOL) => 0,
        None => 0,
    };
    SpectrumProbe {
        saturated: top.is_some_and(|j| j + 1 == differences.len()),
        counts,
        log2,
        differences,
        degree_estimate,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundAbsReport {
    pub order: usize,
    pub characteristic: usize,
    pub class: usize,
    pub m: usize,
    /// `n = m(q-1)`, the window of the polynomial construction.
    pub window: usize,
    #[serde(serialize_with = "big")]
    pub bound: BigUint,
    pub arity_cap: usize,
    pub max_essential_arity: usize,
    pub within_bound: bool,
    pub absorbing_counts: Vec<usize>,
    pub capped: bool,
    pub pnl_samples: usize,
    pub pnl_violation: Option<String>,
}

impl BoundAbsReport {
    pub fn passed(&self) -> bool {
        self.within_bound && self.pnl_violation.is_none() && !self.capped
    }
}

/// Checks, up to `arity_cap`, that absorbing polynomial functions of an
/// expanded elementary abelian group of class at most `k` with extra
/// operations of arity at most `m` have essential arity at most
/// `(m(|A|-1))^(k-1)`; then spot-checks the ideal property of random
/// compositions of homovariate polynomials.
pub fn boundabs_check(
    alg: &FiniteAlgebra,
    k: usize,
    m: usize,
    arity_cap: usize,
    samples: usize,
    seed: u64,
    size_cap: usize,
) -> Result<BoundAbsReport> {
    let g = group_reduct(alg).ok_or_else(|| Error::Precondition(format!("{} has no group operation", alg.name())))?;
    let (p, _) = g
        .elementary
        .ok_or_else(|| Error::Precondition(format!("the group reduct of {} is not elementary abelian", alg.name())))?;
    let lcs = lower_central_series(alg)?;
    match lcs.class {
        Some(c) if c <= k => {}
        _ => {
            return Err(Error::Precondition(format!(
                "{} is not nilpotent of class at most {k}",
                alg.name()
            )))
        }
    }
    let others: Vec<&Operation> = g
        .others
        .iter()
        .map(|s| alg.operation(s).expect("own operation"))
        .collect();
    if m == 0 || others.iter().any(|op| op.arity > m) {
        return Err(Error::Precondition(format!(
            "an operation of {} has arity above {m}",
            alg.name()
        )));
    }
    let q = alg.size();
    let bound = bound_s(q.max(2), m, k.max(1))?;
    let mut counts = Vec::new();
    let mut max_ess = 0;
    let mut capped = false;
    for t in 1..=arity_cap {
        let survey = absorbing_survey(alg, g.zero, t, size_cap)?;
        if survey.partial {
            capped = true;
            break;
        }
        counts.push(survey.nonzero().count());
        max_ess = max_ess.max(survey.max_essential_arity());
    }
    let within_bound = BigUint::from(max_ess) <= bound;

    let window = m * (q - 1);
    let pnl_violation = if q > 1 && !others.is_empty() {
        pnl_spot_check(alg, &g, &others, &lcs.terms, k, window, samples, seed)?
    } else {
        None
    };
    Ok(BoundAbsReport {
        order: q,
        characteristic: p,
        class: k,
        m,
        window,
        bound,
        arity_cap,
        max_essential_arity: max_ess,
        within_bound,
        absorbing_counts: counts,
        capped,
        pnl_samples: if q > 1 && !others.is_empty() { samples } else { 0 },
        pnl_violation,
    })
}

/// A sampled member of `H` as a function of its own variables.
struct SampledH {
    poly: FieldPolynomial,
    vars: usize,
    table: Vec<Elem>,
}

enum Tree {
    Var(usize),
    Node(usize, Vec<Tree>),
}

impl Tree {
    fn eval(&self, hs: &[SampledH], q: usize, point: &[Elem]) -> Elem {
        match self {
            Tree::Var(v) => point[*v],
            Tree::Node(h, kids) => {
                let args: Vec<Elem> = kids.iter().map(|t| t.eval(hs, q, point)).collect();
                hs[*h].table[tuple_index(q, &args)]
            }
        }
    }

    fn show(&self, hs: &[SampledH]) -> String {
        match self {
            Tree::Var(v) => format!("x{}", v + 1),
            Tree::Node(h, kids) => {
                let inner: Vec<String> = kids.iter().map(|t| t.show(hs)).collect();
                format!("[{}]({})", hs[*h].poly, inner.join(", "))
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn pnl_spot_check(
    alg: &FiniteAlgebra,
    g: &GroupReduct,
    others: &[&Operation],
    lcs: &[crate::congruence::Congruence],
    k: usize,
    window: usize,
    samples: usize,
    seed: u64,
) -> Result<Option<String>> {
    let q = alg.size();
    let field = Arc::new(FiniteField::new(q)?);
    let add = alg.operation(&g.operation).expect("group operation");
    let group = GroupTable::from_mul(q, add.table.clone()).expect("group");
    let (_, _, coords) = group.coordinates().expect("elementary abelian");
    let p = field.characteristic();
    // additive isomorphism A -> K and back
    let to_k: Vec<Elem> = coords
        .iter()
        .map(|c| c.iter().rev().fold(0, |acc, &d| acc * p + d))
        .collect();
    let mut to_a = vec![0; q];
    for (a, &x) in to_k.iter().enumerate() {
        to_a[x] = a;
    }
    let m = others.iter().map(|op| op.arity).max().unwrap_or(1).max(1);
    let mut fs = Vec::new();
    for op in others {
        let f = FiniteFunction::from_fn(op.arity.max(1), q, |x| {
            let a: Vec<Elem> = x.iter().take(op.arity).map(|&v| to_a[v]).collect();
            to_k[op.apply(q, &a)]
        })?;
        fs.push(interpolate(&field, &f)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forms = linear_forms(&field, window);
    let mut hs: Vec<SampledH> = Vec::new();
    let mut attempts = 0;
    while hs.len() < 24 && attempts < 400 {
        attempts += 1;
        let f = &fs[rng.gen_range(0..fs.len())];
        let arity = f.max_var().max(1).min(m);
        let subs: Vec<FieldPolynomial> = (0..arity)
            .map(|_| forms[rng.gen_range(0..forms.len())].clone())
            .collect();
        let s = f.substitute(&subs)?.times(rng.gen_range(1..p as i64 + 1));
        let comps: Vec<FieldPolynomial> = s
            .components()
            .into_values()
            .filter(|c| !c.variables().is_empty())
            .collect();
        if comps.is_empty() {
            continue;
        }
        let h = comps[rng.gen_range(0..comps.len())].clone();
        let vars: Vec<usize> = h.variables().into_iter().collect();
        let renamed = h.rename(|v| vars.iter().position(|&w| w == v).expect("own variable") + 1);
        let table = renamed.induced_function(vars.len())?.values();
        if hs.iter().any(|o| o.vars == vars.len() && o.table == table) {
            continue;
        }
        hs.push(SampledH {
            poly: h,
            vars: vars.len(),
            table,
        });
    }
    if hs.is_empty() {
        return Ok(None);
    }
    let ideal = |l: usize, x: Elem| {
        let c = &lcs[l.min(lcs.len() - 1)];
        c.related(to_a[x], g.zero)
    };
    for _ in 0..samples {
        let mut next_var = 0;
        let depth = rng.gen_range(1..=4);
        let tree = random_tree(&mut rng, &hs, depth, &mut next_var);
        let v = next_var;
        // the largest l with v >= n^(l-1) + 1
        let mut l = 0;
        while l < k && v > window.pow(l as u32) {
            l += 1;
        }
        if l == 0 {
            continue;
        }
        for _ in 0..32 {
            let point: Vec<Elem> = (0..v).map(|_| rng.gen_range(0..q)).collect();
            let val = tree.eval(&hs, q, &point);
            if !ideal(l, val) {
                return Ok(Some(format!(
                    "{} with {v} variables takes a value outside A_{l} at {point:?}",
                    tree.show(&hs)
                )));
            }
        }
    }
    Ok(None)
}

fn random_tree(rng: &mut ChaCha8Rng, hs: &[SampledH], depth: usize, next_var: &mut usize) -> Tree {
    if depth == 0 {
        *next_var += 1;
        return Tree::Var(*next_var - 1);
    }
    let h = rng.gen_range(0..hs.len());
    let kids = (0..hs[h].vars)
        .map(|_| {
            let d = if rng.gen_bool(0.8) { depth - 1 } else { 0 };
            random_tree(rng, hs, d, next_var)
        })
        .collect();
    Tree::Node(h, kids)
}

/// The full bound pipeline on one algebra.
#[derive(Debug, Clone, Serialize)]
pub struct BoundPipeline {
    pub order: usize,
    pub prime_power: Option<(usize, u32)>,
    pub max_arity: usize,
    pub height: usize,
    #[serde(serialize_with = "big_opt")]
    pub bound: Option<BigUint>,
    pub corollary: Option<CorollaryBound>,
    pub expansion: ExpansionReport,
    pub expanded_m: usize,
    pub boundabs: Option<BoundAbsReport>,
    pub supernil: SupernilReport,
    pub reduct_falsifier: TcSearch,
    pub spectrum: Option<SpectrumProbe>,
    /// Spectrum estimate ≤ verified degree ≤ bound, where known.
    pub consistent: bool,
    pub warnings: Vec<String>,
}

pub fn bound_pipeline(alg: &FiniteAlgebra, zero: Elem, arity_cap: usize, size_cap: usize) -> Result<BoundPipeline> {
    let q = alg.size();
    let m = alg.max_arity().max(1);
    let height = CongruenceLattice::of(alg).height();
    let mut warnings = Vec::new();
    let pp = prime_power(q);
    if pp.is_none() {
        warnings.push(format!(
            "order {q} is not a prime power; factor the algebra before applying the bound"
        ));
    }
    let bound = bound_s(q, m, height).ok();
    let corollary = bound_cor(q, m).ok();
    let exp = expand_algebra(alg, zero, None, Some(size_cap))?;
    let v = exp.expanded.to_algebra();
    let expanded_m = m.max(2);
    let class = lower_central_series(&v)?.class.unwrap_or(0);
    let boundabs = if exp.report.elementary_abelian.is_some() && q > 1 {
        match boundabs_check(&v, class.max(1), expanded_m, arity_cap, 64, 0x5eed, size_cap) {
            Ok(r) => Some(r),
            Err(Error::CapExceeded(w)) => {
                warnings.push(w);
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        warnings.push("the expansion is not elementary abelian".into());
        None
    };
    let supernil = supernil_report(&v, arity_cap, size_cap)?;
    let degree = supernil.verified_degree.unwrap_or(arity_cap).max(1);
    let reduct_falsifier = term_condition_falsify(alg, degree, 1, 2, size_cap)?;
    let spectrum = match spectrum_degree_probe(alg, arity_cap, size_cap) {
        Ok(s) => Some(s),
        Err(Error::CapExceeded(w)) => {
            warnings.push(w);
            None
        }
        Err(e) => return Err(e),
    };
    let mut consistent = reduct_falsifier.witness.is_none();
    if let Some(d) = supernil.verified_degree {
        if let Some(s) = &spectrum {
            consistent &= s.degree_estimate <= d;
        }
        if let Some(b) = &bound {
            consistent &= BigUint::from(d) <= *b;
        }
    }
    Ok(BoundPipeline {
        order: q,
        prime_power: pp,
        max_arity: m,
        height,
        bound,
        corollary,
        expansion: exp.report,
        expanded_m,
        boundabs,
        supernil,
        reduct_falsifier,
        spectrum,
        consistent,
        warnings,
    })
}

/// Distinct essential arities among the nonzero absorbing functions.
pub fn essential_arities(survey: &AbsorbingSurvey) -> BTreeSet<usize> {
    survey.nonzero().map(|f| f.essential_arity).collect()
}
