//! Term and polynomial clones of a finite algebra, at a fixed arity.
//!
//! Functions are enumerated breadth first by depth. When the signature is a
//! group operation plus operations that are homomorphic in every argument,
//! the clone is the subgroup of `A^(A^n)` generated by a small set of
//! generators, and a much cheaper enumeration is used.

use std::collections::VecDeque;

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

use crate::algebra::{for_each_tuple, tuple_index, Elem, FiniteAlgebra, Operation};
use crate::error::Result;
use crate::function::{check_size, FiniteFunction};
use crate::term::Term;

pub const DEFAULT_SIZE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CloneOptions {
    pub arity: usize,
    /// Seed all constant functions (polynomial clone).
    pub constants: bool,
    pub size_cap: usize,
    pub depth_cap: Option<usize>,
}

impl CloneOptions {
    pub fn clo(arity: usize) -> Self {
        CloneOptions {
            arity,
            constants: false,
            size_cap: DEFAULT_SIZE_CAP,
            depth_cap: None,
        }
    }

    pub fn pol(arity: usize) -> Self {
        CloneOptions {
            constants: true,
            ..CloneOptions::clo(arity)
        }
    }

    pub fn with_size_cap(mut self, cap: usize) -> Self {
        self.size_cap = cap;
        self
    }

    pub fn with_depth_cap(mut self, cap: Option<usize>) -> Self {
        self.depth_cap = cap;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Origin {
    Var(usize),
    Const(Elem),
    Apply(usize, Vec<usize>),
    /// Pointwise product of two members under the group operation.
    Product(usize, usize),
}

/// The `n`-ary members of a clone, with a derivation for each.
#[derive(Debug, Clone)]
pub struct FunctionClone {
    arity: usize,
    size: usize,
    set: IndexSet<Box<[u8]>, FxBuildHasher>,
    origins: Vec<Origin>,
    levels: Vec<u32>,
    symbols: Vec<String>,
    group_op: Option<usize>,
    capped: bool,
    hit: Option<usize>,
}

impl FunctionClone {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    /// True when enumeration stopped at the size or depth cap before the
    /// clone was exhausted.
    pub fn capped(&self) -> bool {
        self.capped
    }

    pub fn is_accelerated(&self) -> bool {
        self.group_op.is_some()
    }

    pub fn contains(&self, f: &FiniteFunction) -> bool {
        f.arity() == self.arity && self.set.contains(f.raw())
    }

    pub fn contains_values(&self, values: &[u8]) -> bool {
        self.set.contains(values)
    }

    pub fn raw(&self, i: usize) -> &[u8] {
        &self.set[i]
    }

    pub fn function(&self, i: usize) -> FiniteFunction {
        FiniteFunction::from_raw(self.arity, self.size, self.set[i].clone())
    }

    pub fn functions(&self) -> impl Iterator<Item = FiniteFunction> + '_ {
        (0..self.len()).map(|i| self.function(i))
    }

    pub fn index_of(&self, f: &FiniteFunction) -> Option<usize> {
        self.set.get_index_of(f.raw())
    }

    /// BFS level at which member `i` was found (0 for seeds). Only
    /// meaningful for the breadth-first enumeration.
    pub fn level(&self, i: usize) -> usize {
        self.levels[i] as usize
    }

    /// Index of the member that satisfied the stop predicate, if any.
    pub fn hit(&self) -> Option<usize> {
        self.hit
    }

    /// A term (with `Const` leaves for polynomial constants) inducing member `i`.
    pub fn term(&self, i: usize) -> Term {
        match &self.origins[i] {
            Origin::Var(v) => Term::Var(*v),
            Origin::Const(c) => Term::Const(*c),
            Origin::Apply(op, args) => {
                Term::Apply(self.symbols[*op].clone(), args.iter().map(|&a| self.term(a)).collect())
            }
            Origin::Product(l, r) => Term::Apply(
                self.symbols[self.group_op.expect("product origin")].clone(),
                vec![self.term(*l), self.term(*r)],
            ),
        }
    }
}

/// `Clo_n(A)`.
pub fn clo(alg: &FiniteAlgebra, arity: usize) -> Result<FunctionClone> {
    closure(alg, CloneOptions::clo(arity))
}

/// `Pol_n(A)`.
pub fn pol(alg: &FiniteAlgebra, arity: usize) -> Result<FunctionClone> {
    closure(alg, CloneOptions::pol(arity))
}

pub fn closure(alg: &FiniteAlgebra, opts: CloneOptions) -> Result<FunctionClone> {
    closure_until(alg, opts, |_| false)
}

/// Enumerates the clone, stopping as soon as a member satisfies `stop`.
/// With a depth cap the breadth-first enumeration is used, so the first
/// hit has minimal depth.
pub fn closure_until(
    alg: &FiniteAlgebra,
    opts: CloneOptions,
    stop: impl FnMut(&[u8]) -> bool,
) -> Result<FunctionClone> {
    check_size(alg.size())?;
    if opts.depth_cap.is_none() {
        if let Some(plan) = GroupPlan::detect(alg) {
            return Ok(accelerated(alg, opts, &plan, stop));
        }
    }
    Ok(breadth_first(alg, opts, stop))
}

/// Breadth-first enumeration regardless of the signature's shape.
pub fn closure_breadth_first(
    alg: &FiniteAlgebra,
    opts: CloneOptions,
    stop: impl FnMut(&[u8]) -> bool,
) -> Result<FunctionClone> {
    check_size(alg.size())?;
    Ok(breadth_first(alg, opts, stop))
}

/// `|Clo_n(A)|` for `n = 1..=max_arity`; `None` where the cap was hit.
pub fn free_spectrum(alg: &FiniteAlgebra, max_arity: usize, size_cap: usize) -> Result<Vec<Option<usize>>> {
    (1..=max_arity)
        .map(|n| {
            let c = closure(alg, CloneOptions::clo(n).with_size_cap(size_cap))?;
            Ok(if c.capped() { None } else { Some(c.len()) })
        })
        .collect()
}

struct Builder {
    size: usize,
    len: usize,
    set: IndexSet<Box<[u8]>, FxBuildHasher>,
    origins: Vec<Origin>,
    levels: Vec<u32>,
}

impl Builder {
    fn new(size: usize, arity: usize) -> Self {
        Builder {
            size,
            len: size.pow(arity as u32),
            set: IndexSet::default(),
            origins: Vec::new(),
            levels: Vec::new(),
        }
    }

    fn insert(&mut self, values: Box<[u8]>, origin: Origin, level: u32) -> Option<usize> {
        let (i, fresh) = self.set.insert_full(values);
        if fresh {
            self.origins.push(origin);
            self.levels.push(level);
            Some(i)
        } else {
            None
        }
    }

    fn seed(&mut self, alg: &FiniteAlgebra, opts: &CloneOptions) -> Vec<usize> {
        let n = opts.arity;
        let mut fresh = Vec::new();
        for v in 0..n {
            let f = FiniteFunction::projection(n, self.size, v);
            fresh.extend(self.insert(f.raw().into(), Origin::Var(v), 0));
        }
        if opts.constants {
            for c in 0..self.size {
                let values = vec![c as u8; self.len].into_boxed_slice();
                fresh.extend(self.insert(values, Origin::Const(c), 0));
            }
        }
        for (k, op) in alg.operations().iter().enumerate() {
            if op.arity == 0 {
                let values = vec![op.table[0] as u8; self.len].into_boxed_slice();
                fresh.extend(self.insert(values, Origin::Apply(k, vec![]), 0));
            }
        }
        fresh
    }

    fn apply(&self, op: &Operation, args: &[usize]) -> Box<[u8]> {
        let mut out = Vec::with_capacity(self.len);
        self.apply_into(op, args, &mut out);
        out.into_boxed_slice()
    }

    fn apply_into(&self, op: &Operation, args: &[usize], out: &mut Vec<u8>) {
        let t = &op.table;
        out.clear();
        match *args {
            [a] => out.extend(self.set[a].iter().map(|&x| t[x as usize] as u8)),
            [a, b] => {
                let n = self.size;
                out.extend(
                    self.set[a]
                        .iter()
                        .zip(self.set[b].iter())
                        .map(|(&x, &y)| t[x as usize * n + y as usize] as u8),
                );
            }
            _ => out.extend(self.apply_general(op, args).iter()),
        }
    }

    fn apply_general(&self, op: &Operation, args: &[usize]) -> Box<[u8]> {
        let mut buf = vec![0; args.len()];
        (0..self.len)
            .map(|i| {
                for (b, &a) in buf.iter_mut().zip(args) {
                    *b = self.set[a][i] as Elem;
                }
                op.table[tuple_index(self.size, &buf)] as u8
            })
            .collect()
    }

    fn finish(
        self,
        alg: &FiniteAlgebra,
        arity: usize,
        group_op: Option<usize>,
        capped: bool,
        hit: Option<usize>,
    ) -> FunctionClone {
        FunctionClone {
            arity,
            size: self.size,
            set: self.set,
            origins: self.origins,
            levels: self.levels,
            symbols: alg.operations().iter().map(|o| o.symbol.clone()).collect(),
            group_op,
            capped,
            hit,
        }
    }
}

/// Calls `f` on every `k`-tuple over `[0, end)` that has at least one entry
/// in `[start, end)`, each exactly once. Stops early when `f` returns false,
/// in which case the result is false.
pub(crate) fn for_each_new_tuple(k: usize, start: usize, end: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if end <= start || k == 0 {
        return true;
    }
    let mut t = vec![0; k];
    for first_new in 0..k {
        if start == 0 && first_new > 0 {
            break;
        }
        // before `first_new` old, at `first_new` new, after it anything
        let lo = |p: usize| if p == first_new { start } else { 0 };
        let hi = |p: usize| if p < first_new { start } else { end };
        for (p, slot) in t.iter_mut().enumerate() {
            *slot = lo(p);
        }
        'odometer: loop {
            if !f(&t) {
                return false;
            }
            let mut p = k;
            loop {
                if p == 0 {
                    break 'odometer;
                }
                p -= 1;
                t[p] += 1;
                if t[p] < hi(p) {
                    break;
                }
                t[p] = lo(p);
            }
        }
    }
    true
}

fn breadth_first(alg: &FiniteAlgebra, opts: CloneOptions, mut stop: impl FnMut(&[u8]) -> bool) -> FunctionClone {
    let mut b = Builder::new(alg.size(), opts.arity);
    let seeds = b.seed(alg, &opts);
    for &i in &seeds {
        if stop(&b.set[i]) {
            return b.finish(alg, opts.arity, None, false, Some(i));
        }
    }
    if b.set.len() > opts.size_cap {
        return b.finish(alg, opts.arity, None, true, None);
    }
    let mut start = 0;
    let mut level = 0u32;
    loop {
        let end = b.set.len();
        if start == end {
            return b.finish(alg, opts.arity, None, false, None);
        }
        if opts.depth_cap.is_some_and(|d| level as usize >= d) {
            // the next level might still add members
            return b.finish(alg, opts.arity, None, true, None);
        }
        level += 1;
        let mut hit = None;
        let mut capped = false;
        for (k, op) in alg.operations().iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            let mut buf = Vec::with_capacity(b.len);
            let done = for_each_new_tuple(op.arity, start, end, |args| {
                b.apply_into(op, args, &mut buf);
                if b.set.contains(&buf[..]) {
                    return true;
                }
                if let Some(i) = b.insert(buf[..].into(), Origin::Apply(k, args.to_vec()), level) {
                    if stop(&b.set[i]) {
                        hit = Some(i);
                        return false;
                    }
                    if b.set.len() > opts.size_cap {
                        capped = true;
                        return false;
                    }
                }
                true
            });
            if !done {
                return b.finish(alg, opts.arity, None, capped, hit);
            }
        }
        start = end;
    }
}

/// How to enumerate a clone generated by a group operation together with
/// operations that are homomorphic in each argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPlan {
    pub group_op: usize,
    pub identity: Elem,
    pub homomorphic: Vec<usize>,
}

impl GroupPlan {
    pub fn detect(alg: &FiniteAlgebra) -> Option<GroupPlan> {
        let n = alg.size();
        let ops = alg.operations();
        'candidates: for (g, op) in ops.iter().enumerate() {
            if op.arity != 2 {
                continue;
            }
            let Some((identity, inverse)) = group_structure(n, &op.table) else {
                continue;
            };
            let mut homomorphic = Vec::new();
            for (k, other) in ops.iter().enumerate() {
                if k == g || other.arity == 0 || other.table == op.table {
                    continue;
                }
                if other.arity == 1 && other.table == inverse {
                    continue;
                }
                if !homomorphic_in_each_argument(n, &op.table, other) {
                    continue 'candidates;
                }
                homomorphic.push(k);
            }
            return Some(GroupPlan {
                group_op: g,
                identity,
                homomorphic,
            });
        }
        None
    }
}

/// Identity and inverse map if `table` is a group operation on `{0..n-1}`.
pub fn group_structure(n: usize, table: &[Elem]) -> Option<(Elem, Vec<Elem>)> {
    let m = |a: Elem, b: Elem| table[a * n + b];
    let e = (0..n).find(|&e| (0..n).all(|a| m(e, a) == a && m(a, e) == a))?;
    let mut inv = vec![0; n];
    for (a, slot) in inv.iter_mut().enumerate() {
        *slot = (0..n).find(|&b| m(a, b) == e && m(b, a) == e)?;
    }
    for a in 0..n {
        for b in 0..n {
            let ab = m(a, b);
            for c in 0..n {
                if m(ab, c) != m(a, m(b, c)) {
                    return None;
                }
            }
        }
    }
    Some((e, inv))
}

fn homomorphic_in_each_argument(n: usize, group: &[Elem], op: &Operation) -> bool {
    let m = |a: Elem, b: Elem| group[a * n + b];
    let k = op.arity;
    let mut rest = vec![0; k - 1];
    let mut args = vec![0; k];
    for pos in 0..k {
        let mut ok = true;
        for_each_tuple(n, &mut rest, |r| {
            if !ok {
                return;
            }
            let mut at = |x: Elem| {
                args[..pos].copy_from_slice(&r[..pos]);
                args[pos] = x;
                args[pos + 1..].copy_from_slice(&r[pos..]);
                op.apply(n, &args)
            };
            let image: Vec<Elem> = (0..n).map(&mut at).collect();
            for x in 0..n {
                for y in 0..n {
                    if image[m(x, y)] != m(image[x], image[y]) {
                        ok = false;
                        return;
                    }
                }
            }
        });
        if !ok {
            return false;
        }
    }
    true
}

fn accelerated(
    alg: &FiniteAlgebra,
    opts: CloneOptions,
    plan: &GroupPlan,
    mut stop: impl FnMut(&[u8]) -> bool,
) -> FunctionClone {
    let mut b = Builder::new(alg.size(), opts.arity);
    let group = &alg.operations()[plan.group_op];
    let finish = |b: Builder, capped, hit| b.finish(alg, opts.arity, Some(plan.group_op), capped, hit);

    // Members are the nonempty products of generators. After a generator is
    // absorbed the set is closed under right multiplication by every
    // absorbed generator.
    let mut pending: VecDeque<usize> = b.seed(alg, &opts).into();
    for &i in &pending {
        if stop(&b.set[i]) {
            return finish(b, false, Some(i));
        }
    }
    let mut gens: Vec<usize> = Vec::new();
    let mut processed = 0;
    loop {
        while let Some(g) = pending.pop_front() {
            gens.push(g);
            let mut frontier = vec![g];
            for h in 0..b.set.len() {
                let values = b.apply(group, &[h, g]);
                frontier.extend(b.insert(values, Origin::Product(h, g), 0));
            }
            let mut at = 0;
            while at < frontier.len() {
                let x = frontier[at];
                at += 1;
                if x != g && stop(&b.set[x]) {
                    return finish(b, false, Some(x));
                }
                if b.set.len() > opts.size_cap {
                    return finish(b, true, None);
                }
                for &s in &gens {
                    let values = b.apply(group, &[x, s]);
                    frontier.extend(b.insert(values, Origin::Product(x, s), 0));
                }
            }
        }
        if processed == gens.len() {
            return finish(b, false, None);
        }
        // images of generator tuples that involve generator number `t`
        let t = processed;
        processed += 1;
        for &k in &plan.homomorphic {
            let op = &alg.operations()[k];
            let mut fresh = Vec::new();
            for_each_new_tuple(op.arity, t, t + 1, |idx| {
                let args: Vec<usize> = idx.iter().map(|&j| gens[j]).collect();
                let values = b.apply(op, &args);
                if !b.set.contains(&values) {
                    fresh.push((values, args));
                }
                true
            });
            for (values, args) in fresh {
                if let Some(i) = b.insert(values, Origin::Apply(k, args), 0) {
                    if stop(&b.set[i]) {
                        return finish(b, false, Some(i));
                    }
                    pending.push_back(i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn sizes(alg: &FiniteAlgebra, constants: bool, n: usize) -> (usize, usize) {
        let opts = CloneOptions {
            constants,
            ..CloneOptions::clo(n)
        };
        let fast = closure(alg, opts).unwrap();
        let slow = closure_breadth_first(alg, opts, |_| false).unwrap();
        (fast.len(), slow.len())
    }

    #[test]
    fn new_tuples_partition() {
        let mut seen = Vec::new();
        for_each_new_tuple(2, 2, 4, |t| {
            seen.push((t[0], t[1]));
            true
        });
        seen.sort();
        let expected: Vec<_> = (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .filter(|&(a, b)| a >= 2 || b >= 2)
            .collect();
        assert_eq!(seen, expected);
        let mut count = 0;
        for_each_new_tuple(3, 0, 3, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 27);
    }

    #[test]
    fn z4_term_functions_are_linear() {
        // x -> k x for k in Z4, then sums of such
        assert_eq!(clo(&fixtures::z4(), 1).unwrap().len(), 4);
        assert_eq!(clo(&fixtures::z4(), 2).unwrap().len(), 16);
        assert_eq!(pol(&fixtures::z4(), 1).unwrap().len(), 16);
    }

    #[test]
    fn m_clone_sizes() {
        let m = fixtures::m_ring();
        for (n, bits) in [(1, 2), (2, 5), (3, 9)] {
            let (fast, slow) = sizes(&m, false, n);
            assert_eq!(fast, 1 << bits);
            assert_eq!(slow, 1 << bits);
        }
        assert_eq!(pol(&m, 2).unwrap().len(), 1 << 7);
    }

    #[test]
    fn accelerated_agrees_on_groups() {
        for alg in [fixtures::d4(), fixtures::q8(), fixtures::z2xz2()] {
            assert!(GroupPlan::detect(&alg).is_some());
            for (constants, n) in [(false, 1), (false, 2), (true, 1)] {
                let (fast, slow) = sizes(&alg, constants, n);
                assert_eq!(fast, slow, "{}", alg.name());
            }
        }
    }

    #[test]
    fn lattices_are_not_accelerated() {
        let l = fixtures::lattice2();
        assert!(GroupPlan::detect(&l).is_none());
        // 2-ary lattice terms on 2 elements: x, y, x meet y, x join y
        assert_eq!(clo(&l, 2).unwrap().len(), 4);
    }

    #[test]
    fn terms_reproduce_members() {
        let m = fixtures::m_ring();
        for c in [
            clo(&m, 2).unwrap(),
            closure_breadth_first(&m, CloneOptions::pol(2), |_| false).unwrap(),
        ] {
            for i in 0..c.len() {
                let t = c.term(i);
                let f = c.function(i);
                for a in 0..4 {
                    for b in 0..4 {
                        assert_eq!(t.eval(&m, &[a, b]).unwrap(), f.eval(&[a, b]));
                    }
                }
            }
        }
    }

    #[test]
    fn caps_are_reported() {
        let c = closure(&fixtures::m_ring(), CloneOptions::clo(3).with_size_cap(100)).unwrap();
        assert!(c.capped());
        let d = closure(&fixtures::lattice2(), CloneOptions::clo(3).with_depth_cap(Some(1))).unwrap();
        assert!(d.capped());
    }

    #[test]
    fn stop_predicate_finds_minimal_depth() {
        let z4 = fixtures::z4();
        let target = FiniteFunction::from_fn(2, 4, |a| (a[0] + a[1]) % 4).unwrap();
        let c = closure_breadth_first(&z4, CloneOptions::clo(2), |v| v == target.raw()).unwrap();
        let hit = c.hit().unwrap();
        assert_eq!(c.level(hit), 1);
        assert_eq!(c.term(hit).to_string(), "(mul x0 x1)");
    }
}
