//! Independent oracles shared by the integration tests. None of them call
//! into the closure, congruence or commutator code of the crate.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ualg::{Congruence, FiniteAlgebra, Operation};

pub fn index(size: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

pub fn all_tuples(size: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..size).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// Naive fixed point: apply every operation to every tuple of known
/// functions until nothing new appears.
pub fn closure_oracle(alg: &FiniteAlgebra, n: usize, constants: bool) -> HashSet<Vec<usize>> {
    let q = alg.size();
    let points = all_tuples(q, n);
    let mut set: Vec<Vec<usize>> = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |v: Vec<usize>, set: &mut Vec<Vec<usize>>| {
        if seen.insert(v.clone()) {
            set.push(v);
        }
    };
    for i in 0..n {
        push(points.iter().map(|p| p[i]).collect(), &mut set);
    }
    if constants {
        for c in 0..q {
            push(vec![c; points.len()], &mut set);
        }
    }
    loop {
        let before = set.len();
        for op in alg.operations() {
            let current = set.clone();
            if current.is_empty() && op.arity > 0 {
                continue;
            }
            let mut args = vec![0; op.arity];
            let mut a = vec![0; op.arity];
            loop {
                let v = (0..points.len())
                    .map(|i| {
                        for (slot, &j) in a.iter_mut().zip(&args) {
                            *slot = current[j][i];
                        }
                        op.table[index(q, &a)]
                    })
                    .collect();
                push(v, &mut set);
                // odometer over argument indices
                let mut k = op.arity;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    args[k] += 1;
                    if args[k] < current.len() {
                        break;
                    }
                    args[k] = 0;
                }
                if args.iter().all(|&x| x == 0) {
                    break;
                }
            }
        }
        if set.len() == before {
            return set.into_iter().collect();
        }
    }
}

pub fn is_compatible(alg: &FiniteAlgebra, labels: &[usize]) -> bool {
    let q = alg.size();
    alg.operations().iter().all(|op| {
        let tuples = all_tuples(q, op.arity);
        tuples.iter().all(|a| {
            tuples.iter().all(|b| {
                let related = a.iter().zip(b).all(|(x, y)| labels[*x] == labels[*y]);
                !related || labels[op.table[index(q, a)]] == labels[op.table[index(q, b)]]
            })
        })
    })
}

/// Every congruence, found by scanning all set partitions.
pub fn congruences_oracle(alg: &FiniteAlgebra) -> BTreeSet<Congruence> {
    let q = alg.size();
    let mut out = BTreeSet::new();
    // restricted growth strings enumerate each partition once
    fn rgs(q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        let max = cur.iter().copied().max().map_or(0, |m| m + 1);
        for l in 0..=max {
            cur.push(l);
            rgs(q, cur, out);
            cur.pop();
        }
    }
    let mut parts = Vec::new();
    rgs(q, &mut Vec::new(), &mut parts);
    for labels in parts {
        if is_compatible(alg, &labels) {
            out.insert(Congruence::from_labels(&labels));
        }
    }
    out
}

fn generated_equivalence(q: usize, pairs: &HashSet<(usize, usize)>) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..q).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in pairs {
            let (la, lb) = (labels[a], labels[b]);
            if la != lb {
                let (keep, drop) = (la.min(lb), la.max(lb));
                for l in labels.iter_mut() {
                    if *l == drop {
                        *l = keep;
                    }
                }
                changed = true;
            }
        }
    }
    labels
}

/// Least congruence containing `pairs`, by repeated unary closure.
pub fn cg_oracle(alg: &FiniteAlgebra, pairs: &HashSet<(usize, usize)>) -> Vec<usize> {
    let q = alg.size();
    let mut labels = generated_equivalence(q, pairs);
    loop {
        let mut rel: HashSet<(usize, usize)> = HashSet::new();
        for a in 0..q {
            for b in 0..q {
                if labels[a] == labels[b] {
                    rel.insert((a, b));
                }
            }
        }
        let snapshot: Vec<(usize, usize)> = rel.iter().copied().collect();
        for op in alg.operations() {
            for args in all_tuples(q, op.arity) {
                for pos in 0..op.arity {
                    for &(a, b) in &snapshot {
                        if args[pos] != a {
                            continue;
                        }
                        let mut other = args.clone();
                        other[pos] = b;
                        rel.insert((op.table[index(q, &args)], op.table[index(q, &other)]));
                    }
                }
            }
        }
        let next = generated_equivalence(q, &rel);
        if Congruence::from_labels(&next) == Congruence::from_labels(&labels) {
            return labels;
        }
        labels = next;
    }
}

/// The term-condition commutator `[alpha, beta]`: the least `delta` such
/// that every 2x2 matrix `[[t(a,c), t(a,d)], [t(b,c), t(b,d)]]` with
/// `a alpha b` and `c beta d` (tuples) satisfies
/// `t(a,c) delta t(a,d) => t(b,c) delta t(b,d)`. The matrices form the
/// subalgebra of `A^4` generated by `(a,a,b,b)` and `(c,d,c,d)`.
pub fn tc_commutator(alg: &FiniteAlgebra, alpha: &Congruence, beta: &Congruence) -> Congruence {
    let q = alg.size();
    let mut mats: Vec<[usize; 4]> = Vec::new();
    let mut seen = HashSet::new();
    for a in 0..q {
        for b in 0..q {
            if alpha.related(a, b) {
                let m = [a, a, b, b];
                if seen.insert(m) {
                    mats.push(m);
                }
            }
            if beta.related(a, b) {
                let m = [a, b, a, b];
                if seen.insert(m) {
                    mats.push(m);
                }
            }
        }
    }
    loop {
        let before = mats.len();
        for op in alg.operations() {
            let current = mats.clone();
            for args in all_tuples(current.len(), op.arity) {
                let mut m = [0; 4];
                for (k, slot) in m.iter_mut().enumerate() {
                    let a: Vec<usize> = args.iter().map(|&j| current[j][k]).collect();
                    *slot = op.table[index(q, &a)];
                }
                if seen.insert(m) {
                    mats.push(m);
                }
            }
        }
        if mats.len() == before {
            break;
        }
    }
    let mut delta: HashSet<(usize, usize)> = HashSet::new();
    loop {
        let labels = cg_oracle(alg, &delta);
        let mut grew = false;
        for m in &mats {
            if labels[m[0]] == labels[m[1]] && labels[m[2]] != labels[m[3]] {
                grew |= delta.insert((m[2], m[3]));
            }
        }
        if !grew {
            return Congruence::from_labels(&labels);
        }
    }
}

/// A random algebra on `{0,1,2}` with a Mal'cev operation `d` and a binary
/// operation `b`. With `compatible`, both preserve the partition `{0,1|2}`.
pub fn random_malcev_groupoid(rng: &mut ChaCha8Rng, compatible: bool, tag: usize) -> FiniteAlgebra {
    let q = 3;
    let block = |x: usize| usize::from(x == 2);
    let members = |blk: usize| if blk == 0 { vec![0, 1] } else { vec![2] };
    // on the two-element quotient, d(x,y,x) is free for x != y
    let quotient_d: Vec<usize> = {
        let free = [rng.gen_range(0..2), rng.gen_range(0..2)];
        all_tuples(2, 3)
            .iter()
            .map(|t| {
                if t[1] == t[2] {
                    t[0]
                } else if t[0] == t[1] {
                    t[2]
                } else {
                    free[t[0]]
                }
            })
            .collect()
    };
    let quotient_b: Vec<usize> = (0..4).map(|_| rng.gen_range(0..2)).collect();
    let pick = |blk: usize, rng: &mut ChaCha8Rng| {
        if compatible {
            let m = members(blk);
            m[rng.gen_range(0..m.len())]
        } else {
            rng.gen_range(0..q)
        }
    };
    let d: Vec<usize> = all_tuples(q, 3)
        .iter()
        .map(|t| {
            if t[1] == t[2] {
                t[0]
            } else if t[0] == t[1] {
                t[2]
            } else {
                let blk = quotient_d[index(2, &[block(t[0]), block(t[1]), block(t[2])])];
                pick(blk, rng)
            }
        })
        .collect();
    let b: Vec<usize> = all_tuples(q, 2)
        .iter()
        .map(|t| pick(quotient_b[index(2, &[block(t[0]), block(t[1])])], rng))
        .collect();
    FiniteAlgebra::new(
        format!("random{tag}"),
        q,
        vec![Operation::new("d", 3, d), Operation::new("b", 2, b)],
    )
    .expect("valid tables")
}

/// Normal subgroup generated by `gens` in the group with table `mul`.
pub fn normal_closure(n: usize, mul: &[usize], gens: &[usize]) -> BTreeSet<usize> {
    let m = |a: usize, b: usize| mul[a * n + b];
    let e = (0..n).find(|&e| (0..n).all(|a| m(e, a) == a)).expect("identity");
    let inv = |a: usize| (0..n).find(|&b| m(a, b) == e).expect("inverse");
    let mut set: BTreeSet<usize> = gens.iter().copied().collect();
    set.insert(e);
    loop {
        let before = set.len();
        let cur: Vec<usize> = set.iter().copied().collect();
        for &x in &cur {
            for &y in &cur {
                set.insert(m(x, y));
            }
            for g in 0..n {
                set.insert(m(m(inv(g), x), g));
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

/// `[G, N]` as a subgroup, from commutators `g^-1 h^-1 g h`.
pub fn group_commutator(n: usize, mul: &[usize], normal: &BTreeSet<usize>) -> BTreeSet<usize> {
    let m = |a: usize, b: usize| mul[a * n + b];
    let e = (0..n).find(|&e| (0..n).all(|a| m(e, a) == a)).expect("identity");
    let inv = |a: usize| (0..n).find(|&b| m(a, b) == e).expect("inverse");
    let comms: Vec<usize> = (0..n)
        .flat_map(|g| normal.iter().map(move |&h| (g, h)))
        .map(|(g, h)| m(m(inv(g), inv(h)), m(g, h)))
        .collect();
    normal_closure(n, mul, &comms)
}

/// The coset partition of a normal subgroup.
pub fn coset_congruence(n: usize, mul: &[usize], sub: &BTreeSet<usize>) -> Congruence {
    let labels: Vec<usize> = (0..n)
        .map(|a| sub.iter().map(|&h| mul[a * n + h]).min().expect("nonempty"))
        .collect();
    Congruence::from_labels(&labels)
}

/// Whether `table` is an abelian group of prime exponent `p` on `0..n`.
pub fn is_elementary_abelian(n: usize, table: &[usize], p: usize) -> bool {
    let m = |a: usize, b: usize| table[a * n + b];
    let Some(e) = (0..n).find(|&e| (0..n).all(|a| m(e, a) == a && m(a, e) == a)) else {
        return false;
    };
    let assoc = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| m(m(a, b), c) == m(a, m(b, c)))));
    let comm = (0..n).all(|a| (0..n).all(|b| m(a, b) == m(b, a)));
    let inverses = (0..n).all(|a| (0..n).any(|b| m(a, b) == e));
    let exponent = (0..n).all(|a| (1..p).fold(a, |x, _| m(x, a)) == e);
    assoc && comm && inverses && exponent
}
