mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ualg::clone::DEFAULT_SIZE_CAP;
use ualg::field::FiniteField;
use ualg::malcev::block_group;
use ualg::poly::{interpolate, FieldPolynomial, Monomial};
use ualg::polyclone::{set_product, PolySet, DEFAULT_POLY_CAP};
use ualg::supernil::{absorbing_survey, bound_cor, commutator_term_survey, is_absorbing};
use ualg::{
    bound_s, clo, closure, commutator, congruence::centrality_check, expand_algebra, find_malcev_term, fixtures, pol,
    CloneOptions, Congruence, CongruenceLattice, FiniteAlgebra, FiniteFunction, MalcevSearch,
};

const ORDERS: [usize; 7] = [2, 3, 4, 5, 7, 8, 9];

fn field(q: usize) -> Arc<FiniteField> {
    Arc::new(FiniteField::new(q).unwrap())
}

fn random_poly(rng: &mut ChaCha8Rng, f: &Arc<FiniteField>, vars: usize, terms: usize, max_exp: u32) -> FieldPolynomial {
    let q = f.order();
    FieldPolynomial::from_terms(
        f,
        (0..terms).map(|_| {
            let exps: Vec<(usize, u32)> = (1..=vars).map(|v| (v, rng.gen_range(0..=max_exp))).collect();
            (Monomial::from_exponents(exps), rng.gen_range(0..q))
        }),
    )
}

fn random_point(rng: &mut ChaCha8Rng, q: usize, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..q)).collect()
}

fn groupoid(seed: u64, compatible: bool) -> FiniteAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common::random_malcev_groupoid(&mut rng, compatible, seed as usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_laws(qi in 0..ORDERS.len(), a in 0usize..9, b in 0usize..9, c in 0usize..9) {
        let f = field(ORDERS[qi]);
        let q = f.order();
        let (a, b, c) = (a % q, b % q, c % q);
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.pow(a, q as u64), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(qi in 0..ORDERS.len(), seed: u64) {
        let f = field(ORDERS[qi]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poly(&mut rng, &f, 3, 4, 4);
        let r = random_poly(&mut rng, &f, 3, 4, 4);
        let x = random_point(&mut rng, f.order(), 3);
        prop_assert_eq!(p.add(&r).unwrap().eval(&x), f.add(p.eval(&x), r.eval(&x)));
        prop_assert_eq!(p.mul(&r).unwrap().eval(&x), f.mul(p.eval(&x), r.eval(&x)));
        prop_assert_eq!(p.sub(&p).unwrap(), FieldPolynomial::zero(&f));
    }

    #[test]
    fn substitution_commutes_with_evaluation(qi in 0..ORDERS.len(), seed: u64) {
        let f = field(ORDERS[qi]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poly(&mut rng, &f, 2, 3, 3);
        let subs: Vec<FieldPolynomial> = (0..2).map(|_| random_poly(&mut rng, &f, 3, 3, 2)).collect();
        let x = random_point(&mut rng, f.order(), 3);
        let inner: Vec<usize> = subs.iter().map(|s| s.eval(&x)).collect();
        prop_assert_eq!(p.substitute(&subs).unwrap().eval(&x), p.eval(&inner));
    }

    #[test]
    fn homovariate_components_sum_to_the_polynomial(qi in 0..ORDERS.len(), seed: u64) {
        let f = field(ORDERS[qi]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poly(&mut rng, &f, 4, 6, 3);
        let mut sum = FieldPolynomial::zero(&f);
        for (vars, c) in p.components() {
            prop_assert!(c.is_homovariate());
            prop_assert_eq!(c.variables(), vars.clone());
            prop_assert_eq!(&c, &p.component(&vars));
            sum = sum.add(&c).unwrap();
        }
        prop_assert_eq!(sum, p);
    }

    #[test]
    fn interpolation_round_trip(qi in 0..5usize, arity in 0usize..3, seed: u64) {
        let f = field(ORDERS[qi]);
        let q = f.order();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<usize> = (0..q.pow(arity as u32)).map(|_| rng.gen_range(0..q)).collect();
        let func = FiniteFunction::new(arity, q, values).unwrap();
        let p = interpolate(&f, &func).unwrap();
        prop_assert!(p.terms().keys().all(|m| m.exponents().values().all(|&e| (e as usize) < q)));
        prop_assert_eq!(p.induced_function(arity).unwrap(), func);
    }

    #[test]
    fn set_products_associate_one_way(seed: u64) {
        let f = field(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = |tag: &str, n: usize| {
            let polys: Vec<FieldPolynomial> = (0..n).map(|_| random_poly(&mut rng, &f, 2, 2, 1)).collect();
            PolySet::new(&f, tag, polys).unwrap()
        };
        let a = set("A", 2);
        let b = set("B", 2);
        let c = set("C", 2);
        let left = set_product(&set_product(&a, &b, DEFAULT_POLY_CAP).unwrap(), &c, DEFAULT_POLY_CAP).unwrap();
        let right = set_product(&a, &set_product(&b, &c, DEFAULT_POLY_CAP).unwrap(), DEFAULT_POLY_CAP).unwrap();
        prop_assert!(left.is_subset(&right), "{:?} not within {:?}", left.elements(), right.elements());
    }

    #[test]
    fn corollary_and_main_bounds_are_monotone(q in 2usize..9, m in 1usize..4, h in 1usize..5) {
        let s = bound_s(q, m, h).unwrap();
        prop_assert!(s <= bound_s(q, m, h + 1).unwrap());
        prop_assert!(s <= bound_s(q, m + 1, h).unwrap());
        prop_assert!(s >= BigUint::from(1u32));
        let cor = bound_cor(q, m).unwrap();
        prop_assert!(cor.value <= bound_cor(q + 1, m).unwrap().value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn commutator_is_symmetric_monotone_and_below_the_meet(seed: u64, compatible: bool) {
        let alg = groupoid(seed, compatible);
        let lattice = CongruenceLattice::of(&alg);
        let cons = lattice.elements();
        for a in cons {
            for b in cons {
                let c = commutator(&alg, a, b).unwrap();
                prop_assert_eq!(&c, &commutator(&alg, b, a).unwrap());
                prop_assert!(c.leq(&a.meet(b)));
                for a2 in cons.iter().filter(|a2| a.leq(a2)) {
                    prop_assert!(c.leq(&commutator(&alg, a2, b).unwrap()));
                }
            }
        }
    }

    #[test]
    fn commutator_matches_the_term_condition(seed: u64, compatible: bool) {
        let alg = groupoid(seed, compatible);
        let lattice = CongruenceLattice::of(&alg);
        for a in lattice.elements() {
            for b in lattice.elements() {
                prop_assert_eq!(commutator(&alg, a, b).unwrap(), common::tc_commutator(&alg, a, b));
            }
        }
    }

    #[test]
    fn relational_centrality_agrees_with_the_commutator(seed: u64, compatible: bool) {
        let alg = groupoid(seed, compatible);
        let d = ualg::Term::parse("(d x0 x1 x2)").unwrap();
        let one = Congruence::one(alg.size());
        for z in CongruenceLattice::of(&alg).elements() {
            let central = commutator(&alg, z, &one).unwrap().is_zero();
            prop_assert_eq!(centrality_check(&alg, z, &d).unwrap(), central);
        }
    }

    #[test]
    fn abelian_blocks_form_abelian_groups(seed: u64, compatible: bool) {
        let alg = groupoid(seed, compatible);
        let d = match find_malcev_term(&alg, None, None).unwrap() {
            MalcevSearch::Found { witness, .. } => witness,
            other => panic!("no Mal'cev term: {other:?}"),
        };
        let lattice = CongruenceLattice::of(&alg);
        for a in lattice.elements().iter().filter(|a| commutator(&alg, a, a).unwrap().is_zero()) {
            let minimal = !a.is_zero() && lattice.elements().iter().all(|b| b == a || b.is_zero() || !b.leq(a));
            for o in 0..alg.size() {
                let g = block_group(&alg, &d, o, a).unwrap();
                prop_assert!(g.is_abelian());
                prop_assert_eq!(g.size(), a.block_of(o).len());
                if minimal && g.size() > 1 {
                    prop_assert!(ualg::group::is_prime(g.exponent()), "exponent {}", g.exponent());
                }
            }
        }
    }

    #[test]
    fn unary_clone_matches_the_naive_closure(seed: u64, compatible: bool) {
        let alg = groupoid(seed, compatible);
        let c = clo(&alg, 1).unwrap();
        let naive = common::closure_oracle(&alg, 1, false);
        prop_assert_eq!(c.len(), naive.len());
        prop_assert!(naive.iter().all(|v| c.contains_values(&v.iter().map(|&x| x as u8).collect::<Vec<_>>())));
        prop_assert!(c.functions().all(|f| pol(&alg, 1).unwrap().contains(&f)));
    }
}

#[test]
fn clones_sit_inside_polynomial_clones_and_cylindrify() {
    for (name, alg) in fixtures::all().into_iter().filter(|(_, a)| a.size() <= 4) {
        let c1 = clo(&alg, 1).unwrap();
        let c2 = clo(&alg, 2).unwrap();
        let p2 = pol(&alg, 2).unwrap();
        assert!(c2.functions().all(|f| p2.contains(&f)), "{name}");
        assert!(c1.functions().all(|f| c2.contains(&f.cylindrify(2))), "{name}");
        assert_eq!(c2.len(), common::closure_oracle(&alg, 2, false).len(), "{name}");
        assert_eq!(p2.len(), common::closure_oracle(&alg, 2, true).len(), "{name}");
        // adding members of the clone as operations changes nothing
        let extra = c2
            .functions()
            .enumerate()
            .map(|(i, f)| ualg::Operation::new(format!("c{i}"), 2, f.values()));
        let bigger = alg.expand("bigger", extra.collect()).unwrap();
        assert_eq!(clo(&bigger, 2).unwrap().len(), c2.len(), "{name}");
    }
}

/// The nonzero absorbing polynomial functions of a reduct are among those
/// of the algebra, so supernilpotency passes down.
#[test]
fn absorbing_functions_pass_to_reducts() {
    for alg in [fixtures::z4(), fixtures::m_ring()] {
        let v = expand_algebra(&alg, 0, None, None).unwrap().expanded.to_algebra();
        for arity in 1..=2 {
            let of_v = absorbing_survey(&v, 0, arity, DEFAULT_SIZE_CAP).unwrap();
            let of_a = absorbing_survey(&alg, 0, arity, DEFAULT_SIZE_CAP).unwrap();
            let vs: BTreeSet<&Vec<usize>> = of_v.functions.iter().map(|f| &f.values).collect();
            assert!(
                of_a.functions.iter().all(|f| vs.contains(&f.values)),
                "{} arity {arity}",
                alg.name()
            );
            assert!(of_a.functions.len() <= of_v.functions.len());
        }
    }
}

/// A binary polynomial vanishing on both axes maps `0/ξ × 0/η` into
/// `0/[ξ, η]`.
#[test]
fn absorbing_binary_polynomials_land_in_the_commutator_ideal() {
    for alg in [fixtures::z4(), fixtures::m_ring(), fixtures::z2xz2()] {
        let v = expand_algebra(&alg, 0, None, None).unwrap().expanded.to_algebra();
        let survey = absorbing_survey(&v, 0, 2, DEFAULT_SIZE_CAP).unwrap();
        assert!(!survey.partial);
        let lattice = CongruenceLattice::of(&v);
        let n = v.size();
        for xi in lattice.elements() {
            for eta in lattice.elements() {
                let c = commutator(&v, xi, eta).unwrap();
                for f in &survey.functions {
                    for x in (0..n).filter(|&x| xi.related(x, 0)) {
                        for y in (0..n).filter(|&y| eta.related(y, 0)) {
                            assert!(c.related(f.values[x * n + y], 0), "{} {}", alg.name(), f.term);
                        }
                    }
                }
            }
        }
    }
}

/// In a 2-supernilpotent algebra every commutator term of rank 3 is trivial
/// while rank 2 still has nontrivial ones.
#[test]
fn commutator_terms_of_m_above_its_degree_are_trivial() {
    let m = fixtures::m_ring();
    let rank2 = commutator_term_survey(&m, 2, None, DEFAULT_SIZE_CAP).unwrap();
    let rank3 = commutator_term_survey(&m, 3, None, DEFAULT_SIZE_CAP).unwrap();
    assert!(!rank2.capped && !rank3.capped);
    assert!(rank2.nontrivial().count() > 0);
    assert!(!rank3.terms.is_empty());
    assert_eq!(rank3.nontrivial().count(), 0);
}

/// Every absorbing function over a field is induced by the component of
/// its interpolating polynomial in all variables, and every other
/// component vanishes.
#[test]
fn absorbing_functions_interpolate_to_a_single_component() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in [2, 3, 4, 5] {
        let f = field(q);
        for _ in 0..20 {
            let n = rng.gen_range(1..=3);
            let func = FiniteFunction::from_fn(n, q, |a| if a.contains(&0) { 0 } else { rng.gen_range(0..q) }).unwrap();
            assert!(is_absorbing(&func, 0));
            let p = interpolate(&f, &func).unwrap();
            let full: BTreeSet<usize> = (1..=n).collect();
            assert!(p.terms().keys().all(|m| m.variables() == full), "{p}");
        }
    }
}

#[test]
fn closure_with_depth_cap_never_overcounts() {
    let alg = fixtures::z4();
    let full = closure(&alg, CloneOptions::clo(2)).unwrap();
    for depth in 0..4 {
        let capped = closure(&alg, CloneOptions::clo(2).with_depth_cap(Some(depth))).unwrap();
        assert!(capped.len() <= full.len());
        assert!(capped.functions().all(|f| full.contains(&f)));
    }
}
