//! Property suites and the shear-chain inversion oracle, shared by the test
//! binaries and the acceptance runner. Every suite runs on a fixed ChaCha
//! seed so failures reproduce.

#![allow(dead_code)]

use std::fmt::Debug;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestCaseError, TestRng, TestRunner};

use polyjc_core::field::{frac, rat, Rational};
use polyjc_core::groebner::{groebner_basis, GroebnerLimits, Ideal, MonomialOrder};
use polyjc_core::keller::{chain_rule_check, invert_exact, newton_triangle_test, PolyMap};
use polyjc_core::lnd::{exp_map, ga_automorphism, slice_decompose, Derivation};
use polyjc_core::poly::{content_primitive, newton_polygon, qring, Monomial, QPoly, QRing};
use polyjc_core::Poly;

pub type Outcome = Result<(), String>;

fn check<S>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome
where
    S: Strategy,
    S::Value: Debug,
{
    let config = ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

type Terms = Vec<(Vec<u32>, i64, i64)>;

fn terms(nvars: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, nvars), -9i64..=9, 1i64..=4), 0..=max_terms)
}

fn build(ring: &Arc<QRing>, t: &Terms) -> QPoly {
    Poly::from_terms(ring, t.iter().map(|(e, n, d)| (Monomial::new(e.clone()), frac(*n, *d))))
}

fn int_build(ring: &Arc<QRing>, t: &Terms) -> QPoly {
    Poly::from_terms(ring, t.iter().map(|(e, n, _)| (Monomial::new(e.clone()), rat(*n))))
}

fn xyz() -> Arc<QRing> {
    qring(&["x", "y", "z"])
}

pub fn ring_axioms(cases: u32) -> Outcome {
    check(cases, (terms(3, 3, 5), terms(3, 3, 5), terms(3, 3, 5)), |(a, b, c)| {
        let r = xyz();
        let (a, b, c) = (build(&r, &a), build(&r, &b), build(&r, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &Poly::zero(&r), a.clone());
        prop_assert_eq!(&a * &Poly::one(&r), a.clone());
        prop_assert!((&a - &a.clone()).is_zero());
        prop_assert_eq!(&a + &(-&b), &a - &b);
        Ok(())
    })
}

pub fn derivative_is_a_derivation(cases: u32) -> Outcome {
    check(cases, (terms(3, 3, 4), terms(3, 3, 4), 0usize..3), |(a, b, v)| {
        let r = xyz();
        let (a, b) = (build(&r, &a), build(&r, &b));
        let lhs = (&a * &b).differentiate(v);
        let rhs = &(&a.differentiate(v) * &b) + &(&a * &b.differentiate(v));
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

pub fn display_parse_roundtrip(cases: u32) -> Outcome {
    check(cases, terms(3, 4, 6), |a| {
        let r = xyz();
        let a = build(&r, &a);
        prop_assert_eq!(Poly::parse(&a.to_string(), &r).unwrap(), a);
        Ok(())
    })
}

pub fn evaluation_is_a_ring_map(cases: u32) -> Outcome {
    check(cases, (terms(3, 3, 4), terms(3, 3, 4), prop::collection::vec(-5i64..=5, 3)), |(a, b, pt)| {
        let r = xyz();
        let (a, b) = (build(&r, &a), build(&r, &b));
        let pt: Vec<Rational> = pt.into_iter().map(rat).collect();
        prop_assert_eq!((&a * &b).eval(&pt), a.eval(&pt) * b.eval(&pt));
        prop_assert_eq!((&a + &b).eval(&pt), a.eval(&pt) + b.eval(&pt));
        Ok(())
    })
}

pub fn gauss_lemma(cases: u32) -> Outcome {
    check(cases, (terms(2, 3, 4), terms(2, 3, 4)), |(a, b)| {
        let r = qring(&["x", "y"]);
        let (a, b) = (int_build(&r, &a), int_build(&r, &b));
        prop_assume!(!a.is_zero() && !b.is_zero());
        let (ca, pa) = content_primitive(&a).unwrap();
        let (cb, pb) = content_primitive(&b).unwrap();
        let (cab, pab) = content_primitive(&(&a * &b)).unwrap();
        prop_assert_eq!(cab, &ca * &cb);
        prop_assert_eq!(pab, &pa * &pb);
        // oracle: the gcd of the integer coefficients of pa·pb is 1
        let mut g = BigInt::zero();
        for (_, c) in (&pa * &pb).terms() {
            prop_assert!(c.is_integer());
            g = g.gcd(c.numer());
        }
        prop_assert!(g.is_one());
        Ok(())
    })
}

/// δ(x) = 1, δ(y) = f(x), δ(z) = g(x, y): triangular, so locally nilpotent.
fn triangular(r: &Arc<QRing>, f: &Terms, g: &Terms) -> Derivation<Rational> {
    let one = Poly::one(r);
    let f = Poly::from_terms(r, f.iter().map(|(e, n, d)| (Monomial::new(vec![e[0], 0, 0]), frac(*n, *d))));
    let g = Poly::from_terms(r, g.iter().map(|(e, n, d)| (Monomial::new(vec![e[0], e[1], 0]), frac(*n, *d))));
    Derivation::new(r, vec![one, f, g]).unwrap()
}

pub fn exp_is_a_homomorphism(cases: u32) -> Outcome {
    check(cases, (terms(1, 2, 2), terms(2, 2, 2), terms(3, 2, 3), terms(3, 2, 3)), |(f, g, a, b)| {
        let r = xyz();
        let delta = triangular(&r, &f, &g);
        let (a, b) = (build(&r, &a), build(&r, &b));
        let ea = exp_map(&delta, &a).unwrap();
        let eb = exp_map(&delta, &b).unwrap();
        prop_assert_eq!(exp_map(&delta, &(&a * &b)).unwrap(), &ea * &eb);
        prop_assert_eq!(exp_map(&delta, &(&a + &b)).unwrap(), &ea + &eb);
        // t = 0 gives back p
        let back: Vec<QPoly> = (0..3).map(|i| Poly::var(&r, i)).chain([Poly::zero(&r)]).collect();
        prop_assert_eq!(ea.ring().nvars(), 4);
        prop_assert_eq!(ea.substitute(&back).unwrap(), a);
        Ok(())
    })
}

pub fn ga_group_law(cases: u32) -> Outcome {
    check(cases, (terms(1, 2, 2), terms(2, 2, 2), -4i64..=4, -4i64..=4), |(f, g, s, t)| {
        let r = xyz();
        let delta = triangular(&r, &f, &g);
        let (s, t) = (frac(s, 2), rat(t));
        let es = ga_automorphism(&delta, &s).unwrap();
        let et = ga_automorphism(&delta, &t).unwrap();
        let est = ga_automorphism(&delta, &(&s + &t)).unwrap();
        prop_assert_eq!(es.compose(&et).unwrap(), est);
        let inv = ga_automorphism(&delta, &(-&s)).unwrap();
        prop_assert!(es.compose(&inv).unwrap().is_identity());
        Ok(())
    })
}

pub fn slice_reconstruction(cases: u32) -> Outcome {
    check(cases, (terms(1, 2, 2), terms(2, 2, 2), terms(3, 3, 4)), |(f, g, p)| {
        let r = xyz();
        let delta = triangular(&r, &f, &g);
        let u = Poly::var(&r, 0);
        let p = build(&r, &p);
        let cs = slice_decompose(&delta, &u, &p, delta.default_cap() + 16).unwrap();
        let mut sum = Poly::zero(&r);
        for (i, c) in cs.iter().enumerate() {
            prop_assert!(delta.apply(c).is_zero());
            sum = &sum + &(c * &u.pow(i as u32));
        }
        prop_assert_eq!(sum, p);
        Ok(())
    })
}

pub fn normal_form_idempotent(cases: u32) -> Outcome {
    check(cases, (terms(3, 2, 3), terms(3, 2, 3), terms(3, 3, 5), terms(3, 2, 3)), |(g1, g2, p, m)| {
        let r = xyz();
        let gens: Vec<QPoly> = [g1, g2].iter().map(|t| build(&r, t)).filter(|p| !p.is_zero()).collect();
        prop_assume!(!gens.is_empty());
        let ideal = Ideal::new(&r, gens.clone(), MonomialOrder::DegRevLex).unwrap();
        let limits = GroebnerLimits { max_pairs: 2_000, max_degree: 12 };
        let gb = groebner_basis(&ideal, &limits);
        prop_assume!(gb.is_ok());
        let gb = gb.unwrap();
        let p = build(&r, &p);
        let nf = gb.normal_form(&p).unwrap();
        prop_assert_eq!(gb.normal_form(&nf).unwrap(), nf.clone());
        // adding an ideal element does not change the normal form
        let shifted = &p + &(&build(&r, &m) * &gens[0]);
        prop_assert_eq!(gb.normal_form(&shifted).unwrap(), nf);
        for g in &gens {
            prop_assert!(gb.normal_form(g).unwrap().is_zero());
        }
        Ok(())
    })
}

pub fn newton_triangle_matches_brute_force(cases: u32) -> Outcome {
    check(cases, terms(2, 5, 6), |t| {
        let r = qring(&["x", "y"]);
        let p = int_build(&r, &t);
        prop_assume!(!p.is_zero());
        let support: Vec<(i64, i64)> = p.terms().map(|(m, _)| (m.exps()[0] as i64, m.exps()[1] as i64)).collect();
        let a = support.iter().filter(|s| s.1 == 0).map(|s| s.0).max().unwrap_or(0);
        let b = support.iter().filter(|s| s.0 == 0).map(|s| s.1).max().unwrap_or(0);
        let brute = support.iter().all(|&(i, j)| i == 0 || j == 0 || (a > 0 && b > 0 && i * b + j * a <= a * b));
        prop_assert_eq!(newton_triangle_test(&p).unwrap(), brute);
        // every hull vertex is a support point or the origin
        let np = newton_polygon(&p).unwrap();
        prop_assert!(np.hull_vertices.iter().all(|v| *v == (0, 0) || support.contains(v)));
        Ok(())
    })
}

pub type Suite = fn(u32) -> Outcome;

pub const PROPERTY_SUITES: &[(&str, Suite)] = &[
    ("ring_axioms", ring_axioms),
    ("derivative_is_a_derivation", derivative_is_a_derivation),
    ("display_parse_roundtrip", display_parse_roundtrip),
    ("evaluation_is_a_ring_map", evaluation_is_a_ring_map),
    ("gauss_lemma", gauss_lemma),
    ("exp_is_a_homomorphism", exp_is_a_homomorphism),
    ("ga_group_law", ga_group_law),
    ("slice_reconstruction", slice_reconstruction),
    ("normal_form_idempotent", normal_form_idempotent),
    ("newton_triangle_matches_brute_force", newton_triangle_matches_brute_force),
];

/// xᵢ ↦ xᵢ + c·m with m a monomial in the other variables.
#[derive(Clone, Debug)]
pub struct Shear {
    slot: usize,
    coeff: i64,
    exps: Vec<u32>,
}

fn shear_map(ring: &Arc<QRing>, s: &Shear, sign: i64) -> PolyMap<Rational> {
    let comps = (0..ring.nvars())
        .map(|i| {
            let x = Poly::var(ring, i);
            if i != s.slot {
                return x;
            }
            let mut e = s.exps.clone();
            e[s.slot] = 0;
            &x + &Poly::monomial(ring, Monomial::new(e), rat(sign * s.coeff))
        })
        .collect();
    PolyMap::new(ring, comps).unwrap()
}

fn shear(n: usize) -> impl Strategy<Value = Shear> {
    (0..n, prop_oneof![-3i64..=-1, 1i64..=3], prop::collection::vec(0u32..=2, n))
        .prop_map(|(slot, coeff, exps)| Shear { slot, coeff, exps })
}

fn chain() -> impl Strategy<Value = (usize, Vec<Shear>)> {
    (2usize..=3).prop_flat_map(|n| (Just(n), prop::collection::vec(shear(n), 1..=4)))
}

/// F = S_k ∘ ⋯ ∘ S_1 against the oracle G = S_1⁻¹ ∘ ⋯ ∘ S_k⁻¹: the inverse
/// found is G, it is two-sided, and the chain rule gives 1.
pub fn shear_chains_invert_exactly(cases: u32) -> Outcome {
    check(cases, chain(), |(n, shears)| {
        let names = ["x", "y", "z"];
        let ring = qring(&names[..n]);
        let mut f = PolyMap::identity(&ring);
        let mut g = PolyMap::identity(&ring);
        for s in &shears {
            f = shear_map(&ring, s, 1).compose(&f).unwrap();
            g = g.compose(&shear_map(&ring, s, -1)).unwrap();
        }
        let cap = 2 * g.degree().max(1);
        let inv = invert_exact(&f, cap).unwrap();
        prop_assert_eq!(inv.as_ref(), Some(&g));
        prop_assert!(f.compose(&g).unwrap().is_identity() && g.compose(&f).unwrap().is_identity());
        prop_assert!(chain_rule_check(&f, &g).unwrap().is_one());
        Ok(())
    })
}
