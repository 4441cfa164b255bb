//! Buchberger's algorithm with the coprime and chain criteria.
//!
//! Pairs are selected by the normal strategy (smallest lcm of leading
//! monomials first, ties broken by the generator indices). The result is the
//! reduced basis, sorted by increasing leading monomial, so it does not depend
//! on the order generators were given in.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt;

use crate::field::Field;
use crate::poly::{degrevlex, Monomial, Poly, PolyError, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MonomialOrder {
    #[default]
    DegRevLex,
    Lex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::DegRevLex => degrevlex(a.exps(), b.exps()),
            MonomialOrder::Lex => a.exps().cmp(b.exps()),
        }
    }
}

/// Resource caps. Hitting one yields [`GroebnerError::Cap`], never a wrong basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroebnerLimits {
    pub max_pairs: usize,
    pub max_degree: u32,
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        GroebnerLimits { max_pairs: 100_000, max_degree: 60 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroebnerError {
    Cap { pairs: usize, degree: u32 },
    Poly(PolyError),
}

impl fmt::Display for GroebnerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroebnerError::Cap { pairs, degree } => {
                write!(f, "resource cap exceeded after {pairs} pairs (basis degree {degree})")
            }
            GroebnerError::Poly(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for GroebnerError {}

impl From<PolyError> for GroebnerError {
    fn from(e: PolyError) -> Self {
        GroebnerError::Poly(e)
    }
}

/// Ideal given by generators. Zero generators are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct Ideal<K: Field> {
    ring: Arc<Ring<K>>,
    generators: Vec<Poly<K>>,
    order: MonomialOrder,
}

impl<K: Field> Ideal<K> {
    pub fn new(ring: &Arc<Ring<K>>, generators: Vec<Poly<K>>, order: MonomialOrder) -> Result<Self, GroebnerError> {
        for g in &generators {
            if !(Arc::ptr_eq(g.ring(), ring) || **g.ring() == **ring) {
                return Err(PolyError::RingMismatch.into());
            }
        }
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(Ideal { ring: ring.clone(), generators, order })
    }

    pub fn ring(&self) -> &Arc<Ring<K>> {
        &self.ring
    }

    pub fn generators(&self) -> &[Poly<K>] {
        &self.generators
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }
}

/// Reduced Gröbner basis (monic, inter-reduced).
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis<K: Field> {
    ideal: Ideal<K>,
    basis: Vec<Poly<K>>,
}

impl<K: Field> GroebnerBasis<K> {
    pub fn basis(&self) -> &[Poly<K>] {
        &self.basis
    }

    pub fn ideal(&self) -> &Ideal<K> {
        &self.ideal
    }

    pub fn order(&self) -> MonomialOrder {
        self.ideal.order
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_one()
    }

    /// Unique remainder of `p` modulo the basis.
    pub fn normal_form(&self, p: &Poly<K>) -> Result<Poly<K>, GroebnerError> {
        if !p.same_ring(&Poly::zero(&self.ideal.ring)) {
            return Err(PolyError::RingMismatch.into());
        }
        let order = self.ideal.order;
        let basis: Vec<IPoly<K>> = self.basis.iter().map(|g| IPoly::from_poly(g, order)).collect();
        let r = reduce_full(IPoly::from_poly(p, order), &basis, order);
        Ok(r.to_poly(&self.ideal.ring))
    }

    pub fn contains(&self, p: &Poly<K>) -> Result<bool, GroebnerError> {
        Ok(self.normal_form(p)?.is_zero())
    }
}

// ---------------------------------------------------------------------------
// Internal representation: terms sorted ascending under the chosen order, so
// the leading term is last.

#[derive(Clone, Debug)]
struct IPoly<K: Field> {
    terms: Vec<(Monomial, K)>,
}

impl<K: Field> IPoly<K> {
    fn from_poly(p: &Poly<K>, order: MonomialOrder) -> Self {
        let mut terms: Vec<(Monomial, K)> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        terms.sort_by(|a, b| order.cmp(&a.0, &b.0));
        IPoly { terms }
    }

    fn to_poly(&self, ring: &Arc<Ring<K>>) -> Poly<K> {
        Poly::from_terms(ring, self.terms.iter().cloned())
    }

    fn lead(&self) -> Option<&(Monomial, K)> {
        self.terms.last()
    }

    fn lm(&self) -> &Monomial {
        &self.terms.last().expect("nonzero").0
    }

    fn degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    fn make_monic(&mut self) {
        if let Some((_, c)) = self.terms.last() {
            let inv = c.inverse().expect("nonzero leading coefficient");
            for t in self.terms.iter_mut() {
                t.1 = t.1.times(&inv);
            }
        }
    }

    fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }
}

/// `a − c·m·b`, both ascending; the caller has already dropped the terms
/// that cancel.
fn sub_scaled<K: Field>(a: &[(Monomial, K)], b: &[(Monomial, K)], m: &Monomial, c: &K, order: MonomialOrder) -> Vec<(Monomial, K)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let shifted = |k: usize| -> Monomial { b[k].0.mul(m) };
    let mut bj = if b.is_empty() { None } else { Some(shifted(0)) };
    while i < a.len() || bj.is_some() {
        match (a.get(i), bj.as_ref()) {
            (Some(ta), Some(mb)) => match order.cmp(&ta.0, mb) {
                Ordering::Less => {
                    out.push(ta.clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((mb.clone(), b[j].1.times(c).negated()));
                    j += 1;
                    bj = if j < b.len() { Some(shifted(j)) } else { None };
                }
                Ordering::Equal => {
                    let v = ta.1.minus(&b[j].1.times(c));
                    if !v.vanishes() {
                        out.push((ta.0.clone(), v));
                    }
                    i += 1;
                    j += 1;
                    bj = if j < b.len() { Some(shifted(j)) } else { None };
                }
            },
            (Some(ta), None) => {
                out.push(ta.clone());
                i += 1;
            }
            (None, Some(mb)) => {
                out.push((mb.clone(), b[j].1.times(c).negated()));
                j += 1;
                bj = if j < b.len() { Some(shifted(j)) } else { None };
            }
            (None, None) => break,
        }
    }
    out
}

/// Full reduction of `p` by monic `basis`.
fn reduce_full<K: Field>(mut p: IPoly<K>, basis: &[IPoly<K>], order: MonomialOrder) -> IPoly<K> {
    // Irreducible terms are collected in descending order, then reversed.
    let mut rem: Vec<(Monomial, K)> = Vec::new();
    while let Some((lm, lc)) = p.terms.last().cloned() {
        let divisor = basis.iter().find(|g| g.lm().divides(&lm));
        match divisor {
            Some(g) => {
                let q = g.lm().quotient_of(&lm);
                let n = p.terms.len();
                let gn = g.terms.len();
                p.terms = sub_scaled(&p.terms[..n - 1], &g.terms[..gn - 1], &q, &lc, order);
            }
            None => {
                p.terms.pop();
                rem.push((lm, lc));
            }
        }
    }
    rem.reverse();
    IPoly { terms: rem }
}

fn s_poly<K: Field>(f: &IPoly<K>, g: &IPoly<K>, order: MonomialOrder) -> IPoly<K> {
    let l = f.lm().lcm(g.lm());
    let mf = f.lm().quotient_of(&l);
    let mg = g.lm().quotient_of(&l);
    // f, g monic: S = mf·f − mg·g, leading terms cancel.
    let fshift: Vec<(Monomial, K)> = f.terms[..f.terms.len() - 1].iter().map(|(m, c)| (m.mul(&mf), c.clone())).collect();
    let one = f.terms.last().expect("nonzero").1.one_like();
    IPoly { terms: sub_scaled(&fshift, &g.terms[..g.terms.len() - 1], &mg, &one, order) }
}

struct Pair {
    lcm: Monomial,
    i: usize,
    j: usize,
    order: MonomialOrder,
}

impl PartialEq for Pair {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pair {}
impl PartialOrd for Pair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pair {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order.cmp(&self.lcm, &other.lcm).then(self.j.cmp(&other.j)).then(self.i.cmp(&other.i))
    }
}

/// Computes the reduced Gröbner basis of `ideal`.
pub fn groebner_basis<K: Field>(ideal: &Ideal<K>, limits: &GroebnerLimits) -> Result<GroebnerBasis<K>, GroebnerError> {
    let order = ideal.order;
    let ring = &ideal.ring;
    let unit = |ideal: &Ideal<K>| GroebnerBasis { ideal: ideal.clone(), basis: alloc::vec![Poly::one(ring)] };

    let mut g: Vec<IPoly<K>> = Vec::new();
    for p in &ideal.generators {
        let mut ip = IPoly::from_poly(p, order);
        ip.make_monic();
        if ip.is_constant() {
            return Ok(unit(ideal));
        }
        let d = ip.degree();
        if d > limits.max_degree {
            return Err(GroebnerError::Cap { pairs: 0, degree: d });
        }
        g.push(ip);
    }

    let mut heap: BinaryHeap<Reverse<Pair>> = BinaryHeap::new();
    let mut live: BTreeSet<(usize, usize)> = BTreeSet::new();
    let push_pairs = |k: usize, g: &[IPoly<K>], heap: &mut BinaryHeap<Reverse<Pair>>, live: &mut BTreeSet<(usize, usize)>| {
        for i in 0..k {
            let lcm = g[i].lm().lcm(g[k].lm());
            heap.push(Reverse(Pair { lcm, i, j: k, order }));
            live.insert((i, k));
        }
    };
    for k in 0..g.len() {
        push_pairs(k, &g, &mut heap, &mut live);
    }

    let mut processed = 0usize;
    while let Some(Reverse(pair)) = heap.pop() {
        live.remove(&(pair.i, pair.j));
        processed += 1;
        if processed > limits.max_pairs {
            let d = g.iter().map(|p| p.degree()).max().unwrap_or(0);
            return Err(GroebnerError::Cap { pairs: processed - 1, degree: d });
        }
        let (i, j) = (pair.i, pair.j);
        if g[i].lm().is_coprime(g[j].lm()) {
            continue;
        }
        let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let chain = (0..g.len()).any(|k| {
            k != i && k != j && g[k].lm().divides(&pair.lcm) && !live.contains(&key(i, k)) && !live.contains(&key(j, k))
        });
        if chain {
            continue;
        }
        let s = s_poly(&g[i], &g[j], order);
        let mut r = reduce_full(s, &g, order);
        if r.lead().is_none() {
            continue;
        }
        r.make_monic();
        if r.is_constant() {
            return Ok(unit(ideal));
        }
        let d = r.degree();
        if d > limits.max_degree {
            return Err(GroebnerError::Cap { pairs: processed, degree: d });
        }
        g.push(r);
        let k = g.len() - 1;
        push_pairs(k, &g, &mut heap, &mut live);
    }

    // Minimalize: drop elements whose leading monomial is divisible by another's.
    let mut keep: Vec<bool> = alloc::vec![true; g.len()];
    for a in 0..g.len() {
        for b in 0..g.len() {
            if a == b || !keep[b] {
                continue;
            }
            if g[b].lm().divides(g[a].lm()) && (g[b].lm() != g[a].lm() || b < a) {
                keep[a] = false;
                break;
            }
        }
    }
    let minimal: Vec<IPoly<K>> = g.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect();
    // Inter-reduce tails.
    let mut reduced: Vec<IPoly<K>> = Vec::with_capacity(minimal.len());
    for (a, p) in minimal.iter().enumerate() {
        let others: Vec<IPoly<K>> =
            minimal.iter().enumerate().filter(|(b, _)| *b != a).map(|(_, q)| q.clone()).collect();
        let mut r = reduce_full(p.clone(), &others, order);
        r.make_monic();
        reduced.push(r);
    }
    reduced.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    Ok(GroebnerBasis { ideal: ideal.clone(), basis: reduced.iter().map(|p| p.to_poly(ring)).collect() })
}

/// Normal form of `p` with respect to `gb`.
pub fn normal_form<K: Field>(p: &Poly<K>, gb: &GroebnerBasis<K>) -> Result<Poly<K>, GroebnerError> {
    gb.normal_form(p)
}

pub fn ideal_member<K: Field>(p: &Poly<K>, ideal: &Ideal<K>, limits: &GroebnerLimits) -> Result<bool, GroebnerError> {
    groebner_basis(ideal, limits)?.contains(p)
}

pub fn is_unit_ideal<K: Field>(ideal: &Ideal<K>, limits: &GroebnerLimits) -> Result<bool, GroebnerError> {
    Ok(groebner_basis(ideal, limits)?.is_unit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::poly::{qring, QPoly};

    fn ideal(gens: &[&str], vars: &[&str], order: MonomialOrder) -> Ideal<Rational> {
        let r = qring(vars);
        let gens: Vec<QPoly> = gens.iter().map(|s| Poly::parse(s, &r).unwrap()).collect();
        Ideal::new(&r, gens, order).unwrap()
    }

    fn basis_strings(gb: &GroebnerBasis<Rational>) -> Vec<alloc::string::String> {
        gb.basis().iter().map(|p| alloc::format!("{p}")).collect()
    }

    #[test]
    fn small_examples() {
        let lim = GroebnerLimits::default();
        let gb = groebner_basis(&ideal(&["x", "y"], &["x", "y"], MonomialOrder::Lex), &lim).unwrap();
        assert_eq!(basis_strings(&gb), ["y", "x"]);
        let gb = groebner_basis(&ideal(&["x", "x+1"], &["x"], MonomialOrder::DegRevLex), &lim).unwrap();
        assert!(gb.is_unit());
        let gb = groebner_basis(&ideal(&["x*y-z^2+1"], &["x", "y", "z"], MonomialOrder::DegRevLex), &lim).unwrap();
        assert_eq!(basis_strings(&gb), ["x*y - z^2 + 1"]);
    }

    #[test]
    fn normal_forms() {
        let lim = GroebnerLimits::default();
        let i = ideal(&["x", "y"], &["x", "y"], MonomialOrder::DegRevLex);
        let gb = groebner_basis(&i, &lim).unwrap();
        let r = i.ring().clone();
        assert!(gb.normal_form(&Poly::parse("x^2+y", &r).unwrap()).unwrap().is_zero());
        assert!(gb.normal_form(&Poly::parse("x^2+y+1", &r).unwrap()).unwrap().is_one());
        let z = ideal(&["z^3"], &["z"], MonomialOrder::DegRevLex);
        let zr = z.ring().clone();
        let p = Poly::parse("(z^2-1)*(z^2+1) - (z^4-1)", &zr).unwrap();
        assert!(ideal_member(&p, &z, &lim).unwrap());
        assert!(is_unit_ideal(&ideal(&["x^2+1", "x-1"], &["x"], MonomialOrder::DegRevLex), &lim).unwrap());
    }

    #[test]
    fn twisted_cubic() {
        let lim = GroebnerLimits::default();
        let i = ideal(&["x^2-y", "x^3-z"], &["x", "y", "z"], MonomialOrder::Lex);
        let gb = groebner_basis(&i, &lim).unwrap();
        assert_eq!(basis_strings(&gb), ["y^3 - z^2", "-y^2 + x*z", "x*y - z", "x^2 - y"]);
        let gb2 = groebner_basis(&ideal(&["x^3-z", "x^2-y"], &["x", "y", "z"], MonomialOrder::Lex), &lim).unwrap();
        assert_eq!(gb.basis(), gb2.basis());
    }

    #[test]
    fn cap_is_reported() {
        let lim = GroebnerLimits { max_pairs: 1, max_degree: 60 };
        let i = ideal(&["x^2-y", "x^3-z", "y*z-1"], &["x", "y", "z"], MonomialOrder::Lex);
        assert!(matches!(groebner_basis(&i, &lim), Err(GroebnerError::Cap { .. })));
        let lim = GroebnerLimits { max_pairs: 100, max_degree: 2 };
        let i = ideal(&["x^3-y"], &["x", "y"], MonomialOrder::Lex);
        assert!(matches!(groebner_basis(&i, &lim), Err(GroebnerError::Cap { .. })));
    }
}
