//! Sparse multivariate polynomials with exact coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! degrevlex with variables in declaration order. Iterating in reverse gives
//! the canonical (descending) print order; the last key is the leading term.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::field::{Field, Rational};

/// Exponent vector, one entry per ring variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn weighted_degree(&self, w: &[i64]) -> i64 {
        self.0.iter().zip(w).map(|(&e, &wi)| e as i64 * wi).sum()
    }
}

/// Degree reverse lexicographic comparison.
pub fn degrevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.iter().zip(b).rev() {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        degrevlex(&self.0, &other.0)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Errors from polynomial construction and arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyError {
    RingMismatch,
    Arity { expected: usize, got: usize },
    Syntax { offset: usize, message: String },
    UnknownVariable { offset: usize, name: String },
    InvalidVariableName(String),
    DuplicateVariable(String),
    ReservedVariable(String),
    ZeroPolynomial,
    VariableIndex(usize),
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::RingMismatch => write!(f, "polynomials belong to different rings"),
            PolyError::Arity { expected, got } => write!(f, "expected {expected} polynomials, got {got}"),
            PolyError::Syntax { offset, message } => write!(f, "syntax error at byte {offset}: {message}"),
            PolyError::UnknownVariable { offset, name } => {
                write!(f, "unknown variable `{name}` at byte {offset}")
            }
            PolyError::InvalidVariableName(n) => write!(f, "invalid variable name `{n}`"),
            PolyError::DuplicateVariable(n) => write!(f, "duplicate variable `{n}`"),
            PolyError::ReservedVariable(n) => write!(f, "variable `{n}` clashes with the field generator"),
            PolyError::ZeroPolynomial => write!(f, "zero polynomial not allowed here"),
            PolyError::VariableIndex(i) => write!(f, "variable index {i} out of range"),
        }
    }
}

impl core::error::Error for PolyError {}

fn valid_ident(s: &str) -> bool {
    let mut it = s.chars();
    match it.next() {
        Some(c) if c.is_ascii_alphabetic() => it.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

/// Variable names plus the coefficient field.
#[derive(Clone, Debug, PartialEq)]
pub struct Ring<K: Field> {
    vars: Vec<String>,
    ctx: K::Ctx,
}

impl<K: Field> Ring<K> {
    pub fn new<S: AsRef<str>>(vars: &[S], ctx: K::Ctx) -> Result<Arc<Self>, PolyError> {
        let mut names: Vec<String> = Vec::with_capacity(vars.len());
        for v in vars {
            let v = v.as_ref();
            if !valid_ident(v) {
                return Err(PolyError::InvalidVariableName(v.into()));
            }
            if names.iter().any(|n| n == v) {
                return Err(PolyError::DuplicateVariable(v.into()));
            }
            if K::reserved_symbol(&ctx) == Some(v) {
                return Err(PolyError::ReservedVariable(v.into()));
            }
            names.push(v.into());
        }
        Ok(Arc::new(Ring { vars: names, ctx }))
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn ctx(&self) -> &K::Ctx {
        &self.ctx
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// A name not used by this ring, based on `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        let reserved = K::reserved_symbol(&self.ctx);
        let mut name: String = base.into();
        let mut k = 1;
        while self.var_index(&name).is_some() || reserved == Some(name.as_str()) {
            name = alloc::format!("{base}{k}");
            k += 1;
        }
        name
    }

    /// This ring with extra variables appended; names are made fresh.
    pub fn extend(&self, extra: &[&str]) -> Arc<Self> {
        let mut r = Ring { vars: self.vars.clone(), ctx: self.ctx.clone() };
        for e in extra {
            let n = r.fresh_name(e);
            r.vars.push(n);
        }
        Arc::new(r)
    }
}

/// Exact sparse polynomial.
#[derive(Clone, Debug)]
pub struct Poly<K: Field> {
    ring: Arc<Ring<K>>,
    terms: BTreeMap<Monomial, K>,
}

impl<K: Field> PartialEq for Poly<K> {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring) && self.terms == other.terms
    }
}

/// Weighted degree of a polynomial; the zero polynomial has degree −∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum WDeg {
    NegInfinity,
    Finite(i64),
}

/// Output of [`Poly::degrees`].
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedParts<K: Field> {
    pub wdeg: WDeg,
    pub parts: BTreeMap<i64, Poly<K>>,
    pub top: Poly<K>,
}

impl<K: Field> Poly<K> {
    pub fn zero(ring: &Arc<Ring<K>>) -> Self {
        Poly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<Ring<K>>) -> Self {
        Self::constant(ring, K::one_in(&ring.ctx))
    }

    pub fn constant(ring: &Arc<Ring<K>>, c: K) -> Self {
        let mut terms = BTreeMap::new();
        if !c.vanishes() {
            terms.insert(Monomial::one(ring.nvars()), c);
        }
        Poly { ring: ring.clone(), terms }
    }

    pub fn from_rational(ring: &Arc<Ring<K>>, q: &Rational) -> Self {
        Self::constant(ring, K::from_q(&ring.ctx, q))
    }

    pub fn from_i64(ring: &Arc<Ring<K>>, n: i64) -> Self {
        Self::constant(ring, K::from_int(&ring.ctx, n))
    }

    pub fn var(ring: &Arc<Ring<K>>, i: usize) -> Self {
        assert!(i < ring.nvars(), "variable index out of range");
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(ring.nvars(), i), K::one_in(&ring.ctx));
        Poly { ring: ring.clone(), terms }
    }

    pub fn monomial(ring: &Arc<Ring<K>>, m: Monomial, c: K) -> Self {
        assert_eq!(m.len(), ring.nvars());
        let mut terms = BTreeMap::new();
        if !c.vanishes() {
            terms.insert(m, c);
        }
        Poly { ring: ring.clone(), terms }
    }

    /// Builds a polynomial, summing repeated monomials and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, K)>>(ring: &Arc<Ring<K>>, it: I) -> Self {
        let mut p = Poly::zero(ring);
        for (m, c) in it {
            assert_eq!(m.len(), ring.nvars());
            p.add_term(m, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: K) {
        if c.vanishes() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().plus(&c);
                if s.vanishes() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn ring(&self) -> &Arc<Ring<K>> {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn same_ring(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_unity())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending degrevlex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &K)> + '_ {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> K {
        self.terms.get(m).cloned().unwrap_or_else(|| K::zero_in(&self.ring.ctx))
    }

    /// Leading term under degrevlex.
    pub fn leading_term(&self) -> Option<(&Monomial, &K)> {
        self.terms.iter().next_back()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// The constant value if the polynomial is constant (zero included).
    pub fn constant_value(&self) -> Option<K> {
        if self.is_constant() {
            Some(self.coeff(&Monomial::one(self.nvars())))
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> K {
        self.coeff(&Monomial::one(self.nvars()))
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|m| m.degree());
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Part of total degree exactly `k`.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        self.filter_terms(|m| m.degree() == k)
    }

    /// Terms of total degree ≤ `k`.
    pub fn truncate(&self, k: u32) -> Self {
        self.filter_terms(|m| m.degree() <= k)
    }

    pub fn filter_terms<F: Fn(&Monomial) -> bool>(&self, keep: F) -> Self {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    fn check_ring(&self, other: &Self) -> Result<(), PolyError> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.negated());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        Ok(self.mul_impl(other, None))
    }

    /// Product with all terms of total degree above `max_deg` discarded.
    pub fn mul_truncated(&self, other: &Self, max_deg: u32) -> Self {
        assert!(self.same_ring(other), "ring mismatch");
        self.mul_impl(other, Some(max_deg))
    }

    fn mul_impl(&self, other: &Self, cap: Option<u32>) -> Self {
        let mut out = Poly::zero(&self.ring);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in &other.terms {
                if let Some(k) = cap {
                    if da + mb.degree() > k {
                        continue;
                    }
                }
                out.add_term(ma.mul(mb), ca.times(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.vanishes() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.times(c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &K) -> Self {
        if c.vanishes() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(a, x)| (a.mul(m), x.times(c))).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Poly::one(&self.ring);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Power with terms above total degree `max_deg` discarded.
    pub fn pow_truncated(&self, e: u32, max_deg: u32) -> Self {
        let mut acc = Poly::one(&self.ring);
        for _ in 0..e {
            acc = acc.mul_truncated(self, max_deg);
        }
        acc
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn differentiate(&self, var: usize) -> Self {
        assert!(var < self.nvars(), "variable index out of range");
        let mut out = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            out.add_term(m2, c.times(&K::from_int(&self.ring.ctx, e as i64)));
        }
        out
    }

    /// Composition `p(images)`. All images must share one ring.
    pub fn substitute(&self, images: &[Poly<K>]) -> Result<Poly<K>, PolyError> {
        self.substitute_impl(images, None)
    }

    /// Composition with every intermediate product truncated above total degree `max_deg`.
    pub fn substitute_truncated(&self, images: &[Poly<K>], max_deg: u32) -> Result<Poly<K>, PolyError> {
        self.substitute_impl(images, Some(max_deg))
    }

    fn substitute_impl(&self, images: &[Poly<K>], cap: Option<u32>) -> Result<Poly<K>, PolyError> {
        if images.len() != self.nvars() {
            return Err(PolyError::Arity { expected: self.nvars(), got: images.len() });
        }
        let Some(first) = images.first() else {
            // No variables: p is a constant of a zero-variable ring.
            return Err(PolyError::Arity { expected: 1, got: 0 });
        };
        let target = first.ring.clone();
        if images.iter().any(|g| !(Arc::ptr_eq(&g.ring, &target) || *g.ring == *target)) {
            return Err(PolyError::RingMismatch);
        }
        let mul = |a: &Poly<K>, b: &Poly<K>| match cap {
            Some(k) => a.mul_truncated(b, k),
            None => a * b,
        };
        // powers[i][e] = images[i]^e, filled on demand
        let mut powers: Vec<Vec<Poly<K>>> = images.iter().map(|_| vec![Poly::one(&target)]).collect();
        let mut out = Poly::zero(&target);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = mul(powers[i].last().unwrap(), &images[i]);
                    powers[i].push(next);
                }
                term = mul(&term, &powers[i][e as usize]);
                if term.is_zero() {
                    break;
                }
            }
            for (m2, c2) in term.terms {
                out.add_term(m2, c2);
            }
        }
        Ok(out)
    }

    /// Evaluates at a point.
    pub fn eval(&self, point: &[K]) -> K {
        assert_eq!(point.len(), self.nvars());
        let mut acc = K::zero_in(&self.ring.ctx);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = t.times(&x.power(e as u64));
                }
            }
            acc = acc.plus(&t);
        }
        acc
    }

    /// Moves the polynomial into `target`, sending variable `i` to `map[i]`.
    pub fn embed(&self, target: &Arc<Ring<K>>, map: &[usize]) -> Poly<K> {
        assert_eq!(map.len(), self.nvars());
        let n = target.nvars();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; n];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Embeds into a ring whose leading variables are this ring's variables.
    pub fn embed_prefix(&self, target: &Arc<Ring<K>>) -> Poly<K> {
        let map: Vec<usize> = (0..self.nvars()).collect();
        self.embed(target, &map)
    }

    /// Writes `p = Σ_k p_k · x_var^k` and returns the map k ↦ p_k.
    pub fn collect_in(&self, var: usize) -> BTreeMap<u32, Poly<K>> {
        let mut out: BTreeMap<u32, Poly<K>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m.0[var];
            let mut m2 = m.clone();
            m2.0[var] = 0;
            out.entry(k).or_insert_with(|| Poly::zero(&self.ring)).add_term(m2, c.clone());
        }
        out
    }

    /// Exact division by `x_var^k`, or `None` if some term has lower degree in `x_var`.
    pub fn div_var_power(&self, var: usize, k: u32) -> Option<Poly<K>> {
        let mut out = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            if m.0[var] < k {
                return None;
            }
            let mut m2 = m.clone();
            m2.0[var] -= k;
            out.terms.insert(m2, c.clone());
        }
        Some(out)
    }

    pub fn map_coeffs<F: Fn(&K) -> K>(&self, f: F) -> Poly<K> {
        let mut out = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Splits into ω-homogeneous parts. Zero gives degree −∞ and no parts.
    pub fn degrees(&self, w: &[i64]) -> Result<WeightedParts<K>, PolyError> {
        if w.len() != self.nvars() {
            return Err(PolyError::Arity { expected: self.nvars(), got: w.len() });
        }
        let mut parts: BTreeMap<i64, Poly<K>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = m.weighted_degree(w);
            parts.entry(d).or_insert_with(|| Poly::zero(&self.ring)).add_term(m.clone(), c.clone());
        }
        let (wdeg, top) = match parts.iter().next_back() {
            Some((d, p)) => (WDeg::Finite(*d), p.clone()),
            None => (WDeg::NegInfinity, Poly::zero(&self.ring)),
        };
        Ok(WeightedParts { wdeg, parts, top })
    }

    pub fn parse(text: &str, ring: &Arc<Ring<K>>) -> Result<Poly<K>, PolyError> {
        Parser { src: text.as_bytes(), pos: 0, ring }.parse_all()
    }
}

impl<'a, K: Field> Add<&'a Poly<K>> for &'a Poly<K> {
    type Output = Poly<K>;
    fn add(self, rhs: &'a Poly<K>) -> Poly<K> {
        self.checked_add(rhs).expect("ring mismatch")
    }
}

impl<'a, K: Field> Sub<&'a Poly<K>> for &'a Poly<K> {
    type Output = Poly<K>;
    fn sub(self, rhs: &'a Poly<K>) -> Poly<K> {
        self.checked_sub(rhs).expect("ring mismatch")
    }
}

impl<'a, K: Field> Mul<&'a Poly<K>> for &'a Poly<K> {
    type Output = Poly<K>;
    fn mul(self, rhs: &'a Poly<K>) -> Poly<K> {
        self.checked_mul(rhs).expect("ring mismatch")
    }
}

impl<K: Field> Neg for &Poly<K> {
    type Output = Poly<K>;
    fn neg(self) -> Poly<K> {
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c.negated())).collect() }
    }
}

/// Binary operation selector for [`poly_arith`].
#[derive(Clone, Debug, PartialEq)]
pub enum ArithOp<K: Field> {
    Add,
    Sub,
    Mul,
    Pow(u32),
    Scale(K),
}

/// Applies `op` to the operands: a fold for add/sub/mul, unary for pow/scale.
pub fn poly_arith<K: Field>(op: &ArithOp<K>, operands: &[Poly<K>]) -> Result<Poly<K>, PolyError> {
    let (first, rest) = operands.split_first().ok_or(PolyError::Arity { expected: 1, got: 0 })?;
    match op {
        ArithOp::Add => rest.iter().try_fold(first.clone(), |a, b| a.checked_add(b)),
        ArithOp::Sub => rest.iter().try_fold(first.clone(), |a, b| a.checked_sub(b)),
        ArithOp::Mul => rest.iter().try_fold(first.clone(), |a, b| a.checked_mul(b)),
        ArithOp::Pow(e) => {
            if !rest.is_empty() {
                return Err(PolyError::Arity { expected: 1, got: operands.len() });
            }
            Ok(first.pow(*e))
        }
        ArithOp::Scale(c) => {
            if !rest.is_empty() {
                return Err(PolyError::Arity { expected: 1, got: operands.len() });
            }
            Ok(first.scale(c))
        }
    }
}

// ---------------------------------------------------------------------------
// Content and primitive part over ℚ.

/// `p = content · primitive` with `primitive` having coprime integer
/// coefficients and a positive leading coefficient.
pub fn content_primitive(p: &Poly<Rational>) -> Result<(Rational, Poly<Rational>), PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for c in p.terms.values() {
        num_gcd = num_gcd.gcd(c.numer());
        den_lcm = den_lcm.lcm(c.denom());
    }
    let mut content = Rational::new(num_gcd, den_lcm);
    let lead = p.leading_term().map(|(_, c)| c.clone()).unwrap_or_else(Rational::one);
    if lead.is_negative() {
        content = -content;
    }
    let inv = content.recip();
    Ok((content, p.scale(&inv)))
}

// ---------------------------------------------------------------------------
// Newton polygon.

/// Support of a bivariate polynomial and the hull of support ∪ {(0,0)}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub support: Vec<(i64, i64)>,
    /// Counter-clockwise, starting at the origin; extreme points only.
    pub hull_vertices: Vec<(i64, i64)>,
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    let (ax, ay) = ((a.0 - o.0) as i128, (a.1 - o.1) as i128);
    let (bx, by) = ((b.0 - o.0) as i128, (b.1 - o.1) as i128);
    ax * by - ay * bx
}

/// Convex hull of a point set, counter-clockwise from the lexicographically
/// smallest point, collinear points dropped.
pub fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn newton_polygon<K: Field>(p: &Poly<K>) -> Result<NewtonPolygon, PolyError> {
    if p.nvars() != 2 {
        return Err(PolyError::Arity { expected: 2, got: p.nvars() });
    }
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut support: Vec<(i64, i64)> = p.terms.keys().map(|m| (m.0[0] as i64, m.0[1] as i64)).collect();
    support.sort();
    let mut pts = support.clone();
    pts.push((0, 0));
    Ok(NewtonPolygon { support, hull_vertices: convex_hull(&pts) })
}

// ---------------------------------------------------------------------------
// Printing.

fn write_monomial<K: Field>(f: &mut fmt::Formatter<'_>, ring: &Ring<K>, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (v, &e) in ring.vars.iter().zip(&m.0) {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "{v}")?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl<K: Field> fmt::Display for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            // Rational coefficients print with their sign pulled out; anything
            // else is parenthesized and added.
            let (neg, body) = match c.to_rational() {
                Some(q) => (q.is_negative(), Some(q.abs())),
                None => (false, None),
            };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            match body {
                Some(q) => {
                    if m.is_one() {
                        write!(f, "{q}")?;
                    } else {
                        if !q.is_one() {
                            write!(f, "{q}*")?;
                        }
                        write_monomial(f, &self.ring, m)?;
                    }
                }
                None => {
                    write!(f, "({c})")?;
                    if !m.is_one() {
                        write!(f, "*")?;
                        write_monomial(f, &self.ring, m)?;
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing.

struct Parser<'a, K: Field> {
    src: &'a [u8],
    pos: usize,
    ring: &'a Arc<Ring<K>>,
}

impl<K: Field> Parser<'_, K> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Syntax { offset: self.pos, message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<Poly<K>, PolyError> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Poly<K>, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly<K>, PolyError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let u = self.unary()?;
            acc = &acc * &u;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly<K>, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let u = self.unary()?;
                Ok(-&u)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly<K>, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = core::str::from_utf8(&self.src[start..self.pos]).map_err(|_| self.err("invalid utf-8"))?;
        s.parse::<BigInt>().map_err(|_| self.err("invalid integer"))
    }

    fn atom(&mut self) -> Result<Poly<K>, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let save = self.pos;
                // A rational literal is `num/den` with only digits around the slash.
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let den = self.integer()?;
                    if den.is_zero() {
                        self.pos = save;
                        return Err(self.err("zero denominator"));
                    }
                    Ok(Poly::from_rational(self.ring, &Rational::new(n, den)))
                } else {
                    Ok(Poly::from_rational(self.ring, &Rational::from_integer(n)))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).map_err(|_| self.err("invalid utf-8"))?;
                if let Some(i) = self.ring.var_index(name) {
                    Ok(Poly::var(self.ring, i))
                } else if let Some(c) = K::named_constant(&self.ring.ctx, name) {
                    Ok(Poly::constant(self.ring, c))
                } else {
                    Err(PolyError::UnknownVariable { offset: start, name: name.into() })
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses `text` in `ring`. See [`Poly::parse`].
pub fn parse_poly<K: Field>(text: &str, ring: &Arc<Ring<K>>) -> Result<Poly<K>, PolyError> {
    Poly::parse(text, ring)
}

/// Rings over ℚ, the common case.
pub type QRing = Ring<Rational>;
/// Polynomials over ℚ.
pub type QPoly = Poly<Rational>;

/// ℚ[vars], panicking on invalid names. Convenient for fixed internal rings.
pub fn qring(vars: &[&str]) -> Arc<QRing> {
    Ring::new(vars, ()).expect("valid variable names")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{cyclotomic_field, frac, rat, FieldElem};

    fn p(s: &str, r: &Arc<QRing>) -> QPoly {
        Poly::parse(s, r).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let r = qring(&["x", "y"]);
        let a = p("x^2*y + 3/2*x - 1", &r);
        assert_eq!(a.num_terms(), 3);
        assert_eq!(a.to_string(), "x^2*y + 3/2*x - 1");
        assert!(p("0", &r).is_zero());
        assert_eq!(p("(x+y)^2", &r), p("x^2 + 2*x*y + y^2", &r));
        assert_eq!(p("-x^2", &r).to_string(), "-x^2");
        assert_eq!(p("2*-x", &r).to_string(), "-2*x");
    }

    #[test]
    fn parse_errors() {
        let r = qring(&["x", "y"]);
        assert_eq!(
            Poly::parse("x + z", &r),
            Err(PolyError::UnknownVariable { offset: 4, name: "z".into() })
        );
        assert!(matches!(Poly::parse("x +", &r), Err(PolyError::Syntax { offset: 3, .. })));
        assert!(matches!(Poly::parse("x y", &r), Err(PolyError::Syntax { offset: 2, .. })));
        assert!(matches!(Poly::parse("1/0", &r), Err(PolyError::Syntax { .. })));
    }

    #[test]
    fn degrevlex_order() {
        let r = qring(&["x", "y", "z"]);
        // x^2 > xy > y^2 > xz > yz > z^2 in degrevlex
        let q = p("z^2 + y*z + x*z + y^2 + x*y + x^2", &r);
        assert_eq!(q.to_string(), "x^2 + x*y + y^2 + x*z + y*z + z^2");
    }

    #[test]
    fn arithmetic_examples() {
        let r = qring(&["x", "y"]);
        assert_eq!(&p("x+y", &r) * &p("x-y", &r), p("x^2-y^2", &r));
        assert_eq!(p("x+y", &r).pow(0), p("1", &r));
        assert_eq!(&p("x^2*y+3/2*x-1", &r) * &p("2*x", &r), p("2*x^3*y+3*x^2-2*x", &r));
        let other = qring(&["u"]);
        assert_eq!(p("x", &r).checked_add(&p("u", &other)), Err(PolyError::RingMismatch));
    }

    #[test]
    fn derivative_examples() {
        let r = qring(&["x", "y"]);
        assert_eq!(p("x^2*y", &r).differentiate(0), p("2*x*y", &r));
        assert!(p("7", &r).differentiate(0).is_zero());
        assert_eq!(p("y^2-x^3", &r).differentiate(1), p("2*y", &r));
    }

    #[test]
    fn substitute_examples() {
        let r = qring(&["x", "y"]);
        let f = p("x+y^2", &r);
        assert_eq!(f.substitute(&[p("x-y^2", &r), p("y", &r)]).unwrap(), p("x", &r));
        assert_eq!(f.substitute(&[p("x", &r), p("y", &r)]).unwrap(), f);
        let rz = qring(&["z"]);
        let xy = p("x*y", &r);
        assert_eq!(xy.substitute(&[p("z^2", &rz), p("z^3", &rz)]).unwrap(), p("z^5", &rz));
        assert!(matches!(xy.substitute(&[p("z", &rz)]), Err(PolyError::Arity { .. })));
    }

    #[test]
    fn weighted_degrees() {
        let r = qring(&["x", "y"]);
        assert_eq!(p("x^2*y", &r).degrees(&[2, 3]).unwrap().wdeg, WDeg::Finite(7));
        let d = p("x^3+x*y", &r).degrees(&[1, 1]).unwrap();
        assert_eq!(d.parts.len(), 2);
        assert_eq!(d.parts[&3], p("x^3", &r));
        assert_eq!(d.parts[&2], p("x*y", &r));
        assert_eq!(d.top, p("x^3", &r));
        let d = p("x^3+x*y", &r).degrees(&[1, 3]).unwrap();
        assert_eq!(d.top, p("x*y", &r));
        assert_eq!(d.wdeg, WDeg::Finite(4));
        let z = p("0", &r).degrees(&[1, 1]).unwrap();
        assert_eq!(z.wdeg, WDeg::NegInfinity);
        assert!(z.parts.is_empty());
        assert!(WDeg::NegInfinity < WDeg::Finite(i64::MIN));
    }

    #[test]
    fn content_examples() {
        let r = qring(&["x", "y"]);
        let (c, q) = content_primitive(&p("6*x^2+4*x", &r)).unwrap();
        assert_eq!(c, rat(2));
        assert_eq!(q, p("3*x^2+2*x", &r));
        let (c, _) = content_primitive(&(&p("3*x+2", &r) * &p("5*y+7", &r))).unwrap();
        assert_eq!(c, rat(1));
        let (c, q) = content_primitive(&p("1/2*x+1/3", &r)).unwrap();
        assert_eq!(c, frac(1, 6));
        assert_eq!(q, p("3*x+2", &r));
        let (c, q) = content_primitive(&p("-2*x+4", &r)).unwrap();
        assert_eq!(c, rat(-2));
        assert_eq!(q, p("x-2", &r));
        assert_eq!(content_primitive(&p("0", &r)), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn newton_examples() {
        let r = qring(&["x", "y"]);
        assert_eq!(newton_polygon(&p("y^2-x^3", &r)).unwrap().hull_vertices, vec![(0, 0), (3, 0), (0, 2)]);
        assert_eq!(newton_polygon(&p("1", &r)).unwrap().hull_vertices, vec![(0, 0)]);
        assert_eq!(
            newton_polygon(&p("x+y+x*y", &r)).unwrap().hull_vertices,
            vec![(0, 0), (1, 0), (1, 1), (0, 1)]
        );
        assert_eq!(newton_polygon(&p("x^2", &r)).unwrap().hull_vertices, vec![(0, 0), (2, 0)]);
    }

    #[test]
    fn number_field_coefficients() {
        let k = cyclotomic_field(3);
        let r: Arc<Ring<FieldElem>> = Ring::new(&["x"], k.clone()).unwrap();
        let a = Poly::parse("t*x + 1", &r).unwrap();
        let b = Poly::parse("t^2*x + 1", &r).unwrap();
        // (tx+1)(t^2x+1) = x^2 + (t + t^2)x + 1 = x^2 - x + 1
        assert_eq!(&a * &b, Poly::parse("x^2 - x + 1", &r).unwrap());
        assert_eq!(a.to_string(), "(t)*x + 1");
        assert_eq!(Poly::parse(&a.to_string(), &r).unwrap(), a);
        assert!(matches!(Ring::<FieldElem>::new(&["t"], k), Err(PolyError::ReservedVariable(_))));
    }
}
