//! Coefficient fields: ℚ and simple extensions ℚ[t]/(m(t)).

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number, always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`. Panics when `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Field of coefficients for [`crate::poly::Poly`].
///
/// `Ctx` carries whatever is needed to build constants (nothing for ℚ, the
/// defining polynomial for an extension).
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    type Ctx: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero_in(ctx: &Self::Ctx) -> Self;
    fn one_in(ctx: &Self::Ctx) -> Self;
    fn from_q(ctx: &Self::Ctx, q: &Rational) -> Self;
    fn vanishes(&self) -> bool;
    fn is_unity(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Multiplicative inverse; `None` for zero (or a zero divisor in a
    /// non-field quotient).
    fn inverse(&self) -> Option<Self>;
    /// The value as a rational number, when it lies in the prime field.
    fn to_rational(&self) -> Option<Rational>;
    /// Constants addressable by name in the polynomial parser (the generator
    /// of an extension).
    fn named_constant(_ctx: &Self::Ctx, _name: &str) -> Option<Self> {
        None
    }
    /// Symbol reserved by the field, which ring variables must avoid.
    fn reserved_symbol(_ctx: &Self::Ctx) -> Option<&str> {
        None
    }

    fn from_int(ctx: &Self::Ctx, n: i64) -> Self {
        Self::from_q(ctx, &rat(n))
    }

    fn power(&self, mut e: u64) -> Self
    where
        Self: Sized,
    {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        acc
    }

    /// The unit element of the field `self` lives in.
    fn one_like(&self) -> Self;
}

impl Field for Rational {
    type Ctx = ();

    fn zero_in(_: &()) -> Self {
        Rational::zero()
    }
    fn one_in(_: &()) -> Self {
        Rational::one()
    }
    fn from_q(_: &(), q: &Rational) -> Self {
        q.clone()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unity(&self) -> bool {
        One::is_one(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
}

// ---------------------------------------------------------------------------
// Dense univariate polynomials over ℚ, low degree first. Used for the
// modulus of a number field, residues, and cyclotomic polynomials.

pub(crate) mod upoly {
    use super::Rational;
    use alloc::vec;
    use alloc::vec::Vec;
    use num_traits::Zero;

    pub fn trim(p: &mut Vec<Rational>) {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
    }

    pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
            out.push(x - y);
        }
        trim(&mut out);
        out
    }

    pub fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(&mut out);
        out
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let mut r: Vec<Rational> = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead = b[db].clone();
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![Rational::zero(); r.len() - db];
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1 - db;
            let c = &r[r.len() - 1] / &lead;
            for (i, bi) in b.iter().enumerate() {
                let t = &c * bi;
                r[k + i] -= t;
            }
            q[k] = c;
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    /// Returns (g, s) with s·a ≡ g (mod m) and g = gcd(a, m) made monic.
    pub fn ext_gcd_mod(a: &[Rational], m: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let mut r0: Vec<Rational> = m.to_vec();
        let mut r1: Vec<Rational> = a.to_vec();
        trim(&mut r1);
        let mut s0: Vec<Rational> = Vec::new();
        let mut s1: Vec<Rational> = vec![Rational::from_integer(1.into())];
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1);
            let s = sub(&s0, &mul(&q, &s1));
            r0 = core::mem::replace(&mut r1, r);
            s0 = core::mem::replace(&mut s1, s);
        }
        if let Some(l) = r0.last().cloned() {
            for c in r0.iter_mut() {
                *c = &*c / &l;
            }
            for c in s0.iter_mut() {
                *c = &*c / &l;
            }
        }
        (r0, s0)
    }
}

/// A simple algebraic extension ℚ[t]/(m(t)) with `m` monic.
///
/// Irreducibility of `m` is the caller's responsibility; cyclotomic moduli
/// are irreducible. Inverting a zero divisor of a reducible modulus returns
/// `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberField {
    modulus: Vec<Rational>,
    symbol: String,
    cyclotomic_order: Option<u64>,
}

/// Errors building a number field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldError {
    NotMonic,
    ZeroDegree,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NotMonic => write!(f, "minimal polynomial must be monic"),
            FieldError::ZeroDegree => write!(f, "minimal polynomial must have degree at least 1"),
        }
    }
}

impl core::error::Error for FieldError {}

impl NumberField {
    /// Field defined by `modulus`, coefficients listed from the constant term up.
    pub fn new(modulus: Vec<Rational>, symbol: &str) -> Result<Self, FieldError> {
        let mut m = modulus;
        upoly::trim(&mut m);
        if m.len() < 2 {
            return Err(FieldError::ZeroDegree);
        }
        if !m.last().is_some_and(|c| c.is_one()) {
            return Err(FieldError::NotMonic);
        }
        Ok(NumberField { modulus: m, symbol: symbol.into(), cyclotomic_order: None })
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Coefficients of the minimal polynomial, constant term first.
    pub fn minimal_polynomial(&self) -> &[Rational] {
        &self.modulus
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    /// `Some(d)` when this is ℚ(ζ_d) built by [`cyclotomic_field`].
    pub fn cyclotomic_order(&self) -> Option<u64> {
        self.cyclotomic_order
    }

    fn reduce(&self, mut p: Vec<Rational>) -> Vec<Rational> {
        upoly::trim(&mut p);
        let n = self.degree();
        while p.len() > n {
            let k = p.len() - 1 - n;
            let c = p.pop().unwrap_or_else(Rational::zero);
            if !c.is_zero() {
                for i in 0..n {
                    let t = &c * &self.modulus[i];
                    p[k + i] -= t;
                }
            }
            upoly::trim(&mut p);
        }
        p.resize(n, Rational::zero());
        p
    }
}

/// ℚ[t]/(Φ_d(t)). Φ_d is computed by exact division of t^d − 1 by the Φ_e for
/// proper divisors e of d. Results are memoized per process when `std` is on.
pub fn cyclotomic_field(d: u64) -> Arc<NumberField> {
    assert!(d >= 1, "cyclotomic order must be positive");
    #[cfg(feature = "std")]
    {
        use std::collections::BTreeMap;
        use std::sync::{Mutex, OnceLock};
        static CACHE: OnceLock<Mutex<BTreeMap<u64, Arc<NumberField>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
        if let Some(f) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&d) {
            return f.clone();
        }
        let f = Arc::new(build_cyclotomic(d));
        cache.lock().unwrap_or_else(|e| e.into_inner()).insert(d, f.clone());
        f
    }
    #[cfg(not(feature = "std"))]
    {
        Arc::new(build_cyclotomic(d))
    }
}

/// Φ_d as a dense coefficient vector, constant term first.
pub fn cyclotomic_polynomial(d: u64) -> Vec<Rational> {
    assert!(d >= 1, "cyclotomic order must be positive");
    let mut num = vec![Rational::zero(); d as usize + 1];
    num[0] = -Rational::one();
    num[d as usize] = Rational::one();
    for e in 1..d {
        if d.is_multiple_of(e) {
            let (q, r) = upoly::divrem(&num, &cyclotomic_polynomial(e));
            debug_assert!(r.is_empty());
            num = q;
        }
    }
    num
}

fn build_cyclotomic(d: u64) -> NumberField {
    NumberField {
        modulus: cyclotomic_polynomial(d),
        symbol: "t".into(),
        cyclotomic_order: Some(d),
    }
}

/// Element of a [`NumberField`], stored as its reduced residue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElem {
    field: Arc<NumberField>,
    residue: Vec<Rational>,
}

impl FieldElem {
    pub fn new(field: &Arc<NumberField>, coeffs: Vec<Rational>) -> Self {
        let residue = field.reduce(coeffs);
        FieldElem { field: field.clone(), residue }
    }

    pub fn from_rational(field: &Arc<NumberField>, q: &Rational) -> Self {
        let mut residue = vec![Rational::zero(); field.degree()];
        residue[0] = q.clone();
        FieldElem { field: field.clone(), residue }
    }

    /// The class of t.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        FieldElem::new(field, vec![Rational::zero(), Rational::one()])
    }

    /// t^j for any integer j (negative powers via the inverse).
    pub fn generator_pow(field: &Arc<NumberField>, j: i64) -> Self {
        let t = FieldElem::generator(field);
        if j >= 0 {
            t.power(j as u64)
        } else {
            let ti = t.inverse().expect("generator is a unit");
            ti.power(j.unsigned_abs())
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn residue(&self) -> &[Rational] {
        &self.residue
    }
}

impl Field for FieldElem {
    type Ctx = Arc<NumberField>;

    fn zero_in(ctx: &Self::Ctx) -> Self {
        FieldElem { field: ctx.clone(), residue: vec![Rational::zero(); ctx.degree()] }
    }
    fn one_in(ctx: &Self::Ctx) -> Self {
        FieldElem::from_rational(ctx, &Rational::one())
    }
    fn from_q(ctx: &Self::Ctx, q: &Rational) -> Self {
        FieldElem::from_rational(ctx, q)
    }
    fn vanishes(&self) -> bool {
        self.residue.iter().all(|c| c.is_zero())
    }
    fn is_unity(&self) -> bool {
        One::is_one(&self.residue[0]) && self.residue[1..].iter().all(|c| c.is_zero())
    }
    fn plus(&self, other: &Self) -> Self {
        debug_assert!(self.field == other.field);
        let residue = self.residue.iter().zip(&other.residue).map(|(a, b)| a + b).collect();
        FieldElem { field: self.field.clone(), residue }
    }
    fn minus(&self, other: &Self) -> Self {
        debug_assert!(self.field == other.field);
        let residue = self.residue.iter().zip(&other.residue).map(|(a, b)| a - b).collect();
        FieldElem { field: self.field.clone(), residue }
    }
    fn times(&self, other: &Self) -> Self {
        debug_assert!(self.field == other.field);
        if self.field.degree() == 1 {
            return FieldElem {
                field: self.field.clone(),
                residue: vec![&self.residue[0] * &other.residue[0]],
            };
        }
        let prod = upoly::mul(&self.residue, &other.residue);
        FieldElem { field: self.field.clone(), residue: self.field.reduce(prod) }
    }
    fn negated(&self) -> Self {
        FieldElem { field: self.field.clone(), residue: self.residue.iter().map(|c| -c).collect() }
    }
    fn inverse(&self) -> Option<Self> {
        if self.vanishes() {
            return None;
        }
        let (g, s) = upoly::ext_gcd_mod(&self.residue, &self.field.modulus);
        if g.len() != 1 {
            return None;
        }
        Some(FieldElem::new(&self.field, s))
    }
    fn to_rational(&self) -> Option<Rational> {
        if self.residue[1..].iter().all(|c| c.is_zero()) {
            Some(self.residue[0].clone())
        } else {
            None
        }
    }
    fn named_constant(ctx: &Self::Ctx, name: &str) -> Option<Self> {
        (name == ctx.symbol).then(|| FieldElem::generator(ctx))
    }
    fn reserved_symbol(ctx: &Self::Ctx) -> Option<&str> {
        Some(ctx.symbol.as_str())
    }
    fn one_like(&self) -> Self {
        FieldElem::one_in(&self.field)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_dense(f, &self.residue, &self.field.symbol)
    }
}

/// Prints a dense univariate polynomial, highest degree first.
pub(crate) fn write_dense(f: &mut fmt::Formatter<'_>, coeffs: &[Rational], sym: &str) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        first = false;
        match k {
            0 => write!(f, "{a}")?,
            _ => {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write!(f, "{sym}")?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_small_orders() {
        assert_eq!(cyclotomic_polynomial(1), vec![rat(-1), rat(1)]);
        assert_eq!(cyclotomic_polynomial(4), vec![rat(1), rat(0), rat(1)]);
        assert_eq!(cyclotomic_polynomial(6), vec![rat(1), rat(-1), rat(1)]);
        assert_eq!(cyclotomic_polynomial(12), vec![rat(1), rat(0), rat(-1), rat(0), rat(1)]);
    }

    #[test]
    fn generator_has_exact_order() {
        for d in 1..=12u64 {
            let k = cyclotomic_field(d);
            let t = FieldElem::generator(&k);
            for e in 1..d {
                assert!(!t.power(e).is_unity(), "t^{e} = 1 in Q(zeta_{d})");
            }
            assert!(t.power(d).is_unity());
        }
    }

    #[test]
    fn inverse_in_q_zeta_5() {
        let k = cyclotomic_field(5);
        let x = FieldElem::new(&k, vec![rat(2), rat(-1), frac(1, 3)]);
        let y = x.inverse().unwrap();
        assert!(x.times(&y).is_unity());
    }

    #[test]
    fn degree_one_field_is_q() {
        let k = cyclotomic_field(2);
        assert_eq!(k.degree(), 1);
        let t = FieldElem::generator(&k);
        assert_eq!(t.to_rational(), Some(rat(-1)));
        assert_eq!(format!("{}", FieldElem::new(&k, vec![rat(0), rat(1), rat(1)])), "0");
    }

    #[test]
    fn memoized_field_is_shared() {
        let a = cyclotomic_field(7);
        let b = cyclotomic_field(7);
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn display_dense() {
        let k = cyclotomic_field(3);
        let x = FieldElem::new(&k, vec![rat(3), frac(-1, 2)]);
        assert_eq!(format!("{x}"), "-1/2*t + 3");
    }
}
