//! Derivations of polynomial rings, local nilpotency, exponential maps and
//! slice decompositions.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::field::{Field, Rational};
use crate::keller::{invert_exact, is_keller, KellerError, PolyMap};
use crate::poly::{Poly, PolyError, Ring};

#[derive(Clone, Debug, PartialEq)]
pub enum LndError<K: Field> {
    Poly(PolyError),
    Keller(KellerError),
    /// The operation needs a locally nilpotent derivation; this is what the
    /// nilpotency test returned instead.
    NotVerified(NilpotencyVerdict<K>),
    NotASlice,
    CapExceeded { cap: u32 },
    /// The inverse of (f, g) was not found within the cap.
    Inconclusive { cap: u32 },
    NotTwoVariables,
}

impl<K: Field> fmt::Display for LndError<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LndError::Poly(e) => write!(f, "{e}"),
            LndError::Keller(e) => write!(f, "{e}"),
            LndError::NotVerified(v) => write!(f, "derivation not verified locally nilpotent: {v}"),
            LndError::NotASlice => write!(f, "element is not a slice (δ(u) ≠ 1)"),
            LndError::CapExceeded { cap } => write!(f, "iteration cap {cap} exceeded"),
            LndError::Inconclusive { cap } => write!(f, "no polynomial inverse found up to degree {cap}"),
            LndError::NotTwoVariables => write!(f, "operation needs exactly two variables"),
        }
    }
}

impl<K: Field> core::error::Error for LndError<K> {}

impl<K: Field> From<PolyError> for LndError<K> {
    fn from(e: PolyError) -> Self {
        LndError::Poly(e)
    }
}

impl<K: Field> From<KellerError> for LndError<K> {
    fn from(e: KellerError) -> Self {
        LndError::Keller(e)
    }
}

/// A K-derivation of K[x₁,…,xₙ], determined by the images of the variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation<K: Field> {
    ring: Arc<Ring<K>>,
    images: Vec<Poly<K>>,
}

impl<K: Field> Derivation<K> {
    pub fn new(ring: &Arc<Ring<K>>, images: Vec<Poly<K>>) -> Result<Self, PolyError> {
        if images.len() != ring.nvars() {
            return Err(PolyError::Arity { expected: ring.nvars(), got: images.len() });
        }
        let probe = Poly::zero(ring);
        if images.iter().any(|p| !p.same_ring(&probe)) {
            return Err(PolyError::RingMismatch);
        }
        Ok(Derivation { ring: ring.clone(), images })
    }

    /// ∂/∂xᵢ.
    pub fn partial(ring: &Arc<Ring<K>>, i: usize) -> Result<Self, PolyError> {
        if i >= ring.nvars() {
            return Err(PolyError::VariableIndex(i));
        }
        let images = (0..ring.nvars()).map(|j| if i == j { Poly::one(ring) } else { Poly::zero(ring) }).collect();
        Ok(Derivation { ring: ring.clone(), images })
    }

    pub fn ring(&self) -> &Arc<Ring<K>> {
        &self.ring
    }

    pub fn images(&self) -> &[Poly<K>] {
        &self.images
    }

    /// δ(p) = Σⱼ ∂p/∂xⱼ · δ(xⱼ).
    pub fn apply(&self, p: &Poly<K>) -> Poly<K> {
        assert!(p.same_ring(&Poly::zero(&self.ring)), "derivation applied across rings");
        let mut acc = Poly::zero(&self.ring);
        for (j, img) in self.images.iter().enumerate() {
            if img.is_zero() {
                continue;
            }
            let d = p.differentiate(j);
            if !d.is_zero() {
                acc = &acc + &(&d * img);
            }
        }
        acc
    }

    pub fn apply_n(&self, p: &Poly<K>, k: u32) -> Poly<K> {
        let mut q = p.clone();
        for _ in 0..k {
            if q.is_zero() {
                break;
            }
            q = self.apply(&q);
        }
        q
    }

    /// ℓ(p) = min{n : δⁿ⁺¹(p) = 0}, if it is at most `cap`.
    pub fn length(&self, p: &Poly<K>, cap: u32) -> Option<u32> {
        let mut q = p.clone();
        for n in 0..=cap {
            q = self.apply(&q);
            if q.is_zero() {
                return Some(n);
            }
        }
        None
    }

    /// Default iteration cap for the nilpotency test: 1 + 8·Σ deg δ(xᵢ).
    pub fn default_cap(&self) -> u32 {
        1 + 8 * self.images.iter().filter_map(|p| p.total_degree()).sum::<u32>()
    }
}

impl<K: Field> fmt::Display for Derivation<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, img)) in self.ring.vars().iter().zip(&self.images).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} -> {img}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NilpotencyVerdict<K: Field> {
    /// Every generator is killed; `bound` is the largest generator length.
    LocallyNilpotent { bound: u32 },
    /// δ^{iterate − earlier}(δ^{earlier}(x_generator)) = scalar · δ^{earlier}(x_generator)
    /// with a nonzero scalar, so no power of δ kills it.
    NotNilpotentWitness { generator: usize, earlier: u32, iterate: u32, scalar: K },
    UnknownCapExceeded { cap: u32 },
}

impl<K: Field> fmt::Display for NilpotencyVerdict<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NilpotencyVerdict::LocallyNilpotent { bound } => write!(f, "locally nilpotent (bound {bound})"),
            NilpotencyVerdict::NotNilpotentWitness { generator, earlier, iterate, scalar } => write!(
                f,
                "not locally nilpotent: iterate {iterate} of generator {generator} is {scalar} times iterate {earlier}"
            ),
            NilpotencyVerdict::UnknownCapExceeded { cap } => write!(f, "unknown (cap {cap} exceeded)"),
        }
    }
}

/// Scalar c with p = c·q, if any.
fn scalar_multiple<K: Field>(p: &Poly<K>, q: &Poly<K>) -> Option<K> {
    if p.num_terms() != q.num_terms() {
        return None;
    }
    let (m, c) = p.leading_term()?;
    let d = q.coeff(m);
    let c = c.times(&d.inverse()?);
    (q.scale(&c) == *p).then_some(c)
}

pub fn is_locally_nilpotent<K: Field>(delta: &Derivation<K>, cap: u32) -> NilpotencyVerdict<K> {
    let mut bound = 0;
    let mut capped = false;
    for g in 0..delta.ring.nvars() {
        let mut history: Vec<Poly<K>> = vec![Poly::var(&delta.ring, g)];
        let mut done = false;
        for k in 1..=cap + 1 {
            let next = delta.apply(history.last().expect("nonempty"));
            if next.is_zero() {
                bound = bound.max(k - 1);
                done = true;
                break;
            }
            for (j, earlier) in history.iter().enumerate() {
                if let Some(c) = scalar_multiple(&next, earlier) {
                    return NilpotencyVerdict::NotNilpotentWitness {
                        generator: g,
                        earlier: j as u32,
                        iterate: k,
                        scalar: c,
                    };
                }
            }
            history.push(next);
        }
        if !done {
            capped = true;
        }
    }
    if capped {
        NilpotencyVerdict::UnknownCapExceeded { cap }
    } else {
        NilpotencyVerdict::LocallyNilpotent { bound }
    }
}

fn inv_factorial<K: Field>(ctx: &K::Ctx, n: u32) -> K {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= k;
    }
    K::from_q(ctx, &Rational::new(BigInt::one(), f))
}

/// Σₙ δⁿ(p)·cⁿ/n! with c a polynomial in the same ring as p. The series
/// must terminate; callers establish that first.
fn exp_series<K: Field>(delta: &Derivation<K>, p: &Poly<K>, c: &Poly<K>) -> Poly<K> {
    let ctx = delta.ring.ctx();
    let mut acc = Poly::zero(c.ring());
    let mut term = p.clone();
    let mut cpow = Poly::one(c.ring());
    let mut n = 0u32;
    while !term.is_zero() {
        let lifted = term.embed_prefix(c.ring());
        acc = &acc + &(&lifted * &cpow).scale(&inv_factorial::<K>(ctx, n));
        term = delta.apply(&term);
        cpow = &cpow * c;
        n += 1;
    }
    acc
}

fn require_lnd<K: Field>(delta: &Derivation<K>) -> Result<(), LndError<K>> {
    match is_locally_nilpotent(delta, delta.default_cap()) {
        NilpotencyVerdict::LocallyNilpotent { .. } => Ok(()),
        v => Err(LndError::NotVerified(v)),
    }
}

/// exp(tδ)(p) in K[x₁,…,xₙ, t]. The new variable is the last one, named `t`
/// unless that name is taken.
pub fn exp_map<K: Field>(delta: &Derivation<K>, p: &Poly<K>) -> Result<Poly<K>, LndError<K>> {
    require_lnd(delta)?;
    if !p.same_ring(&Poly::zero(&delta.ring)) {
        return Err(PolyError::RingMismatch.into());
    }
    let ext = delta.ring.extend(&["t"]);
    let t = Poly::var(&ext, delta.ring.nvars());
    Ok(exp_series(delta, p, &t))
}

/// The automorphism exp(cδ) as a map xᵢ ↦ exp(cδ)(xᵢ).
pub fn ga_automorphism<K: Field>(delta: &Derivation<K>, c: &K) -> Result<PolyMap<K>, LndError<K>> {
    require_lnd(delta)?;
    let cp = Poly::constant(&delta.ring, c.clone());
    let comps = (0..delta.ring.nvars()).map(|i| exp_series(delta, &Poly::var(&delta.ring, i), &cp)).collect();
    Ok(PolyMap::new(&delta.ring, comps)?)
}

/// Coefficients c₀,…,c_ℓ in ker δ with p = Σ cᵢ uⁱ, for a slice u (δ(u) = 1).
pub fn slice_decompose<K: Field>(
    delta: &Derivation<K>,
    u: &Poly<K>,
    p: &Poly<K>,
    cap: u32,
) -> Result<Vec<Poly<K>>, LndError<K>> {
    if !delta.apply(u).is_one() {
        return Err(LndError::NotASlice);
    }
    let ctx = delta.ring.ctx();
    let mut coeffs: Vec<Poly<K>> = Vec::new();
    let mut a = p.clone();
    while !a.is_zero() {
        let n = delta.length(&a, cap).ok_or(LndError::CapExceeded { cap })?;
        let c = delta.apply_n(&a, n).scale(&inv_factorial::<K>(ctx, n));
        let n = n as usize;
        if coeffs.len() <= n {
            coeffs.resize(n + 1, Poly::zero(&delta.ring));
        }
        a = &a - &(&c * &u.pow(n as u32));
        coeffs[n] = &coeffs[n] + &c;
    }
    debug_assert!(coeffs.iter().all(|c| delta.apply(c).is_zero()));
    Ok(coeffs)
}

/// Result of checking that δ is conjugate to a multiple of a partial
/// derivative via the automorphism (f, g).
#[derive(Clone, Debug, PartialEq)]
pub struct RentschlerReport<K: Field> {
    pub holds: bool,
    /// φ with δ(g) = φ(f), written as a polynomial in the first variable.
    pub kernel_part: Option<Poly<K>>,
}

/// Checks δ = φ(f)·∂/∂g: (f, g) is an automorphism, δ(f) = 0 and δ(g) ∈ K[f].
pub fn rentschler_verify<K: Field>(
    delta: &Derivation<K>,
    f: &Poly<K>,
    g: &Poly<K>,
    cap: u32,
) -> Result<RentschlerReport<K>, LndError<K>> {
    if delta.ring.nvars() != 2 {
        return Err(LndError::NotTwoVariables);
    }
    let no = RentschlerReport { holds: false, kernel_part: None };
    let map = PolyMap::new(&delta.ring, vec![f.clone(), g.clone()])?;
    if !is_keller(&map) {
        return Ok(no);
    }
    let inv = invert_exact(&map, cap)?.ok_or(LndError::Inconclusive { cap })?;
    if !delta.apply(f).is_zero() {
        return Ok(no);
    }
    let phi = delta.apply(g).substitute(inv.components())?;
    if phi.degree_in(1).unwrap_or(0) > 0 {
        return Ok(no);
    }
    Ok(RentschlerReport { holds: true, kernel_part: Some(phi) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use crate::poly::qring;

    fn der(vars: &[&str], imgs: &[&str]) -> Derivation<Rational> {
        let r = qring(vars);
        Derivation::new(&r, imgs.iter().map(|s| Poly::parse(s, &r).unwrap()).collect()).unwrap()
    }

    #[test]
    fn lengths() {
        let d = der(&["x", "y"], &["y", "0"]);
        let e = |s: &str| Poly::parse(s, d.ring()).unwrap();
        assert_eq!(d.length(&e("x^3"), 10), Some(3));
        assert_eq!(d.length(&e("y"), 10), Some(0));
        assert_eq!(d.length(&e("0"), 10), Some(0));
        let d = der(&["x", "y"], &["0", "y"]);
        assert_eq!(d.length(&Poly::parse("y", d.ring()).unwrap(), 10), None);
    }

    #[test]
    fn verdicts() {
        let d = der(&["x", "y"], &["y", "0"]);
        assert_eq!(is_locally_nilpotent(&d, 20), NilpotencyVerdict::LocallyNilpotent { bound: 1 });
        let d = der(&["x", "y"], &["0", "y"]);
        assert!(matches!(
            is_locally_nilpotent(&d, 20),
            NilpotencyVerdict::NotNilpotentWitness { generator: 1, earlier: 0, iterate: 1, .. }
        ));
        // δ(x) = y, δ(y) = −x: δ²(x) = −x
        let d = der(&["x", "y"], &["y", "-x"]);
        match is_locally_nilpotent(&d, 20) {
            NilpotencyVerdict::NotNilpotentWitness { scalar, .. } => assert_eq!(scalar, rat(-1)),
            v => panic!("{v}"),
        }
        // δ(x) = x²: iterates grow without repeating up to scale
        let d = der(&["x"], &["x^2"]);
        assert_eq!(is_locally_nilpotent(&d, 6), NilpotencyVerdict::UnknownCapExceeded { cap: 6 });
    }

    #[test]
    fn triangular_bound() {
        let d = der(&["x", "y", "z"], &["0", "x", "y"]);
        assert_eq!(is_locally_nilpotent(&d, d.default_cap()), NilpotencyVerdict::LocallyNilpotent { bound: 2 });
    }

    #[test]
    fn exp_examples() {
        let d = der(&["x", "y"], &["0", "1"]);
        let r = d.ring().clone();
        let e = exp_map(&d, &Poly::parse("y", &r).unwrap()).unwrap();
        assert_eq!(e.to_string(), "y + t");
        let d = der(&["x", "y"], &["y", "0"]);
        let e = exp_map(&d, &Poly::parse("x", &r).unwrap()).unwrap();
        assert_eq!(e, Poly::parse("x + t*y", e.ring()).unwrap());
        let e = exp_map(&d, &Poly::parse("x^2", &r).unwrap()).unwrap();
        assert_eq!(e, Poly::parse("(x + t*y)^2", e.ring()).unwrap());
        let bad = der(&["x", "y"], &["0", "y"]);
        assert!(matches!(exp_map(&bad, &Poly::parse("y", &r).unwrap()), Err(LndError::NotVerified(_))));
    }

    #[test]
    fn exp_avoids_taken_name() {
        let d = der(&["t", "y"], &["y", "0"]);
        let e = exp_map(&d, &Poly::var(d.ring(), 0)).unwrap();
        assert_eq!(e.ring().vars(), ["t", "y", "t1"]);
        assert_eq!(e.to_string(), "y*t1 + t");
    }

    #[test]
    fn ga_examples() {
        let d = der(&["x", "y"], &["y", "0"]);
        let g = ga_automorphism(&d, &rat(3)).unwrap();
        assert_eq!(g.components()[0], Poly::parse("x+3*y", d.ring()).unwrap());
        assert!(ga_automorphism(&d, &rat(0)).unwrap().is_identity());
    }

    #[test]
    fn slice_examples() {
        let d = der(&["x", "y"], &["0", "1"]);
        let e = |s: &str| Poly::parse(s, d.ring()).unwrap();
        let c = slice_decompose(&d, &e("y"), &e("x*y^2+3*y+x"), 20).unwrap();
        assert_eq!(c, vec![e("x"), e("3"), e("x")]);
        assert_eq!(slice_decompose(&d, &e("x"), &e("y"), 20), Err(LndError::NotASlice));
        // slice u = y + x² for δ = ∂/∂y
        let c = slice_decompose(&d, &e("y+x^2"), &e("y^2"), 20).unwrap();
        assert_eq!(c, vec![e("x^4"), e("-2*x^2"), e("1")]);
    }

    #[test]
    fn rentschler_examples() {
        let d = der(&["x", "y"], &["0", "1"]);
        let e = |s: &str| Poly::parse(s, d.ring()).unwrap();
        let r = rentschler_verify(&d, &e("x"), &e("y"), 16).unwrap();
        assert!(r.holds);
        assert_eq!(r.kernel_part, Some(e("1")));
        // δ = x²∂/∂y: δ(g) = x² = φ(f)
        let d2 = der(&["x", "y"], &["0", "x^2"]);
        let r = rentschler_verify(&d2, &e("x"), &e("y"), 16).unwrap();
        assert_eq!(r.kernel_part, Some(e("x^2")));
        // δ(x) = −2y, δ(y) = 1 kills x + y²
        let d3 = der(&["x", "y"], &["-2*y", "1"]);
        let r = rentschler_verify(&d3, &e("x+y^2"), &e("y"), 16).unwrap();
        assert!(r.holds);
        assert!(!rentschler_verify(&d3, &e("x"), &e("y"), 16).unwrap().holds);
    }
}
