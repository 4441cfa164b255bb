//! Explicit surfaces and maps: homomorphisms of quotient rings with
//! étaleness certificates, the cyclic covers x^r z + y^d + … = 1 and their
//! chart polynomials, equivariant sections, and isomorphism witnesses.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::field::{cyclotomic_field, frac, rat, Field, FieldElem, NumberField, Rational};
use crate::groebner::{groebner_basis, GroebnerError, GroebnerLimits, Ideal, MonomialOrder};
use crate::keller::determinant;
use crate::poly::{qring, Poly, PolyError, QPoly, QRing, Ring};

#[derive(Clone, Debug, PartialEq)]
pub enum CaseError {
    Poly(PolyError),
    Groebner(GroebnerError),
    BadParameter(&'static str),
    /// Zero pivot solving for c_k on the chart of t^j.
    ZeroPivot { root: u32, k: u32 },
    EquivarianceFailed { lambda: u32, omega: u32 },
    /// p′₁(λx) − p′_λ(λx) ≠ p′₁(x) − p′_λ(x) for λ = t^j.
    HypothesisFailed { lambda: u32 },
    /// f₁ computed from t^j differs from the one computed from t^1.
    Divergent { lambda: u32 },
    IdentityFailed(&'static str),
}

impl fmt::Display for CaseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseError::Poly(e) => write!(f, "{e}"),
            CaseError::Groebner(e) => write!(f, "{e}"),
            CaseError::BadParameter(p) => write!(f, "invalid parameter: {p}"),
            CaseError::ZeroPivot { root, k } => write!(f, "zero pivot for c_{k} on chart t^{root}"),
            CaseError::EquivarianceFailed { lambda, omega } => {
                write!(f, "equivariance fails for lambda = t^{lambda}, omega = t^{omega}")
            }
            CaseError::HypothesisFailed { lambda } => {
                write!(f, "p'_1(lx) - p'_l(lx) = p'_1(x) - p'_l(x) fails for l = t^{lambda}")
            }
            CaseError::Divergent { lambda } => write!(f, "f_1 from l = t^{lambda} disagrees with l = t"),
            CaseError::IdentityFailed(what) => write!(f, "identity check failed: {what}"),
        }
    }
}

impl core::error::Error for CaseError {}

impl From<PolyError> for CaseError {
    fn from(e: PolyError) -> Self {
        CaseError::Poly(e)
    }
}

impl From<GroebnerError> for CaseError {
    fn from(e: GroebnerError) -> Self {
        CaseError::Groebner(e)
    }
}

// ---------------------------------------------------------------------------
// Quotient rings and homomorphisms.

#[derive(Clone, Debug, PartialEq)]
pub struct QuotientRing {
    ring: Arc<QRing>,
    relations: Vec<QPoly>,
}

impl QuotientRing {
    pub fn new(ring: &Arc<QRing>, relations: Vec<QPoly>) -> Result<Self, CaseError> {
        let probe = Poly::zero(ring);
        if relations.iter().any(|r| !r.same_ring(&probe)) {
            return Err(PolyError::RingMismatch.into());
        }
        if relations.iter().any(|r| r.is_zero()) {
            return Err(PolyError::ZeroPolynomial.into());
        }
        Ok(QuotientRing { ring: ring.clone(), relations })
    }

    pub fn parse(vars: &[&str], relations: &[&str]) -> Result<Self, CaseError> {
        let ring = Ring::new(vars, ())?;
        let rels = relations.iter().map(|s| Poly::parse(s, &ring)).collect::<Result<_, _>>()?;
        QuotientRing::new(&ring, rels)
    }

    pub fn ring(&self) -> &Arc<QRing> {
        &self.ring
    }

    pub fn relations(&self) -> &[QPoly] {
        &self.relations
    }

    pub fn ideal(&self) -> Ideal<Rational> {
        Ideal::new(&self.ring, self.relations.clone(), MonomialOrder::DegRevLex).expect("same ring")
    }
}

/// φ: source → target given by the images of the source variables, as
/// polynomials over the target's ambient ring.
#[derive(Clone, Debug, PartialEq)]
pub struct RingHom {
    source: QuotientRing,
    target: QuotientRing,
    images: Vec<QPoly>,
}

impl RingHom {
    pub fn new(source: QuotientRing, target: QuotientRing, images: Vec<QPoly>) -> Result<Self, CaseError> {
        let n = source.ring.nvars();
        if images.len() != n {
            return Err(PolyError::Arity { expected: n, got: images.len() }.into());
        }
        let probe = Poly::zero(&target.ring);
        if images.iter().any(|p| !p.same_ring(&probe)) {
            return Err(PolyError::RingMismatch.into());
        }
        Ok(RingHom { source, target, images })
    }

    pub fn source(&self) -> &QuotientRing {
        &self.source
    }

    pub fn target(&self) -> &QuotientRing {
        &self.target
    }

    pub fn images(&self) -> &[QPoly] {
        &self.images
    }

    /// φ(p) for p in the source ambient ring.
    pub fn apply(&self, p: &QPoly) -> Result<QPoly, CaseError> {
        Ok(p.substitute(&self.images)?)
    }

    /// The endomorphism `self ∘ inner` as ring maps: xᵢ ↦ inner(self(xᵢ)).
    /// Both must be endomorphisms of the same quotient ring.
    pub fn compose(&self, inner: &RingHom) -> Result<RingHom, CaseError> {
        if self.source != self.target || inner.source != self.source || inner.target != self.target {
            return Err(CaseError::BadParameter("composition needs endomorphisms of one ring"));
        }
        let images = self.images.iter().map(|p| p.substitute(&inner.images)).collect::<Result<_, _>>()?;
        Ok(RingHom { source: self.source.clone(), target: self.target.clone(), images })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Cap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCheck {
    pub well_defined: Verdict,
    pub unramified: Verdict,
}

fn cap_or<T>(r: Result<T, GroebnerError>) -> Result<Option<T>, CaseError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(GroebnerError::Cap { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Maximal minors of a matrix with at least as many rows as columns.
fn maximal_minors(ring: &Arc<QRing>, m: &[Vec<QPoly>]) -> Vec<QPoly> {
    let rows = m.len();
    let n = m.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (0..n).collect();
    if rows < n {
        return out;
    }
    loop {
        let sub: Vec<Vec<QPoly>> = pick.iter().map(|&i| m[i].clone()).collect();
        let det = determinant(ring, &sub);
        if !det.is_zero() {
            out.push(det);
        }
        // next combination in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pick[i] < rows - n + i {
                break;
            }
        }
        pick[i] += 1;
        for j in i + 1..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Well-definedness by ideal membership of every source relation pulled back
/// along φ; unramifiedness by the Jacobian criterion: the target relations
/// together with the maximal minors of [∇ relations; ∇ images] must generate
/// the unit ideal.
pub fn hom_check(phi: &RingHom, limits: &GroebnerLimits) -> Result<HomCheck, CaseError> {
    let target = &phi.target;
    let ring = &target.ring;
    let well_defined = match cap_or(groebner_basis(&target.ideal(), limits))? {
        None => Verdict::Cap,
        Some(gb) => {
            let mut ok = true;
            for rel in &phi.source.relations {
                let pulled = phi.apply(rel)?;
                if !gb.contains(&pulled)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                Verdict::Yes
            } else {
                Verdict::No
            }
        }
    };
    let n = ring.nvars();
    let mut stacked: Vec<Vec<QPoly>> =
        target.relations.iter().map(|r| (0..n).map(|j| r.differentiate(j)).collect()).collect();
    stacked.extend(phi.images.iter().map(|p| (0..n).map(|j| p.differentiate(j)).collect::<Vec<_>>()));
    let mut gens = target.relations.clone();
    let mut minors = maximal_minors(ring, &stacked);
    minors.sort_by_key(|p| (p.total_degree(), p.num_terms()));
    gens.extend(minors);
    let ideal = Ideal::new(ring, gens, MonomialOrder::DegRevLex)?;
    let unramified = match cap_or(groebner_basis(&ideal, limits))? {
        None => Verdict::Cap,
        Some(gb) if gb.is_unit() => Verdict::Yes,
        Some(_) => Verdict::No,
    };
    Ok(HomCheck { well_defined, unramified })
}

/// φ(p) − ψ(p) lies in the target ideal for every variable.
pub fn homs_agree(phi: &RingHom, psi: &RingHom, limits: &GroebnerLimits) -> Result<bool, CaseError> {
    if phi.target != psi.target || phi.images.len() != psi.images.len() {
        return Ok(false);
    }
    let gb = groebner_basis(&phi.target.ideal(), limits)?;
    for (a, b) in phi.images.iter().zip(&psi.images) {
        if !gb.contains(&(a - b))? {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Families of étale endomorphisms.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// xy = z² − 1 with z inverted: (x, y(z^{2(n−1)} + ⋯ + 1), zⁿ).
    QuadricXyz { n: u32 },
    /// x^r z + y^d = 1 with y inverted: (x, yⁿ, z(y^{d(n−1)} + ⋯ + 1)).
    XrzYd { d: u32, r: u32, n: u32 },
    /// x²u = t² − 4: (x, g(t), u·h(t)).
    TwistedX2u { n: u32 },
}

/// Σ_{k<n} v^{step·k}.
fn geometric(v: &QPoly, step: u32, n: u32) -> QPoly {
    let ring = v.ring();
    let mut acc = Poly::zero(ring);
    for k in 0..n {
        acc = &acc + &v.pow(step * k);
    }
    acc
}

/// The quotient ring a family lives on. The localizing variable w satisfies
/// zw = 1 (quadric) or yw = 1 (x^r z + y^d = 1).
pub fn family_ring(family: Family) -> Result<QuotientRing, CaseError> {
    match family {
        Family::QuadricXyz { .. } => QuotientRing::parse(&["x", "y", "z", "w"], &["x*y - z^2 + 1", "z*w - 1"]),
        Family::XrzYd { d, r, .. } => {
            if d < 1 || r < 1 {
                return Err(CaseError::BadParameter("need d, r >= 1"));
            }
            let rel = alloc::format!("x^{r}*z + y^{d} - 1");
            QuotientRing::parse(&["x", "y", "z", "w"], &[rel.as_str(), "y*w - 1"])
        }
        Family::TwistedX2u { .. } => QuotientRing::parse(&["x", "t", "u"], &["x^2*u - t^2 + 4"]),
    }
}

pub fn family_endo(family: Family) -> Result<RingHom, CaseError> {
    let q = family_ring(family)?;
    let ring = q.ring.clone();
    let v = |i| Poly::var(&ring, i);
    let images = match family {
        Family::QuadricXyz { n } => {
            if n < 1 {
                return Err(CaseError::BadParameter("need n >= 1"));
            }
            vec![v(0), &v(1) * &geometric(&v(2), 2, n), v(2).pow(n), v(3).pow(n)]
        }
        Family::XrzYd { d, n, .. } => {
            if n < 1 {
                return Err(CaseError::BadParameter("need n >= 1"));
            }
            vec![v(0), v(1).pow(n), &v(2) * &geometric(&v(1), d, n), v(3).pow(n)]
        }
        Family::TwistedX2u { n } => {
            let gh = dickson_gh(n)?;
            let sub = [v(1)];
            vec![v(0), gh.g.substitute(&sub)?, &v(2) * &gh.h.substitute(&sub)?]
        }
    };
    RingHom::new(q.clone(), q, images)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DicksonPair {
    /// g(z + 1/z) = zⁿ + z⁻ⁿ, in the ring ℚ[t].
    pub g: QPoly,
    /// h(z + 1/z) = ((z^{2n−2} + ⋯ + 1)/z^{n−1})².
    pub h: QPoly,
}

/// Writes a Laurent polynomial in z that is invariant under z ↦ 1/z as a
/// polynomial in t = z + 1/z.
fn symmetric_to_t(mut laurent: BTreeMap<i64, Rational>, ring: &Arc<QRing>) -> Result<QPoly, CaseError> {
    let t = Poly::var(ring, 0);
    let mut out = Poly::zero(ring);
    loop {
        laurent.retain(|_, c| !c.is_zero());
        let Some((&k, c)) = laurent.iter().next_back() else { return Ok(out) };
        if k < 0 || laurent.get(&-k) != Some(c) {
            return Err(CaseError::IdentityFailed("Laurent polynomial is not symmetric"));
        }
        let c = c.clone();
        out = &out + &t.pow(k as u32).scale(&c);
        // subtract c·(z + 1/z)^k = c·Σ binom(k, i) z^{k−2i}
        let mut binom = BigInt::one();
        for i in 0..=k {
            *laurent.entry(k - 2 * i).or_insert_with(Rational::zero) -= &c * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(k - i) / BigInt::from(i + 1);
        }
    }
}

pub fn dickson_gh(n: u32) -> Result<DicksonPair, CaseError> {
    if n < 1 {
        return Err(CaseError::BadParameter("need n >= 1"));
    }
    let ring = qring(&["t"]);
    let n = n as i64;
    let mut g = BTreeMap::new();
    g.insert(n, rat(1));
    g.insert(-n, rat(1));
    // (Σ_{k<n} z^{2k−(n−1)})²
    let mut h: BTreeMap<i64, Rational> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            *h.entry(2 * i + 2 * j - 2 * (n - 1)).or_insert_with(Rational::zero) += rat(1);
        }
    }
    let g = symmetric_to_t(g, &ring)?;
    let h = symmetric_to_t(h, &ring)?;
    let t2m4 = Poly::parse("t^2 - 4", &ring)?;
    if &(&g * &g) - &Poly::from_i64(&ring, 4) != &t2m4 * &h {
        return Err(CaseError::IdentityFailed("g^2 - 4 = (t^2 - 4) h"));
    }
    Ok(DicksonPair { g, h })
}

// ---------------------------------------------------------------------------
// Cyclic covers x^r z + y^d + a₁ x y^{d−1} + ⋯ + a_d x^d = 1.

/// ℚ(ζ_d)[params…, x, c]; `t` is the chosen primitive d-th root of unity.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverRing {
    pub d: u32,
    pub field: Arc<NumberField>,
    pub ring: Arc<Ring<FieldElem>>,
    pub x: usize,
    pub c: usize,
}

impl CoverRing {
    pub fn new(d: u32, params: &[&str]) -> Result<Self, CaseError> {
        if d < 1 {
            return Err(CaseError::BadParameter("need d >= 1"));
        }
        let field = cyclotomic_field(d as u64);
        let mut vars: Vec<&str> = params.to_vec();
        vars.push("x");
        vars.push("c");
        let ring = Ring::new(&vars, field.clone())?;
        Ok(CoverRing { d, field, ring, x: params.len(), c: params.len() + 1 })
    }

    /// Builds the ring from coefficient tokens: identifiers become symbolic
    /// parameters, everything is then parsed as a polynomial in them.
    pub fn with_coefficients<S: AsRef<str>>(d: u32, tokens: &[S]) -> Result<(Self, Vec<Poly<FieldElem>>), CaseError> {
        let is_ident = |s: &str| {
            let mut ch = s.chars();
            ch.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && ch.all(|c| c.is_ascii_alphanumeric() || c == '_')
        };
        let mut params: Vec<&str> = Vec::new();
        for tok in tokens {
            let s = tok.as_ref().trim();
            if is_ident(s) && s != "t" && !params.contains(&s) {
                params.push(s);
            }
        }
        let cr = CoverRing::new(d, &params)?;
        let coeffs = tokens.iter().map(|s| cr.parse(s.as_ref())).collect::<Result<Vec<_>, _>>()?;
        Ok((cr, coeffs))
    }

    pub fn parse(&self, s: &str) -> Result<Poly<FieldElem>, CaseError> {
        Ok(Poly::parse(s, &self.ring)?)
    }

    /// t^j.
    pub fn root(&self, j: i64) -> FieldElem {
        FieldElem::generator_pow(&self.field, j)
    }

    pub fn constant(&self, e: FieldElem) -> Poly<FieldElem> {
        Poly::constant(&self.ring, e)
    }

    pub fn from_rational(&self, q: &Rational) -> Poly<FieldElem> {
        Poly::from_rational(&self.ring, q)
    }

    /// p(e·x), other variables fixed.
    pub fn scale_x(&self, p: &Poly<FieldElem>, e: &FieldElem) -> Poly<FieldElem> {
        let images: Vec<Poly<FieldElem>> = (0..self.ring.nvars())
            .map(|i| if i == self.x { Poly::var(&self.ring, i).scale(e) } else { Poly::var(&self.ring, i) })
            .collect();
        p.substitute(&images).expect("same ring")
    }

    fn free_of_x_and_c(&self, p: &Poly<FieldElem>) -> bool {
        p.degree_in(self.x).unwrap_or(0) == 0 && p.degree_in(self.c).unwrap_or(0) == 0
    }
}

/// p_ω and q_ω on the chart of ω = t^j.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverChart {
    pub j: u32,
    pub omega: FieldElem,
    /// c₁(ω), …, c_{r−1}(ω).
    pub c: Vec<Poly<FieldElem>>,
    pub p: Poly<FieldElem>,
    pub q: Poly<FieldElem>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverSolution {
    pub ring: CoverRing,
    pub d: u32,
    pub r: u32,
    pub a: Vec<Poly<FieldElem>>,
    pub charts: Vec<CoverChart>,
}

impl CoverSolution {
    pub fn p(&self, j: u32) -> &Poly<FieldElem> {
        &self.charts[(j % self.d) as usize].p
    }

    pub fn q(&self, j: u32) -> &Poly<FieldElem> {
        &self.charts[(j % self.d) as usize].q
    }

    /// p^d + a₁ x p^{d−1} + ⋯ + a_d x^d.
    fn lhs(&self, p: &Poly<FieldElem>) -> Poly<FieldElem> {
        cover_form(&self.ring, &self.a, p)
    }
}

fn cover_form(cr: &CoverRing, a: &[Poly<FieldElem>], p: &Poly<FieldElem>) -> Poly<FieldElem> {
    let d = a.len() as u32;
    let x = Poly::var(&cr.ring, cr.x);
    let mut acc = p.pow(d);
    for (i, ai) in a.iter().enumerate() {
        let i = i as u32 + 1;
        if !ai.is_zero() {
            acc = &acc + &(&(ai * &x.pow(i)) * &p.pow(d - i));
        }
    }
    acc
}

/// The chart polynomials of x^r z + y^d + a₁ x y^{d−1} + ⋯ + a_d x^d = 1 for
/// every d-th root of unity, with the equivariance p_{λω}(λx) = λ p_ω(x),
/// q_{λω}(λx) = λ^{−r} q_ω(x) checked for all pairs.
pub fn pq_solve(cr: &CoverRing, r: u32, a: &[Poly<FieldElem>]) -> Result<CoverSolution, CaseError> {
    let d = cr.d;
    if d < 2 || r < 1 {
        return Err(CaseError::BadParameter("need d >= 2 and r >= 1"));
    }
    if a.len() != d as usize {
        return Err(CaseError::BadParameter("need exactly d coefficients"));
    }
    let probe = Poly::zero(&cr.ring);
    if a.iter().any(|ai| !ai.same_ring(&probe) || !cr.free_of_x_and_c(ai)) {
        return Err(CaseError::BadParameter("coefficients must be constants in the parameters"));
    }
    let x = Poly::var(&cr.ring, cr.x);
    let one = Poly::one(&cr.ring);
    let mut charts = Vec::with_capacity(d as usize);
    for j in 0..d {
        let omega = cr.root(j as i64);
        let pivot = omega.power(d as u64 - 1).times(&FieldElem::from_int(&cr.field, d as i64));
        let pivot_inv = pivot.inverse().ok_or(CaseError::ZeroPivot { root: j, k: 1 })?;
        let mut p = cr.constant(omega.clone());
        let mut cs = Vec::new();
        for k in 1..r {
            let s = cover_form(cr, a, &p).collect_in(cr.x);
            let e = s.get(&k).cloned().unwrap_or_else(|| Poly::zero(&cr.ring));
            let ck = -&e.scale(&pivot_inv);
            p = &p + &(&ck * &x.pow(k));
            cs.push(ck);
        }
        let rest = &one - &cover_form(cr, a, &p);
        let q = rest.div_var_power(cr.x, r).ok_or(CaseError::IdentityFailed("x^r divides 1 - S(p)"))?;
        charts.push(CoverChart { j, omega, c: cs, p, q });
    }
    let sol = CoverSolution { ring: cr.clone(), d, r, a: a.to_vec(), charts };
    for ch in &sol.charts {
        let xr = x.pow(r);
        if &(&xr * &ch.q) + &sol.lhs(&ch.p) != one {
            return Err(CaseError::IdentityFailed("x^r q + S(p) = 1"));
        }
    }
    for i in 0..d {
        let lambda = cr.root(i as i64);
        let lambda_r_inv = cr.root(-(r as i64) * i as i64);
        for j in 0..d {
            let (pw, qw) = (sol.p(j), sol.q(j));
            let (plw, qlw) = (sol.p(i + j), sol.q(i + j));
            if cr.scale_x(plw, &lambda) != pw.scale(&lambda) || cr.scale_x(qlw, &lambda) != qw.scale(&lambda_r_inv) {
                return Err(CaseError::EquivarianceFailed { lambda: i, omega: j });
            }
        }
    }
    Ok(sol)
}

/// (p_ω − p_λ) = (p_ω − p_μ) + (p_μ − p_λ) for all ω, λ, μ, and the
/// transition from a chart to itself is the identity.
pub fn transition_check(sol: &CoverSolution) -> bool {
    let d = sol.d;
    for w in 0..d {
        if !(sol.p(w) - sol.p(w)).is_zero() {
            return false;
        }
        for l in 0..d {
            for m in 0..d {
                let direct = sol.p(w) - sol.p(l);
                let via = &(sol.p(w) - sol.p(m)) + &(sol.p(m) - sol.p(l));
                if direct != via {
                    return false;
                }
            }
        }
    }
    true
}

/// Number of ordered chart pairs with a nonzero transition shift.
pub fn nontrivial_transitions(sol: &CoverSolution) -> usize {
    let d = sol.d;
    (0..d).flat_map(|w| (0..d).map(move |l| (w, l))).filter(|&(w, l)| !(sol.p(w) - sol.p(l)).is_zero()).count()
}

// ---------------------------------------------------------------------------
// Equivariant sections.

/// Data of the relation
/// λ^{1−s} x^s σ(λ⁻¹x, λ^{r−1}(c + (p₁ − p_λ)/x^r)) = x^s σ(x, c) + p′₁ − p′_λ,
/// where p, p′ list the chart polynomials of the two covers by root index.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionRelation {
    pub r: u32,
    pub s: u32,
    pub sigma: Poly<FieldElem>,
    pub p: Vec<Poly<FieldElem>>,
    pub pprime: Vec<Poly<FieldElem>>,
}

/// For each λ = t^j where the relation fails, the residual after both sides
/// are multiplied by x^{r·deg_c σ}.
pub fn section_residuals(cr: &CoverRing, rel: &SectionRelation) -> Vec<(u32, Poly<FieldElem>)> {
    let x = Poly::var(&cr.ring, cr.x);
    let c = Poly::var(&cr.ring, cr.c);
    let coeffs = rel.sigma.collect_in(cr.c);
    let top = coeffs.keys().next_back().copied().unwrap_or(0);
    let (r, s) = (rel.r as i64, rel.s as i64);
    let xr = x.pow(rel.r);
    let mut failures = Vec::new();
    for j in 0..cr.d {
        let ji = j as i64;
        let lambda_inv = cr.root(-ji);
        let n = &rel.p[0] - &rel.p[j as usize];
        let shifted = &(&xr * &c) + &n;
        let mut lhs = Poly::zero(&cr.ring);
        for (&k, fk) in &coeffs {
            let fk = cr.scale_x(fk, &lambda_inv).scale(&cr.root(ji * k as i64 * (r - 1)));
            let term = &(&fk * &shifted.pow(k)) * &xr.pow(top - k);
            lhs = &lhs + &term;
        }
        let lhs = (&x.pow(rel.s) * &lhs).scale(&cr.root(ji * (1 - s)));
        let rhs = &xr.pow(top) * &(&(&x.pow(rel.s) * &rel.sigma) + &(&rel.pprime[0] - &rel.pprime[j as usize]));
        let residual = &lhs - &rhs;
        if !residual.is_zero() {
            failures.push((j, residual));
        }
    }
    failures
}

#[derive(Clone, Debug, PartialEq)]
pub enum SigmaCase {
    /// Ṽ against the cover with coefficients a′ (s = r); σ = f₁(x)c.
    Lemma1426First { d: u32, r: u32 },
    /// d = 2, r = 3 cover with a₁, a₂ against Ṽ.
    Lemma1426Second,
    /// x^r z + y^d + a x^d = 1 with d < r < 2d, against Ṽ in both directions.
    Prop1427 { d: u32, r: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectionCheck {
    pub name: &'static str,
    pub sigma: Poly<FieldElem>,
    pub failures: Vec<(u32, Poly<FieldElem>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaReport {
    pub checks: Vec<SectionCheck>,
}

impl SigmaReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.failures.is_empty())
    }
}

fn trivial_charts(cr: &CoverRing) -> Vec<Poly<FieldElem>> {
    (0..cr.d).map(|j| cr.constant(cr.root(j as i64))).collect()
}

/// `coeffs` are the cover coefficients in `cr`: a′₁…a′_d for the first case,
/// [a₁, a₂] for the second, [a] for the proposition.
pub fn sigma_verify(cr: &CoverRing, case: &SigmaCase, coeffs: &[Poly<FieldElem>]) -> Result<SigmaReport, CaseError> {
    let d = cr.d;
    let c = Poly::var(&cr.ring, cr.c);
    match *case {
        SigmaCase::Lemma1426First { d: dd, r } => {
            if dd != d || d < 2 {
                return Err(CaseError::BadParameter("ring and case disagree on d"));
            }
            let sol = pq_solve(cr, r, coeffs)?;
            let pprime: Vec<_> = (0..d).map(|j| sol.p(j).clone()).collect();
            let f1 = lemma1426_f1(cr, &pprime)?;
            let sigma = &f1 * &c;
            let rel = SectionRelation { r, s: r, sigma: sigma.clone(), p: trivial_charts(cr), pprime };
            let failures = section_residuals(cr, &rel);
            Ok(SigmaReport { checks: vec![SectionCheck { name: "sigma", sigma, failures }] })
        }
        SigmaCase::Lemma1426Second => {
            if d != 2 || coeffs.len() != 2 {
                return Err(CaseError::BadParameter("needs d = 2 and coefficients a1, a2"));
            }
            let sol = pq_solve(cr, 3, coeffs)?;
            let b = (&(&coeffs[0] * &coeffs[0]) - &coeffs[1].scale(&FieldElem::from_int(&cr.field, 4)))
                .scale(&FieldElem::from_q(&cr.field, &frac(1, 8)));
            let x = Poly::var(&cr.ring, cr.x);
            let one = Poly::one(&cr.ring);
            let f0 = &b.pow(3) * &x.pow(3);
            let f1 = &(&(&one - &(&b * &x.pow(2))) + &(&b.pow(2) * &x.pow(4))) * &c;
            let sigma = &f0 + &f1;
            let p: Vec<_> = (0..d).map(|j| sol.p(j).clone()).collect();
            let rel = SectionRelation { r: 3, s: 3, sigma: sigma.clone(), p, pprime: trivial_charts(cr) };
            let failures = section_residuals(cr, &rel);
            Ok(SigmaReport { checks: vec![SectionCheck { name: "sigma", sigma, failures }] })
        }
        SigmaCase::Prop1427 { d: dd, r } => {
            if dd != d || !(d < r && r < 2 * d) || coeffs.len() != 1 {
                return Err(CaseError::BadParameter("needs d < r < 2d and one coefficient a"));
            }
            let a = &coeffs[0];
            let mut full = vec![Poly::zero(&cr.ring); d as usize];
            full[d as usize - 1] = a.clone();
            let sol = pq_solve(cr, r, &full)?;
            let x = Poly::var(&cr.ring, cr.x);
            let a_over_d = a.scale(&FieldElem::from_q(&cr.field, &frac(1, d as i64)));
            // p_λ = λ − (a/d) λ x^d
            for j in 0..d {
                let lam = cr.constant(cr.root(j as i64));
                let expected = &lam - &(&(&a_over_d * &lam) * &x.pow(d));
                if *sol.p(j) != expected {
                    return Err(CaseError::IdentityFailed("p_l = l - (a/d) l x^d"));
                }
            }
            let p: Vec<_> = (0..d).map(|j| sol.p(j).clone()).collect();
            let f1 = lemma1426_f1(cr, &p)?;
            let sigma = &f1 * &c;
            let rel_sigma = SectionRelation { r, s: r, sigma: sigma.clone(), p: trivial_charts(cr), pprime: p.clone() };
            let one = Poly::one(&cr.ring);
            let a2_over_d2 = a.pow(2).scale(&FieldElem::from_q(&cr.field, &frac(1, (d * d) as i64)));
            let tau = &(-&(&a2_over_d2 * &x.pow(2 * d - r))) + &(&(&one + &(&a_over_d * &x.pow(d))) * &c);
            let rel_tau = SectionRelation { r, s: r, sigma: tau.clone(), p, pprime: trivial_charts(cr) };
            Ok(SigmaReport {
                checks: vec![
                    SectionCheck { name: "sigma", failures: section_residuals(cr, &rel_sigma), sigma },
                    SectionCheck { name: "tau", failures: section_residuals(cr, &rel_tau), sigma: tau },
                ],
            })
        }
    }
}

/// f₁ = (p′₁(λx) − p′_λ(λx))/(1 − λ), after checking the hypothesis
/// p′₁(λx) − p′_λ(λx) = p′₁(x) − p′_λ(x) and that every λ ≠ 1 gives the same f₁.
fn lemma1426_f1(cr: &CoverRing, pprime: &[Poly<FieldElem>]) -> Result<Poly<FieldElem>, CaseError> {
    let mut f1: Option<Poly<FieldElem>> = None;
    for j in 1..cr.d {
        let lam = cr.root(j as i64);
        let diff = &pprime[0] - &pprime[j as usize];
        let diff_scaled = cr.scale_x(&diff, &lam);
        if diff_scaled != diff {
            return Err(CaseError::HypothesisFailed { lambda: j });
        }
        let inv = FieldElem::one_in(&cr.field).minus(&lam).inverse().ok_or(CaseError::BadParameter("lambda = 1"))?;
        let cand = diff_scaled.scale(&inv);
        match &f1 {
            None => f1 = Some(cand),
            Some(f) if *f != cand => return Err(CaseError::Divergent { lambda: j }),
            Some(_) => {}
        }
    }
    f1.ok_or(CaseError::BadParameter("need d >= 2"))
}

// ---------------------------------------------------------------------------
// Isomorphisms between covers.

/// c, u with aᵢ = cⁱ u^{d−i} bᵢ for i = 2..d and u^d = 1, c ≠ 0.
#[derive(Clone, Debug, PartialEq)]
pub struct IsoWitness {
    pub c: FieldElem,
    pub u: FieldElem,
}

fn rational_root(q: &Rational, g: u32) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().nth_root(g);
    let d = q.denom().nth_root(g);
    (num_traits::pow(n.clone(), g as usize) == *q.numer() && num_traits::pow(d.clone(), g as usize) == *q.denom())
        .then(|| Rational::new(n, d))
}

/// Searches u over the d-th roots of unity. For each u the equations with
/// bᵢ ≠ 0 determine c^g with g the gcd of their indices; the candidates for c
/// are ±(rational g-th root)·t^k, each verified against every equation.
/// `a` and `b` are indexed from 2.
pub fn tilde_iso_test(d: u32, r: u32, a: &[Rational], b: &[Rational]) -> Result<Option<IsoWitness>, CaseError> {
    if d < 2 || r <= d {
        return Err(CaseError::BadParameter("need d >= 2 and r > d"));
    }
    if a.len() != d as usize - 1 || b.len() != d as usize - 1 {
        return Err(CaseError::BadParameter("need coefficients for indices 2..d"));
    }
    let field = cyclotomic_field(d as u64);
    let fe = |q: &Rational| FieldElem::from_rational(&field, q);
    let idx: Vec<u32> = (2..=d).filter(|&i| !b[i as usize - 2].is_zero()).collect();
    if (2..=d).any(|i| b[i as usize - 2].is_zero() && !a[i as usize - 2].is_zero()) {
        return Ok(None);
    }
    let one = FieldElem::one_in(&field);
    if idx.is_empty() {
        return Ok(Some(IsoWitness { c: one.clone(), u: one }));
    }
    if idx.iter().any(|&i| a[i as usize - 2].is_zero()) {
        return Ok(None);
    }
    // Bezout coefficients: g = Σ eᵢ·i
    let mut g = 0i64;
    let mut e: Vec<i64> = vec![0; idx.len()];
    for (k, &i) in idx.iter().enumerate() {
        let ext = g.extended_gcd(&(i as i64));
        for x in e.iter_mut().take(k) {
            *x *= ext.x;
        }
        e[k] = ext.y;
        g = ext.gcd;
    }
    let holds = |c: &FieldElem, u: &FieldElem| {
        (2..=d).all(|i| {
            let rhs = c.power(i as u64).times(&u.power((d - i) as u64)).times(&fe(&b[i as usize - 2]));
            rhs == fe(&a[i as usize - 2])
        })
    };
    for j in 0..d {
        let u = FieldElem::generator_pow(&field, j as i64);
        // c^g = Π (aᵢ / (u^{d−i} bᵢ))^{eᵢ}
        let mut w = one.clone();
        for (k, &i) in idx.iter().enumerate() {
            let v = fe(&a[i as usize - 2]).times(&u.power((d - i) as u64).times(&fe(&b[i as usize - 2])).inverse().expect("nonzero"));
            let f = if e[k] >= 0 { v.power(e[k] as u64) } else { v.inverse().expect("nonzero").power(e[k].unsigned_abs()) };
            w = w.times(&f);
        }
        let mut cands: Vec<FieldElem> = Vec::new();
        let gu = g as u32;
        for k in 0..d {
            let zeta = FieldElem::generator_pow(&field, k as i64);
            // w·ζ^{−g} must be a rational g-th power up to sign
            let base = w.times(&zeta.power(g as u64).inverse().expect("unit"));
            let Some(q) = base.to_rational() else { continue };
            for sign in [1i64, -1] {
                let target = &q * rat(if gu.is_multiple_of(2) { 1 } else { sign });
                if let Some(root) = rational_root(&target.abs(), gu) {
                    let root = if target.is_negative() { -root } else { root };
                    let cand = fe(&(root * rat(sign))).times(&zeta);
                    if cand.power(g as u64) == w && !cands.contains(&cand) {
                        cands.push(cand);
                    }
                }
            }
        }
        if let Some(c) = cands.into_iter().find(|c| holds(c, &u)) {
            return Ok(Some(IsoWitness { c, u }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> GroebnerLimits {
        GroebnerLimits::default()
    }

    #[test]
    fn identity_hom() {
        let q = QuotientRing::parse(&["x", "y", "z"], &["x*y - z^2 + 1"]).unwrap();
        let ring = q.ring().clone();
        let id = RingHom::new(q.clone(), q, (0..3).map(|i| Poly::var(&ring, i)).collect()).unwrap();
        let h = hom_check(&id, &limits()).unwrap();
        assert_eq!(h, HomCheck { well_defined: Verdict::Yes, unramified: Verdict::Yes });
    }

    #[test]
    fn squaring_x_is_ramified() {
        let q = QuotientRing::parse(&["x", "y", "z"], &["x*y - z^2 + 1"]).unwrap();
        let ring = q.ring().clone();
        let e = |s: &str| Poly::parse(s, &ring).unwrap();
        let phi = RingHom::new(q.clone(), q, vec![e("x^2"), e("y"), e("z")]).unwrap();
        assert_eq!(hom_check(&phi, &limits()).unwrap().unramified, Verdict::No);
    }

    #[test]
    fn quadric_needs_z_inverted() {
        // Over xy = z² − 1 without z⁻¹ the map z ↦ z² ramifies along z = 0.
        let q = QuotientRing::parse(&["x", "y", "z"], &["x*y - z^2 + 1"]).unwrap();
        let ring = q.ring().clone();
        let e = |s: &str| Poly::parse(s, &ring).unwrap();
        let phi = RingHom::new(q.clone(), q, vec![e("x"), e("y*(z^2+1)"), e("z^2")]).unwrap();
        let h = hom_check(&phi, &limits()).unwrap();
        assert_eq!(h, HomCheck { well_defined: Verdict::Yes, unramified: Verdict::No });
        let phi = family_endo(Family::QuadricXyz { n: 2 }).unwrap();
        assert_eq!(phi.images()[1], Poly::parse("y*z^2 + y", phi.target().ring()).unwrap());
        let h = hom_check(&phi, &limits()).unwrap();
        assert_eq!(h, HomCheck { well_defined: Verdict::Yes, unramified: Verdict::Yes });
    }

    #[test]
    fn quadric_n1_is_identity() {
        let phi = family_endo(Family::QuadricXyz { n: 1 }).unwrap();
        let ring = phi.target().ring().clone();
        assert!(phi.images().iter().enumerate().all(|(i, p)| *p == Poly::var(&ring, i)));
    }

    #[test]
    fn xrz_yd_example() {
        let phi = family_endo(Family::XrzYd { d: 2, r: 3, n: 2 }).unwrap();
        let ring = phi.target().ring().clone();
        assert_eq!(phi.images()[1], Poly::parse("y^2", &ring).unwrap());
        assert_eq!(phi.images()[2], Poly::parse("z*(y^2+1)", &ring).unwrap());
        let h = hom_check(&phi, &limits()).unwrap();
        assert_eq!(h, HomCheck { well_defined: Verdict::Yes, unramified: Verdict::Yes });
    }

    #[test]
    fn twisted_example_ramifies() {
        let phi = family_endo(Family::TwistedX2u { n: 2 }).unwrap();
        let ring = phi.target().ring().clone();
        assert_eq!(phi.images()[1], Poly::parse("t^2-2", &ring).unwrap());
        assert_eq!(phi.images()[2], Poly::parse("u*t^2", &ring).unwrap());
        // t ↦ t² − 2 is critical at t = 0, where x and t are local coordinates
        for n in [2, 3] {
            let h = hom_check(&family_endo(Family::TwistedX2u { n }).unwrap(), &limits()).unwrap();
            assert_eq!(h, HomCheck { well_defined: Verdict::Yes, unramified: Verdict::No });
        }
    }

    #[test]
    fn dickson_examples() {
        let r = qring(&["t"]);
        let e = |s: &str| Poly::parse(s, &r).unwrap();
        let p = dickson_gh(1).unwrap();
        assert_eq!((p.g, p.h), (e("t"), e("1")));
        let p = dickson_gh(2).unwrap();
        assert_eq!((p.g, p.h), (e("t^2-2"), e("t^2")));
        let p = dickson_gh(3).unwrap();
        assert_eq!((p.g, p.h), (e("t^3-3*t"), e("(t^2-1)^2")));
    }

    #[test]
    fn composition_closure() {
        let a = family_endo(Family::QuadricXyz { n: 2 }).unwrap();
        let b = family_endo(Family::QuadricXyz { n: 3 }).unwrap();
        let ab = family_endo(Family::QuadricXyz { n: 6 }).unwrap();
        assert!(homs_agree(&a.compose(&b).unwrap(), &ab, &limits()).unwrap());
        assert!(!homs_agree(&a, &ab, &limits()).unwrap());
    }

    #[test]
    fn pq_r3_d2() {
        let (cr, a) = CoverRing::with_coefficients(2, &["a1", "a2"]).unwrap();
        let sol = pq_solve(&cr, 3, &a).unwrap();
        for j in 0..2 {
            let w = if j == 0 { "1" } else { "(-1)" };
            let p = cr.parse(&alloc::format!("{w} - 1/2*a1*x + 1/8*{w}*(a1^2-4*a2)*x^2")).unwrap();
            assert_eq!(*sol.p(j), p);
            let (c1, c2) = (&sol.charts[j as usize].c[0], &sol.charts[j as usize].c[1]);
            let x = Poly::var(&cr.ring, cr.x);
            let q = -&(&(&(c1 * c2).scale(&FieldElem::from_int(&cr.field, 2)) + &(&a[0] * c2)) + &(&(c2 * c2) * &x));
            assert_eq!(*sol.q(j), q);
        }
        assert!(transition_check(&sol));
        assert_eq!(nontrivial_transitions(&sol), 2);
    }

    #[test]
    fn pq_r4_d2() {
        let (cr, a) = CoverRing::with_coefficients(2, &["a1", "a2"]).unwrap();
        let sol = pq_solve(&cr, 4, &a).unwrap();
        for ch in &sol.charts {
            assert!(ch.c[2].is_zero());
            assert_eq!(ch.q, -&(&ch.c[1] * &ch.c[1]));
        }
    }

    #[test]
    fn pq_trivial_cover() {
        let (cr, a) = CoverRing::with_coefficients(3, &["0", "0", "0"]).unwrap();
        let sol = pq_solve(&cr, 1, &a).unwrap();
        for ch in &sol.charts {
            assert_eq!(ch.p, cr.constant(ch.omega.clone()));
            assert!(ch.q.is_zero());
        }
        assert_eq!(nontrivial_transitions(&sol), 6);
    }

    #[test]
    fn pq_d3_equivariant() {
        let (cr, a) = CoverRing::with_coefficients(3, &["a1", "2", "a3"]).unwrap();
        let sol = pq_solve(&cr, 4, &a).unwrap();
        assert_eq!(sol.charts.len(), 3);
        assert!(transition_check(&sol));
    }

    #[test]
    fn sigma_first_case() {
        let (cr, a) = CoverRing::with_coefficients(2, &["a1", "a2"]).unwrap();
        let rep = sigma_verify(&cr, &SigmaCase::Lemma1426First { d: 2, r: 3 }, &a).unwrap();
        assert!(rep.holds());
        let expected = cr.parse("(1 + 1/8*(a1^2-4*a2)*x^2)*c").unwrap();
        assert_eq!(rep.checks[0].sigma, expected);
    }

    #[test]
    fn sigma_first_case_hypothesis_can_fail() {
        // d = 3, r = 3 with a generic a₁ breaks p′₁(λx) − p′_λ(λx) = p′₁(x) − p′_λ(x)
        let (cr, a) = CoverRing::with_coefficients(3, &["a1", "0", "0"]).unwrap();
        let r = sigma_verify(&cr, &SigmaCase::Lemma1426First { d: 3, r: 3 }, &a);
        assert!(matches!(r, Err(CaseError::HypothesisFailed { .. }) | Err(CaseError::Divergent { .. })));
    }

    #[test]
    fn sigma_second_case() {
        let (cr, a) = CoverRing::with_coefficients(2, &["a1", "a2"]).unwrap();
        assert!(sigma_verify(&cr, &SigmaCase::Lemma1426Second, &a).unwrap().holds());
    }

    #[test]
    fn sigma_second_case_detects_wrong_sigma() {
        let (cr, a) = CoverRing::with_coefficients(2, &["a1", "a2"]).unwrap();
        let sol = pq_solve(&cr, 3, &a).unwrap();
        let rel = SectionRelation {
            r: 3,
            s: 3,
            sigma: cr.parse("c").unwrap(),
            p: vec![sol.p(0).clone(), sol.p(1).clone()],
            pprime: trivial_charts(&cr),
        };
        let fails = section_residuals(&cr, &rel);
        assert_eq!(fails.len(), 1);
        assert_eq!(fails[0].0, 1);
    }

    #[test]
    fn prop1427_cases() {
        for (d, r) in [(2u32, 3u32), (3, 4), (3, 5)] {
            for a in ["1", "0", "a"] {
                let (cr, coeffs) = CoverRing::with_coefficients(d, &[a]).unwrap();
                let rep = sigma_verify(&cr, &SigmaCase::Prop1427 { d, r }, &coeffs).unwrap();
                assert!(rep.holds(), "d={d} r={r} a={a}: {:?}", rep.checks.iter().map(|c| c.failures.len()).collect::<Vec<_>>());
            }
        }
        let (cr, coeffs) = CoverRing::with_coefficients(2, &["1"]).unwrap();
        assert!(sigma_verify(&cr, &SigmaCase::Prop1427 { d: 2, r: 4 }, &coeffs).is_err());
    }

    #[test]
    fn iso_examples() {
        let one = rat(1);
        let w = tilde_iso_test(3, 4, &[rat(2), rat(5)], &[rat(2), rat(5)]).unwrap().unwrap();
        assert!(w.c.is_unity() && w.u.is_unity());
        // bᵢ = aᵢ/2ⁱ
        let w = tilde_iso_test(3, 4, &[rat(4), rat(8)], &[rat(1), rat(1)]).unwrap().unwrap();
        assert_eq!(w.c.to_rational(), Some(rat(2)));
        assert!(w.u.is_unity());
        let w = tilde_iso_test(3, 4, &[one.clone(), one.clone()], &[one.clone(), rat(-1)]).unwrap().unwrap();
        assert_eq!(w.c.to_rational(), Some(rat(-1)));
        assert!(tilde_iso_test(3, 4, &[one.clone(), rat(0)], &[rat(0), rat(0)]).unwrap().is_none());
        assert!(tilde_iso_test(2, 2, core::slice::from_ref(&one), std::slice::from_ref(&one)).is_err());
        // a₂ = 2·b₂ has no rational square root; c = ±√2 is not found
        assert!(tilde_iso_test(2, 3, &[rat(2)], &[rat(1)]).unwrap().is_none());
    }
}
