//! Polynomial endomorphisms of affine space: Jacobians, formal and exact
//! inversion, Drużkowski maps and two-variable top-part tests.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

use crate::field::Field;
use crate::lnd::Derivation;
use crate::poly::{newton_polygon, Poly, PolyError, Ring, WDeg};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KellerError {
    Poly(PolyError),
    /// Component count differs from the number of ring variables.
    NotSquare { vars: usize, components: usize },
    SingularLinearPart,
    NotKeller,
    NonPositiveDegree,
    SlotOutOfRange(usize),
    NotTwoVariables,
}

impl fmt::Display for KellerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KellerError::Poly(e) => write!(f, "{e}"),
            KellerError::NotSquare { vars, components } => {
                write!(f, "map has {components} components in a ring of {vars} variables")
            }
            KellerError::SingularLinearPart => write!(f, "linear part at the origin is singular"),
            KellerError::NotKeller => write!(f, "Jacobian determinant is not a nonzero constant"),
            KellerError::NonPositiveDegree => write!(f, "weighted degrees must be positive"),
            KellerError::SlotOutOfRange(i) => write!(f, "slot {i} out of range"),
            KellerError::NotTwoVariables => write!(f, "operation needs exactly two variables"),
        }
    }
}

impl core::error::Error for KellerError {}

impl From<PolyError> for KellerError {
    fn from(e: PolyError) -> Self {
        KellerError::Poly(e)
    }
}

/// F = (f₁,…,fₙ) in n variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap<K: Field> {
    ring: Arc<Ring<K>>,
    components: Vec<Poly<K>>,
}

impl<K: Field> PolyMap<K> {
    pub fn new(ring: &Arc<Ring<K>>, components: Vec<Poly<K>>) -> Result<Self, KellerError> {
        if components.len() != ring.nvars() {
            return Err(KellerError::NotSquare { vars: ring.nvars(), components: components.len() });
        }
        let probe = Poly::zero(ring);
        if components.iter().any(|c| !c.same_ring(&probe)) {
            return Err(PolyError::RingMismatch.into());
        }
        Ok(PolyMap { ring: ring.clone(), components })
    }

    pub fn identity(ring: &Arc<Ring<K>>) -> Self {
        let components = (0..ring.nvars()).map(|i| Poly::var(ring, i)).collect();
        PolyMap { ring: ring.clone(), components }
    }

    pub fn ring(&self) -> &Arc<Ring<K>> {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly<K>] {
        &self.components
    }

    pub fn is_identity(&self) -> bool {
        self.components.iter().enumerate().all(|(i, c)| *c == Poly::var(&self.ring, i))
    }

    /// Maximum total degree of the components (0 for a constant map).
    pub fn degree(&self) -> u32 {
        self.components.iter().filter_map(|c| c.total_degree()).max().unwrap_or(0)
    }

    /// `self ∘ inner`: the i-th component is fᵢ(inner).
    pub fn compose(&self, inner: &PolyMap<K>) -> Result<PolyMap<K>, KellerError> {
        if !Poly::zero(&self.ring).same_ring(&Poly::zero(&inner.ring)) {
            return Err(PolyError::RingMismatch.into());
        }
        let components =
            self.components.iter().map(|f| f.substitute(&inner.components)).collect::<Result<Vec<_>, _>>()?;
        Ok(PolyMap { ring: self.ring.clone(), components })
    }

    /// F(0), the constant terms.
    pub fn constant_terms(&self) -> Vec<K> {
        self.components.iter().map(|c| c.constant_term()).collect()
    }
}

/// The Jacobian matrix ∂fᵢ/∂xⱼ and its determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianData<K: Field> {
    pub matrix: Vec<Vec<Poly<K>>>,
    pub determinant: Poly<K>,
}

/// Determinant of a square matrix of polynomials by Laplace expansion along
/// rows, memoized over the set of columns already used.
pub fn determinant<K: Field>(ring: &Arc<Ring<K>>, m: &[Vec<Poly<K>>]) -> Poly<K> {
    let n = m.len();
    if n == 0 {
        return Poly::one(ring);
    }
    assert!(n <= 20, "determinant expansion limited to 20x20");
    // minors[mask] = det of rows (n - |mask|).. with the columns not in mask,
    // built from the bottom row up.
    let full: u32 = (1u32 << n) - 1;
    let mut memo: BTreeMap<u32, Poly<K>> = BTreeMap::new();
    memo.insert(full, Poly::one(ring));
    fn rec<K: Field>(
        mask: u32,
        n: usize,
        m: &[Vec<Poly<K>>],
        ring: &Arc<Ring<K>>,
        memo: &mut BTreeMap<u32, Poly<K>>,
    ) -> Poly<K> {
        if let Some(p) = memo.get(&mask) {
            return p.clone();
        }
        let row = mask.count_ones() as usize;
        let mut acc = Poly::zero(ring);
        let mut pos = 0usize;
        for j in 0..n {
            if mask & (1 << j) != 0 {
                continue;
            }
            let a = &m[row][j];
            if !a.is_zero() {
                let sub = rec(mask | (1 << j), n, m, ring, memo);
                let t = a * &sub;
                acc = if pos.is_multiple_of(2) { &acc + &t } else { &acc - &t };
            }
            pos += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    rec(0, n, m, ring, &mut memo)
}

pub fn jacobian<K: Field>(f: &PolyMap<K>) -> JacobianData<K> {
    let n = f.n();
    let matrix: Vec<Vec<Poly<K>>> =
        f.components.iter().map(|fi| (0..n).map(|j| fi.differentiate(j)).collect()).collect();
    let determinant = determinant(&f.ring, &matrix);
    JacobianData { matrix, determinant }
}

/// True iff the Jacobian determinant is a nonzero constant.
pub fn is_keller<K: Field>(f: &PolyMap<K>) -> bool {
    let d = jacobian(f).determinant;
    !d.is_zero() && d.is_constant()
}

/// Inverse of a square matrix over a field by Gauss–Jordan elimination.
pub fn invert_matrix<K: Field>(ctx: &K::Ctx, a: &[Vec<K>]) -> Option<Vec<Vec<K>>> {
    let n = a.len();
    let mut m: Vec<Vec<K>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { K::one_in(ctx) } else { K::zero_in(ctx) }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].vanishes())?;
        m.swap(col, piv);
        let inv = m[col][col].inverse()?;
        for x in m[col].iter_mut() {
            *x = x.times(&inv);
        }
        for r in 0..n {
            if r != col && !m[r][col].vanishes() {
                let factor = m[r][col].clone();
                for c in 0..2 * n {
                    let v = m[r][c].minus(&factor.times(&m[col][c]));
                    m[r][c] = v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Rank of a matrix over a field by Gaussian elimination.
pub fn matrix_rank<K: Field>(a: &[Vec<K>]) -> usize {
    let mut m: Vec<Vec<K>> = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !m[r][col].vanishes()) else { continue };
        m.swap(rank, piv);
        let inv = m[rank][col].inverse().expect("nonzero pivot");
        for r in (rank + 1)..rows {
            if m[r][col].vanishes() {
                continue;
            }
            let factor = m[r][col].times(&inv);
            for c in col..cols {
                let v = m[r][c].minus(&factor.times(&m[rank][c]));
                m[r][c] = v;
            }
        }
        rank += 1;
    }
    rank
}

/// G with G∘F ≡ id modulo terms of total degree > `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedInverse<K: Field> {
    pub order: u32,
    /// Inverse of F − F(0), all terms of degree ≤ `order`.
    pub centered: Vec<Poly<K>>,
    /// F(0); the inverse of F itself is `centered(y − translation)`.
    pub translation: Vec<K>,
    pub components: Vec<Poly<K>>,
}

/// Formal inverse by undetermined coefficients: after centering F at the
/// origin, the homogeneous part Gₖ of degree k solves the linear system
/// Gₖ(L·x) = −[degree-k part of G₍<ₖ₎∘F], where L is the linear part of F.
pub fn formal_inverse<K: Field>(f: &PolyMap<K>, order: u32) -> Result<TruncatedInverse<K>, KellerError> {
    let ring = &f.ring;
    let ctx = ring.ctx();
    let n = f.n();
    let b = f.constant_terms();
    let centered_f: Vec<Poly<K>> =
        f.components.iter().zip(&b).map(|(c, bi)| c - &Poly::constant(ring, bi.clone())).collect();
    let lin: Vec<Vec<K>> = centered_f
        .iter()
        .map(|c| (0..n).map(|j| c.coeff(&crate::poly::Monomial::var(n, j))).collect())
        .collect();
    let linv = invert_matrix(ctx, &lin).ok_or(KellerError::SingularLinearPart)?;
    let linv_images: Vec<Poly<K>> = (0..n)
        .map(|i| {
            let mut p = Poly::zero(ring);
            for (j, c) in linv[i].iter().enumerate() {
                p = &p + &Poly::var(ring, j).scale(c);
            }
            p
        })
        .collect();

    let order = order.max(1);
    let mut g: Vec<Poly<K>> = linv_images.clone();
    let mut acc: Vec<Poly<K>> =
        g.iter().map(|gi| gi.substitute_truncated(&centered_f, order)).collect::<Result<_, _>>()?;
    for k in 2..=order {
        for i in 0..n {
            let r = acc[i].homogeneous_part(k);
            if r.is_zero() {
                continue;
            }
            let gk = -&r.substitute(&linv_images)?;
            let contrib = gk.substitute_truncated(&centered_f, order)?;
            acc[i] = &acc[i] + &contrib;
            g[i] = &g[i] + &gk;
        }
    }
    let shifted: Vec<Poly<K>> =
        (0..n).map(|j| &Poly::var(ring, j) - &Poly::constant(ring, b[j].clone())).collect();
    let components = if b.iter().all(|c| c.vanishes()) {
        g.clone()
    } else {
        g.iter().map(|gi| gi.substitute(&shifted)).collect::<Result<_, _>>()?
    };
    Ok(TruncatedInverse { order, centered: g, translation: b, components })
}

/// Exact polynomial inverse of a Keller map, if the formal inverse closes up
/// by degree `cap`. `Ok(None)` means nothing was found up to `cap`, which
/// says nothing about invertibility.
pub fn invert_exact<K: Field>(f: &PolyMap<K>, cap: u32) -> Result<Option<PolyMap<K>>, KellerError> {
    if !is_keller(f) {
        return Err(KellerError::NotKeller);
    }
    let cap = cap.max(1);
    let mut order = 1u32;
    loop {
        let t = formal_inverse(f, order)?;
        let top_vanishes = t.centered.iter().all(|c| c.homogeneous_part(order).is_zero());
        if top_vanishes || order == cap {
            let g = PolyMap { ring: f.ring.clone(), components: t.components };
            if f.compose(&g)?.is_identity() && g.compose(f)?.is_identity() {
                return Ok(Some(g));
            }
        }
        if order == cap {
            return Ok(None);
        }
        order = (order * 2).min(cap);
    }
}

/// det J(G) evaluated at F, times det J(F). Equals 1 when G inverts F.
pub fn chain_rule_check<K: Field>(f: &PolyMap<K>, g: &PolyMap<K>) -> Result<Poly<K>, KellerError> {
    let jg = jacobian(g).determinant;
    let jf = jacobian(f).determinant;
    Ok(jg.substitute(&f.components)?.checked_mul(&jf)?)
}

/// F^{[m]} = (f₁,…,fₙ, x_{n+1},…,x_{n+m}) in a ring with m fresh variables.
pub fn stable_extension<K: Field>(f: &PolyMap<K>, m: usize) -> PolyMap<K> {
    if m == 0 {
        return f.clone();
    }
    let n = f.n();
    let names: Vec<String> = (1..=m).map(|k| alloc::format!("x{}", n + k)).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let ring = f.ring.extend(&refs);
    let mut components: Vec<Poly<K>> = f.components.iter().map(|c| c.embed_prefix(&ring)).collect();
    components.extend((n..n + m).map(|i| Poly::var(&ring, i)));
    PolyMap { ring, components }
}

/// A Drużkowski map X + K with its coefficient matrix rank.
#[derive(Clone, Debug, PartialEq)]
pub struct Druzkowski<K: Field> {
    pub map: PolyMap<K>,
    pub rank: usize,
}

/// kᵢ = (Σⱼ a_{ji} xⱼ)³, i.e. the cube of the linear form read from column i of A.
pub fn druzkowski<K: Field>(ring: &Arc<Ring<K>>, a: &[Vec<K>]) -> Result<Druzkowski<K>, KellerError> {
    let n = ring.nvars();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(KellerError::NotSquare { vars: n, components: a.len() });
    }
    let components = (0..n)
        .map(|i| {
            let mut lf = Poly::zero(ring);
            for (j, row) in a.iter().enumerate() {
                lf = &lf + &Poly::var(ring, j).scale(&row[i]);
            }
            &Poly::var(ring, i) + &lf.pow(3)
        })
        .collect();
    Ok(Druzkowski { map: PolyMap { ring: ring.clone(), components }, rank: matrix_rank(a) })
}

/// Top ω-parts test for a pair (f, g) in two variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TopParts {
    pub jac_zero: bool,
    pub proportional: bool,
}

/// `a·p = b·q` for some nonzero constants a, b.
pub fn proportional<K: Field>(p: &Poly<K>, q: &Poly<K>) -> bool {
    match (p.leading_term(), q.is_zero()) {
        (None, true) => true,
        (None, false) | (Some(_), true) => false,
        (Some((m, c)), false) => {
            let d = q.coeff(m);
            if d.vanishes() || p.num_terms() != q.num_terms() {
                return false;
            }
            let ratio = c.times(&d.inverse().expect("nonzero"));
            *p == q.scale(&ratio)
        }
    }
}

pub fn top_parts_compatible<K: Field>(f: &Poly<K>, g: &Poly<K>, w: &[i64]) -> Result<TopParts, KellerError> {
    if f.nvars() != 2 || !f.same_ring(g) {
        return Err(if f.nvars() != 2 { KellerError::NotTwoVariables } else { PolyError::RingMismatch.into() });
    }
    let df = f.degrees(w)?;
    let dg = g.degrees(w)?;
    let (m, n) = match (df.wdeg, dg.wdeg) {
        (WDeg::Finite(m), WDeg::Finite(n)) if m > 0 && n > 0 => (m, n),
        _ => return Err(KellerError::NonPositiveDegree),
    };
    let (fp, gp) = (df.top, dg.top);
    let jac = &(&fp.differentiate(0) * &gp.differentiate(1)) - &(&fp.differentiate(1) * &gp.differentiate(0));
    let delta = m.gcd(&n);
    let p = fp.pow((n / delta) as u32);
    let q = gp.pow((m / delta) as u32);
    Ok(TopParts { jac_zero: jac.is_zero(), proportional: proportional(&p, &q) })
}

/// True iff every extreme point of the Newton polygon lies on a coordinate axis,
/// i.e. the polygon is a (possibly degenerate) triangle (0,0), (p,0), (0,q).
pub fn newton_triangle_test<K: Field>(p: &Poly<K>) -> Result<bool, KellerError> {
    let np = newton_polygon(p)?;
    Ok(np.hull_vertices.iter().all(|&(i, j)| i == 0 || j == 0))
}

/// δᵢ(h) = det J(f₁,…,h,…,fₙ) with h in slot `i` (0-based). Its generator
/// images are the cofactors of row i.
pub fn jacobian_derivation<K: Field>(f: &PolyMap<K>, i: usize) -> Result<Derivation<K>, KellerError> {
    let n = f.n();
    if i >= n {
        return Err(KellerError::SlotOutOfRange(i));
    }
    let jm = jacobian(f).matrix;
    let images = (0..n)
        .map(|j| {
            let minor: Vec<Vec<Poly<K>>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| jm[r][c].clone()).collect())
                .collect();
            let d = determinant(&f.ring, &minor);
            if (i + j).is_multiple_of(2) {
                d
            } else {
                -&d
            }
        })
        .collect();
    Ok(Derivation::new(&f.ring, images)?)
}

/// Parses a map from component strings.
pub fn parse_map<K: Field, S: AsRef<str>>(ring: &Arc<Ring<K>>, comps: &[S]) -> Result<PolyMap<K>, KellerError> {
    let components = comps.iter().map(|s| Poly::parse(s.as_ref(), ring)).collect::<Result<Vec<_>, _>>()?;
    PolyMap::new(ring, components)
}
