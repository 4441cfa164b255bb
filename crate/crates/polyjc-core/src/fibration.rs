//! Weighted boundary trees, their groups at infinity, and the integer
//! bookkeeping of A¹- and A¹*-fibrations.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::{frac, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    UnknownVertex(String),
    DuplicateVertex(String),
    Disconnected,
    Cyclic,
    BadOrdering,
    NotAnAppendix { u: String, v: String },
    UnknownGenerator(usize),
    Coprime { m1: u64, m2: u64 },
    BadParameter(&'static str),
    ReducibleFiber,
    SingularSystem,
    LengthMismatch,
    NegativeSummand(usize),
    MissingBound(&'static str),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::UnknownVertex(v) => write!(f, "unknown vertex {v:?}"),
            GraphError::DuplicateVertex(v) => write!(f, "duplicate vertex {v:?}"),
            GraphError::Disconnected => write!(f, "graph is disconnected"),
            GraphError::Cyclic => write!(f, "graph has a cycle"),
            GraphError::BadOrdering => write!(f, "ordering must list every vertex exactly once"),
            GraphError::NotAnAppendix { u, v } => write!(f, "{{{u}, {v}}} is not an appendix"),
            GraphError::UnknownGenerator(g) => write!(f, "relator uses undeclared generator {g}"),
            GraphError::Coprime { m1, m2 } => write!(f, "gcd({m1}, {m2}) must be 1 with 1 <= m1 < m2"),
            GraphError::BadParameter(p) => write!(f, "invalid parameter: {p}"),
            GraphError::ReducibleFiber => write!(f, "torsion formula needs irreducible fibers over A^1"),
            GraphError::SingularSystem => write!(f, "linear system is singular"),
            GraphError::LengthMismatch => write!(f, "lists differ in length"),
            GraphError::NegativeSummand(i) => write!(f, "summand {i} is negative"),
            GraphError::MissingBound(b) => write!(f, "missing bound {b}"),
        }
    }
}

impl core::error::Error for GraphError {}

// ---------------------------------------------------------------------------
// Trees.

/// Weighted tree with a fixed vertex ordering. Vertices are stored in the
/// given ordering, so index i is the i-th vertex of the ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedTree {
    ids: Vec<String>,
    weights: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl WeightedTree {
    pub fn new<S: AsRef<str>>(
        vertices: &[(S, i64)],
        edges: &[(S, S)],
        ordering: &[S],
    ) -> Result<Self, GraphError> {
        let mut weight_of: BTreeMap<&str, i64> = BTreeMap::new();
        for (id, w) in vertices {
            if weight_of.insert(id.as_ref(), *w).is_some() {
                return Err(GraphError::DuplicateVertex(id.as_ref().into()));
            }
        }
        if ordering.len() != vertices.len() {
            return Err(GraphError::BadOrdering);
        }
        let mut pos: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, id) in ordering.iter().enumerate() {
            if !weight_of.contains_key(id.as_ref()) || pos.insert(id.as_ref(), i).is_some() {
                return Err(GraphError::BadOrdering);
            }
        }
        let ids: Vec<String> = ordering.iter().map(|s| s.as_ref().into()).collect();
        let weights = ids.iter().map(|id| weight_of[id.as_str()]).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for (a, b) in edges {
            let ia = *pos.get(a.as_ref()).ok_or_else(|| GraphError::UnknownVertex(a.as_ref().into()))?;
            let ib = *pos.get(b.as_ref()).ok_or_else(|| GraphError::UnknownVertex(b.as_ref().into()))?;
            if ia == ib || adj[ia].contains(&ib) {
                return Err(GraphError::Cyclic);
            }
            adj[ia].push(ib);
            adj[ib].push(ia);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
        }
        let t = WeightedTree { ids, weights, adj };
        t.check_tree(edges.len())?;
        Ok(t)
    }

    /// Linear chain v1 - v2 - … with the given weights.
    pub fn chain(weights: &[i64]) -> Self {
        let n = weights.len();
        let mut adj = vec![Vec::new(); n];
        for i in 1..n {
            adj[i - 1].push(i);
            adj[i].push(i - 1);
        }
        WeightedTree { ids: (1..=n).map(|i| alloc::format!("v{i}")).collect(), weights: weights.to_vec(), adj }
    }

    fn check_tree(&self, nedges: usize) -> Result<(), GraphError> {
        let n = self.ids.len();
        if n == 0 {
            return Ok(());
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != n {
            return Err(GraphError::Disconnected);
        }
        if nedges != n - 1 {
            return Err(GraphError::Cyclic);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Vertex ids in the tree's ordering.
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, l) in self.adj.iter().enumerate() {
            out.extend(l.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    pub fn is_chain(&self) -> bool {
        self.adj.iter().all(|l| l.len() <= 2)
    }

    /// Removes the appendix {u, v}: u has weight 0 and is linked only to v,
    /// v is linked to u and at most one other vertex.
    pub fn remove_appendix(&self, u: &str, v: &str) -> Result<WeightedTree, GraphError> {
        let bad = || GraphError::NotAnAppendix { u: u.into(), v: v.into() };
        let iu = self.index_of(u).ok_or_else(|| GraphError::UnknownVertex(u.into()))?;
        let iv = self.index_of(v).ok_or_else(|| GraphError::UnknownVertex(v.into()))?;
        if self.weights[iu] != 0 || self.adj[iu] != [iv] || self.adj[iv].len() > 2 {
            return Err(bad());
        }
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != iu && i != iv).collect();
        let mut new_index = vec![usize::MAX; self.len()];
        for (k, &i) in keep.iter().enumerate() {
            new_index[i] = k;
        }
        let adj = keep
            .iter()
            .map(|&i| self.adj[i].iter().filter(|&&j| j != iu && j != iv).map(|&j| new_index[j]).collect())
            .collect();
        Ok(WeightedTree {
            ids: keep.iter().map(|&i| self.ids[i].clone()).collect(),
            weights: keep.iter().map(|&i| self.weights[i]).collect(),
            adj,
        })
    }
}

// ---------------------------------------------------------------------------
// Group presentations.

/// A word is a sequence of (generator index, exponent).
pub type Word = Vec<(usize, i64)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, GraphError> {
        for w in &relators {
            if let Some(&(g, _)) = w.iter().find(|(g, _)| *g >= generators.len()) {
                return Err(GraphError::UnknownGenerator(g));
            }
        }
        let relators = relators.into_iter().map(|w| w.into_iter().filter(|&(_, e)| e != 0).collect()).collect();
        Ok(GroupPresentation { generators, relators })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Exponent-sum matrix, one row per relator.
    pub fn relation_matrix(&self) -> Vec<Vec<BigInt>> {
        self.relators
            .iter()
            .map(|w| {
                let mut row = vec![BigInt::zero(); self.generators.len()];
                for &(g, e) in w {
                    row[g] += e;
                }
                row
            })
            .collect()
    }

    /// Letters of a relator with unit exponents.
    fn letters(w: &Word) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        for &(g, e) in w {
            for _ in 0..e.unsigned_abs() {
                out.push((g, e < 0));
            }
        }
        out
    }

    /// Proves triviality by repeatedly deleting generators that some relator,
    /// after removing already-killed generators and free cancellation,
    /// equates to the identity. Returns false when this does not finish; that
    /// proves nothing.
    pub fn proves_trivial(&self) -> bool {
        let n = self.generators.len();
        let mut killed = vec![false; n];
        loop {
            let mut progress = false;
            for w in &self.relators {
                let mut red: Vec<(usize, bool)> = Vec::new();
                for (g, inv) in Self::letters(w) {
                    if killed[g] {
                        continue;
                    }
                    if red.last() == Some(&(g, !inv)) {
                        red.pop();
                    } else {
                        red.push((g, inv));
                    }
                }
                if let [(g, _)] = red[..] {
                    killed[g] = true;
                    progress = true;
                }
            }
            if killed.iter().all(|&k| k) {
                return true;
            }
            if !progress {
                return false;
            }
        }
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} | ", self.generators.join(", "))?;
        for (i, w) in self.relators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if w.is_empty() {
                write!(f, "e")?;
            }
            for (k, &(g, e)) in w.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                if e == 1 {
                    write!(f, "{}", self.generators[g])?;
                } else {
                    write!(f, "{}^{}", self.generators[g], e)?;
                }
            }
        }
        write!(f, " >")
    }
}

/// One generator per vertex; for each vertex v of weight d the product of its
/// neighbors and itself in the tree ordering, with v raised to d; one
/// commutator per edge.
pub fn presentation_from_tree(t: &WeightedTree) -> GroupPresentation {
    let mut relators: Vec<Word> = Vec::new();
    for v in 0..t.len() {
        let mut slots: Vec<usize> = t.adj[v].clone();
        slots.push(v);
        slots.sort_unstable();
        let w: Word = slots
            .into_iter()
            .map(|u| (u, if u == v { t.weights[v] } else { 1 }))
            .filter(|&(_, e)| e != 0)
            .collect();
        relators.push(w);
    }
    for (a, b) in t.edges() {
        relators.push(vec![(a, 1), (b, 1), (a, -1), (b, -1)]);
    }
    GroupPresentation { generators: t.ids.clone(), relators }
}

// ---------------------------------------------------------------------------
// Integer linear algebra.

/// Finitely generated abelian group ℤ^free_rank ⊕ ⊕ ℤ/dᵢ with d₁ | d₂ | ….
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    /// Order of the group, or `None` when it is infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    pub fn is_cyclic(&self) -> bool {
        self.torsion.len() + self.free_rank <= 1
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| alloc::format!("Z/{d}")).collect();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".into() } else { alloc::format!("Z^{}", self.free_rank) });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Diagonal of the Smith normal form (nonzero entries, positive, each
/// dividing the next).
pub fn smith_diagonal(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in (t + 1)..rows {
            if a[i][t].is_zero() {
                continue;
            }
            let q = a[i][t].div_floor(&a[t][t]);
            for j in t..cols {
                let v = &a[t][j] * &q;
                a[i][j] -= v;
            }
            if !a[i][t].is_zero() {
                clean = false;
            }
        }
        for j in (t + 1)..cols {
            if a[t][j].is_zero() {
                continue;
            }
            let q = a[t][j].div_floor(&a[t][t]);
            for row in a.iter_mut().skip(t) {
                let v = &row[t] * &q;
                row[j] -= v;
            }
            if !a[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // pivot must divide the rest of the block
        let p = a[t][t].clone();
        let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&p)));
        if let Some(i) = offender {
            let (head, tail) = a.split_at_mut(i);
            for (x, y) in head[t].iter_mut().zip(&tail[0]) {
                *x += y;
            }
            continue;
        }
        diag.push(p.abs());
        t += 1;
    }
    diag
}

/// Abelian invariants of the cokernel of the relation matrix.
pub fn abelianization(p: &GroupPresentation) -> AbelianInvariants {
    cokernel(&p.relation_matrix(), p.generators.len())
}

fn cokernel(m: &[Vec<BigInt>], ncols: usize) -> AbelianInvariants {
    let diag = smith_diagonal(m);
    AbelianInvariants {
        free_rank: ncols - diag.len(),
        torsion: diag.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

pub fn h1_infinity(t: &WeightedTree) -> AbelianInvariants {
    abelianization(&presentation_from_tree(t))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionForm {
    pub matrix: Vec<Vec<i64>>,
    pub det: BigInt,
    pub negative_definite: bool,
}

/// Determinants of the leading principal minors, by fraction-free elimination.
pub fn leading_minors(m: &[Vec<i64>]) -> Vec<BigInt> {
    let n = m.len();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let sub: Vec<Vec<BigInt>> = (0..k).map(|i| (0..k).map(|j| BigInt::from(m[i][j])).collect()).collect();
        out.push(bareiss(sub));
    }
    out
}

/// Exact determinant by Bareiss elimination with row pivoting.
pub fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn intersection_form(t: &WeightedTree) -> IntersectionForm {
    let n = t.len();
    let mut matrix = vec![vec![0i64; n]; n];
    for i in 0..n {
        matrix[i][i] = t.weights[i];
        for &j in &t.adj[i] {
            matrix[i][j] = 1;
        }
    }
    let minors = leading_minors(&matrix);
    // negative definite iff (−1)^k D_k > 0 for all k
    let negative_definite = minors.iter().enumerate().all(|(k, d)| if k % 2 == 0 { d.is_negative() } else { d.is_positive() });
    let det = minors.last().cloned().unwrap_or_else(BigInt::one);
    IntersectionForm { matrix, det, negative_definite }
}

// ---------------------------------------------------------------------------
// Low-index subgroups.

/// Number of subgroups of index k for k = 1..=max_index, by enumerating
/// standardized coset tables.
pub fn subgroup_counts(p: &GroupPresentation, max_index: usize) -> Vec<u64> {
    let ngens = p.generators.len();
    let rels: Vec<Vec<usize>> = p
        .relators
        .iter()
        .map(|w| GroupPresentation::letters(w).into_iter().map(|(g, inv)| 2 * g + inv as usize).collect())
        .filter(|w: &Vec<usize>| !w.is_empty())
        .collect();
    let mut counts = vec![0u64; max_index];
    if max_index == 0 {
        return counts;
    }
    let table = vec![vec![None; 2 * ngens]; 1];
    let mut search = CosetSearch { ncols: 2 * ngens, rels, max: max_index, counts: &mut counts };
    search.descend(table);
    counts
}

type Table = Vec<Vec<Option<usize>>>;

struct CosetSearch<'a> {
    ncols: usize,
    rels: Vec<Vec<usize>>,
    max: usize,
    counts: &'a mut Vec<u64>,
}

impl CosetSearch<'_> {
    fn set(table: &mut Table, c: usize, col: usize, d: usize) -> bool {
        let inv = col ^ 1;
        match (table[c][col], table[d][inv]) {
            (None, None) => {
                table[c][col] = Some(d);
                table[d][inv] = Some(c);
                true
            }
            (None, Some(x)) if x == c => {
                table[c][col] = Some(d);
                true
            }
            (Some(x), None) if x == d => {
                table[d][inv] = Some(c);
                true
            }
            (Some(x), Some(y)) => x == d && y == c,
            _ => false,
        }
    }

    /// Scans every relator at every coset, filling single gaps; false on a
    /// contradiction.
    fn deduce(&self, table: &mut Table) -> bool {
        loop {
            let mut changed = false;
            for c in 0..table.len() {
                for r in &self.rels {
                    let (mut f, mut i) = (c, 0);
                    while i < r.len() {
                        match table[f][r[i]] {
                            Some(n) => {
                                f = n;
                                i += 1;
                            }
                            None => break,
                        }
                    }
                    if i == r.len() {
                        if f != c {
                            return false;
                        }
                        continue;
                    }
                    let (mut b, mut j) = (c, r.len());
                    while j > i {
                        match table[b][r[j - 1] ^ 1] {
                            Some(n) => {
                                b = n;
                                j -= 1;
                            }
                            None => break,
                        }
                    }
                    if j == i {
                        if f != b {
                            return false;
                        }
                    } else if j == i + 1 {
                        if !Self::set(table, f, r[i], b) {
                            return false;
                        }
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn descend(&mut self, mut table: Table) {
        if !self.deduce(&mut table) {
            return;
        }
        let gap = (0..table.len()).flat_map(|c| (0..self.ncols).map(move |col| (c, col))).find(|&(c, col)| table[c][col].is_none());
        let Some((c, col)) = gap else {
            self.counts[table.len() - 1] += 1;
            return;
        };
        for d in 0..table.len() {
            let mut t = table.clone();
            if Self::set(&mut t, c, col, d) {
                self.descend(t);
            }
        }
        if table.len() < self.max {
            let mut t = table;
            t.push(vec![None; self.ncols]);
            let d = t.len() - 1;
            if Self::set(&mut t, c, col, d) {
                self.descend(t);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Pseudo-planes and Picard groups.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoPlanePi1 {
    pub presentation: GroupPresentation,
    pub abelian: AbelianInvariants,
}

/// ⟨x, y | x^r y^{−d}, y^d (xy)^{−d}⟩.
pub fn pseudo_plane_pi1(d: u32, r: u32) -> Result<PseudoPlanePi1, GraphError> {
    if d < 2 || r < 1 {
        return Err(GraphError::BadParameter("need d >= 2 and r >= 1"));
    }
    let (d, r) = (d as i64, r as i64);
    let mut xy_inv: Word = Vec::new();
    for _ in 0..d {
        xy_inv.push((1, -1));
        xy_inv.push((0, -1));
    }
    let mut second: Word = vec![(1, d)];
    second.extend(xy_inv);
    let presentation = GroupPresentation::new(vec!["x".into(), "y".into()], vec![vec![(0, r), (1, -d)], second])?;
    let abelian = abelianization(&presentation);
    Ok(PseudoPlanePi1 { presentation, abelian })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    A1,
    P1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicInvariants {
    pub rank: u64,
    /// Present when every fiber is irreducible and the base is A¹.
    pub torsion: Option<Vec<BigInt>>,
}

/// Fibers are (number of components, multiplicity).
pub fn pic_invariants(base: Base, fibers: &[(u64, u64)]) -> Result<PicInvariants, GraphError> {
    if fibers.iter().any(|&(r, m)| r == 0 || m == 0) {
        return Err(GraphError::BadParameter("component counts and multiplicities must be positive"));
    }
    let rank = fibers.iter().map(|&(r, _)| r - 1).sum::<u64>() + u64::from(base == Base::P1);
    Ok(PicInvariants { rank, torsion: pic_torsion(base, fibers).ok() })
}

/// Pic ≅ ⊕ ℤ/m_P for an A¹-fibration over A¹ with irreducible fibers,
/// in invariant-factor form.
pub fn pic_torsion(base: Base, fibers: &[(u64, u64)]) -> Result<Vec<BigInt>, GraphError> {
    if base != Base::A1 || fibers.iter().any(|&(r, _)| r != 1) {
        return Err(GraphError::ReducibleFiber);
    }
    let n = fibers.len();
    let m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::from(fibers[i].1) } else { BigInt::zero() }).collect())
        .collect();
    Ok(cokernel(&m, n).torsion)
}

// ---------------------------------------------------------------------------
// Cusp genus.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspGenus {
    /// (multiplicity, repetitions), multiplicities > 1 only.
    pub mult_sequence: Vec<(u64, u64)>,
    /// (n − 1)(n − ℓ₁ − 1)/2.
    pub genus: i64,
    /// (n − 1)(n − 2)/2 − Σ m(m − 1)/2 over the sequence.
    pub genus_from_sequence: i64,
}

pub fn cusp_genus(m1: u64, m2: u64) -> Result<CuspGenus, GraphError> {
    if m1 < 1 || m1 >= m2 || m1.gcd(&m2) != 1 {
        return Err(GraphError::Coprime { m1, m2 });
    }
    let n = m2;
    let l1 = m2 - m1;
    let mut seq = Vec::new();
    let (mut a, mut b) = (n, l1);
    while b > 0 {
        if b > 1 {
            seq.push((b, a / b));
        }
        (a, b) = (b, a % b);
    }
    let (n, l1) = (n as i64, l1 as i64);
    let genus = (n - 1) * (n - l1 - 1) / 2;
    let delta: i64 = seq.iter().map(|&(m, k)| (k * m * (m - 1) / 2) as i64).sum();
    let genus_from_sequence = (n - 1) * (n - 2) / 2 - delta;
    Ok(CuspGenus { mult_sequence: seq, genus, genus_from_sequence })
}

// ---------------------------------------------------------------------------
// Riemann–Hurwitz enumerations.

/// Nondecreasing sequences of length `len` with entries in [lo, hi] whose
/// reciprocal sum lies in [min, max], passed with that sum. A branch is cut
/// once the remaining entries cannot bring the sum into the window.
fn for_each_reciprocal_window(
    len: usize,
    (lo, hi): (u64, u64),
    (min, max): (&Rational, &Rational),
    f: &mut dyn FnMut(&[u64], &Rational),
) {
    struct Search<'a> {
        len: usize,
        hi: u64,
        min: &'a Rational,
        max: &'a Rational,
    }
    fn rec(s: &Search, cur: &mut Vec<u64>, sum: &Rational, lo: u64, f: &mut dyn FnMut(&[u64], &Rational)) {
        let left = (s.len - cur.len()) as i64;
        if left == 0 {
            if s.min <= sum && sum <= s.max {
                f(cur, sum);
            }
            return;
        }
        if sum + frac(left, s.hi as i64) > *s.max {
            return;
        }
        for m in lo..=s.hi {
            // later entries are at least m
            if sum + frac(left, m as i64) < *s.min {
                break;
            }
            cur.push(m);
            rec(s, cur, &(sum + frac(1, m as i64)), m, f);
            cur.pop();
        }
    }
    if lo == 0 || lo > hi {
        return;
    }
    let s = Search { len, hi, min, max };
    rec(&s, &mut Vec::with_capacity(len), &rat(0), lo, f);
}

/// Σ 1/mᵢ = r − 2 with r ≥ 3 entries mᵢ ∈ [2, max_m].
pub fn euler_zero(max_m: u64, max_r: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for r in 3..=max_r {
        let target = rat(r as i64 - 2);
        for_each_reciprocal_window(r, (2, max_m), (&target, &target), &mut |ms, _| out.push(ms.to_vec()));
    }
    out
}

/// (d, n, s) with 1 − (n + s) = d(1 − n) and 2s + n ≤ dn, d, n ≥ 1, s ≥ 0.
pub fn lemma2311(max_d: i64, max_n: i64, max_s: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        for n in 1..=max_n {
            for s in 0..=max_s {
                if 1 - (n + s) == d * (1 - n) && 2 * s + n <= d * n {
                    out.push((d, n, s));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlatonicSolution {
    pub multiplicities: Vec<u64>,
    pub n: u64,
}

/// N = num/den when that is an integer in [1, max_n].
fn integral_n(q: &Rational, max_n: u64) -> Option<u64> {
    if !q.is_positive() || !q.is_integer() {
        return None;
    }
    q.to_integer().to_u64().filter(|&n| n <= max_n)
}

/// Σ_{i≤s} 1/mᵢ = (s − 1) + 1/N with mᵢ ∈ [2, max_m].
pub fn platonic_eq(max_s: usize, max_m: u64, max_n: u64) -> Vec<PlatonicSolution> {
    let mut out = Vec::new();
    if max_n == 0 {
        return out;
    }
    for s in 1..=max_s {
        let base = rat(s as i64 - 1);
        let window = (&base + frac(1, max_n as i64), &base + rat(1));
        for_each_reciprocal_window(s, (2, max_m), (&window.0, &window.1), &mut |ms, sum| {
            // 1/N = Σ − (s − 1)
            if let Some(n) = integral_n(&(sum - &base).recip(), max_n) {
                out.push(PlatonicSolution { multiplicities: ms.to_vec(), n });
            }
        });
    }
    out
}

/// 2N − 2 = Σ (N/mᵢ)(mᵢ − 1) with s entries mᵢ ∈ [2, max_m].
pub fn platonic_ineq(s: usize, max_m: u64, max_n: u64) -> Vec<PlatonicSolution> {
    let mut out = Vec::new();
    if max_n == 0 {
        return out;
    }
    // dividing by N: Σ 1/mᵢ = s − 2 + 2/N
    let base = rat(s as i64 - 2);
    let window = (&base + frac(2, max_n as i64), &base + rat(2));
    for_each_reciprocal_window(s, (2, max_m), (&window.0, &window.1), &mut |ms, sum| {
        if let Some(n) = integral_n(&(rat(2) / (sum - &base)), max_n) {
            out.push(PlatonicSolution { multiplicities: ms.to_vec(), n });
        }
    });
    out
}

/// Integer points with h₁ ≥ 4, h₂ ≥ 6, h₃ ≥ 10, hᵢ ≤ max_h, 0 ≤ n ≤ max_n,
/// h₁/2 + h₂/3 + h₃/5 = n + 2 and h₁/4 + h₂/9 + h₃/25 > n.
pub fn thm256_box(max_h: i64, max_n: i64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for h1 in 4..=max_h {
        for h2 in 6..=max_h {
            for h3 in 10..=max_h {
                let s = 15 * h1 + 10 * h2 + 6 * h3;
                if s % 30 != 0 {
                    continue;
                }
                let n = s / 30 - 2;
                if !(0..=max_n).contains(&n) {
                    continue;
                }
                if 225 * h1 + 100 * h2 + 36 * h3 > 900 * n {
                    out.push([h1, h2, h3, n]);
                }
            }
        }
    }
    out
}

/// Enumeration request with every bound explicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RhQuery {
    EulerZero { max_m: Option<u64>, max_r: Option<usize> },
    Lemma2311 { max_d: Option<i64>, max_n: Option<i64>, max_s: Option<i64> },
    PlatonicEq { max_s: Option<usize>, max_m: Option<u64>, max_n: Option<u64> },
    PlatonicIneq { s: Option<usize>, max_m: Option<u64>, max_n: Option<u64> },
    Thm256Box { max_h: Option<i64>, max_n: Option<i64> },
}

/// Solutions as integer rows: the multiset (EulerZero), (d, n, s)
/// (Lemma2311), multiset followed by N (Platonic*), (h₁, h₂, h₃, n) (box).
pub fn rh_enumerate(q: &RhQuery) -> Result<Vec<Vec<i64>>, GraphError> {
    fn need<T: Copy>(v: Option<T>, name: &'static str) -> Result<T, GraphError> {
        v.ok_or(GraphError::MissingBound(name))
    }
    let conv = |sols: Vec<PlatonicSolution>| {
        sols.into_iter()
            .map(|p| {
                let mut row: Vec<i64> = p.multiplicities.iter().map(|&m| m as i64).collect();
                row.push(p.n as i64);
                row
            })
            .collect()
    };
    Ok(match *q {
        RhQuery::EulerZero { max_m, max_r } => euler_zero(need(max_m, "max_m")?, need(max_r, "max_r")?)
            .into_iter()
            .map(|v| v.into_iter().map(|m| m as i64).collect())
            .collect(),
        RhQuery::Lemma2311 { max_d, max_n, max_s } => {
            lemma2311(need(max_d, "max_d")?, need(max_n, "max_n")?, need(max_s, "max_s")?)
                .into_iter()
                .map(|(d, n, s)| vec![d, n, s])
                .collect()
        }
        RhQuery::PlatonicEq { max_s, max_m, max_n } => {
            conv(platonic_eq(need(max_s, "max_s")?, need(max_m, "max_m")?, need(max_n, "max_n")?))
        }
        RhQuery::PlatonicIneq { s, max_m, max_n } => {
            conv(platonic_ineq(need(s, "s")?, need(max_m, "max_m")?, need(max_n, "max_n")?))
        }
        RhQuery::Thm256Box { max_h, max_n } => {
            thm256_box(need(max_h, "max_h")?, need(max_n, "max_n")?).into_iter().map(|p| p.to_vec()).collect()
        }
    })
}

// ---------------------------------------------------------------------------
// Section coefficients.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberComponent {
    pub name: String,
    pub self_intersection: i64,
    pub multiplicity: u64,
}

/// Components of a degenerate fiber with their dual graph, the components
/// met by the section M, the component ℓ′ whose coefficient is α, and the
/// components left out of the relation set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberSpec {
    pub components: Vec<FiberComponent>,
    pub edges: Vec<(usize, usize)>,
    pub section_adjacent: Vec<usize>,
    pub line: usize,
    pub excluded: Vec<usize>,
}

impl FiberSpec {
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.components.len();
        let bad = |i: &usize| *i >= n;
        if self.line >= n
            || self.edges.iter().any(|(a, b)| bad(a) || bad(b) || a == b)
            || self.section_adjacent.iter().any(bad)
            || self.excluded.iter().any(bad)
            || self.excluded.contains(&self.line)
        {
            return Err(GraphError::BadParameter("fiber indices out of range"));
        }
        if self.components.iter().any(|c| c.multiplicity == 0) {
            return Err(GraphError::BadParameter("multiplicities must be positive"));
        }
        Ok(())
    }

    /// (Cᵢ · Cⱼ).
    pub fn intersection(&self, i: usize, j: usize) -> i64 {
        if i == j {
            self.components[i].self_intersection
        } else {
            self.edges.iter().filter(|&&(a, b)| (a, b) == (i, j) || (a, b) == (j, i)).count() as i64
        }
    }

    /// Σⱼ μⱼ (Cⱼ · Cᵢ) = 0 for every component.
    pub fn fiber_consistent(&self) -> bool {
        let n = self.components.len();
        (0..n).all(|i| (0..n).map(|j| self.components[j].multiplicity as i64 * self.intersection(j, i)).sum::<i64>() == 0)
    }

    /// Components in the relation set, in order.
    pub fn constrained(&self) -> Vec<usize> {
        (0..self.components.len()).filter(|i| !self.excluded.contains(i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionCoefficients {
    pub alpha: Rational,
    /// Coefficients of the other constrained components, in index order.
    pub betas: Vec<(usize, Rational)>,
    pub fiber_consistent: bool,
}

/// Solves (A · C) = 0 for every constrained C with A = M + αℓ′ + Σ βᵢ Eᵢ.
pub fn section_coefficient(spec: &FiberSpec) -> Result<SectionCoefficients, GraphError> {
    spec.validate()?;
    let idx = spec.constrained();
    let k = idx.len();
    let mut a: Vec<Vec<Rational>> = idx
        .iter()
        .map(|&c| {
            let mut row: Vec<Rational> = idx.iter().map(|&d| rat(spec.intersection(d, c))).collect();
            row.push(rat(-(spec.section_adjacent.iter().filter(|&&s| s == c).count() as i64)));
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| !a[r][col].is_zero()).ok_or(GraphError::SingularSystem)?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=k {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
            }
        }
    }
    let sol: Vec<Rational> = a.into_iter().map(|r| r[k].clone()).collect();
    let mut alpha = rat(0);
    let mut betas = Vec::new();
    for (pos, &c) in idx.iter().enumerate() {
        if c == spec.line {
            alpha = sol[pos].clone();
        } else {
            betas.push((c, sol[pos].clone()));
        }
    }
    Ok(SectionCoefficients { alpha, betas, fiber_consistent: spec.fiber_consistent() })
}

/// The fiber for multiplicity 2 after h blow-ups: ℓ′ and E₁ are (−2)-tips on
/// E₂, then a (−2)-chain E₂ - … - E_{h−1} ending at the (−1)-curve E_h,
/// which is excluded; M meets ℓ′. For h = 1 it is the single (−1)-curve ℓ′.
pub fn multiplicity_two_fiber(h: usize) -> Result<FiberSpec, GraphError> {
    if h == 0 {
        return Err(GraphError::BadParameter("h >= 1"));
    }
    if h == 1 {
        return Ok(FiberSpec {
            components: vec![FiberComponent { name: "l'".into(), self_intersection: -1, multiplicity: 1 }],
            edges: Vec::new(),
            section_adjacent: vec![0],
            line: 0,
            excluded: Vec::new(),
        });
    }
    // index 0 is ℓ′, index i is E_i
    let mut components = vec![FiberComponent { name: "l'".into(), self_intersection: -2, multiplicity: 1 }];
    for i in 1..=h {
        components.push(FiberComponent {
            name: alloc::format!("E{i}"),
            self_intersection: if i == h { -1 } else { -2 },
            multiplicity: if i == 1 { 1 } else { 2 },
        });
    }
    let mut edges = vec![(0, 2), (1, 2)];
    edges.extend((2..h).map(|i| (i, i + 1)));
    Ok(FiberSpec { components, edges, section_adjacent: vec![0], line: 0, excluded: vec![h] })
}

// ---------------------------------------------------------------------------
// Canonical class and boundary lines.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonicalQuery {
    /// (2a − n − 2) + Σ kᵢ/mᵢ for fibers (kᵢ, mᵢ).
    Thm256 { a: i64, n: i64, fibers: Vec<(i64, i64)> },
    /// K ~ (r − 2)F₀.
    PseudoPlane { r: i64 },
}

pub fn canonical_index(q: &CanonicalQuery) -> Result<Rational, GraphError> {
    match q {
        CanonicalQuery::Thm256 { a, n, fibers } => {
            if fibers.iter().any(|&(_, m)| m < 1) {
                return Err(GraphError::BadParameter("multiplicities must be positive"));
            }
            Ok(fibers.iter().fold(rat(2 * a - n - 2), |acc, &(k, m)| acc + frac(k, m)))
        }
        CanonicalQuery::PseudoPlane { r } => Ok(rat(r - 2)),
    }
}

/// Σ (n·dᵢ − d′ᵢ).
pub fn boundary_lines_count(n: i64, d: &[i64], dprime: &[i64]) -> Result<i64, GraphError> {
    if d.len() != dprime.len() {
        return Err(GraphError::LengthMismatch);
    }
    let mut total = 0;
    for (i, (&di, &dpi)) in d.iter().zip(dprime).enumerate() {
        if n < 0 || di < 0 || dpi < 0 {
            return Err(GraphError::BadParameter("values must be non-negative"));
        }
        let s = n * di - dpi;
        if s < 0 {
            return Err(GraphError::NegativeSummand(i));
        }
        total += s;
    }
    Ok(total)
}
