use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::verdict::Emit;

#[derive(Debug, Parser)]
#[command(name = "polyjc", version, about = "Exact algebra for Keller maps, LNDs, boundary graphs and étale endomorphisms")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub emit: Emit,
    /// Degree cap for Gröbner computations.
    #[arg(long, global = true)]
    pub max_degree: Option<u32>,
    /// Iteration cap: inversion order for `keller`, iteration count for `lnd`.
    #[arg(long, global = true)]
    pub cap: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polynomial maps: Jacobians, inverses, Drużkowski form, Newton polygons.
    Keller {
        #[command(subcommand)]
        cmd: KellerCmd,
    },
    /// Derivations: lengths, local nilpotency, exponentials, slices.
    Lnd {
        #[command(subcommand)]
        cmd: LndCmd,
    },
    /// Weighted boundary graphs, fundamental groups and enumerations.
    Graph {
        #[command(subcommand)]
        cmd: GraphCmd,
    },
    /// Explicit surfaces, covers and étale endomorphisms.
    Case {
        #[command(subcommand)]
        cmd: CaseCmd,
    },
    /// Recompute a reference table and diff it against the stored values.
    Reproduce {
        #[arg(value_enum)]
        table: Table,
    },
}

/// A polynomial map from `--map FILE` or inline `--vars` and `--comps`.
#[derive(Debug, Clone, Args)]
pub struct MapInput {
    #[arg(long, conflicts_with_all = ["vars", "comps"])]
    pub map: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub comps: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum KellerCmd {
    /// Jacobian matrix and determinant; Keller iff the determinant is a nonzero constant.
    Check(MapInput),
    /// Exact polynomial inverse, searched up to `--cap` (truncation order).
    Invert(MapInput),
    /// det J(G)(F) · det J(F) for a map F and a candidate inverse G.
    Chain {
        #[command(flatten)]
        map: MapInput,
        #[arg(long, conflicts_with = "inv_comps")]
        inverse: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        inv_comps: Vec<String>,
    },
    /// x + (Ax)^{*3} for a square rational matrix, rows separated by `;`.
    Druzkowski {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
    },
    /// Newton polygon of a polynomial in two variables and the triangle test.
    Newton {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        vars: Vec<String>,
    },
    /// Top ω-parts of f and g: vanishing Jacobian and proportionality.
    Topparts {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        vars: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,1")]
        weights: Vec<i64>,
    },
}

/// A derivation from `--derivation FILE` or inline `--vars` and `--images`.
#[derive(Debug, Clone, Args)]
pub struct DerivationInput {
    #[arg(long, conflicts_with_all = ["vars", "images"])]
    pub derivation: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub images: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum LndCmd {
    /// Least n with δⁿ⁺¹(p) = 0.
    Length {
        #[command(flatten)]
        delta: DerivationInput,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Local nilpotency verdict with witness or bound.
    Nilpotent {
        #[command(flatten)]
        delta: DerivationInput,
    },
    /// exp(tδ)(p) with a fresh variable t.
    Exp {
        #[command(flatten)]
        delta: DerivationInput,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// p = Σ cᵢ uⁱ with cᵢ in the kernel, for a slice u.
    Slice {
        #[command(flatten)]
        delta: DerivationInput,
        #[arg(long, allow_hyphen_values = true)]
        slice: String,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Checks δ = φ(f) ∂/∂g for an automorphism (f, g) of the plane.
    Rentschler {
        #[command(flatten)]
        delta: DerivationInput,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
}

/// A weighted tree from `--tree FILE` or a chain `--chain w1,w2,…`.
#[derive(Debug, Clone, Args)]
pub struct TreeInput {
    #[arg(long, conflicts_with = "chain")]
    pub tree: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub chain: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    A1,
    P1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum EnumKind {
    EulerZero,
    Lemma2311,
    PlatonicEq,
    PlatonicIneq,
    Thm256Box,
}

#[derive(Debug, Subcommand)]
pub enum GraphCmd {
    /// Presentation of π₁ of the boundary graph, or of the pseudo-plane group with `--pseudo-plane d,r`.
    Pi1 {
        #[command(flatten)]
        tree: TreeInput,
        #[arg(long, value_delimiter = ',')]
        pseudo_plane: Vec<u32>,
        /// Remove the appendix `u,v` first.
        #[arg(long, value_delimiter = ',')]
        remove_appendix: Vec<String>,
        #[arg(long)]
        abelian: bool,
        /// Count subgroups of index ≤ N.
        #[arg(long)]
        index: Option<usize>,
    },
    /// H₁ at infinity: cokernel of the intersection matrix.
    Abelian {
        #[command(flatten)]
        tree: TreeInput,
    },
    /// Intersection matrix, determinant and definiteness.
    Form {
        #[command(flatten)]
        tree: TreeInput,
    },
    /// Picard rank and torsion for fibers given as `components:multiplicity`.
    Pic {
        #[arg(long, value_enum)]
        base: BaseArg,
        #[arg(long, value_delimiter = ',')]
        fibers: Vec<String>,
    },
    /// Genus of the cusp x^{m1} = y^{m2} and its multiplicity sequence.
    Genus {
        #[arg(long)]
        m1: u64,
        #[arg(long)]
        m2: u64,
    },
    /// Bounded Riemann–Hurwitz style enumerations.
    Enumerate {
        #[arg(long, value_enum)]
        kind: EnumKind,
        #[arg(long)]
        max_m: Option<u64>,
        #[arg(long)]
        max_r: Option<usize>,
        #[arg(long)]
        max_d: Option<i64>,
        #[arg(long)]
        max_n: Option<i64>,
        #[arg(long)]
        max_s: Option<i64>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        max_h: Option<i64>,
    },
    /// Coefficients of A = M + αℓ′ + Σ βᵢEᵢ orthogonal to the fiber components.
    Section {
        #[arg(long, conflicts_with = "m2")]
        fiber: Option<PathBuf>,
        /// Use the built-in multiplicity-two fiber after h blow-ups.
        #[arg(long)]
        m2: Option<usize>,
    },
    /// Canonical class coefficient.
    Canon {
        #[arg(long, allow_hyphen_values = true)]
        a: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        n: Option<i64>,
        /// Fibers as `k:m`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        fibers: Vec<String>,
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["a", "n", "fibers"])]
        pseudo_plane_r: Option<i64>,
    },
    /// Σ (n dᵢ − d′ᵢ) boundary lines.
    Lines {
        #[arg(long)]
        n: i64,
        #[arg(long, value_delimiter = ',')]
        d: Vec<i64>,
        #[arg(long, value_delimiter = ',')]
        dprime: Vec<i64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FamilyArg {
    QuadricXyz,
    XrzYd,
    TwistedX2u,
}

/// A family from `--spec FILE` or `--family NAME` with parameters.
#[derive(Debug, Clone, Args)]
pub struct FamilyInput {
    #[arg(long, conflicts_with = "family")]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaArg {
    #[value(name = "lemma1426_1")]
    Lemma1426First,
    #[value(name = "lemma1426_2")]
    Lemma1426Second,
    #[value(name = "prop1427")]
    Prop1427,
}

#[derive(Debug, Subcommand)]
pub enum CaseCmd {
    /// Well-definedness and unramifiedness of a ring homomorphism.
    Hom {
        #[arg(long, conflicts_with_all = ["spec", "family"])]
        file: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyInput,
    },
    /// The endomorphism of a named family.
    Family {
        #[command(flatten)]
        family: FamilyInput,
    },
    /// g, h with g(z + 1/z) = zⁿ + z⁻ⁿ and g² − 4 = (t² − 4)h.
    Dickson {
        #[arg(long)]
        n: u32,
    },
    /// Chart polynomials p_ω, q_ω of x^r z + y^d + a₁xy^{d−1} + ⋯ + a_d x^d = 1.
    Pq {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: u32,
        /// Coefficients a₁,…,a_d: numbers or parameter names.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<String>,
    },
    /// Builds the equivariant section and checks its relation for every root of unity.
    Sigma {
        #[arg(long = "case", value_enum)]
        which: SigmaArg,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<String>,
    },
    /// Searches c, u with aᵢ = cⁱ u^{d−i} bᵢ for i = 2..d.
    Iso {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        b: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Table {
    Example1421,
    Platonic,
    EulerZero,
    Pi1Orders,
}
