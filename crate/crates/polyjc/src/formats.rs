//! JSON input files. Each format converts to the core type and back, so a
//! file can be normalized by reading and writing it once.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use polyjc_core::casebook::QuotientRing;
use polyjc_core::fibration::{FiberComponent, FiberSpec, WeightedTree};
use polyjc_core::keller::{parse_map, PolyMap};
use polyjc_core::lnd::Derivation;
use polyjc_core::poly::{QPoly, QRing};
use polyjc_core::{Poly, Rational, Ring};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

pub fn ring(vars: &[String]) -> Result<Arc<QRing>, CliError> {
    Ok(Ring::new(vars, ())?)
}

pub fn parse_polys(ring: &Arc<QRing>, texts: &[String]) -> Result<Vec<QPoly>, CliError> {
    texts.iter().map(|s| Poly::parse(s, ring).map_err(CliError::from)).collect()
}

/// `{"vars": ["x", "y"], "components": ["x + y^2", "y"]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub vars: Vec<String>,
    pub components: Vec<String>,
}

impl MapFile {
    pub fn to_map(&self) -> Result<PolyMap<Rational>, CliError> {
        Ok(parse_map(&ring(&self.vars)?, &self.components)?)
    }

    pub fn from_map(f: &PolyMap<Rational>) -> Self {
        MapFile { vars: f.ring().vars().to_vec(), components: f.components().iter().map(|p| p.to_string()).collect() }
    }
}

/// `{"vars": ["x", "y"], "images": ["0", "x"]}`: δ(xᵢ) = imagesᵢ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationFile {
    pub vars: Vec<String>,
    pub images: Vec<String>,
}

impl DerivationFile {
    pub fn to_derivation(&self) -> Result<Derivation<Rational>, CliError> {
        let r = ring(&self.vars)?;
        let images = parse_polys(&r, &self.images)?;
        Ok(Derivation::new(&r, images)?)
    }

    pub fn from_derivation(d: &Derivation<Rational>) -> Self {
        DerivationFile { vars: d.ring().vars().to_vec(), images: d.images().iter().map(|p| p.to_string()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    pub w: i64,
}

/// `{"vertices": [{"id": "u", "w": 0}, …], "edges": [["u", "v"], …],
/// "ordering": ["u", "v", …]}`; without `ordering` the vertex order is used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Vec<String>>,
}

impl TreeFile {
    pub fn to_tree(&self) -> Result<WeightedTree, CliError> {
        let vertices: Vec<(&str, i64)> = self.vertices.iter().map(|v| (v.id.as_str(), v.w)).collect();
        let edges: Vec<(&str, &str)> = self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let ordering: Vec<&str> = match &self.ordering {
            Some(o) => o.iter().map(String::as_str).collect(),
            None => self.vertices.iter().map(|v| v.id.as_str()).collect(),
        };
        Ok(WeightedTree::new(&vertices, &edges, &ordering)?)
    }

    pub fn from_tree(t: &WeightedTree) -> Self {
        let ids = t.ids();
        TreeFile {
            vertices: ids.iter().zip(t.weights()).map(|(id, &w)| VertexEntry { id: id.clone(), w }).collect(),
            edges: t.edges().into_iter().map(|(a, b)| (ids[a].clone(), ids[b].clone())).collect(),
            ordering: Some(ids.to_vec()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub name: String,
    pub self_intersection: i64,
    pub multiplicity: u64,
}

/// Degenerate fiber: components, dual-graph edges by index, the components
/// met by the section, the index of ℓ′ and the indices left out of the
/// relation set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberFile {
    pub components: Vec<ComponentEntry>,
    pub edges: Vec<(usize, usize)>,
    pub section_adjacent: Vec<usize>,
    pub line: usize,
    #[serde(default)]
    pub excluded: Vec<usize>,
}

impl FiberFile {
    pub fn to_spec(&self) -> Result<FiberSpec, CliError> {
        let spec = FiberSpec {
            components: self
                .components
                .iter()
                .map(|c| FiberComponent {
                    name: c.name.clone(),
                    self_intersection: c.self_intersection,
                    multiplicity: c.multiplicity,
                })
                .collect(),
            edges: self.edges.clone(),
            section_adjacent: self.section_adjacent.clone(),
            line: self.line,
            excluded: self.excluded.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_spec(s: &FiberSpec) -> Self {
        FiberFile {
            components: s
                .components
                .iter()
                .map(|c| ComponentEntry {
                    name: c.name.clone(),
                    self_intersection: c.self_intersection,
                    multiplicity: c.multiplicity,
                })
                .collect(),
            edges: s.edges.clone(),
            section_adjacent: s.section_adjacent.clone(),
            line: s.line,
            excluded: s.excluded.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientEntry {
    pub vars: Vec<String>,
    pub relations: Vec<String>,
}

impl QuotientEntry {
    pub fn to_quotient(&self) -> Result<QuotientRing, CliError> {
        let r = ring(&self.vars)?;
        Ok(QuotientRing::new(&r, parse_polys(&r, &self.relations)?)?)
    }

    pub fn from_quotient(q: &QuotientRing) -> Self {
        QuotientEntry {
            vars: q.ring().vars().to_vec(),
            relations: q.relations().iter().map(|p| p.to_string()).collect(),
        }
    }
}

/// A ring homomorphism source → target; without `target` it is an
/// endomorphism. Images are polynomials in the target variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomFile {
    pub source: QuotientEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<QuotientEntry>,
    pub images: Vec<String>,
}

impl HomFile {
    pub fn to_hom(&self) -> Result<polyjc_core::casebook::RingHom, CliError> {
        let source = self.source.to_quotient()?;
        let target = match &self.target {
            Some(t) => t.to_quotient()?,
            None => source.clone(),
        };
        let images = parse_polys(target.ring(), &self.images)?;
        Ok(polyjc_core::casebook::RingHom::new(source, target, images)?)
    }

    pub fn from_hom(h: &polyjc_core::casebook::RingHom) -> Self {
        let source = QuotientEntry::from_quotient(h.source());
        let target = (h.source() != h.target()).then(|| QuotientEntry::from_quotient(h.target()));
        HomFile { source, target, images: h.images().iter().map(|p| p.to_string()).collect() }
    }
}

/// `{"family": "xrz_yd", "params": {"d": 2, "r": 3, "n": 2}}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, u32>,
}
