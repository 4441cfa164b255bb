use polyjc_core::fibration::{
    abelianization, boundary_lines_count, canonical_index, cusp_genus, h1_infinity, intersection_form,
    multiplicity_two_fiber, pic_invariants, presentation_from_tree, pseudo_plane_pi1, rh_enumerate, section_coefficient,
    subgroup_counts, AbelianInvariants, Base, CanonicalQuery, RhQuery, WeightedTree,
};

use crate::cli::{BaseArg, EnumKind, GraphCmd, TreeInput};
use crate::formats::{read_json, FiberFile, TreeFile};
use crate::verdict::{Status, Verdict};
use crate::{parse_pairs, qstr, usage, CliError};

fn load_tree(input: &TreeInput) -> Result<WeightedTree, CliError> {
    match &input.tree {
        Some(path) => read_json::<TreeFile>(path)?.to_tree(),
        None if !input.chain.is_empty() => Ok(WeightedTree::chain(&input.chain)),
        None => Err(usage("give --tree FILE or --chain w1,w2,...")),
    }
}

fn abelian_json(a: &AbelianInvariants) -> serde_json::Value {
    serde_json::json!({
        "torsion": a.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "free_rank": a.free_rank,
        "order": a.order().map(|o| o.to_string()),
        "cyclic": a.is_cyclic(),
        "group": a.to_string(),
    })
}

pub(crate) fn run(name: &str, cmd: &GraphCmd) -> Result<Verdict, CliError> {
    let ok = || Verdict::new(name, Status::Ok);
    match cmd {
        GraphCmd::Pi1 { tree, pseudo_plane, remove_appendix, abelian, index } => {
            if !matches!(pseudo_plane.len(), 0 | 2) || !matches!(remove_appendix.len(), 0 | 2) {
                return Err(usage("--pseudo-plane takes d,r and --remove-appendix takes u,v"));
            }
            let presentation = if let [d, r] = pseudo_plane[..] {
                pseudo_plane_pi1(d, r)?.presentation
            } else {
                let mut t = load_tree(tree)?;
                if let [u, v] = &remove_appendix[..] {
                    t = t.remove_appendix(u, v)?;
                }
                presentation_from_tree(&t)
            };
            let mut v = ok()
                .with("presentation", presentation.to_string())
                .with("generators", presentation.generators())
                .with("trivial", presentation.proves_trivial());
            if *abelian {
                let a = abelianization(&presentation);
                v.set("torsion", a.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>());
                v.set("abelian", abelian_json(&a));
            }
            if let Some(k) = index {
                v.set("subgroup_counts", subgroup_counts(&presentation, *k));
            }
            Ok(v)
        }
        GraphCmd::Abelian { tree } => {
            let a = h1_infinity(&load_tree(tree)?);
            Ok(ok().with("torsion", a.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>()).with("abelian", abelian_json(&a)))
        }
        GraphCmd::Form { tree } => {
            let f = intersection_form(&load_tree(tree)?);
            Ok(ok()
                .with("matrix", &f.matrix)
                .with("det", f.det.to_string())
                .with("negative_definite", f.negative_definite))
        }
        GraphCmd::Pic { base, fibers } => {
            let fibers: Vec<(u64, u64)> = parse_pairs(fibers)?;
            let base = match base {
                BaseArg::A1 => Base::A1,
                BaseArg::P1 => Base::P1,
            };
            let p = pic_invariants(base, &fibers)?;
            Ok(ok()
                .with("rank", p.rank)
                .with("torsion", p.torsion.map(|t| t.iter().map(|x| x.to_string()).collect::<Vec<_>>())))
        }
        GraphCmd::Genus { m1, m2 } => {
            let g = cusp_genus(*m1, *m2)?;
            Ok(Verdict::new(name, Status::from_bool(g.genus == g.genus_from_sequence))
                .with("genus", g.genus)
                .with("genus_from_sequence", g.genus_from_sequence)
                .with("multiplicity_sequence", &g.mult_sequence))
        }
        GraphCmd::Enumerate { kind, max_m, max_r, max_d, max_n, max_s, s, max_h } => {
            let q = match kind {
                EnumKind::EulerZero => RhQuery::EulerZero { max_m: *max_m, max_r: *max_r },
                EnumKind::Lemma2311 => RhQuery::Lemma2311 { max_d: *max_d, max_n: *max_n, max_s: *max_s },
                EnumKind::PlatonicEq => RhQuery::PlatonicEq {
                    max_s: max_s.map(|v| v as usize),
                    max_m: *max_m,
                    max_n: max_n.map(|v| v as u64),
                },
                EnumKind::PlatonicIneq => RhQuery::PlatonicIneq { s: *s, max_m: *max_m, max_n: max_n.map(|v| v as u64) },
                EnumKind::Thm256Box => RhQuery::Thm256Box { max_h: *max_h, max_n: *max_n },
            };
            let rows = rh_enumerate(&q)?;
            Ok(ok().with("count", rows.len()).with("solutions", rows))
        }
        GraphCmd::Section { fiber, m2 } => {
            let spec = match (fiber, m2) {
                (Some(path), _) => read_json::<FiberFile>(path)?.to_spec()?,
                (None, Some(h)) => multiplicity_two_fiber(*h)?,
                (None, None) => return Err(usage("give --fiber FILE or --m2 H")),
            };
            let s = section_coefficient(&spec)?;
            let betas: Vec<(String, String)> =
                s.betas.iter().map(|(i, b)| (spec.components[*i].name.clone(), qstr(b))).collect();
            Ok(ok()
                .with("alpha", qstr(&s.alpha))
                .with("betas", betas)
                .with("fiber_consistent", s.fiber_consistent))
        }
        GraphCmd::Canon { a, n, fibers, pseudo_plane_r } => {
            let q = match pseudo_plane_r {
                Some(r) => CanonicalQuery::PseudoPlane { r: *r },
                None => CanonicalQuery::Thm256 {
                    a: a.ok_or_else(|| usage("--a is required"))?,
                    n: n.ok_or_else(|| usage("--n is required"))?,
                    fibers: parse_pairs(fibers)?,
                },
            };
            Ok(ok().with("coefficient", qstr(&canonical_index(&q)?)))
        }
        GraphCmd::Lines { n, d, dprime } => Ok(ok().with("lines", boundary_lines_count(*n, d, dprime)?)),
    }
}
