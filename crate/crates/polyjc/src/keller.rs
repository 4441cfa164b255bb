use polyjc_core::keller::{
    chain_rule_check, druzkowski, invert_exact, is_keller, jacobian, newton_triangle_test, parse_map,
    top_parts_compatible, PolyMap,
};
use polyjc_core::poly::newton_polygon;
use polyjc_core::{Poly, Rational};

use crate::cli::{KellerCmd, MapInput};
use crate::config::Caps;
use crate::formats::{read_json, ring, MapFile};
use crate::verdict::{Status, Verdict};
use crate::{parse_rational, usage, CliError};

pub(crate) fn load_map(input: &MapInput) -> Result<PolyMap<Rational>, CliError> {
    match &input.map {
        Some(path) => read_json::<MapFile>(path)?.to_map(),
        None if !input.vars.is_empty() => Ok(parse_map(&ring(&input.vars)?, &input.comps)?),
        None => Err(usage("give --map FILE or --vars and --comps")),
    }
}

fn comps(f: &PolyMap<Rational>) -> Vec<String> {
    f.components().iter().map(|p| p.to_string()).collect()
}

pub(crate) fn run(name: &str, cmd: &KellerCmd, caps: &Caps) -> Result<Verdict, CliError> {
    match cmd {
        KellerCmd::Check(input) => {
            let f = load_map(input)?;
            let j = jacobian(&f);
            let matrix: Vec<Vec<String>> = j.matrix.iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect();
            let keller = is_keller(&f);
            Ok(Verdict::new(name, Status::from_bool(keller))
                .with("keller", keller)
                .with("jacobian", matrix)
                .with("determinant", j.determinant.to_string()))
        }
        KellerCmd::Invert(input) => {
            let f = load_map(input)?;
            if !is_keller(&f) {
                return Ok(Verdict::new(name, Status::Fail).with("keller", false));
            }
            Ok(match invert_exact(&f, caps.invert)? {
                Some(g) => Verdict::new(name, Status::Ok)
                    .with("keller", true)
                    .with("inverse", comps(&g))
                    .with("degree", g.degree())
                    .with("verified", true),
                None => Verdict::new(name, Status::Cap).with("keller", true).with("cap", caps.invert),
            })
        }
        KellerCmd::Chain { map, inverse, inv_comps } => {
            let f = load_map(map)?;
            let g = match inverse {
                Some(path) => read_json::<MapFile>(path)?.to_map()?,
                None if !inv_comps.is_empty() => parse_map(f.ring(), inv_comps)?,
                None => return Err(usage("give --inverse FILE or --inv-comps")),
            };
            if g.ring().vars() != f.ring().vars() {
                return Err(usage("map and inverse must use the same variables"));
            }
            let value = chain_rule_check(&f, &g)?;
            let inverse = f.compose(&g)?.is_identity() && g.compose(&f)?.is_identity();
            Ok(Verdict::new(name, Status::from_bool(value.is_one()))
                .with("chain_rule", value.to_string())
                .with("two_sided_inverse", inverse))
        }
        KellerCmd::Druzkowski { matrix, vars } => {
            let rows: Vec<Vec<Rational>> = matrix
                .split(';')
                .map(|row| row.split(',').map(parse_rational).collect::<Result<_, _>>())
                .collect::<Result<_, _>>()?;
            let n = rows.len();
            let names: Vec<String> =
                if vars.is_empty() { (1..=n).map(|i| format!("x{i}")).collect() } else { vars.clone() };
            let r = ring(&names)?;
            let d = druzkowski(&r, &rows)?;
            let keller = is_keller(&d.map);
            Ok(Verdict::new(name, Status::Ok)
                .with("vars", names)
                .with("map", comps(&d.map))
                .with("rank", d.rank)
                .with("keller", keller))
        }
        KellerCmd::Newton { poly, vars } => {
            let r = ring(vars)?;
            let p = Poly::parse(poly, &r)?;
            let np = newton_polygon(&p)?;
            let triangle = newton_triangle_test(&p)?;
            Ok(Verdict::new(name, Status::Ok)
                .with("support", &np.support)
                .with("hull_vertices", &np.hull_vertices)
                .with("triangle", triangle))
        }
        KellerCmd::Topparts { f, g, vars, weights } => {
            let r = ring(vars)?;
            let (f, g) = (Poly::parse(f, &r)?, Poly::parse(g, &r)?);
            let t = top_parts_compatible(&f, &g, weights)?;
            Ok(Verdict::new(name, Status::Ok).with("jac_zero", t.jac_zero).with("proportional", t.proportional))
        }
    }
}
