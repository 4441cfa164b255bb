use polyjc_core::casebook::{
    dickson_gh, family_endo, hom_check, pq_solve, sigma_verify, tilde_iso_test, transition_check, CoverRing, Family,
    RingHom, SigmaCase, Verdict as Answer,
};

use crate::cli::{CaseCmd, FamilyArg, FamilyInput, SigmaArg};
use crate::config::Caps;
use crate::formats::{read_json, CaseFile, HomFile};
use crate::verdict::{Status, Verdict};
use crate::{parse_rational, usage, CliError};

fn answer(a: Answer) -> &'static str {
    match a {
        Answer::Yes => "yes",
        Answer::No => "no",
        Answer::Cap => "cap",
    }
}

fn family(input: &FamilyInput) -> Result<Family, CliError> {
    let need = |v: Option<u32>, what: &str| v.ok_or_else(|| usage(format!("family needs --{what}")));
    if let Some(path) = &input.spec {
        let file: CaseFile = read_json(path)?;
        let p = |k: &str| file.params.get(k).copied().ok_or_else(|| usage(format!("family needs parameter {k}")));
        let (family, known): (Family, &[&str]) = match file.family.replace('-', "_").as_str() {
            "quadric_xyz" => (Family::QuadricXyz { n: p("n")? }, &["n"]),
            "xrz_yd" => (Family::XrzYd { d: p("d")?, r: p("r")?, n: p("n")? }, &["d", "r", "n"]),
            "twisted_x2u" => (Family::TwistedX2u { n: p("n")? }, &["n"]),
            other => return Err(usage(format!("unknown family {other:?}"))),
        };
        if let Some(k) = file.params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(usage(format!("unknown parameter {k:?} for {}", file.family)));
        }
        return Ok(family);
    }
    Ok(match input.family.ok_or_else(|| usage("give --spec FILE or --family NAME"))? {
        FamilyArg::QuadricXyz => Family::QuadricXyz { n: need(input.n, "n")? },
        FamilyArg::XrzYd => Family::XrzYd { d: need(input.d, "d")?, r: need(input.r, "r")?, n: need(input.n, "n")? },
        FamilyArg::TwistedX2u => Family::TwistedX2u { n: need(input.n, "n")? },
    })
}

fn strings<T: ToString>(items: &[T]) -> Vec<String> {
    items.iter().map(|p| p.to_string()).collect()
}

/// The given coefficient tokens, or symbolic a1..ad.
fn coefficients(given: &[String], d: u32) -> Vec<String> {
    if given.is_empty() {
        (1..=d).map(|i| format!("a{i}")).collect()
    } else {
        given.to_vec()
    }
}

fn hom_verdict(name: &str, phi: &RingHom, caps: &Caps) -> Result<Verdict, CliError> {
    let check = hom_check(phi, &caps.groebner)?;
    let status = match (check.well_defined, check.unramified) {
        (Answer::Yes, Answer::Yes) => Status::Ok,
        (Answer::Cap, _) | (_, Answer::Cap) => Status::Cap,
        _ => Status::Fail,
    };
    Ok(Verdict::new(name, status)
        .with("well_defined", answer(check.well_defined))
        .with("unramified", answer(check.unramified))
        .with("hom", serde_json::to_value(HomFile::from_hom(phi))?))
}

pub(crate) fn run(name: &str, cmd: &CaseCmd, caps: &Caps) -> Result<Verdict, CliError> {
    match cmd {
        CaseCmd::Hom { file, family: input } => {
            let phi = match file {
                Some(path) => read_json::<HomFile>(path)?.to_hom()?,
                None => family_endo(family(input)?)?,
            };
            hom_verdict(name, &phi, caps)
        }
        CaseCmd::Family { family: input } => {
            let phi = family_endo(family(input)?)?;
            let ring = phi.source();
            Ok(Verdict::new(name, Status::Ok)
                .with("vars", ring.ring().vars())
                .with("relations", strings(ring.relations()))
                .with("images", strings(phi.images())))
        }
        CaseCmd::Dickson { n } => {
            let pair = dickson_gh(*n)?;
            Ok(Verdict::new(name, Status::Ok)
                .with("g", pair.g.to_string())
                .with("h", pair.h.to_string())
                .with("identity", "g^2 - 4 = (t^2 - 4)*h"))
        }
        CaseCmd::Pq { d, r, a } => {
            let tokens = coefficients(a, *d);
            let (cr, coeffs) = CoverRing::with_coefficients(*d, &tokens)?;
            let sol = pq_solve(&cr, *r, &coeffs)?;
            let charts: Vec<serde_json::Value> = sol
                .charts
                .iter()
                .map(|ch| {
                    serde_json::json!({
                        "j": ch.j,
                        "omega": ch.omega.to_string(),
                        "p": ch.p.to_string(),
                        "q": ch.q.to_string(),
                        "c": strings(&ch.c),
                    })
                })
                .collect();
            let transitions = transition_check(&sol);
            Ok(Verdict::new(name, Status::from_bool(transitions))
                .with("coefficients", tokens)
                .with("charts", charts)
                .with("transitions", transitions))
        }
        CaseCmd::Sigma { which, d, r, a } => {
            let (case, tokens) = match which {
                SigmaArg::Lemma1426First => (SigmaCase::Lemma1426First { d: *d, r: *r }, coefficients(a, *d)),
                SigmaArg::Lemma1426Second => {
                    if (*d, *r) != (2, 3) {
                        return Err(usage("lemma1426_2 is the case d = 2, r = 3"));
                    }
                    (SigmaCase::Lemma1426Second, coefficients(a, 2))
                }
                SigmaArg::Prop1427 => (SigmaCase::Prop1427 { d: *d, r: *r }, if a.is_empty() { vec!["a".into()] } else { a.clone() }),
            };
            let (cr, coeffs) = CoverRing::with_coefficients(*d, &tokens)?;
            let report = sigma_verify(&cr, &case, &coeffs)?;
            let checks: Vec<serde_json::Value> = report
                .checks
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "name": c.name,
                        "sigma": c.sigma.to_string(),
                        "failures": c.failures.iter().map(|(j, p)| (j, p.to_string())).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok(Verdict::new(name, Status::from_bool(report.holds()))
                .with("holds", report.holds())
                .with("coefficients", tokens)
                .with("checks", checks))
        }
        CaseCmd::Iso { d, r, a, b } => {
            let parse = |v: &[String]| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>();
            let witness = tilde_iso_test(*d, *r, &parse(a)?, &parse(b)?)?;
            Ok(match witness {
                Some(w) => Verdict::new(name, Status::Ok)
                    .with("isomorphic", true)
                    .with("c", w.c.to_string())
                    .with("u", w.u.to_string()),
                None => Verdict::new(name, Status::Fail).with("isomorphic", false),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_families() {
        let input = FamilyInput { spec: None, family: Some(FamilyArg::XrzYd), n: Some(2), d: Some(2), r: None };
        assert!(family(&input).is_err());
        let input = FamilyInput { r: Some(1), ..input };
        assert_eq!(family(&input).unwrap(), Family::XrzYd { d: 2, r: 1, n: 2 });
    }
}
