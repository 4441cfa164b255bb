use polyjc_core::lnd::{
    exp_map, is_locally_nilpotent, rentschler_verify, slice_decompose, Derivation, LndError, NilpotencyVerdict,
};
use polyjc_core::{Poly, Rational};

use crate::cli::{DerivationInput, LndCmd};
use crate::config::Caps;
use crate::formats::{parse_polys, read_json, ring, DerivationFile};
use crate::verdict::{Status, Verdict};
use crate::{qstr, usage, CliError};

fn load(input: &DerivationInput) -> Result<Derivation<Rational>, CliError> {
    match &input.derivation {
        Some(path) => read_json::<DerivationFile>(path)?.to_derivation(),
        None if !input.vars.is_empty() => {
            let r = ring(&input.vars)?;
            Ok(Derivation::new(&r, parse_polys(&r, &input.images)?)?)
        }
        None => Err(usage("give --derivation FILE or --vars and --images")),
    }
}

/// Cap and verdict errors become verdicts; everything else is an input error.
fn lnd_failure(name: &str, e: LndError<Rational>) -> Result<Verdict, CliError> {
    match e {
        LndError::CapExceeded { cap } | LndError::Inconclusive { cap } => Ok(Verdict::new(name, Status::Cap)
            .with("cap", cap)
            .with("reason", e.to_string())),
        LndError::NotVerified(v) => Ok(nilpotency(Verdict::new(name, Status::Fail), &v)),
        LndError::NotASlice => Ok(Verdict::new(name, Status::Fail).with("reason", e.to_string())),
        other => Err(other.into()),
    }
}

fn nilpotency(mut v: Verdict, verdict: &NilpotencyVerdict<Rational>) -> Verdict {
    match verdict {
        NilpotencyVerdict::LocallyNilpotent { bound } => {
            v.set("locally_nilpotent", "yes");
            v.set("bound", bound);
        }
        NilpotencyVerdict::NotNilpotentWitness { generator, earlier, iterate, scalar } => {
            v.set("locally_nilpotent", "no");
            v.set(
                "witness",
                serde_json::json!({
                    "generator": generator,
                    "earlier": earlier,
                    "iterate": iterate,
                    "scalar": qstr(scalar),
                }),
            );
        }
        NilpotencyVerdict::UnknownCapExceeded { cap } => {
            v.set("locally_nilpotent", "unknown");
            v.set("cap", cap);
        }
    }
    v
}

pub(crate) fn run(name: &str, cmd: &LndCmd, caps: &Caps) -> Result<Verdict, CliError> {
    let result = match cmd {
        LndCmd::Length { delta, poly } => {
            let d = load(delta)?;
            let p = Poly::parse(poly, d.ring())?;
            let cap = caps.lnd.unwrap_or_else(|| d.default_cap());
            Ok(match d.length(&p, cap) {
                Some(n) => Verdict::new(name, Status::Ok).with("length", n),
                None => Verdict::new(name, Status::Cap).with("cap", cap),
            })
        }
        LndCmd::Nilpotent { delta } => {
            let d = load(delta)?;
            let cap = caps.lnd.unwrap_or_else(|| d.default_cap());
            let verdict = is_locally_nilpotent(&d, cap);
            let status = match verdict {
                NilpotencyVerdict::LocallyNilpotent { .. } => Status::Ok,
                NilpotencyVerdict::NotNilpotentWitness { .. } => Status::Fail,
                NilpotencyVerdict::UnknownCapExceeded { .. } => Status::Cap,
            };
            Ok(nilpotency(Verdict::new(name, status), &verdict))
        }
        LndCmd::Exp { delta, poly } => {
            let d = load(delta)?;
            let p = Poly::parse(poly, d.ring())?;
            exp_map(&d, &p).map(|e| {
                let t = e.ring().vars().last().cloned().unwrap_or_default();
                Verdict::new(name, Status::Ok).with("exp", e.to_string()).with("parameter", t)
            })
        }
        LndCmd::Slice { delta, slice, poly } => {
            let d = load(delta)?;
            let u = Poly::parse(slice, d.ring())?;
            let p = Poly::parse(poly, d.ring())?;
            let cap = caps.lnd.unwrap_or_else(|| d.default_cap());
            slice_decompose(&d, &u, &p, cap).map(|cs| {
                Verdict::new(name, Status::Ok).with("coefficients", cs.iter().map(|c| c.to_string()).collect::<Vec<_>>())
            })
        }
        LndCmd::Rentschler { delta, f, g } => {
            let d = load(delta)?;
            let f = Poly::parse(f, d.ring())?;
            let g = Poly::parse(g, d.ring())?;
            rentschler_verify(&d, &f, &g, caps.invert).map(|rep| {
                Verdict::new(name, Status::from_bool(rep.holds))
                    .with("holds", rep.holds)
                    .with("kernel_part", rep.kernel_part.map(|p| p.to_string()))
            })
        }
    };
    result.or_else(|e| lnd_failure(name, e))
}
