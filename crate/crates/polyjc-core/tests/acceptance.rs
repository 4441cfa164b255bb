//! Acceptance runner: one PASS/FAIL line per criterion with its time limit.
//!
//! Arithmetic is exact, so every comparison is equality. The process exits 0
//! once the report is printed; set `POLYJC_ACCEPTANCE_STRICT=1` to exit 1 on
//! any FAIL.

mod support;

use std::time::{Duration, Instant};

use polyjc_core::casebook::{dickson_gh, family_endo, hom_check, pq_solve, CoverRing, Family, Verdict};
use polyjc_core::field::{frac, rat};
use polyjc_core::fibration::{
    euler_zero, multiplicity_two_fiber, platonic_eq, platonic_ineq, pseudo_plane_pi1, section_coefficient,
    thm256_box,
};
use polyjc_core::groebner::GroebnerLimits;
use polyjc_core::poly::qring;
use polyjc_core::Poly;

type Check = Result<String, String>;

struct Criterion {
    id: &'static str,
    what: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn pq_charts() -> Check {
    let (cr, a) = CoverRing::with_coefficients(2, &["a1", "a2"]).map_err(|e| e.to_string())?;
    let x = cr.parse("x").unwrap();
    let mut bad = Vec::new();
    let r3 = pq_solve(&cr, 3, &a).map_err(|e| e.to_string())?;
    for ch in &r3.charts {
        let w = if ch.j == 0 { "1" } else { "(-1)" };
        let p = cr.parse(&format!("{w} - 1/2*a1*x + 1/8*{w}*(a1^2-4*a2)*x^2")).unwrap();
        if ch.p != p {
            bad.push(format!("r=3 p_{}: expected {p}, got {}", ch.omega, ch.p));
        }
    }
    let r4 = pq_solve(&cr, 4, &a).map_err(|e| e.to_string())?;
    for ch in &r4.charts {
        if !ch.c[2].is_zero() {
            bad.push(format!("r=4 c3({}) = {}", ch.omega, ch.c[2]));
        }
        let q = -&(&(&ch.c[1] * &ch.c[1]) * &x);
        if ch.q != q {
            bad.push(format!("r=4 q_{}: expected {q}, got {}", ch.omega, ch.q));
        }
    }
    if bad.is_empty() {
        Ok("p at r=3, c3 and q at r=4 match".into())
    } else {
        Err(bad.join("; "))
    }
}

fn pseudo_plane_orders() -> Check {
    for d in 2..=8u32 {
        let g = pseudo_plane_pi1(d, 1).map_err(|e| e.to_string())?.abelian;
        let want = num_bigint::BigInt::from(d * d);
        if !(g.is_cyclic() && g.order() == Some(want)) {
            return Err(format!("d={d}: got {g}"));
        }
    }
    Ok("Z/d^2 for d = 2..8".into())
}

fn platonic_equality() -> Check {
    let sols = platonic_eq(5, 12, 60);
    match sols.iter().find(|s| !(s.multiplicities.len() == 1 && s.multiplicities[0] == s.n)) {
        Some(s) => Err(format!("extra solution {:?} with N = {}", s.multiplicities, s.n)),
        None if sols.is_empty() => Err("no solutions at all".into()),
        None => Ok(format!("{} solutions, all s = 1 with m1 = N", sols.len())),
    }
}

fn platonic_inequality() -> Check {
    let mut got: Vec<Vec<u64>> = platonic_ineq(3, 30, 120).into_iter().map(|s| s.multiplicities).collect();
    got.sort();
    got.dedup();
    let mut want: Vec<Vec<u64>> = (2..=30).map(|n| vec![2, 2, n]).collect();
    want.extend([vec![2, 3, 3], vec![2, 3, 4], vec![2, 3, 5]]);
    want.sort();
    if got == want {
        Ok(format!("{{2,2,n}} for n = 2..30 and {{2,3,3}}, {{2,3,4}}, {{2,3,5}} ({} triples)", got.len()))
    } else {
        Err(format!("got {got:?}"))
    }
}

fn euler_characteristic_zero() -> Check {
    let mut got = euler_zero(30, 8);
    got.sort();
    let want = vec![vec![2, 2, 2, 2], vec![2, 3, 6], vec![2, 4, 4], vec![3, 3, 3]];
    if got == want {
        Ok("{2,2,2,2}, {2,3,6}, {2,4,4}, {3,3,3}".into())
    } else {
        Err(format!("got {got:?}"))
    }
}

fn box_search() -> Check {
    let sols = thm256_box(300, 60);
    if sols.is_empty() {
        Ok("no solutions with h <= 300, n <= 60".into())
    } else {
        Err(format!("{} solutions, first {:?}", sols.len(), sols[0]))
    }
}

fn section_coefficients() -> Check {
    let mut seen = Vec::new();
    for (h, want) in [(1usize, rat(1)), (2, frac(1, 2))] {
        let spec = multiplicity_two_fiber(h).map_err(|e| e.to_string())?;
        let alpha = section_coefficient(&spec).map_err(|e| e.to_string())?.alpha;
        if alpha != want {
            return Err(format!("h={h}: alpha = {alpha}, expected {want}"));
        }
        seen.push(format!("h={h}: alpha = {alpha}"));
    }
    Ok(seen.join(", "))
}

fn dickson_identity(n: u32) -> Result<(), String> {
    let pair = dickson_gh(n).map_err(|e| e.to_string())?;
    let t = Poly::var(pair.g.ring(), 0);
    let four = Poly::from_i64(pair.g.ring(), 4);
    if &pair.g.pow(2) - &four != &(&t.pow(2) - &four) * &pair.h {
        return Err(format!("n={n}: g^2 - 4 != (t^2 - 4) h"));
    }
    // zⁿ·g(z + 1/z) = z²ⁿ + 1
    let rz = qring(&["z"]);
    let z = Poly::var(&rz, 0);
    let mut lhs = Poly::zero(&rz);
    for (m, c) in pair.g.terms() {
        let k = m.exps()[0];
        lhs = &lhs + &(&(&z.pow(2) + &Poly::one(&rz)).pow(k) * &z.pow(n - k)).scale(c);
    }
    if lhs != &z.pow(2 * n) + &Poly::one(&rz) {
        return Err(format!("n={n}: g(z + 1/z) != z^n + z^-n"));
    }
    Ok(())
}

fn etale_families() -> Check {
    let mut families: Vec<Family> = (2..=4).map(|n| Family::QuadricXyz { n }).collect();
    for d in 2..=3 {
        for r in 2..=4 {
            for n in 2..=3 {
                families.push(Family::XrzYd { d, r, n });
            }
        }
    }
    families.extend((2..=3).map(|n| Family::TwistedX2u { n }));
    let limits = GroebnerLimits::default();
    let mut bad = Vec::new();
    for &f in &families {
        let phi = family_endo(f).map_err(|e| e.to_string())?;
        let c = hom_check(&phi, &limits).map_err(|e| e.to_string())?;
        if (c.well_defined, c.unramified) != (Verdict::Yes, Verdict::Yes) {
            bad.push(format!("{f:?}: well_defined {:?}, unramified {:?}", c.well_defined, c.unramified));
        }
    }
    for n in 1..=8 {
        if let Err(e) = dickson_identity(n) {
            bad.push(e);
        }
    }
    if bad.is_empty() {
        Ok(format!("{} families well defined and unramified; Dickson n <= 8", families.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn inversion_oracle() -> Check {
    support::shear_chains_invert_exactly(50)?;
    Ok("50 shear chains inverted two-sided, chain rule 1".into())
}

fn property_suites() -> Check {
    const CASES: u32 = 256;
    for (name, run) in support::PROPERTY_SUITES {
        run(CASES).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} suites x {CASES} cases", support::PROPERTY_SUITES.len()))
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: "1", what: "pq charts for d=2, r=3 and r=4", limit: Duration::from_secs(1), run: pq_charts },
    Criterion { id: "2", what: "pseudo-plane pi1 abelianization", limit: Duration::from_secs(1), run: pseudo_plane_orders },
    Criterion { id: "3", what: "platonic equality enumeration", limit: Duration::from_secs(10), run: platonic_equality },
    Criterion { id: "4", what: "platonic inequality, s=3", limit: Duration::from_secs(10), run: platonic_inequality },
    Criterion { id: "5", what: "Euler characteristic zero", limit: Duration::from_secs(1), run: euler_characteristic_zero },
    Criterion { id: "6", what: "box search", limit: Duration::from_secs(30), run: box_search },
    Criterion { id: "7", what: "section coefficients", limit: Duration::from_secs(1), run: section_coefficients },
    Criterion { id: "8", what: "etale families and Dickson pairs", limit: Duration::from_secs(60), run: etale_families },
    Criterion { id: "9", what: "shear-chain inversion oracle", limit: Duration::from_secs(60), run: inversion_oracle },
    Criterion { id: "10", what: "property suites", limit: Duration::from_secs(60), run: property_suites },
];

fn main() {
    let mut failed = 0;
    for c in CRITERIA {
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let (verdict, detail) = match result {
            Ok(_) if took > c.limit => ("FAIL", format!("too slow: {took:.2?} > {:?}", c.limit)),
            Ok(msg) => ("PASS", msg),
            Err(msg) => ("FAIL", msg),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("{verdict} criterion {:>2}: {} [{took:.2?} / {:?}] {detail}", c.id, c.what, c.limit);
    }
    println!("INFO criterion 11: headline theorems are not computable; covered by criteria 1-10");
    println!("acceptance: {} PASS, {failed} FAIL", CRITERIA.len() - failed);
    if failed > 0 && std::env::var_os("POLYJC_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
