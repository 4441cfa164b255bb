//! Published tables recomputed from scratch. Each row carries the expected
//! value, the computed value and whether they agree.

use polyjc_core::casebook::{pq_solve, CoverRing};
use polyjc_core::fibration::{euler_zero, platonic_ineq, pseudo_plane_pi1};
use clap::ValueEnum;
use serde_json::json;

use crate::cli::Table;
use crate::verdict::{Status, Verdict};

fn row(label: impl Into<String>, expected: impl ToString, got: impl ToString) -> (bool, serde_json::Value) {
    let (expected, got) = (expected.to_string(), got.to_string());
    let ok = expected == got;
    (ok, json!({ "row": label.into(), "expected": expected, "got": got, "match": ok }))
}

fn example1421() -> Result<Vec<(bool, serde_json::Value)>, String> {
    let (cr, a) = CoverRing::with_coefficients(2, &["a1", "a2"]).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    let sol = pq_solve(&cr, 3, &a).map_err(|e| e.to_string())?;
    for ch in &sol.charts {
        let w = if ch.j == 0 { "1" } else { "(-1)" };
        let p = cr.parse(&format!("{w} - 1/2*a1*x + 1/8*{w}*(a1^2-4*a2)*x^2")).map_err(|e| e.to_string())?;
        rows.push(row(format!("r=3 p_{}", ch.omega), p, &ch.p));
    }
    let sol = pq_solve(&cr, 4, &a).map_err(|e| e.to_string())?;
    let x = cr.parse("x").map_err(|e| e.to_string())?;
    for ch in &sol.charts {
        rows.push(row(format!("r=4 c3({})", ch.omega), 0, &ch.c[2]));
        let q = -&(&(&ch.c[1] * &ch.c[1]) * &x);
        rows.push(row(format!("r=4 q_{}", ch.omega), q, &ch.q));
    }
    Ok(rows)
}

fn platonic() -> Vec<(bool, serde_json::Value)> {
    let mut expected: Vec<(Vec<u64>, u64)> = (2..=30).map(|n| (vec![2, 2, n], 2 * n)).collect();
    expected.extend([(vec![2, 3, 3], 12), (vec![2, 3, 4], 24), (vec![2, 3, 5], 60)]);
    expected.sort();
    let mut got: Vec<(Vec<u64>, u64)> =
        platonic_ineq(3, 30, 60).into_iter().map(|s| (s.multiplicities, s.n)).collect();
    got.sort();
    let fmt = |v: &[(Vec<u64>, u64)]| format!("{v:?}");
    vec![row("s=3, m<=30, N<=60", fmt(&expected), fmt(&got))]
}

fn euler() -> Vec<(bool, serde_json::Value)> {
    let expected: Vec<Vec<u64>> = vec![vec![2, 2, 2, 2], vec![2, 3, 6], vec![2, 4, 4], vec![3, 3, 3]];
    let mut got = euler_zero(12, 6);
    got.sort();
    vec![row("m<=12, r<=6", format!("{expected:?}"), format!("{got:?}"))]
}

fn pi1_orders() -> Result<Vec<(bool, serde_json::Value)>, String> {
    (2..=8u32)
        .map(|d| {
            let g = pseudo_plane_pi1(d, 1).map_err(|e| e.to_string())?;
            let got = match (g.abelian.order(), g.abelian.is_cyclic()) {
                (Some(o), true) => format!("Z/{o}"),
                _ => g.abelian.to_string(),
            };
            Ok(row(format!("d={d}, r=1"), format!("Z/{}", d * d), got))
        })
        .collect()
}

pub fn run(table: Table) -> Verdict {
    let name = "reproduce";
    let rows = match table {
        Table::Example1421 => example1421(),
        Table::Platonic => Ok(platonic()),
        Table::EulerZero => Ok(euler()),
        Table::Pi1Orders => pi1_orders(),
    };
    match rows {
        Ok(rows) => {
            let all = rows.iter().all(|(ok, _)| *ok);
            Verdict::new(name, Status::from_bool(all))
                .with("table", table.to_possible_value().map(|v| v.get_name().to_string()))
                .with("rows", rows.into_iter().map(|(_, r)| r).collect::<Vec<_>>())
        }
        Err(e) => Verdict::error(name, &e),
    }
}
