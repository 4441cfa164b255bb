use std::path::PathBuf;
use std::process::{Command, Output};

use polyjc::formats::{DerivationFile, FiberFile, HomFile, MapFile, QuotientEntry, TreeFile, VertexEntry};
use polyjc_core::casebook::CoverRing;
use polyjc_core::fibration::multiplicity_two_fiber;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn polyjc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyjc")).args(args).env_remove("POLYJC_CONFIG").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polyjc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn keller_check_example() {
    let out = polyjc(&["keller", "check", "--vars", "x,y", "--comps", "x+y^2,y"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["keller"], true);
    assert_eq!(v["determinant"], "1");
}

#[test]
fn exit_codes() {
    let fail = polyjc(&["keller", "check", "--vars", "x,y", "--comps", "x+y^2,y+x"]);
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(json(&fail)["status"], "fail");

    let error = polyjc(&["keller", "check", "--vars", "x,y", "--comps", "x+,y"]);
    assert_eq!(error.status.code(), Some(2));
    assert_eq!(json(&error)["status"], "error");
    assert!(!error.stderr.is_empty());

    let cap = polyjc(&["--cap", "2", "keller", "invert", "--vars", "x,y", "--comps", "x+y^3,y"]);
    assert_eq!(cap.status.code(), Some(3));
    assert_eq!(json(&cap)["status"], "cap");

    let ok = polyjc(&["keller", "invert", "--vars", "x,y", "--comps", "x+y^3,y"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["inverse"], serde_json::json!(["-y^3 + x", "y"]));
}

#[test]
fn single_vertex_pi1() {
    let tree = scratch("single.json", r#"{"vertices": [{"id": "v", "w": -5}], "edges": []}"#);
    let out = polyjc(&["graph", "pi1", "--tree", tree.to_str().unwrap(), "--abelian"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["torsion"], serde_json::json!(["5"]));
    assert_eq!(v["abelian"]["free_rank"], 0);

    let chain = polyjc(&["graph", "pi1", "--chain=-5", "--abelian"]);
    assert_eq!(json(&chain)["torsion"], v["torsion"]);
}

#[test]
fn pq_d2_r3() {
    let out = polyjc(&["case", "pq", "--d", "2", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let (cr, _) = CoverRing::with_coefficients(2, &["a1", "a2"]).unwrap();
    let charts = v["charts"].as_array().unwrap();
    assert_eq!(charts.len(), 2);
    for (ch, w) in charts.iter().zip(["1", "(-1)"]) {
        let expected = cr.parse(&format!("{w} - 1/2*a1*x + 1/8*{w}*(a1^2-4*a2)*x^2")).unwrap();
        let got = cr.parse(ch["p"].as_str().unwrap()).unwrap();
        assert_eq!(got, expected);
    }
    assert_eq!(v["transitions"], true);
}

#[test]
fn runs_are_deterministic() {
    let cases: [&[&str]; 4] = [
        &["case", "pq", "--d", "3", "--r", "4"],
        &["graph", "pi1", "--pseudo-plane", "3,2", "--abelian", "--index", "3"],
        &["case", "hom", "--family", "quadric_xyz", "--n", "2"],
        &["lnd", "nilpotent", "--vars", "x,y,z", "--images", "0,x,y"],
    ];
    for args in cases {
        let a = polyjc(args);
        let b = polyjc(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn text_emit() {
    let out = polyjc(&["--emit", "text", "graph", "genus", "--m1", "3", "--m2", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "status: ok"));
    assert!(text.lines().any(|l| l == "command: graph genus"));
}

#[test]
fn config_file_caps() {
    let cfg = scratch("small.toml", "invert.cap = 2\n");
    let run = |cfg: &PathBuf, extra: &[&str]| {
        let mut args = extra.to_vec();
        args.extend(["keller", "invert", "--vars", "x,y", "--comps", "x+y^3,y"]);
        Command::new(env!("CARGO_BIN_EXE_polyjc")).args(&args).env("POLYJC_CONFIG", cfg).output().unwrap()
    };
    assert_eq!(run(&cfg, &[]).status.code(), Some(3));
    // the flag beats the file
    assert_eq!(run(&cfg, &["--cap", "8"]).status.code(), Some(0));
    let bad = scratch("bad.toml", "invert.limit = 2\n");
    let out = run(&bad, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["error"].as_str().unwrap().contains("config"));
}

#[test]
fn case_file_and_hom_file() {
    let spec = scratch("case.json", r#"{"family": "xrz_yd", "params": {"d": 2, "r": 3, "n": 2}}"#);
    let out = polyjc(&["case", "hom", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["unramified"], "yes");
    let hom = scratch("hom.json", &v["hom"].to_string());
    let again = json(&polyjc(&["case", "hom", "--file", hom.to_str().unwrap()]));
    assert_eq!(again["hom"], v["hom"]);
    assert_eq!(again["status"], "ok");

    let typo = scratch("typo.json", r#"{"family": "xrz_yd", "params": {"d": 2, "r": 3, "k": 2}}"#);
    assert_eq!(polyjc(&["case", "hom", "--spec", typo.to_str().unwrap()]).status.code(), Some(2));
}

fn random_tree(rng: &mut ChaCha8Rng) -> TreeFile {
    let n = rng.gen_range(1..7);
    let vertices: Vec<VertexEntry> =
        (0..n).map(|i| VertexEntry { id: format!("v{i}"), w: rng.gen_range(-6..3) }).collect();
    let edges = (1..n).map(|i| (format!("v{}", rng.gen_range(0..i)), format!("v{i}"))).collect();
    TreeFile { vertices, edges, ordering: None }
}

#[test]
fn tree_files_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let file = random_tree(&mut rng);
        let once = TreeFile::from_tree(&file.to_tree().unwrap());
        let text = serde_json::to_string(&once).unwrap();
        let reread: TreeFile = serde_json::from_str(&text).unwrap();
        assert_eq!(TreeFile::from_tree(&reread.to_tree().unwrap()), once);
    }
}

#[test]
fn polynomial_files_roundtrip() {
    let map = MapFile { vars: vec!["x".into(), "y".into()], components: vec!["x + (y+1)^3 - 1/2".into(), "y".into()] };
    let once = MapFile::from_map(&map.to_map().unwrap());
    assert_eq!(MapFile::from_map(&once.to_map().unwrap()), once);
    assert_eq!(once.to_map().unwrap(), map.to_map().unwrap());

    let der = DerivationFile { vars: vec!["x".into(), "y".into()], images: vec!["0".into(), "x^2 - 3/4".into()] };
    let once = DerivationFile::from_derivation(&der.to_derivation().unwrap());
    assert_eq!(DerivationFile::from_derivation(&once.to_derivation().unwrap()), once);

    let q = QuotientEntry { vars: vec!["x".into(), "y".into()], relations: vec!["x*y - 1".into()] };
    let hom = HomFile { source: q, target: None, images: vec!["x^2".into(), "y^2".into()] };
    let once = HomFile::from_hom(&hom.to_hom().unwrap());
    assert_eq!(HomFile::from_hom(&once.to_hom().unwrap()), once);
}

#[test]
fn fiber_files_roundtrip() {
    for h in 1..5 {
        let file = FiberFile::from_spec(&multiplicity_two_fiber(h).unwrap());
        let text = serde_json::to_string(&file).unwrap();
        let reread: FiberFile = serde_json::from_str(&text).unwrap();
        assert_eq!(FiberFile::from_spec(&reread.to_spec().unwrap()), file);

        let path = scratch(&format!("fiber{h}.json"), &text);
        let from_file = json(&polyjc(&["graph", "section", "--fiber", path.to_str().unwrap()]));
        let built_in = json(&polyjc(&["graph", "section", "--m2", &h.to_string()]));
        assert_eq!(from_file["alpha"], built_in["alpha"]);
    }
}

#[test]
fn pseudo_plane_group() {
    let v = json(&polyjc(&["graph", "pi1", "--pseudo-plane", "3,1", "--abelian"]));
    assert_eq!(v["torsion"], serde_json::json!(["9"]));
    assert_eq!(polyjc(&["graph", "pi1", "--pseudo-plane", "3"]).status.code(), Some(2));
}
