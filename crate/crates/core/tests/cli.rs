use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn input(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("inputs").join(name).display().to_string()
}

fn wittlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittlab")).args(args).output().expect("binary runs")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn exit_codes() {
    assert_eq!(wittlab(&["--help"]).status.code(), Some(0));
    assert_eq!(wittlab(&["--version"]).status.code(), Some(0));
    assert_eq!(wittlab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(wittlab(&["validate", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(wittlab(&["suite", "--profile", "cluster"]).status.code(), Some(1));
    assert_eq!(wittlab(&["validate", &input("h2_skew_even.json")]).status.code(), Some(0));
    let bad = wittlab(&["validate", &input("bad_mu.json")]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(json_of(&bad)["valid"], json!(false));
    // Arf needs lambda = 2Z.
    assert_eq!(wittlab(&["arf", &input("h1_symmetric.json")]).status.code(), Some(2));
}

#[test]
fn malformed_json_is_a_parse_error() {
    let dir = std::env::temp_dir().join(format!("wittlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("broken.json");
    std::fs::write(&p, "{\"epsilon\": ").unwrap();
    assert_eq!(wittlab(&["validate", p.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn arf_and_witt() {
    assert_eq!(json_of(&wittlab(&["arf", &input("arf_one.json")]))["arf"], json!(1));
    assert_eq!(json_of(&wittlab(&["arf", &input("h2_skew_even.json")]))["arf"], json!(0));
    let w = json_of(&wittlab(&["witt", &input("h2_skew_even.json")]));
    assert_eq!(w["g_lower_bound"], json!(2));
    assert_eq!(w["stable_lower_bound"], json!(2));
}

#[test]
fn reduce_reports() {
    let r = json_of(&wittlab(&["reduce", &input("vector.json")]));
    assert_eq!((r["found"].clone(), r["verified"].clone()), (json!(true), json!(true)));
    let r = json_of(&wittlab(&["reduce", &input("vector_nonprimitive.json"), "--target", &input("target.json")]));
    assert_eq!(r, json!({"found": false, "obstruction": "gcd", "gcd_source": "2", "gcd_target": "1"}));
}

#[test]
fn homology_of_the_projective_plane() {
    let h = json_of(&wittlab(&["homology", &input("rp2.json"), "--max-degree", "2"]));
    assert_eq!(h["homology"][1], json!({"degree": 1, "betti": 0, "torsion": ["2"]}));
    assert_eq!(h["homology"][2]["betti"], json!(0));
    let csv = String::from_utf8(wittlab(&["homology", &input("rp2.json"), "--max-degree", "2", "--format", "csv"]).stdout).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().contains("homology.1.torsion.0"));
    assert_eq!(lines.count(), 1);
}

#[test]
fn cohen_macaulay_checks() {
    // The octahedron is a 2-sphere: wCM of dimension 2 and lCM at level 2.
    assert_eq!(json_of(&wittlab(&["wcm", &input("octahedron.json"), "--n", "2"]))["holds"], json!(true));
    assert_eq!(json_of(&wittlab(&["lcm", &input("octahedron.json"), "--n", "2"]))["holds"], json!(true));
    assert_eq!(json_of(&wittlab(&["wcm", &input("rp2.json"), "--n", "2"]))["holds"], json!(false));
    let p = wittlab(&["prop25", &input("octahedron.json"), "--subset", "0,1", "--n", "1"]);
    assert_eq!(p.status.code(), Some(0));
    assert_eq!(wittlab(&["prop25", &input("octahedron.json"), "--subset", "9", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn complement_and_ka() {
    let c = json_of(&wittlab(&["complement", &input("complement.json")]));
    assert_eq!(c["verified"], json!(true));
    assert_eq!(c["complement"]["gram"], json!([["0", "1"], ["-1", "0"]]));
    let k = json_of(&wittlab(&["ka", &input("h2_skew_even.json")]));
    assert_eq!(k["vertices"], json!(264));
    assert_eq!(k["components"]["count"], json!(25));
    assert_eq!(k["g_claim"], json!(2));
}

#[test]
fn transitivity_and_cancel() {
    let h2 = json!({"epsilon": -1, "lambda": "even", "gram": [[0,1,0,0],[-1,0,0,0],[0,0,0,1],[0,0,-1,0]], "mu": [0,0,0,0]});
    let h1 = json!({"epsilon": -1, "lambda": "even", "gram": [[0,1],[-1,0]], "mu": [0,0]});
    let dir = std::env::temp_dir().join(format!("wittlab-cli-t-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let t = dir.join("t.json");
    std::fs::write(&t, json!({"module": h2, "h0": [[1,0],[0,1],[0,0],[0,0]], "h1": [[0,0],[0,0],[1,0],[0,1]]}).to_string()).unwrap();
    let r = json_of(&wittlab(&["transitivity", t.to_str().unwrap()]));
    assert_eq!((r["found"].clone(), r["verified"].clone()), (json!(true), json!(true)));
    let c = dir.join("c.json");
    std::fs::write(&c, json!({"m": h1, "n": h1, "phi": [[0,0,1,0],[0,0,0,1],[1,0,0,0],[0,1,0,0]]}).to_string()).unwrap();
    let r = json_of(&wittlab(&["cancel", c.to_str().unwrap()]));
    assert_eq!((r["found"].clone(), r["verified"].clone()), (json!(true), json!(true)));
}

#[test]
fn suite_subset_is_deterministic_and_honours_threads() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_wittlab")).args(["suite", "--only", "5,6,9"]).env("WITTLAB_THREADS", threads).output().unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("PASS"));
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn corrupted_goldens_fail_the_suite() {
    let dir = std::env::temp_dir().join(format!("wittlab-cli-g-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let g = dir.join("goldens.json");
    let text = wittlab::suite::GOLDEN_HOMOLOGY.replacen("\"betti\": 1", "\"betti\": 7", 1);
    assert_ne!(text, wittlab::suite::GOLDEN_HOMOLOGY);
    std::fs::write(&g, text).unwrap();
    let o = wittlab(&["suite", "--only", "5", "--goldens", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json_of(&o)["passed"], json!(false));
}
