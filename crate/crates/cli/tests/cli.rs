use std::process::{Command, Output};

use serde_json::Value;

fn ellsheaf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellsheaf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

const F3: &str = r#"{"kind":"band","curve":{"cycle":1},"d":[0],"m":3,"lambda":1}"#;
const O: &str = r#"{"kind":"band","curve":{"cycle":1},"d":[0],"lambda":1}"#;
const L1: &str = r#"{"kind":"band","curve":{"cycle":1},"d":[1],"lambda":1}"#;
const L2: &str = r#"{"kind":"band","curve":{"cycle":1},"d":[2],"lambda":1}"#;

#[test]
fn stable_seq_golden() {
    let o = ellsheaf(&["stable-seq", "19", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("1010110101011010110"));
    assert!(out.contains("(11, 8, 19) -> (5, 3, 8)"));
    let v = json(&ellsheaf(&["--json", "stable-seq", "19", "11"]));
    assert_eq!(v["sequence"].as_array().unwrap().len(), 19);
    assert_eq!(v["chain"].as_array().unwrap().len(), 2);
}

#[test]
fn stable_seq_certifies_and_rejects() {
    let o = ellsheaf(&["--field", "f7", "stable-seq", "5", "3", "--certify", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("simple: true"));
    let o = ellsheaf(&["--json", "stable-seq", "4", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let e = json(&o);
    assert_eq!(e["code"], "not-coprime");
    assert_eq!(e["context"]["rank"], 4);
    assert!(e["message"].is_string());
}

#[test]
fn cohomology_both_on_unipotent() {
    let o = ellsheaf(&["cohomology", "--both", F3]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("formula (1, 1)") && out.contains("oracle (1, 1)") && out.contains("match=true"));
    let v = json(&ellsheaf(&["--json", "cohomology", "--both", F3]));
    assert_eq!(v["match"], true);
    assert_eq!(v["oracle"]["h0"], 1);
}

#[test]
fn cohomology_formula_refuses_strings() {
    let s = r#"{"kind":"string","curve":{"cycle":1},"d":[0],"f":1}"#;
    let o = ellsheaf(&["--json", "cohomology", "--formula", s]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["code"], "unsupported");
    let v = json(&ellsheaf(&["--json", "cohomology", s]));
    assert_eq!(v["oracle"]["h0"], 1);
}

#[test]
fn verify_cohomology_over_f5() {
    let o = ellsheaf(&["verify", "--suite", "cohomology", "--field", "f5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 mismatches"));
}

#[test]
fn verify_is_deterministic_for_a_seed() {
    let a = stdout(&ellsheaf(&["--json", "--seed", "7", "verify", "--suite", "duality"]));
    let b = stdout(&ellsheaf(&["--json", "--seed", "7", "verify", "--suite", "duality"]));
    assert_eq!(a, b);
}

#[test]
fn describe_round_trips() {
    let band = r#"{"kind":"band","curve":{"cycle":2},"d":[1,3,1,-2,0,1],"m":2,"p":[-3,1]}"#;
    let v = json(&ellsheaf(&["--json", "describe", band]));
    assert_eq!(v["charge"]["rank"], 6);
    let again = json(&ellsheaf(&["--json", "describe", &v["descriptor"].to_string()]));
    assert_eq!(again["descriptor"], v["descriptor"]);
    assert_eq!(again["display"], v["display"]);
}

#[test]
fn birkhoff_reports_exponents() {
    let m = r#"[[{"2":1},{"0":0}],[{"0":0},{"-1":1}]]"#;
    let v = json(&ellsheaf(&["--json", "birkhoff", m]));
    assert_eq!(v["exponents"], serde_json::json!([-1, 2]));
    assert_eq!(v["verified"], true);
    let o = ellsheaf(&["--json", "birkhoff", r#"[[{"0":1,"1":1}]]"#]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["code"], "not-invertible");
}

#[test]
fn tensor_check_against_block_tensor() {
    let l = r#"{"kind":"band","curve":{"cycle":1},"d":[1,0],"lambda":2}"#;
    let o = ellsheaf(&["tensor", "--check", l, r#"{"kind":"band","curve":{"cycle":1},"d":[0],"m":2,"lambda":1}"#]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("block tensor: isomorphic"));
}

#[test]
fn dual_of_string() {
    let s = r#"{"kind":"string","curve":{"cycle":2},"d":[-1,0,1,-1,1],"f":2}"#;
    let v = json(&ellsheaf(&["--json", "dual", s]));
    let back = json(&ellsheaf(&["--json", "dual", &v["descriptor"].to_string()]));
    assert_eq!(back["descriptor"], serde_json::from_str::<Value>(s).unwrap());
}

#[test]
fn pushforward_and_pullback() {
    let o = ellsheaf(&["pushforward", "1", "1,0", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("B((0,1), 1, t - 3)"));
    let o = ellsheaf(&["--field", "f7", "pushforward", "2", "1,0,1,0", "1"]);
    assert!(stdout(&o).starts_with("B((1,0), 1, t + 1) on E2 + B((1,0), 1, t + 6) on E2"));
    let v = json(&ellsheaf(&["--json", "pullback", r#"{"kind":"band","curve":{"cycle":1},"d":[1,0],"lambda":4}"#, "2"]));
    assert_eq!(v["charge"]["rank"], 2);
    assert_eq!(v["summands"].as_array().unwrap().len(), 2);
}

#[test]
fn cuspidal_constructions_are_simple() {
    let v = json(&ellsheaf(&["--json", "--field", "f7", "cusp-matrix", "5", "3", "2"]));
    assert_eq!(v["end_dim"], 1);
    assert_eq!(v["chain"], serde_json::json!([[2, 3], [2, 1], [1, 1]]));
    let v = json(&ellsheaf(&["--json", "cusp-tf", "3", "2"]));
    assert_eq!(v["end_dim"], 1);
}

#[test]
fn hom_and_direct_sums() {
    let v = json(&ellsheaf(&["--json", "hom", O, L1]));
    assert_eq!(v["hom_dim"], 1);
    let sum = format!("[{O},{L1}]");
    let v = json(&ellsheaf(&["--json", "hom", &sum, &sum]));
    assert_eq!(v["hom_dim"], 3);
}

#[test]
fn isomorphic_exit_codes() {
    assert_eq!(ellsheaf(&["isomorphic", O, O]).status.code(), Some(0));
    let o = ellsheaf(&["isomorphic", O, L1]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "not-isomorphic");
    // Nine summands over F2: the Hom space is too large to enumerate and this seed's samples
    // are all singular.
    let big = format!("[{O},{O},{O},{L1},{L1},{L1},{L2},{L2},{L2}]");
    let o = ellsheaf(&["--field", "f2", "--seed", "2", "isomorphic", &big, &big]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).trim(), "inconclusive");
}

#[test]
fn fm_lookup() {
    let o = ellsheaf(&["fm", r#"{"kind":"N","n":1,"m":0}"#]);
    assert_eq!(stdout(&o).trim(), "N(0,(1,0),0) (length 2) -> S((-1,0))");
}

#[test]
fn usage_errors_exit_one() {
    let o = ellsheaf(&["--json", "no-such-command"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["code"], "usage");
    let o = ellsheaf(&["--json", "--field", "f4", "describe", O]);
    assert_eq!(o.status.code(), Some(1));
    let o = ellsheaf(&["--json", "describe", "{not json"]);
    assert_eq!(json(&o)["code"], "invalid-argument");
}

#[test]
fn triple_from_file() {
    let dir = std::env::temp_dir().join(format!("ellsheaf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f3.json");
    std::fs::write(&path, F3).unwrap();
    let arg = format!("@{}", path.display());
    let v = json(&ellsheaf(&["--json", "triple", &arg]));
    let again = json(&ellsheaf(&["--json", "cohomology", &v.to_string()]));
    assert_eq!(again["oracle"]["h1"], 1);
    std::fs::remove_dir_all(&dir).unwrap();
}
