//! End-to-end runs of the `liftable` binary.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_liftable"));
    c.env_remove("LIFTABLE_WORKDIR");
    c
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (out.status.code().expect("exit status"), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn schema() -> jsonschema::Validator {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

/// Runs with `--json`, validates the report against the shipped schema and returns it with the exit code.
fn report(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.push("--json");
    let (code, out, err) = run(&full);
    let v: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: not JSON ({e}): {out}{err}"));
    let errors: Vec<String> = schema().iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{args:?} violates the schema: {errors:#?}");
    assert_eq!(v["error"]["exit_code"].as_i64().unwrap_or(0), code as i64);
    (code, v)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("liftable-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const CUSP: &str = "germ cusp { n = 1; p = 2; target (X, Y); branch c(t) = (t^2, t^3); }\n";

#[test]
fn construct_two_cusps() {
    let (code, r) = report(&["construct", "--catalog", "cusp-pair"]);
    assert_eq!(code, 0);
    let lift = &r["lift"];
    assert_eq!(lift["route"], "kernel");
    assert_eq!(lift["generators"].as_array().unwrap().len(), 2);
    assert_eq!(lift["count"], 2);
    assert_eq!(lift["reverified"], serde_json::json!([true, true]));
    assert_eq!(lift["comparison"]["reference_not_in_candidate"], Value::Null);
    assert_eq!(lift["comparison"]["candidate_not_in_reference"], Value::Null);
}

#[test]
fn analyze_umbrella() {
    let (code, r) = report(&["analyze", "--catalog", "whitney-psi2"]);
    assert_eq!(code, 0);
    assert_eq!(r["stability"], serde_json::json!({ "stable": true, "isolated": true }));
    assert_eq!(r["min_generators"]["count"], 4);
    assert_eq!(r["min_generators"]["mode"], "both-agree");
    assert_eq!((r["ks"]["i1"].as_str(), r["ks"]["i2"].as_str()), (Some("0"), Some("0")));
    assert!(r["expectations"].as_array().unwrap().iter().all(|x| x["ok"] == true));
}

#[test]
fn reduce_suspension() {
    let (code, r) = report(&["reduce", "--catalog", "suspended-69"]);
    assert_eq!(code, 0);
    assert_eq!(r["reduction"]["removed_variables"], 2);
    assert_eq!(r["reduction"]["core"]["branches"], serde_json::json!(["a(x, y) = (x, y^3 + x*y)", "b(x, y) = (x, y^2)"]));
    assert_eq!(r["lift"]["count"], 2);
    assert_eq!(r["lift"]["comparison"]["candidate_not_in_reference"], Value::Null);
    assert_eq!(r["lift"]["comparison"]["reference_not_in_candidate"], Value::Null);
}

#[test]
fn transport_along_the_shear() {
    let (code, r) = report(&["transport", "--catalog", "whitney-psi2"]);
    assert_eq!(code, 0);
    let moved = &r["transport"]["lift"];
    assert_eq!(moved["provenance"], "transport");
    assert_eq!(moved["count"], 4);
    assert_eq!(moved["comparison"]["reference_not_in_candidate"], Value::Null);
    assert_eq!(r["transport"]["target"]["branches"][0], "f(v, y) = (-y^2 + v, y^2, v*y)");
}

#[test]
fn unfolding_restriction() {
    let (code, r) = report(&["unfold", "--catalog", "s66"]);
    assert_eq!(code, 0);
    assert_eq!(r["lift"]["route"], "declared-unfolding");
    assert_eq!(r["lift"]["count"], 3);
    assert_eq!(r["unfolding"]["p"], 3);
}

#[test]
fn kernel_basis_at_the_first_non_injective_level() {
    let (code, r) = report(&["kernel", "--catalog", "cusp-pair", "--level", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["kernel"]["dim"], 2);
    assert_eq!(r["kernel"]["formula"], 2);
    assert_eq!(r["kernel"]["mode"], "both-agree");
    let (_, r) = report(&["kernel", "--catalog", "cusp-pair", "--level", "2", "--mode", "bruteforce"]);
    assert_eq!(r["kernel"]["formula"], Value::Null);
    assert_eq!(r["kernel"]["mode"], "bruteforce");
}

#[test]
fn injected_mismatch_is_a_consistency_failure() {
    for args in [["analyze", "--catalog", "E0"].as_slice(), &["kernel", "--catalog", "cusp-pair", "--level", "2"]] {
        let mut a = args.to_vec();
        a.push("--inject-mismatch");
        let (code, r) = report(&a);
        assert_eq!(code, 4, "{args:?}");
        assert_eq!(r["error"]["kind"], "consistency");
        let (code, _, _) = run(&a);
        assert_eq!(code, 4);
    }
}

#[test]
fn hypothesis_violation_exits_1() {
    let (code, r) = report(&["construct", "--catalog", "e", "--route", "kernel"]);
    assert_eq!(code, 1);
    assert!(r["error"]["message"].as_str().unwrap().contains("i1 = i2"));
    let (code, _) = report(&["reduce", "--catalog", "cusp-pair"]);
    assert_eq!(code, 1);
}

#[test]
fn resource_cap_exits_2() {
    let (code, r) = report(&["construct", "--catalog", "rrw-4to5", "--route", "kernel"]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], "resource-cap");
}

#[test]
fn input_errors_exit_3() {
    let bad = scratch("constant.germ", "germ c {\n  n = 1; p = 2;\n  branch b(x) = (x^2 + 1, x);\n}\n");
    let (code, r) = report(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(r["error"]["message"].as_str().unwrap().contains("branch b: component 1 has a nonzero constant term"));
    let syntax = scratch("syntax.germ", "germ c {\n  n = 1\n}\n");
    let (code, _, err) = run(&["analyze", syntax.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("parse error at 3:1"), "{err}");
    let (code, _) = report(&["analyze", "--catalog", "no-such-entry"]);
    assert_eq!(code, 3);
    let (code, _) = report(&["transport", "--catalog", "cusp-pair"]);
    assert_eq!(code, 3);
}

#[test]
fn check_claimed_fields() {
    let germ = scratch("cusp.germ", CUSP);
    let good = scratch("good.fields", "(2*X, 3*Y);\n(2*Y, 3*X^2)\n");
    let (code, r) = report(&["check", germ.to_str().unwrap(), "--fields", good.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["check"]["ok"], true);
    assert_eq!(r["check"]["nakayama_count"], 2);
    let bad = scratch("bad.fields", "(2*X, 3*Y)\n(Y, X)\n");
    let (code, r) = report(&["check", germ.to_str().unwrap(), "--fields", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(r["check"]["fields"][1]["liftable"], false);
    assert!(r["check"]["fields"][1]["obstruction"].as_str().unwrap().starts_with("obstructed at degree 2"));
}

#[test]
fn workdir_resolves_relative_paths() {
    let germ = scratch("cusp.germ", CUSP);
    scratch("euler.fields", "(2*X, 3*Y)");
    let dir = germ.parent().unwrap();
    let out = bin()
        .env("LIFTABLE_WORKDIR", dir)
        .args(["check", "cusp.germ", "--fields", "euler.fields", "--json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["workdir"], dir.to_str().unwrap());
}

#[test]
fn catalog_listing_and_source() {
    let (code, r) = report(&["catalog"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = r["catalog"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"cusp-pair") && names.contains(&"suspended-69"));
    let (code, r) = report(&["catalog", "--show", "fold"]);
    assert_eq!(code, 0);
    assert!(r["document"].as_str().unwrap().starts_with("germ fold {"));
}

#[test]
fn catalog_run_all() {
    let (code, r) = report(&["catalog", "--run-all"]);
    assert_eq!(code, 0);
    for e in r["catalog"].as_array().unwrap() {
        let name = e["name"].as_str().unwrap();
        let expected = if name == "rrw-4to5" { "count-only" } else { "ok" };
        assert_eq!(e["status"], expected, "{name}: {e}");
        if let Some(m) = e["min_gens"].as_u64() {
            if e["count"].is_u64() {
                assert_eq!(e["count"].as_u64(), Some(m), "{name}");
            }
        }
    }
}

#[test]
fn text_output_matches_the_report() {
    let (code, out, _) = run(&["construct", "--catalog", "cusp-pair"]);
    assert_eq!(code, 0);
    assert!(out.contains("nakayama count = 2 (expected 2)"));
    assert!(out.contains("module equality with the references at order 12: equal"));
}
