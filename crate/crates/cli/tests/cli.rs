//! End-to-end tests of the batch CLI: exit codes, report structure, and
//! bit-exact round-trips of the emitted JSON.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotcp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

#[test]
fn state_reports_identity_pairing() {
    let out = run(&["state", "--map", fixture("identity.json").to_str().unwrap(), "--box", "1"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["meta"]["command"], "state");
    let values = doc["values"].as_array().unwrap();
    assert_eq!(values.len(), 81);
    // ψ(U_l ⊗ U_r^{-1}) = 1 for the identity map
    let hit = values
        .iter()
        .find(|v| v["index"] == serde_json::json!([1, 0, -1, 0]))
        .unwrap();
    assert!((hit["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(hit["im"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn extendible_certifies_on_box() {
    let out = run(&[
        "extendible",
        "--map",
        fixture("kraus_u.json").to_str().unwrap(),
        "--kbox",
        "1",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "EXTENDIBLE-ON-BOX");
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 9);
    for e in entries {
        // R = U: every density is a single unit-modulus monomial
        let d = e["density"].as_array().unwrap();
        assert_eq!(d.len(), 1);
        let re = d[0]["re"].as_f64().unwrap();
        let im = d[0]["im"].as_f64().unwrap();
        assert!((re.hypot(im) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rn_routes_agree_for_single_kraus() {
    let out = run(&[
        "rn",
        "--map",
        fixture("kraus_u.json").to_str().unwrap(),
        "--k",
        "1,1",
    ]);
    let doc = stdout_json(&out);
    assert!(doc["agreement_residual"].as_f64().unwrap() < 1e-12);
    // single monomial z2^0 for k = (1,1)
    assert_eq!(doc["oracle"].as_array().unwrap().len(), 1);
    assert_eq!(doc["oracle"][0]["pow"], serde_json::json!([0, 0]));
}

#[test]
fn rn_closed_form_rejects_multi_kraus() {
    let out = run(&[
        "rn",
        "--map",
        fixture("two_kraus.json").to_str().unwrap(),
        "--k",
        "0,0",
        "--closed-form",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("single Kraus"));
}

#[test]
fn rn_oracle_alone_works_for_multi_kraus() {
    let out = run(&[
        "rn",
        "--map",
        fixture("two_kraus.json").to_str().unwrap(),
        "--k",
        "0,0",
        "--oracle",
    ]);
    let doc = stdout_json(&out);
    assert!(doc["closed_form"].is_null());
    assert!(doc["oracle"].is_array());
}

#[test]
fn invariants_report_structure_and_drift() {
    let out = run(&[
        "invariants",
        "--map",
        fixture("kraus_u.json").to_str().unwrap(),
        "--t",
        "0.5,1",
        "--cutoff",
        "3",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["current"]["cutoff"], 3);
    assert_eq!(doc["previous"]["cutoff"], 2);
    assert_eq!(doc["current"]["heat"].as_array().unwrap().len(), 2);
    assert!(doc["cutoff_drift"].as_f64().unwrap() >= 0.0);
    // both projection routes agree in the report
    let s = doc["current"]["proj_spectral"].as_f64().unwrap();
    let l = doc["current"]["proj_lsq"].as_f64().unwrap();
    assert!((s - l).abs() < 1e-6);
}

#[test]
fn equiv_deviation_is_tiny_for_monomial_conjugation() {
    let out = run(&[
        "equiv",
        "--map",
        fixture("u_plus_v.json").to_str().unwrap(),
        "--unitary",
        "1,0",
        "--t",
        "0.5,1,2",
        "--cutoff",
        "3",
    ]);
    let doc = stdout_json(&out);
    assert!(doc["max_deviation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn equiv_trivial_unitary_gives_zero_deviation() {
    let out = run(&[
        "equiv",
        "--map",
        fixture("kraus_u.json").to_str().unwrap(),
        "--unitary",
        "0,0",
        "--cutoff",
        "2",
    ]);
    let doc = stdout_json(&out);
    assert!(doc["max_deviation"].as_f64().unwrap() < 1e-12);
}

#[test]
fn purity_distinguishes_automorphism() {
    let out = run(&[
        "purity",
        "--map",
        fixture("kraus_u.json").to_str().unwrap(),
        "--cutoff",
        "3",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["caveat"], "TRUNCATED");
    assert_eq!(doc["lower"]["dimension"], 1);
    assert_eq!(doc["upper"]["dimension"], 1);
    assert_eq!(doc["stable"], true);
}

#[test]
fn rep_relations_close_on_grid() {
    // build a grid spec file on the fly
    let dir = std::env::temp_dir().join(format!("rotcp-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("grid.json");
    let m = 1usize;
    let q = 5usize;
    let eye = vec![serde_json::json!({"re": 1.0, "im": 0.0}); m * m];
    let field = vec![eye; q * q];
    let doc = serde_json::json!({
        "m": m,
        "mode": { "grid": { "p": 2, "q": 5 } },
        "b1": field,
        "b2": field,
    });
    std::fs::write(&spec, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = run(&["rep", "--spec", spec.to_str().unwrap(), "--check-relations"]);
    let parsed = stdout_json(&out);
    assert!(parsed["unitarity_residual"].as_f64().unwrap() < 1e-10);
    for rel in parsed["relations"].as_array().unwrap() {
        assert!(rel["residual"].as_f64().unwrap() < 1e-12);
    }

    // self-equivalence through the identity intertwiner
    let w = dir.join("w.json");
    let w_doc = serde_json::json!({ "w": field });
    std::fs::write(&w, serde_json::to_string(&w_doc).unwrap()).unwrap();
    let out = run(&[
        "rep",
        "--spec",
        spec.to_str().unwrap(),
        "--check-relations",
        "--equiv",
        spec.to_str().unwrap(),
        "--gauge",
        w.to_str().unwrap(),
    ]);
    let parsed = stdout_json(&out);
    assert_eq!(parsed["equiv_residual"].as_f64().unwrap(), 0.0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validation_errors_exit_2() {
    for (args, needle) in [
        (
            vec!["state", "--map", fixture("malformed.json").to_str().unwrap()],
            "parse error",
        ),
        (
            vec!["state", "--map", fixture("bad_rational.json").to_str().unwrap()],
            "coprime",
        ),
        (
            vec!["state", "--map", fixture("wrong_unital_flag.json").to_str().unwrap()],
            "unital",
        ),
        (
            vec!["state", "--map", "/nonexistent/path.json"],
            "io error",
        ),
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "args {args:?}: stderr {err}");
    }
}

#[test]
fn reports_reparse_bit_exactly() {
    let out = run(&[
        "rn",
        "--map",
        fixture("u_plus_v.json").to_str().unwrap(),
        "--k",
        "0,0",
    ]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let first: serde_json::Value = serde_json::from_str(&text).unwrap();
    // serialize → parse → serialize is a fixed point
    let second_text = serde_json::to_string_pretty(&first).unwrap();
    let second: serde_json::Value = serde_json::from_str(&second_text).unwrap();
    assert_eq!(first, second);
    // deterministic: a second run emits the identical document
    let again = run(&[
        "rn",
        "--map",
        fixture("u_plus_v.json").to_str().unwrap(),
        "--k",
        "0,0",
    ]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("rotcp-out-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&[
        "state",
        "--map",
        fixture("identity.json").to_str().unwrap(),
        "--box",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["meta"]["tool"], "rotcp");
    std::fs::remove_dir_all(&dir).ok();
}
