use std::path::PathBuf;
use std::process::{Command, Output};

const SAFETY: &str = "nu h. AX(~loc_ERROR & h)";

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn dimca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimca"))
        .args(args)
        .env_remove("DIMCA_MAX_STATES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn parameterised_check_of_ftmem_holds() {
    let ftmem = fixture("ftmem.gap");
    let o = dimca(&["check", &ftmem, "--formula", SAFETY, "--from", "at_start", "--mode", "parameterised", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["answer"], "holds-for-all-finite");
    assert_eq!(v["mode"], "parameterised");
    assert_eq!(v["fragment"], "dualL4");
    assert!(v["counterexample"].is_null());
    for key in ["states", "edges", "fixpoint_iterations", "wall_time_ms"] {
        assert!(v["stats"][key].is_u64(), "{key}");
    }
}

#[test]
fn mutant_fails_with_witness() {
    let mutant = fixture("ftmem_mutant.gap");
    let o = dimca(&["check", &mutant, "--formula", SAFETY, "--from", "at_start", "--mode", "parameterised", "--json"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["answer"], "fails");
    let sizes = v["witness_sizes"].as_array().unwrap();
    assert!(sizes[0].as_u64().unwrap() <= 2 && sizes[1].as_u64().unwrap() <= 2);
    let trace = v["counterexample"].as_array().unwrap();
    let last = trace.last().unwrap()["observables-true"].as_array().unwrap();
    assert!(last.iter().any(|o| o == "loc_ERROR"));

    // The counterexample replays as a finite run.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.json");
    std::fs::write(&path, serde_json::to_string(&v["counterexample"]).unwrap()).unwrap();
    let o = dimca(&["trace", &mutant, "--replay", path.to_str().unwrap(), "--from", "at_start", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["realized"], true);
    assert_eq!(r["run"].as_array().unwrap().len(), trace.len());

    let (a, b) = (sizes[0].to_string(), sizes[1].to_string());
    let o = dimca(&["check-finite", &mutant, "--formula", SAFETY, "--from", "at_start", "--x-size", &a, "--y-size", &b]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn translate_emits_golden_output() {
    let ftmem = fixture("ftmem.gap");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sharp.gap");
    let o = dimca(&["translate", &ftmem, "-o", out.to_str().unwrap(), "--emit-sigma"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sigma = std::fs::read_to_string(fixture("ftmem_sigma.txt")).unwrap();
    assert_eq!(stdout(&o), sigma);
    let first = std::fs::read_to_string(&out).unwrap();

    let again = dimca(&["translate", &ftmem, "--emit-sigma"]);
    let text = stdout(&again);
    assert!(text.starts_with(&first));
    assert_eq!(text[first.len()..].trim_end(), format!("# sigma: {}", sigma.trim_end()));

    // The output parses back, and its append chains rule out a second
    // translation.
    let o = dimca(&["translate", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("append chain"), "{}", stderr(&o));
}

#[test]
fn check_finite_ftmem_holds() {
    let o = dimca(&[
        "check-finite",
        &fixture("ftmem.gap"),
        "--formula",
        SAFETY,
        "--from",
        "at_start",
        "--x-size",
        "1",
        "--y-size",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("finite(1,2)") && out.contains("holds"), "{out}");
}

#[test]
fn init_is_conjoined() {
    // Contradicting the start observable leaves no start states, so the
    // mutant holds vacuously.
    let o = dimca(&[
        "check",
        &fixture("ftmem_mutant.gap"),
        "--formula",
        SAFETY,
        "--from",
        "at_start",
        "--init",
        "~at_start",
        "--mode",
        "infinite",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = dimca(&[
        "check",
        &fixture("ftmem.gap"),
        "--formula",
        SAFETY,
        "--from",
        "at_start",
        "--init",
        "nosuchvar",
        "--mode",
        "infinite",
    ]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn fragment_rejection_names_constructor() {
    let o = dimca(&[
        "check",
        &fixture("ftmem.gap"),
        "--formula",
        "nu h. EX h",
        "--from",
        "at_start",
        "--mode",
        "parameterised",
    ]);
    assert_eq!(o.status.code(), Some(64));
    let err = stderr(&o);
    assert!(err.contains("`EX`") && err.contains("dualL2"), "{err}");
}

#[test]
fn dual_l2_failure_is_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.gap");
    std::fs::write(
        &path,
        "types X Y bool b p q\ntrans true -> p := true, q := false\ntrans true -> p := false, q := true\n",
    )
    .unwrap();
    let o = dimca(&[
        "check",
        path.to_str().unwrap(),
        "--formula",
        "AX ~p | AX ~q",
        "--from",
        "b",
        "--mode",
        "parameterised",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["answer"], "unknown-possible-false-negative");
}

#[test]
fn usage_and_runtime_errors() {
    assert_eq!(dimca(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(dimca(&["check", &fixture("ftmem.gap")]).status.code(), Some(64));
    let bad_formula = dimca(&[
        "check",
        &fixture("ftmem.gap"),
        "--formula",
        "nu h. AX (",
        "--from",
        "at_start",
        "--mode",
        "infinite",
    ]);
    assert_eq!(bad_formula.status.code(), Some(64));
    let unknown_from = dimca(&["check", &fixture("ftmem.gap"), "--formula", SAFETY, "--from", "nope", "--mode", "infinite"]);
    assert_eq!(unknown_from.status.code(), Some(64));
    assert!(stderr(&unknown_from).contains("nope"));
    let missing = dimca(&["translate", "/nonexistent/p.gap"]);
    assert_eq!(missing.status.code(), Some(3));
    assert_eq!(dimca(&["--help"]).status.code(), Some(0));
}

#[test]
fn state_cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_dimca"))
        .args(["check", &fixture("ftmem.gap"), "--formula", SAFETY, "--from", "at_start", "--mode", "infinite"])
        .env("DIMCA_MAX_STATES", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("state cap of 1000"), "{}", stderr(&o));
}

#[test]
fn compare_reports_bisimulation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.gap");
    std::fs::write(
        &path,
        "types X Y bool b xvar i j yvar d array a\ninit b\ntrans b -> a[i] := d, i := ?\ntrans true -> d := a[j], b := ~b\n",
    )
    .unwrap();
    let export = dir.path().join("ts.json");
    let o = dimca(&["compare", path.to_str().unwrap(), "--json", "--export-ts", export.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["bisimilar"], true);
    assert_eq!(r["partial_states"], r["quotient_states"]);
    let ts: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&export).unwrap()).unwrap();
    assert!(ts.is_object());
}

#[test]
fn unrealizable_trace_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(&path, r#"[{"observables-true": ["loc_ERROR"]}]"#).unwrap();
    let o = dimca(&["trace", &fixture("ftmem.gap"), "--replay", path.to_str().unwrap(), "--from", "at_start"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("false"));
}
