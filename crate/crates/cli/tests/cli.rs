use std::process::Command;

fn blockcalc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_blockcalc"))
        .args(args)
        .env_remove("BLOCKCALC_DATA_DIR")
        .output()
        .expect("binary runs")
}

#[test]
fn list_names_every_bundled_block() {
    let out = blockcalc(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "complex_A1",
        "complex_A2",
        "complex_B2",
        "sl2R_principal",
        "pgl2R_principal",
        "sl2R_x_sl2R_principal",
        "pgl2R_x_pgl2R_principal",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
    assert!(text.contains("dual pairs:"));
}

#[test]
fn verify_passes_on_a_bundled_block() {
    let out = blockcalc(&["verify", "--block", "complex_A1", "--suite", "all"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "verify failed:\n{text}");
    assert!(text.contains("PASSED"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_pair_runs_both_directions() {
    let out = blockcalc(&["verify", "--pair", "sl2R_principal"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("signed inverse identity").count(), 2);
}

#[test]
fn unknown_block_is_a_usage_error() {
    let out = blockcalc(&["verify", "--block", "no_such_block"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("no_such_block"));
}

#[test]
fn malformed_block_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = blockcalc(&["verify", "--block", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compute_artifacts_are_deterministic() {
    for format in ["json", "csv", "text", "dot"] {
        let a = blockcalc(&["compute", "--block", "sl2R_principal", "--what", "klv", "--format", format]);
        let b = blockcalc(&["compute", "--block", "sl2R_principal", "--what", "klv", "--format", format]);
        assert!(a.status.success(), "format {format}");
        assert_eq!(a.stdout, b.stdout, "format {format} not byte-identical");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn compute_writes_the_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("klv.csv");
    let out = blockcalc(&[
        "compute",
        "--block",
        "complex_A1",
        "--what",
        "klv",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("gamma,xi,P"));
}

#[test]
fn too_small_window_for_ext_exits_three() {
    let out = blockcalc(&[
        "compute",
        "--block",
        "complex_A1",
        "--what",
        "ext",
        "--max-degree",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("need at least"));
}

#[test]
fn decompose_lists_one_object_per_parameter() {
    let out = blockcalc(&[
        "compute",
        "--block",
        "sl2R_principal",
        "--what",
        "decompose",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["objects"].as_array().unwrap().len(), 3);
}
