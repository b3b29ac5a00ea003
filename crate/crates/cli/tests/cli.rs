//! End-to-end runs of the binary against the shipped fixtures: output
//! values, determinism, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn fermext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermext"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn shipped_fixtures_verify() {
    for f in ["klein_action.json", "z4_action.json"] {
        let out = fermext(&["verify-action", &fixture(f)]);
        assert!(out.status.success(), "{f}");
        assert_eq!(stdout(&out).trim(), "valid");
    }
}

#[test]
fn cohomology_of_cyclic_five() {
    let out = fermext(&[
        "cohomology",
        "--group",
        r#"{"cyclic":5}"#,
        "--coeffs",
        "qz",
        "--degree",
        "3",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "Z/5");
    // H^4 of a cyclic group with divisible coefficients is trivial
    let out = fermext(&[
        "cohomology",
        "--group",
        r#"{"cyclic":2}"#,
        "--coeffs",
        "qz",
        "--degree",
        "4",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn count_mext_expectations() {
    let cases = [
        ("sg_z4.json", "32", "4"),
        ("sg_z6.json", "48", "3"),
        ("sg_trivial_m1.json", "16", "1"),
        ("sg_zm_z2_m3.json", "48", "3"),
        ("sg_zm_z2_m5.json", "80", "5"),
    ];
    for (file, total, kernel) in cases {
        let out = fermext(&[
            "count-mext",
            "--supergroup",
            &fixture(file),
            "--expect-order",
            total,
        ]);
        assert!(out.status.success(), "{file}");
        let text = stdout(&out);
        assert!(text.contains(&format!("total: {total}")), "{file}: {text}");
        assert!(text.contains(&format!("kernel: {kernel}")), "{file}: {text}");
    }
}

#[test]
fn byte_identical_reruns() {
    let args = ["count-mext", "--supergroup", &fixture("sg_z4.json")];
    let a = fermext(&args);
    let b = fermext(&args);
    assert_eq!(a.stdout, b.stdout);
    let args = [
        "classify-h3ab",
        "--group",
        r#"{"invariant_factors":[2]}"#,
        "--denominator",
        "8",
    ];
    let a = fermext(&args);
    let b = fermext(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("classes: 4"));
}

#[test]
fn exit_codes() {
    // mathematical failure: corrupted action table -> 1
    let dir = std::env::temp_dir().join("fermext-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad_action.json");
    let text = std::fs::read_to_string(fixture("klein_action.json")).unwrap();
    std::fs::write(
        &bad,
        text.replace("\"[1]|[1,0]|[1,0]\": \"1/2\"", "\"[1]|[1,0]|[1,0]\": \"0\""),
    )
    .unwrap();
    let out = fermext(&["verify-action", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("violations"));

    // expectation failure -> 1
    let out = fermext(&[
        "count-mext",
        "--supergroup",
        &fixture("sg_z4.json"),
        "--expect-order",
        "33",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // parse failure -> 2, naming the file
    let garbled = dir.join("garbled.json");
    std::fs::write(&garbled, "{ not json").unwrap();
    let out = fermext(&["verify-action", garbled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("garbled.json"), "{err}");

    // usage error -> 2
    let out = fermext(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn obstruction_commands() {
    let out = fermext(&[
        "obstruction-o3",
        &fixture("klein_action.json"),
        "--supergroup",
        &fixture("sg_klein_split.json"),
        "--expect-zero",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("bosonic obstruction identically zero: true"));
    assert!(text.contains("vanishes = true"));

    // fermionic obstruction against the nonsplit super-group over the same
    // quotient group: theta = 0 but alpha is nontrivial, so it must fail
    let sgz4 = fixture("sg_z4.json");
    let out = fermext(&[
        "obstruction-o3",
        &fixture("klein_action.json"),
        "--supergroup",
        &sgz4,
        "--expect-zero",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));

    let out = fermext(&[
        "obstruction-o4",
        &fixture("klein_action.json"),
        &fixture("mu2_toric_f.json"),
        "--expect-zero",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("obstruction class: trivial"));
}

#[test]
fn explicit_category_file_verifies() {
    // the sign braiding on Z/2: c(f,f) = 1/2, omega = 0 (a valid symmetric table)
    let dir = std::env::temp_dir().join("fermext-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("svec_like.json");
    std::fs::write(
        &path,
        r#"{"group": {"cyclic": 2}, "omega": {}, "c": {"[1]|[1]": "1/2"}, "fermion": [1]}"#,
    )
    .unwrap();
    let out = fermext(&["verify-cocycle", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert_eq!(stdout(&out).trim(), "valid");

    // breaking the braiding breaks a hexagon
    let bad = dir.join("svec_bad.json");
    std::fs::write(
        &bad,
        r#"{"group": {"cyclic": 2}, "omega": {}, "c": {"[1]|[1]": "1/8"}, "fermion": [1]}"#,
    )
    .unwrap();
    let out = fermext(&["verify-cocycle", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2)); // 1/8 is not even a fermion line
}

#[test]
fn catalog_and_rank4_commands() {
    let out = fermext(&["verify-cocycle", "--catalog", "3f"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "valid");

    let out = fermext(&["classify-rank4", "--family", "z4", "--k", "1/8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("label: z4-k1/8"));
    assert!(text.contains("modular: true"));

    let out = fermext(&["classify-rank4", "--family", "klein", "--k", "1/8"]);
    assert_eq!(out.status.code(), Some(2)); // invalid parameter

    let out = fermext(&[
        "count-mext",
        "--supergroup",
        &fixture("sg_z4.json"),
        "--target",
        "toric",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("triples: 4"));
}

#[test]
fn obstruction_json_output() {
    let out = fermext(&[
        "--format",
        "json",
        "obstruction-o4",
        &fixture("klein_action.json"),
        &fixture("mu2_toric_f.json"),
    ]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["vanishes"], true);
    assert!(parsed["witness"].is_object());

    let out = fermext(&[
        "--format",
        "json",
        "obstruction-o3",
        &fixture("klein_action.json"),
        "--supergroup",
        &fixture("sg_z4.json"),
    ]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["bosonic_identically_zero"], true);
    assert_eq!(parsed["fermionic"]["vanishes"], false);
    assert_eq!(parsed["fermionic"]["degree"], 3);
}

#[test]
fn json_format_round_trips() {
    let out = fermext(&[
        "--format",
        "json",
        "count-mext",
        "--supergroup",
        &fixture("sg_z4.json"),
    ]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["total"], 32);
    assert_eq!(parsed["kernel"], 4);
    assert_eq!(parsed["image"], 8);
    assert_eq!(parsed["targets"].as_array().unwrap().len(), 16);
}
