use std::io::Write;
use std::process::{Command, Stdio};

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn spherical(args: &[&str], stdin: Option<&str>) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_spherical"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child.stdin.take().unwrap().write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn success_prints_report() {
    let f = fixture("p1xp1");
    let (code, out, _) = spherical(&["--input", &f, "class-group"], None);
    assert_eq!(code, 0);
    assert!(out.starts_with("Cl(X) ≅ Z^2"));
}

#[test]
fn reads_stdin() {
    let text = std::fs::read_to_string(fixture("toric_p2")).unwrap();
    let (code, out, _) = spherical(&["walls"], Some(&text));
    assert_eq!(code, 0);
    assert!(out.starts_with("walls: 3"));
}

#[test]
fn json_and_dot_formats() {
    let f = fixture("p2_conic");
    let (code, out, _) = spherical(&["--input", &f, "--format", "json", "class-group"], None);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["group"], "Z");
    let g = fixture("gl3");
    let (code, out, _) = spherical(&["--input", &g, "--format", "dot", "export-dot", "gl3"], None);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph G {"));
}

#[test]
fn parse_errors_exit_2() {
    let (code, _, err) = spherical(&["validate"], Some("{"));
    assert_eq!(code, 2);
    assert!(err.starts_with("error: parse error"));
    let (code, _, _) = spherical(&["validate"], Some(""));
    assert_eq!(code, 2);
    let f = fixture("p1xp1");
    let (code, _, _) = spherical(&["--input", &f, "frobnicate"], None);
    assert_eq!(code, 2);
}

#[test]
fn validation_errors_exit_3() {
    let f = fixture("p1xp1");
    let (code, _, err) = spherical(&["--input", &f, "ample", "nope"], None);
    assert_eq!(code, 3);
    assert!(err.contains("unknown divisor 'nope'"));
    let bad = r#"{"schema":"spherical/1","datum":{"rank":1,"gstable_rays":[{"label":"a","rho":[1,0]}]}}"#;
    let (code, _, _) = spherical(&["validate"], Some(bad));
    assert_eq!(code, 3);
}

#[test]
fn precondition_failures_exit_4() {
    let f = fixture("toric_a2");
    let (code, _, err) = spherical(&["--input", &f, "canonical", "blowup"], None);
    assert_eq!(code, 4);
    assert!(err.contains("not complete"));
    let (code, _, _) = spherical(&["--input", &f, "ample", "D1"], None);
    assert_eq!(code, 4);
}

#[test]
fn toric_check_needs_no_input() {
    let (code, out, _) = spherical(&["--seed", "3", "toric-check", "2", "4"], None);
    assert_eq!(code, 0);
    assert!(out.contains("rank 2: 4 fan(s)") && out.contains("0 mismatch(es)"), "{out}");
}
