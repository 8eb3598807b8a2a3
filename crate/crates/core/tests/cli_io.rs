mod common;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use common::{div, fixture, fixture_text};
use spherical::cli_io::{
    parse_command, parse_input, parse_rational, parse_root_system_name, relation_class, run_command,
    run_toric_check, serialize, Command, Format,
};
use spherical::Error;

const FIXTURES: &[&str] = &[
    "gl3",
    "ig_2",
    "ig_3",
    "ig_4",
    "ig_5",
    "p1xp1",
    "p2_conic",
    "toric_a2",
    "toric_p1",
    "toric_p1xp1",
    "toric_p2",
    "toric_quadric_cone",
    "toric_square_cone",
    "toric_twisted_prism",
];

fn run_fmt(name: &str, args: &str, format: Format) -> Result<String, Error> {
    let doc = fixture(name);
    let args: Vec<String> = args.split_whitespace().map(String::from).collect();
    run_command(&doc, &parse_command(&args)?)?.render(format)
}

fn run(name: &str, args: &str) -> Result<String, Error> {
    run_fmt(name, args, Format::Text)
}

#[test]
fn every_fixture_round_trips() {
    for name in FIXTURES {
        let once = serialize(&fixture(name));
        let twice = serialize(&parse_input(&once).unwrap());
        assert_eq!(once, twice, "{name}");
    }
}

#[test]
fn normalize_command_matches_serializer() {
    let out = run("toric_p2", "normalize").unwrap();
    assert_eq!(out.trim_end(), serialize(&fixture("toric_p2")).trim_end());
}

#[test]
fn rationals() {
    assert_eq!(parse_rational("3/6"), Some(BigRational::new(1.into(), 2.into())));
    assert_eq!(parse_rational("-4"), Some(BigRational::from_integer(BigInt::from(-4))));
    assert_eq!(parse_rational("1/0"), None);
    assert_eq!(parse_rational("x"), None);
}

#[test]
fn parse_errors_carry_locations() {
    let e = parse_input("{").unwrap_err();
    assert!(matches!(e, Error::Parse(ref m) if m.contains("line")), "{e}");
    let e = parse_input(r#"{"schema":"spherical/1","datum":{"rank":1,"bogus":1}}"#).unwrap_err();
    assert!(matches!(e, Error::Parse(ref m) if m.contains("datum.bogus")), "{e}");
    assert!(matches!(parse_input("   "), Err(Error::Parse(ref m)) if m == "missing datum"));
    let e = parse_input(r#"{"datum":{"rank":1}}"#).unwrap_err();
    assert!(matches!(e, Error::Parse(ref m) if m.contains("missing schema")), "{e}");
    let e = parse_input(r#"{"schema":"other/2","datum":{"rank":1}}"#).unwrap_err();
    assert!(matches!(e, Error::Parse(_)), "{e}");
}

#[test]
fn validation_errors_carry_field_paths() {
    let text = fixture_text("ig_2").replace(r#""alpha": 2"#, r#""alpha": 5"#);
    let e = parse_input(&text).unwrap_err();
    assert!(e.to_string().contains("datum.colors[0].raise.alpha"), "{e}");
    let text = fixture_text("toric_p2").replace(r#""rays": ["D1", "D2"]"#, r#""rays": ["D1", "D9"]"#);
    let e = parse_input(&text).unwrap_err();
    assert!(e.to_string().contains("fan") && e.to_string().contains("D9"), "{e}");
    let text = fixture_text("toric_p2").replace(r#""line": {"D1": 1}"#, r#""line": {"Q": 1}"#);
    assert!(parse_input(&text).unwrap_err().to_string().contains("unknown divisor 'Q'"));
    let text = fixture_text("p1xp1").replace(r#""rho": [1], "raise""#, r#""rho": ["1/2"], "raise""#);
    assert!(parse_input(&text).is_err());
}

#[test]
fn commands_parse() {
    let p = |s: &str| parse_command(&s.split_whitespace().map(String::from).collect::<Vec<_>>());
    assert!(matches!(p("ample H"), Ok(Command::Ample(ref d)) if d == "H"));
    assert!(matches!(p("induce g 1,2 A3"), Ok(Command::Induce { ref parabolic, .. }) if *parabolic == [0, 1]));
    assert!(matches!(p("induce g -"), Ok(Command::Induce { ref parabolic, .. }) if parabolic.is_empty()));
    assert!(matches!(p("toric-check 2 5"), Ok(Command::ToricCheck { rank: Some(2), count: 5 })));
    assert!(matches!(p("ample"), Err(Error::Parse(_))));
    assert!(matches!(p("walls extra"), Err(Error::Parse(_))));
    assert!(matches!(p("frobnicate"), Err(Error::Parse(_))));
    assert!(matches!(p("knop g 0"), Err(Error::Parse(_))));
    assert_eq!(parse_root_system_name("C3").unwrap().to_string(), "C3");
    assert!(parse_root_system_name("Q3").is_err());
    assert!("yaml".parse::<Format>().is_err());
}

#[test]
fn class_group_report() {
    let out = run("p1xp1", "class-group").unwrap();
    assert_eq!(out, "Cl(X) ≅ Z^2\n[D+] = (1, 0)\n[D-] = (0, 1)\n[diag] = (1, 1)\n");
    let json: serde_json::Value = serde_json::from_str(&run_fmt("p2_conic", "class-group", Format::Json).unwrap()).unwrap();
    assert_eq!(json["group"], "Z");
    assert_eq!(json["classes"]["conic"][0], "2");
}

#[test]
fn positivity_reports() {
    assert!(run("p1xp1", "ample anticanonical").unwrap().contains("ample: true"));
    assert!(run("p1xp1", "gg ruling").unwrap().contains("globally generated: true"));
    assert!(run("p1xp1", "ample ruling").unwrap().contains("ample: false"));
    assert!(run("p1xp1", "ample D+").unwrap().contains("ample: false"));
    assert_eq!(run("p1xp1", "ample nope").unwrap_err().to_string(), "unknown divisor 'nope'");
    assert!(matches!(run("toric_a2", "ample D1"), Err(Error::NotComplete)));
}

#[test]
fn canonical_reports() {
    let out = run("ig_3", "canonical toroidal").unwrap();
    assert!(out.contains("-K = 4*DY + 2*DZ"), "{out}");
    assert!(out.contains("class: 6*H"), "{out}");
    let out = run("toric_p2", "canonical blowup").unwrap();
    assert!(out.contains("-K = D1 + D2 + D3"), "{out}");
    assert!(out.contains("class: 3*H"), "{out}");
    assert!(matches!(run("toric_a2", "canonical blowup"), Err(Error::BadResolution(_))));
}

#[test]
fn geometry_reports() {
    assert!(run("toric_quadric_cone", "factoriality").unwrap().contains("Q-factorial"));
    assert!(run("toric_twisted_prism", "quasiprojective").unwrap().contains("false"));
    assert!(run("toric_a2", "affine").unwrap().contains("true"));
    assert!(run("toric_p2", "walls").unwrap().starts_with("walls: 3"));
    assert!(run("p1xp1", "intersections").unwrap().starts_with("curve\t"));
    assert!(run("toric_p2", "validate").unwrap().contains("complete"));
    assert!(run("toric_p2", "picard").unwrap().starts_with("Pic(X) ≅ Z"));
}

#[test]
fn graph_reports() {
    let out = run("gl3", "induce gl3_z 1 A2").unwrap();
    for v in ["z0@e", "z0@s2", "z1@e", "z0@s1s2", "z1@s2", "z1@s1s2"] {
        assert!(out.contains(v), "{out}");
    }
    assert!(run("gl3", "nonnormal gl3").unwrap().contains("Y3"));
    assert!(run("gl3", "chains gl3").unwrap().contains("degree"));
    assert!(run_fmt("gl3", "export-dot gl3", Format::Dot).unwrap().starts_with("digraph G {"));
    assert!(run("gl3", "multfree gl3 Y4").unwrap().contains("true"));
    assert!(run("gl3", "knop gl3 1,2,1").is_ok());
    assert!(run("gl3", "nonnormal missing").is_err());
}

#[test]
fn relation_classes() {
    let rel = BTreeMap::from([("H".to_string(), vec!["D1".to_string(), "D2".to_string()])]);
    assert_eq!(relation_class(&rel, &div(&[("D1", 2), ("D2", 1)])).as_deref(), Some("3*H"));
    assert_eq!(relation_class(&rel, &div(&[("E", 1)])), None);
}

#[test]
fn toric_check_report() {
    let r = run_toric_check(Some(2), 3, 1).unwrap();
    let text = r.render(Format::Text).unwrap();
    assert!(text.contains("rank 2: 3 fan(s)") && text.contains("0 mismatch(es)"), "{text}");
}
