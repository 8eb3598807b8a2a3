#![allow(dead_code)]

use spherical::canonical_divisor::Resolution;
use spherical::cli_io::{parse_input, InputDocument};
use spherical::divisor_theory::{DivisorZ, SphericalDatum};
use spherical::lattice_geom::ColoredFan;
use spherical::orbit_graph::{EdgeType, OrbitGraph};
use spherical::root_weyl::RootSystemDatum;

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture(name: &str) -> InputDocument {
    parse_input(&fixture_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn datum_fan(doc: &InputDocument) -> (SphericalDatum, ColoredFan) {
    (doc.datum.clone().expect("datum"), doc.fan.clone().expect("fan"))
}

pub fn div(pairs: &[(&str, i64)]) -> DivisorZ {
    DivisorZ::from_pairs(pairs)
}

pub type Embedding = (String, SphericalDatum, ColoredFan, Vec<(String, DivisorZ)>);

/// Fixtures whose fan is complete.
pub const COMPLETE: &[&str] =
    &["p1xp1", "p2_conic", "toric_p1", "toric_p2", "toric_p1xp1", "toric_twisted_prism", "ig_2", "ig_3", "ig_4", "ig_5"];

/// Every (datum, fan) pair of a complete embedding in the fixtures, including
/// complete resolutions, with the fixture's divisor table.
pub fn complete_embeddings() -> Vec<Embedding> {
    let mut out = Vec::new();
    for name in COMPLETE {
        let doc = fixture(name);
        let (d, f) = datum_fan(&doc);
        let divs = doc.divisors.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        out.push((name.to_string(), d, f, divs));
        for (rname, r) in &doc.resolutions {
            if r.fan.is_complete(&r.datum.valuation_cone) {
                out.push((format!("{name}/{rname}"), r.datum.clone(), r.fan.clone(), Vec::new()));
            }
        }
    }
    out
}

pub fn resolution(doc: &InputDocument, name: &str) -> Resolution {
    doc.resolutions.get(name).cloned().expect("resolution")
}

/// `Γ(G/B)`: Schubert cells `BwB/B`, raised by `s_α` when the length grows.
pub fn flag_variety_graph(rs: &RootSystemDatum) -> OrbitGraph {
    let mut g = OrbitGraph::new(Some(rs.clone()));
    let all = rs.all_elements();
    for w in &all {
        g.add_vertex(&w.label(), 0, w.length());
    }
    for w in &all {
        for a in 0..rs.rank {
            let sw = rs.mul(&rs.simple_reflection(a), w);
            if sw.length() > w.length() {
                g.add_edge(&w.label(), &sw.label(), a, EdgeType::U);
            }
        }
    }
    g
}
