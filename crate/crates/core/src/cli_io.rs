//! Input documents (JSON, schema `spherical/1`), normalization, and the
//! command runner behind the `spherical` binary.
//!
//! Simple roots are 1-based in documents and reports. Numbers are JSON
//! integers or strings `"p"` / `"p/q"`; normalized output always uses strings.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::canonical_divisor::{anticanonical_prototype, anticanonical_toroidal, canonical_general, Resolution};
use crate::curve_classes::{effective_cone_generators, intersection_table, nef_via_curves, CurveKind};
use crate::divisor_theory::{
    affine_witness, cartier_data, class_group, divisor_set, factoriality, is_ample, is_globally_generated,
    is_quasi_projective, is_smooth_toroidal, picard_group, ColorRecord, DivisorZ, GStableRay, RaiseType,
    SphericalDatum,
};
use crate::error::{Error, Result};
use crate::lattice_geom::{fan_validate, primitive_q, walls, ColoredFan, Cone, ConeSpec};
use crate::orbit_graph::{
    chain_stats, detect_nonnormal, export_dot, graph_validate, knop_word, multiplicity_free, parabolic_induce,
    EdgeType, OrbitGraph,
};
use crate::root_weyl::{build_root_system, Family, RootSystemDatum};
use crate::toric_oracle::{differential_check, DifferentialConfig};

pub const SCHEMA: &str = "spherical/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Str(String),
}

impl Num {
    fn of(x: &BigInt) -> Num {
        Num::Str(x.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRootSystem {
    pub family: String,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRaise {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levi: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawColor {
    pub id: String,
    pub rho: Vec<Num>,
    pub raise: RawRaise,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRay {
    pub label: String,
    pub rho: Vec<Num>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCone {
    pub rays: Vec<Vec<Num>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDatum {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_system: Option<RawRootSystem>,
    /// Omitted means the whole space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation_cone: Option<RawCone>,
    #[serde(default)]
    pub colors: Vec<RawColor>,
    #[serde(default)]
    pub gstable_rays: Vec<RawRay>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawColoredCone {
    pub id: String,
    #[serde(default)]
    pub rays: Vec<String>,
    #[serde(default)]
    pub colors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFan {
    pub cones: Vec<RawColoredCone>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVertex {
    pub id: String,
    pub rank: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEdge {
    pub source: String,
    pub target: String,
    pub root: usize,
    #[serde(rename = "type")]
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGraph {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_system: Option<RawRootSystem>,
    pub vertices: Vec<RawVertex>,
    #[serde(default)]
    pub edges: Vec<RawEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawResolution {
    #[serde(default)]
    pub gstable_rays: Vec<RawRay>,
    pub fan: RawFan,
    #[serde(default)]
    pub ray_image: BTreeMap<String, Option<String>>,
    #[serde(default)]
    pub color_image: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datum: Option<RawDatum>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<RawFan>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub divisors: BTreeMap<String, BTreeMap<String, Num>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub graphs: BTreeMap<String, RawGraph>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub resolutions: BTreeMap<String, RawResolution>,
    /// Class symbol to the divisors declared equivalent to it.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub relations: BTreeMap<String, Vec<String>>,
}

/// A validated document.
#[derive(Clone, Debug)]
pub struct InputDocument {
    pub datum: Option<SphericalDatum>,
    pub fan: Option<ColoredFan>,
    pub divisors: BTreeMap<String, DivisorZ>,
    pub graphs: BTreeMap<String, OrbitGraph>,
    pub resolutions: BTreeMap<String, Resolution>,
    pub relations: BTreeMap<String, Vec<String>>,
}

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::Invalid(m) => Error::Invalid(format!("{path}: {m}")),
        Error::Unknown { kind, id } => Error::Invalid(format!("{path}: unknown {kind} '{id}'")),
        Error::RankMismatch { expected, got } => {
            Error::Invalid(format!("{path}: rank mismatch: expected {expected}, got {got}"))
        }
        other => Error::Invalid(format!("{path}: {other}")),
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(BigInt::from_str(p.trim()).ok()?, q))
        }
        None => Some(BigRational::from_integer(BigInt::from_str(s).ok()?)),
    }
}

fn num_q(n: &Num, path: &str) -> Result<BigRational> {
    match n {
        Num::Int(i) => Ok(BigRational::from_integer(BigInt::from(*i))),
        Num::Str(s) => parse_rational(s).ok_or_else(|| Error::Invalid(format!("{path}: not a number: '{s}'"))),
    }
}

fn num_z(n: &Num, path: &str) -> Result<BigInt> {
    let q = num_q(n, path)?;
    if !q.is_integer() {
        return Err(Error::Invalid(format!("{path}: expected an integer, got {q}")));
    }
    Ok(q.to_integer())
}

fn vec_z(v: &[Num], path: &str) -> Result<Vec<BigInt>> {
    v.iter().enumerate().map(|(i, n)| num_z(n, &format!("{path}[{i}]"))).collect()
}

fn vec_q(v: &[Num], path: &str) -> Result<Vec<BigRational>> {
    v.iter().enumerate().map(|(i, n)| num_q(n, &format!("{path}[{i}]"))).collect()
}

fn root_system(raw: &RawRootSystem, path: &str) -> Result<RootSystemDatum> {
    let fam = Family::parse(&raw.family)
        .ok_or_else(|| Error::Invalid(format!("{path}.family: unknown family '{}'", raw.family)))?;
    build_root_system(fam, raw.rank).map_err(|e| at(path, e))
}

fn one_based(i: usize, n: usize, path: &str) -> Result<usize> {
    if n == 0 {
        return Err(Error::Invalid(format!("{path}: simple root {i} given but no root system")));
    }
    if i == 0 || i > n {
        return Err(Error::Invalid(format!("{path}: simple root {i} outside 1..{n}")));
    }
    Ok(i - 1)
}

fn build_datum(raw: &RawDatum) -> Result<SphericalDatum> {
    let rs = raw.root_system.as_ref().map(|r| root_system(r, "datum.root_system")).transpose()?;
    let r = raw.rank;
    let v = match &raw.valuation_cone {
        None => Cone::full(r),
        Some(c) => {
            let mut rays = Vec::new();
            for (i, u) in c.rays.iter().enumerate() {
                let path = format!("datum.valuation_cone.rays[{i}]");
                if u.len() != r {
                    return Err(at(&path, Error::RankMismatch { expected: r, got: u.len() }));
                }
                rays.push(primitive_q(&vec_q(u, &path)?).map_err(|e| at(&path, e))?);
            }
            Cone::from_int_rays(&rays, r).map_err(|e| at("datum.valuation_cone", e))?
        }
    };
    let mut colors = Vec::new();
    for (i, c) in raw.colors.iter().enumerate() {
        let path = format!("datum.colors[{i}]");
        let rho = vec_z(&c.rho, &format!("{path}.rho"))?;
        let raise_type = match c.raise.kind.as_str() {
            "T" => RaiseType::T,
            "N" => RaiseType::N,
            "U" => {
                let n = rs.as_ref().map_or(0, |r| r.rank);
                let alpha = c.raise.alpha.ok_or_else(|| Error::Invalid(format!("{path}.raise.alpha: missing")))?;
                let alpha = one_based(alpha, n, &format!("{path}.raise.alpha"))?;
                let mut levi = Vec::new();
                for (k, &j) in c.raise.levi.clone().unwrap_or_default().iter().enumerate() {
                    levi.push(one_based(j, n, &format!("{path}.raise.levi[{k}]"))?);
                }
                RaiseType::U { alpha, levi }
            }
            other => return Err(Error::Invalid(format!("{path}.raise.type: unknown raising type '{other}'"))),
        };
        colors.push(ColorRecord { id: c.id.clone(), rho, raise_type });
    }
    let gstable = raw
        .gstable_rays
        .iter()
        .enumerate()
        .map(|(i, g)| Ok(GStableRay { label: g.label.clone(), rho: vec_z(&g.rho, &format!("datum.gstable_rays[{i}].rho"))? }))
        .collect::<Result<Vec<_>>>()?;
    SphericalDatum::new(r, v, colors, gstable, rs).map_err(|e| at("datum", e))
}

fn cone_specs(raw: &RawFan) -> Vec<ConeSpec> {
    raw.cones.iter().map(|c| ConeSpec { id: c.id.clone(), rays: c.rays.clone(), colors: c.colors.clone() }).collect()
}

fn build_graph(name: &str, raw: &RawGraph) -> Result<OrbitGraph> {
    let path = format!("graphs.{name}");
    let rs = raw.root_system.as_ref().map(|r| root_system(r, &format!("{path}.root_system"))).transpose()?;
    let n = rs.as_ref().map_or(0, |r| r.rank);
    let mut g = OrbitGraph::new(rs);
    for v in &raw.vertices {
        g.add_vertex(&v.id, v.rank, v.dim);
    }
    for (i, e) in raw.edges.iter().enumerate() {
        let p = format!("{path}.edges[{i}]");
        let t = EdgeType::parse(&e.kind).ok_or_else(|| Error::Invalid(format!("{p}.type: unknown edge type '{}'", e.kind)))?;
        let root = one_based(e.root, n, &format!("{p}.root"))?;
        g.add_edge(&e.source, &e.target, root, t);
    }
    let rep = graph_validate(&g);
    if !rep.is_valid() {
        return Err(Error::Invalid(format!("{path}: {}", rep.violations.join("; "))));
    }
    Ok(g)
}

fn build_divisor(datum: &SphericalDatum, name: &str, raw: &BTreeMap<String, Num>) -> Result<DivisorZ> {
    let mut d = DivisorZ::zero();
    for (id, c) in raw {
        let path = format!("divisors.{name}.{id}");
        if datum.rho(id).is_none() {
            return Err(Error::Invalid(format!("{path}: unknown divisor '{id}'")));
        }
        d.add_to(id, &num_z(c, &path)?);
    }
    Ok(d)
}

fn parse_error(e: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let path = e.path().to_string();
    let inner = e.into_inner();
    let msg = inner.to_string();
    let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m);
    let at = if path == "?" || path == "." { String::new() } else { format!("at {path} ") };
    Error::Parse(format!("{at}(line {}, column {}): {msg}", inner.line(), inner.column()))
}

pub fn parse_raw(text: &str) -> Result<RawDocument> {
    if text.trim().is_empty() {
        return Err(Error::Parse("missing datum".to_string()));
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(parse_error)
}

/// Parses and validates a document.
pub fn parse_input(text: &str) -> Result<InputDocument> {
    build_document(&parse_raw(text)?)
}

pub fn build_document(raw: &RawDocument) -> Result<InputDocument> {
    if raw.datum.is_none() && raw.graphs.is_empty() {
        return Err(Error::Parse("missing datum".to_string()));
    }
    match raw.schema.as_deref() {
        Some(SCHEMA) => {}
        Some(other) => return Err(Error::Parse(format!("at schema: unsupported schema '{other}'"))),
        None => return Err(Error::Parse(format!("missing schema (expected \"{SCHEMA}\")"))),
    }
    let datum = raw.datum.as_ref().map(build_datum).transpose()?;
    let fan = match (&raw.fan, &datum) {
        (Some(f), Some(d)) => Some(ColoredFan::new(d, &cone_specs(f)).map_err(|e| at("fan", e))?),
        (Some(_), None) => return Err(Error::Invalid("fan: no datum to attach to".to_string())),
        _ => None,
    };
    let mut divisors = BTreeMap::new();
    for (name, d) in &raw.divisors {
        let dat = datum.as_ref().ok_or_else(|| Error::Invalid("divisors: no datum".to_string()))?;
        divisors.insert(name.clone(), build_divisor(dat, name, d)?);
    }
    let mut graphs = BTreeMap::new();
    for (name, g) in &raw.graphs {
        graphs.insert(name.clone(), build_graph(name, g)?);
    }
    let mut resolutions = BTreeMap::new();
    for (name, r) in &raw.resolutions {
        let path = format!("resolutions.{name}");
        let dat = datum.as_ref().ok_or_else(|| Error::Invalid(format!("{path}: no datum")))?;
        let rays = r
            .gstable_rays
            .iter()
            .enumerate()
            .map(|(i, g)| {
                Ok(GStableRay { label: g.label.clone(), rho: vec_z(&g.rho, &format!("{path}.gstable_rays[{i}].rho"))? })
            })
            .collect::<Result<Vec<_>>>()?;
        let res = Resolution::new(dat, rays, &cone_specs(&r.fan), r.ray_image.clone(), r.color_image.clone())
            .map_err(|e| at(&path, e))?;
        resolutions.insert(name.clone(), res);
    }
    for (sym, ids) in &raw.relations {
        let dat = datum.as_ref().ok_or_else(|| Error::Invalid("relations: no datum".to_string()))?;
        for id in ids {
            if dat.rho(id).is_none() {
                return Err(Error::Invalid(format!("relations.{sym}: unknown divisor '{id}'")));
            }
        }
    }
    Ok(InputDocument { datum, fan, divisors, graphs, resolutions, relations: raw.relations.clone() })
}

fn raw_rs(rs: &RootSystemDatum) -> RawRootSystem {
    RawRootSystem { family: rs.family.letter().to_string(), rank: rs.rank }
}

fn raw_fan(fan: &ColoredFan) -> RawFan {
    RawFan {
        cones: fan
            .specs()
            .into_iter()
            .map(|s| RawColoredCone { id: s.id, rays: s.rays, colors: s.colors })
            .collect(),
    }
}

fn raw_rays(rays: &[GStableRay]) -> Vec<RawRay> {
    rays.iter().map(|g| RawRay { label: g.label.clone(), rho: g.rho.iter().map(Num::of).collect() }).collect()
}

pub fn graph_to_raw(g: &OrbitGraph) -> RawGraph {
    RawGraph {
        root_system: g.root_system.as_ref().map(raw_rs),
        vertices: g.vertices.iter().map(|v| RawVertex { id: v.id.clone(), rank: v.rank, dim: v.dim }).collect(),
        edges: g
            .edges
            .iter()
            .map(|e| RawEdge {
                source: e.source.clone(),
                target: e.target.clone(),
                root: e.root + 1,
                kind: e.etype.to_string(),
            })
            .collect(),
    }
}

/// The normalized raw form of a validated document.
pub fn normalize(doc: &InputDocument) -> RawDocument {
    let datum = doc.datum.as_ref().map(|d| RawDatum {
        rank: d.rank,
        root_system: d.root_system.as_ref().map(raw_rs),
        valuation_cone: Some(RawCone {
            rays: d.valuation_cone.rays().iter().map(|u| u.iter().map(Num::of).collect()).collect(),
        }),
        colors: d
            .colors
            .iter()
            .map(|c| RawColor {
                id: c.id.clone(),
                rho: c.rho.iter().map(Num::of).collect(),
                raise: match &c.raise_type {
                    RaiseType::T => RawRaise { kind: "T".into(), alpha: None, levi: None },
                    RaiseType::N => RawRaise { kind: "N".into(), alpha: None, levi: None },
                    RaiseType::U { alpha, levi } => RawRaise {
                        kind: "U".into(),
                        alpha: Some(alpha + 1),
                        levi: Some(levi.iter().map(|i| i + 1).collect()),
                    },
                },
            })
            .collect(),
        gstable_rays: raw_rays(&d.gstable_rays),
    });
    RawDocument {
        schema: Some(SCHEMA.to_string()),
        datum,
        fan: doc.fan.as_ref().map(raw_fan),
        divisors: doc
            .divisors
            .iter()
            .map(|(k, d)| (k.clone(), d.coeffs.iter().map(|(id, c)| (id.clone(), Num::of(c))).collect()))
            .collect(),
        graphs: doc.graphs.iter().map(|(k, g)| (k.clone(), graph_to_raw(g))).collect(),
        resolutions: doc
            .resolutions
            .iter()
            .map(|(k, r)| {
                (
                    k.clone(),
                    RawResolution {
                        gstable_rays: raw_rays(&r.datum.gstable_rays),
                        fan: raw_fan(&r.fan),
                        ray_image: r.map.ray_image.clone(),
                        color_image: r.map.color_image.clone(),
                    },
                )
            })
            .collect(),
        relations: doc.relations.clone(),
    }
}

pub fn serialize(doc: &InputDocument) -> String {
    let mut s = serde_json::to_string_pretty(&normalize(doc)).expect("raw documents serialize");
    s.push('\n');
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Dot,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            _ => Err(Error::Parse(format!("unknown format '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    ClassGroup,
    Picard,
    Cartier(String),
    Gg(String),
    Ample(String),
    Nef(String),
    Factoriality,
    Smooth,
    Affine,
    QuasiProjective,
    Walls,
    Curves,
    Intersections,
    Canonical(String),
    Induce { graph: String, parabolic: Vec<usize>, root_system: Option<String> },
    Knop { graph: String, word: Vec<usize> },
    NonNormal(String),
    ExportDot(String),
    Chains(String),
    MultFree { graph: String, vertex: String },
    ToricCheck { rank: Option<usize>, count: usize },
    Normalize,
}

pub const COMMANDS: &[&str] = &[
    "validate",
    "class-group",
    "picard",
    "cartier <div>",
    "gg <div>",
    "ample <div>",
    "nef <div>",
    "factoriality",
    "smooth",
    "affine",
    "quasiprojective",
    "walls",
    "curves",
    "intersections",
    "canonical <resolution>",
    "induce <graph> <P> [<root system>]",
    "knop <graph> <word>",
    "nonnormal <graph>",
    "export-dot <graph>",
    "chains <graph>",
    "multfree <graph> <vertex>",
    "toric-check [<rank>] [<count>]",
    "normalize",
];

/// Comma-separated 1-based simple roots, `-` or empty for none.
fn parse_roots(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() || s == "-" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&i| i > 0)
                .map(|i| i - 1)
                .ok_or_else(|| Error::Parse(format!("bad simple root '{t}'")))
        })
        .collect()
}

pub fn parse_command(args: &[String]) -> Result<Command> {
    let a: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    let need = |n: usize| -> Result<()> {
        if a.len() < n + 1 {
            Err(Error::Parse(format!("'{}' needs {n} argument(s)", a[0])))
        } else if a.len() > n + 1 {
            Err(Error::Parse(format!("'{}' takes {n} argument(s)", a[0])))
        } else {
            Ok(())
        }
    };
    let Some(&head) = a.first() else {
        return Err(Error::Parse("missing command".to_string()));
    };
    let cmd = match head {
        "validate" => need(0).map(|_| Command::Validate)?,
        "class-group" => need(0).map(|_| Command::ClassGroup)?,
        "picard" => need(0).map(|_| Command::Picard)?,
        "cartier" => need(1).map(|_| Command::Cartier(a[1].into()))?,
        "gg" => need(1).map(|_| Command::Gg(a[1].into()))?,
        "ample" => need(1).map(|_| Command::Ample(a[1].into()))?,
        "nef" => need(1).map(|_| Command::Nef(a[1].into()))?,
        "factoriality" => need(0).map(|_| Command::Factoriality)?,
        "smooth" => need(0).map(|_| Command::Smooth)?,
        "affine" => need(0).map(|_| Command::Affine)?,
        "quasiprojective" => need(0).map(|_| Command::QuasiProjective)?,
        "walls" => need(0).map(|_| Command::Walls)?,
        "curves" => need(0).map(|_| Command::Curves)?,
        "intersections" => need(0).map(|_| Command::Intersections)?,
        "canonical" => need(1).map(|_| Command::Canonical(a[1].into()))?,
        "induce" => {
            if a.len() != 3 && a.len() != 4 {
                return Err(Error::Parse("'induce' takes <graph> <P> [<root system>]".to_string()));
            }
            Command::Induce {
                graph: a[1].into(),
                parabolic: parse_roots(a[2])?,
                root_system: a.get(3).map(|s| s.to_string()),
            }
        }
        "knop" => {
            need(2)?;
            Command::Knop { graph: a[1].into(), word: parse_roots(a[2])? }
        }
        "nonnormal" => need(1).map(|_| Command::NonNormal(a[1].into()))?,
        "export-dot" => need(1).map(|_| Command::ExportDot(a[1].into()))?,
        "chains" => need(1).map(|_| Command::Chains(a[1].into()))?,
        "multfree" => need(2).map(|_| Command::MultFree { graph: a[1].into(), vertex: a[2].into() })?,
        "toric-check" => {
            if a.len() > 3 {
                return Err(Error::Parse("'toric-check' takes [<rank>] [<count>]".to_string()));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad number '{s}'")));
            let rank = a.get(1).map(|s| num(s)).transpose()?;
            let count = a.get(2).map(|s| num(s)).transpose()?.unwrap_or(1);
            Command::ToricCheck { rank, count }
        }
        "normalize" => need(0).map(|_| Command::Normalize)?,
        other => return Err(Error::Parse(format!("unknown command '{other}'"))),
    };
    Ok(cmd)
}

/// Parses `C3`, `A2`, `E6` and the like.
pub fn parse_root_system_name(s: &str) -> Result<RootSystemDatum> {
    let mut chars = s.chars();
    let fam = chars.next().and_then(|c| Family::parse(&c.to_string()));
    let rank = chars.as_str().parse::<usize>().ok();
    match (fam, rank) {
        (Some(f), Some(r)) => build_root_system(f, r),
        _ => Err(Error::Parse(format!("bad root system '{s}'"))),
    }
}

pub fn render_vec<T: ToString>(v: &[T]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn render_class(v: &[BigInt]) -> String {
    if v.is_empty() {
        "0".to_string()
    } else {
        render_vec(v)
    }
}

fn vec_json<T: ToString>(v: &[T]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

/// Output of a command: text lines and a JSON value.
#[derive(Clone, Debug)]
pub struct Report {
    pub lines: Vec<String>,
    pub json: Value,
    pub dot: Option<String>,
}

impl Report {
    fn new(lines: Vec<String>, json: Value) -> Report {
        Report { lines, json, dot: None }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Text => {
                let mut s = self.lines.join("\n");
                s.push('\n');
                Ok(s)
            }
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("report serializes");
                s.push('\n');
                Ok(s)
            }
            Format::Dot => self.dot.clone().ok_or_else(|| Error::Parse("dot output only for graph commands".into())),
        }
    }
}

fn need_datum(doc: &InputDocument) -> Result<&SphericalDatum> {
    doc.datum.as_ref().ok_or_else(|| Error::invalid("document has no datum"))
}

fn need_fan(doc: &InputDocument) -> Result<(&SphericalDatum, &ColoredFan)> {
    let d = need_datum(doc)?;
    let f = doc.fan.as_ref().ok_or_else(|| Error::invalid("document has no fan"))?;
    Ok((d, f))
}

/// A named divisor, `anticanonical`, or a single prime divisor id.
fn lookup_divisor(doc: &InputDocument, name: &str) -> Result<DivisorZ> {
    if let Some(d) = doc.divisors.get(name) {
        return Ok(d.clone());
    }
    let (datum, fan) = need_fan(doc)?;
    if name == "anticanonical" {
        return anticanonical_toroidal(datum, fan);
    }
    if datum.rho(name).is_some() {
        return Ok(DivisorZ::from_pairs(&[(name, 1)]));
    }
    Err(Error::unknown("divisor", name))
}

fn lookup_graph<'a>(doc: &'a InputDocument, name: &str) -> Result<&'a OrbitGraph> {
    doc.graphs.get(name).ok_or_else(|| Error::unknown("graph", name))
}

fn order(datum: &SphericalDatum) -> Vec<String> {
    datum.divisor_ids()
}

fn graph_lines(g: &OrbitGraph) -> Vec<String> {
    let mut vs: Vec<_> = g.vertices.iter().collect();
    vs.sort_by(|a, b| (a.dim, &a.id).cmp(&(b.dim, &b.id)));
    let mut lines: Vec<String> =
        vs.iter().map(|v| format!("vertex {} rank {} dim {}", v.id, v.rank, v.dim)).collect();
    let mut es: Vec<_> = g.edges.iter().collect();
    es.sort_by(|a, b| (&a.source, a.root, &a.target).cmp(&(&b.source, b.root, &b.target)));
    lines.extend(es.iter().map(|e| format!("edge {} -{}{}-> {}", e.source, e.root + 1, e.etype, e.target)));
    lines
}

/// Class of `d` in terms of the declared relation symbols, when every prime
/// divisor in its support is covered.
pub fn relation_class(relations: &BTreeMap<String, Vec<String>>, d: &DivisorZ) -> Option<String> {
    let mut per: BTreeMap<&str, BigInt> = BTreeMap::new();
    for (id, c) in &d.coeffs {
        let sym = relations.iter().find(|(_, ids)| ids.contains(id)).map(|(s, _)| s.as_str())?;
        *per.entry(sym).or_insert_with(BigInt::zero) += c;
    }
    let mut out = DivisorZ::zero();
    for (s, c) in per {
        out.set(s, c);
    }
    Some(out.render(&[]))
}

fn positivity_report(doc: &InputDocument, name: &str, label: &str, which: u8) -> Result<Report> {
    let (datum, fan) = need_fan(doc)?;
    let d = lookup_divisor(doc, name)?;
    let v = match which {
        0 => is_globally_generated(datum, fan, &d)?,
        1 => is_ample(datum, fan, &d)?,
        _ => nef_via_curves(datum, fan, &d)?,
    };
    Ok(Report::new(
        vec![format!("divisor {name} = {}", d.render(&order(datum))), format!("{label}: {v}")],
        json!({ "divisor": name, label: v }),
    ))
}

pub fn run_command(doc: &InputDocument, cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Validate => {
            let mut lines = Vec::new();
            let mut ok = true;
            if let (Some(datum), Some(fan)) = (&doc.datum, &doc.fan) {
                let rep = fan_validate(fan, datum);
                for v in &rep.violations {
                    lines.push(format!("violation [{}]: {}", v.cone_ids.join(", "), v.message));
                }
                for w in &rep.warnings {
                    lines.push(format!("warning: {w}"));
                }
                for w in &rep.incomplete {
                    lines.push(format!("incomplete: {w}"));
                }
                ok &= rep.is_valid();
                lines.push(format!("fan: {}", if rep.is_valid() { "valid" } else { "invalid" }));
                lines.push(format!("complete: {}", rep.complete));
                lines.push(format!("toroidal: {}", divisor_set(datum, fan).toroidal));
            } else if doc.datum.is_some() {
                lines.push("datum: valid (no fan)".to_string());
            }
            for (name, g) in &doc.graphs {
                let rep = graph_validate(g);
                ok &= rep.is_valid();
                lines.push(format!("graph {name}: {}", if rep.is_valid() { "valid" } else { "invalid" }));
            }
            for name in doc.resolutions.keys() {
                lines.push(format!("resolution {name}: valid"));
            }
            if !ok {
                return Err(Error::Invalid(lines.join("\n")));
            }
            Ok(Report::new(lines.clone(), json!({ "valid": true, "report": lines })))
        }
        Command::ClassGroup => {
            let datum = need_datum(doc)?;
            let (g, _) = class_group(datum);
            let mut lines = vec![format!("Cl(X) ≅ {g}")];
            let mut classes = serde_json::Map::new();
            for id in order(datum) {
                lines.push(format!("[{id}] = {}", render_class(&g.class_of[&id])));
                classes.insert(id.clone(), vec_json(&g.class_of[&id]));
            }
            Ok(Report::new(
                lines,
                json!({ "group": g.to_string(), "free_rank": g.free_rank, "torsion": vec_json(&g.torsion), "classes": classes }),
            ))
        }
        Command::Picard => {
            let (datum, fan) = need_fan(doc)?;
            let pic = picard_group(datum, fan)?;
            let complete = fan.is_complete(&datum.valuation_cone);
            let mut lines = vec![format!("Pic(X) ≅ {}", pic.group)];
            if !complete {
                lines.push("note: fan is not complete; torsion is not asserted".to_string());
            }
            let mut classes = serde_json::Map::new();
            for id in order(datum) {
                match pic.group.class_of.get(&id) {
                    Some(c) => {
                        lines.push(format!("[{id}] = {}", render_class(c)));
                        classes.insert(id.clone(), vec_json(c));
                    }
                    None => lines.push(format!("{id}: not Cartier")),
                }
            }
            Ok(Report::new(
                lines,
                json!({ "group": pic.group.to_string(), "free_rank": pic.group.free_rank, "torsion": vec_json(&pic.group.torsion), "complete": complete, "classes": classes }),
            ))
        }
        Command::Cartier(name) => {
            let (datum, fan) = need_fan(doc)?;
            let d = lookup_divisor(doc, name)?;
            let mut lines = vec![format!("divisor {name} = {}", d.render(&order(datum)))];
            match cartier_data(datum, fan, &d) {
                Ok(l) => {
                    lines.push("cartier: true".to_string());
                    let mut data = serde_json::Map::new();
                    for (y, chi) in &l.per_cone {
                        lines.push(format!("chi[{y}] = {}", render_vec(chi)));
                        data.insert(y.clone(), vec_json(chi));
                    }
                    Ok(Report::new(lines, json!({ "divisor": name, "cartier": true, "local": data })))
                }
                Err(Error::NotCartier(y)) => {
                    lines.push(format!("cartier: false (fails along {y})"));
                    Ok(Report::new(lines, json!({ "divisor": name, "cartier": false, "fails_along": y })))
                }
                Err(e) => Err(e),
            }
        }
        Command::Gg(name) => positivity_report(doc, name, "globally generated", 0),
        Command::Ample(name) => positivity_report(doc, name, "ample", 1),
        Command::Nef(name) => positivity_report(doc, name, "nef", 2),
        Command::Factoriality => {
            let (datum, fan) = need_fan(doc)?;
            let (f, w) = factoriality(datum, fan);
            let line = match &w {
                Some(y) => format!("factoriality: {f} (witness: {y})"),
                None => format!("factoriality: {f}"),
            };
            Ok(Report::new(vec![line], json!({ "factoriality": f.to_string(), "witness": w })))
        }
        Command::Smooth => {
            let (datum, fan) = need_fan(doc)?;
            let s = is_smooth_toroidal(datum, fan)?;
            Ok(Report::new(vec![format!("smooth: {s}")], json!({ "smooth": s })))
        }
        Command::Affine => {
            let (datum, fan) = need_fan(doc)?;
            let w = affine_witness(datum, fan);
            let mut lines = vec![format!("affine: {}", w.is_some())];
            if let Some(chi) = &w {
                lines.push(format!("witness chi = {}", render_vec(chi)));
            }
            Ok(Report::new(lines, json!({ "affine": w.is_some(), "witness": w.map(|c| vec_json(&c)) })))
        }
        Command::QuasiProjective => {
            let (datum, fan) = need_fan(doc)?;
            let q = is_quasi_projective(datum, fan);
            Ok(Report::new(vec![format!("quasi-projective: {q}")], json!({ "quasi_projective": q })))
        }
        Command::Walls => {
            let (datum, fan) = need_fan(doc)?;
            let ws = walls(fan, &datum.valuation_cone);
            let mut lines = vec![format!("walls: {}", ws.len())];
            let mut arr = Vec::new();
            for w in &ws {
                let rays: Vec<String> = w.face.rays().iter().map(|r| render_vec(r)).collect();
                lines.push(format!(
                    "wall {}|{}: face [{}], normal {}",
                    w.plus_cone,
                    w.minus_cone,
                    rays.join(", "),
                    render_vec(&w.v)
                ));
                arr.push(json!({ "plus": w.plus_cone, "minus": w.minus_cone, "normal": vec_json(&w.v) }));
            }
            Ok(Report::new(lines, Value::Array(arr)))
        }
        Command::Curves => {
            let (datum, fan) = need_fan(doc)?;
            let cone = effective_cone_generators(datum, fan)?;
            let mut lines = vec![format!("generators: {}", cone.generators.len())];
            let mut gens = Vec::new();
            for c in &cone.generators {
                let kind = match &c.kind {
                    CurveKind::Wall(_) => "wall",
                    CurveKind::ColorOrbit { .. } => "color",
                };
                lines.push(format!("{} ({kind})", c.label()));
                gens.push(json!({ "label": c.label(), "kind": kind }));
            }
            let basis: Vec<String> = cone.quotient_basis.iter().map(|(_, c)| c.label()).collect();
            lines.push(format!("quotient basis: [{}]", basis.join(", ")));
            Ok(Report::new(lines, json!({ "generators": gens, "quotient_basis": basis })))
        }
        Command::Intersections => {
            let (datum, fan) = need_fan(doc)?;
            let mut cols = Vec::new();
            let mut skipped = Vec::new();
            let mut named: Vec<(String, DivisorZ)> =
                doc.divisors.iter().map(|(k, d)| (k.clone(), d.clone())).collect();
            for id in order(datum) {
                if !doc.divisors.contains_key(&id) {
                    named.push((id.clone(), DivisorZ::from_pairs(&[(id.as_str(), 1)])));
                }
            }
            for (k, d) in named {
                match cartier_data(datum, fan, &d) {
                    Ok(_) => cols.push((k, d)),
                    Err(Error::NotCartier(_)) => skipped.push(k),
                    Err(e) => return Err(e),
                }
            }
            let (curves, rows) = intersection_table(datum, fan, &cols)?;
            let header: Vec<String> = cols.iter().map(|(k, _)| k.clone()).collect();
            let mut lines = vec![format!("curve\t{}", header.join("\t"))];
            let mut table = Vec::new();
            for (c, row) in curves.iter().zip(&rows) {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                lines.push(format!("{}\t{}", c.label(), cells.join("\t")));
                table.push(json!({ "curve": c.label(), "values": cells }));
            }
            if !skipped.is_empty() {
                lines.push(format!("not Cartier: {}", skipped.join(", ")));
            }
            Ok(Report::new(lines, json!({ "divisors": header, "rows": table, "not_cartier": skipped })))
        }
        Command::Canonical(name) => {
            let (datum, fan) = need_fan(doc)?;
            let res = match doc.resolutions.get(name) {
                Some(r) => r.clone(),
                None if name == "identity" => Resolution::identity(datum, fan),
                None => return Err(Error::unknown("resolution", name.clone())),
            };
            let k = canonical_general(datum, &res)?;
            let (cl, cmap) = class_group(datum);
            let class = cmap.class_of(&k);
            let mut lines = vec![
                format!("-K = {}", k.render(&order(datum))),
                format!("[-K] in Cl(X) ≅ {cl}: {}", render_class(&class)),
            ];
            let rel = relation_class(&doc.relations, &k);
            if let Some(r) = &rel {
                lines.push(format!("class: {r}"));
            }
            for (sym, ids) in &doc.relations {
                for w in ids.windows(2) {
                    let a = DivisorZ::from_pairs(&[(w[0].as_str(), 1)]);
                    let b = DivisorZ::from_pairs(&[(w[1].as_str(), 1)]);
                    if !cmap.linearly_equivalent(&a, &b) {
                        lines.push(format!("warning: relation {sym}: {} and {} differ in Cl(X)", w[0], w[1]));
                    }
                }
            }
            let coeffs: serde_json::Map<String, Value> =
                k.coeffs.iter().map(|(id, c)| (id.clone(), Value::String(c.to_string()))).collect();
            Ok(Report::new(lines, json!({ "anticanonical": coeffs, "class": vec_json(&class), "relation_class": rel })))
        }
        Command::Induce { graph, parabolic, root_system } => {
            let g = lookup_graph(doc, graph)?;
            let rs = match root_system {
                Some(s) => parse_root_system_name(s)?,
                None => doc
                    .datum
                    .as_ref()
                    .and_then(|d| d.root_system.clone())
                    .ok_or_else(|| Error::Parse("induce needs a root system".to_string()))?,
            };
            let out = parabolic_induce(g, &rs, parabolic)?;
            let raw = graph_to_raw(&out);
            let mut rep = Report::new(graph_lines(&out), serde_json::to_value(&raw).expect("graph serializes"));
            rep.dot = Some(export_dot(&out));
            Ok(rep)
        }
        Command::Knop { graph, word } => {
            let g = lookup_graph(doc, graph)?;
            let perm = knop_word(g, word)?;
            let mut lines = Vec::new();
            let mut map = serde_json::Map::new();
            for (i, &j) in perm.iter().enumerate() {
                lines.push(format!("{} -> {}", g.vertices[i].id, g.vertices[j].id));
                map.insert(g.vertices[i].id.clone(), Value::String(g.vertices[j].id.clone()));
            }
            Ok(Report::new(lines, Value::Object(map)))
        }
        Command::NonNormal(name) => {
            let g = lookup_graph(doc, name)?;
            let pairs = detect_nonnormal(g);
            let mut lines: Vec<String> = pairs.iter().map(|(a, b)| format!("{a} not normal along {b}")).collect();
            if lines.is_empty() {
                lines.push("no non-normal closures detected".to_string());
            }
            let arr: Vec<Value> = pairs.iter().map(|(a, b)| json!([a, b])).collect();
            Ok(Report::new(lines, Value::Array(arr)))
        }
        Command::ExportDot(name) => {
            let g = lookup_graph(doc, name)?;
            let dot = export_dot(g);
            let mut rep = Report::new(dot.lines().map(|s| s.to_string()).collect(), json!({ "dot": dot }));
            rep.dot = Some(dot);
            Ok(rep)
        }
        Command::Chains(name) => {
            let g = lookup_graph(doc, name)?;
            let mut lines = Vec::new();
            let mut arr = Vec::new();
            for path in g.maximal_chains() {
                let st = chain_stats(g, &path)?;
                let verts: Vec<&str> = std::iter::once(g.edges[path[0]].source.as_str())
                    .chain(path.iter().map(|&i| g.edges[i].target.as_str()))
                    .collect();
                let word: Vec<String> = st.word.iter().map(|i| (i + 1).to_string()).collect();
                lines.push(format!(
                    "{}: word s{} reduced {} l_N {} l_T {} degree {} rank_delta {}",
                    verts.join(" < "),
                    word.join("s"),
                    st.reduced,
                    st.l_n,
                    st.l_t,
                    st.degree,
                    st.rank_delta
                ));
                arr.push(json!({ "chain": verts, "word": word, "reduced": st.reduced, "l_n": st.l_n, "l_t": st.l_t, "degree": st.degree.to_string(), "rank_delta": st.rank_delta }));
            }
            Ok(Report::new(lines, Value::Array(arr)))
        }
        Command::MultFree { graph, vertex } => {
            let g = lookup_graph(doc, graph)?;
            let m = multiplicity_free(g, vertex)?;
            Ok(Report::new(vec![format!("multiplicity free above {vertex}: {m}")], json!({ "multiplicity_free": m })))
        }
        Command::ToricCheck { .. } => Err(Error::Parse("toric-check runs without a document".to_string())),
        Command::Normalize => {
            let raw = normalize(doc);
            let text = serialize(doc);
            Ok(Report::new(text.lines().map(|s| s.to_string()).collect(), serde_json::to_value(&raw).expect("serializes")))
        }
    }
}

/// Seeded differential comparison against the toric oracle.
pub fn run_toric_check(rank: Option<usize>, count: usize, seed: u64) -> Result<Report> {
    let ranks: Vec<usize> = match rank {
        Some(r) => vec![r],
        None => vec![1, 2, 3],
    };
    let mut lines = Vec::new();
    let mut all = Vec::new();
    for r in ranks {
        let mut mismatches = Vec::new();
        let mut checks = 0usize;
        for k in 0..count as u64 {
            let rep = differential_check(&DifferentialConfig { rank: r, seed: seed.wrapping_add(k), divisors: 10 })?;
            checks += rep.checks;
            mismatches.extend(rep.mismatches);
        }
        lines.push(format!("rank {r}: {count} fan(s), {checks} checks, {} mismatch(es)", mismatches.len()));
        for m in &mismatches {
            lines.push(format!("  {m}"));
        }
        all.push(json!({ "rank": r, "fans": count, "checks": checks, "mismatches": mismatches }));
    }
    Ok(Report::new(lines, Value::Array(all)))
}

/// Prototype `−K_X` with unknown color coefficients, for display.
pub fn prototype_line(datum: &SphericalDatum) -> String {
    format!("-K = {}", anticanonical_prototype(datum))
}
