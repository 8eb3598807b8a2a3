use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::cone::Cone;
use super::feasibility::{feasible_simplex, Constraint, Relation};
use super::matrix::dot;
use super::{sign_normalize, CharacterVec};
use crate::divisor_theory::SphericalDatum;
use crate::error::{Error, Result};

/// A colored cone as written in the input: G-stable ray labels and color ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSpec {
    pub id: String,
    pub rays: Vec<String>,
    pub colors: Vec<String>,
}

impl ConeSpec {
    pub fn new(id: &str, rays: &[&str], colors: &[&str]) -> Self {
        ConeSpec {
            id: id.to_string(),
            rays: rays.iter().map(|s| s.to_string()).collect(),
            colors: colors.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ColoredCone {
    pub id: String,
    pub cone: Cone,
    pub rays: Vec<String>,
    pub colors: Vec<String>,
}

impl ColoredCone {
    pub fn spec(&self) -> ConeSpec {
        ConeSpec { id: self.id.clone(), rays: self.rays.clone(), colors: self.colors.clone() }
    }
}

/// Colored fan; maximal cones correspond to closed G-orbits.
#[derive(Clone, Debug)]
pub struct ColoredFan {
    pub rank: usize,
    pub cones: Vec<ColoredCone>,
    pub closed_orbit_ids: Vec<String>,
    maximal: Vec<usize>,
    /// Pairwise intersections of maximal cones, keyed by positions in `maximal`.
    meets: BTreeMap<(usize, usize), Cone>,
    /// Last completeness verdict with the valuation cone it was computed for.
    complete: OnceLock<(Cone, bool)>,
}

impl ColoredFan {
    pub fn new(datum: &SphericalDatum, specs: &[ConeSpec]) -> Result<Self> {
        let r = datum.rank;
        let mut seen = BTreeSet::new();
        let mut cones = Vec::new();
        for s in specs {
            if !seen.insert(s.id.clone()) {
                return Err(Error::invalid(format!("duplicate cone id '{}'", s.id)));
            }
            let mut gens = Vec::new();
            for l in &s.rays {
                let ray = datum.gstable_ray(l).ok_or_else(|| Error::unknown("G-stable ray", l.clone()))?;
                gens.push(ray.rho.clone());
            }
            for c in &s.colors {
                let col = datum.color(c).ok_or_else(|| Error::unknown("color", c.clone()))?;
                gens.push(col.rho.clone());
            }
            let cone = Cone::from_int_rays(&gens, r)?;
            cones.push(ColoredCone { id: s.id.clone(), cone, rays: s.rays.clone(), colors: s.colors.clone() });
        }
        let maximal: Vec<usize> = (0..cones.len())
            .filter(|&i| {
                !(0..cones.len()).any(|j| {
                    j != i
                        && cones[j].cone.contains_cone(&cones[i].cone)
                        && (!cones[i].cone.contains_cone(&cones[j].cone)
                            || (cones[i].colors.iter().all(|c| cones[j].colors.contains(c))
                                && cones[j].colors.len() > cones[i].colors.len()))
                })
            })
            .collect();
        let mut meets = BTreeMap::new();
        for a in 0..maximal.len() {
            for b in a + 1..maximal.len() {
                let m = cones[maximal[a]].cone.intersect(&cones[maximal[b]].cone);
                meets.insert((a, b), m);
            }
        }
        let closed_orbit_ids = maximal.iter().map(|&i| cones[i].id.clone()).collect();
        Ok(ColoredFan { rank: r, cones, closed_orbit_ids, maximal, meets, complete: OnceLock::new() })
    }

    pub fn cone(&self, id: &str) -> Option<&ColoredCone> {
        self.cones.iter().find(|c| c.id == id)
    }

    pub fn maximal_cones(&self) -> impl Iterator<Item = &ColoredCone> + '_ {
        self.maximal.iter().map(move |&i| &self.cones[i])
    }

    pub fn specs(&self) -> Vec<ConeSpec> {
        self.cones.iter().map(|c| c.spec()).collect()
    }

    /// Intersection of the `a`-th and `b`-th maximal cones.
    pub fn maximal_meet(&self, a: usize, b: usize) -> Cone {
        if a == b {
            return self.cones[self.maximal[a]].cone.clone();
        }
        let key = if a < b { (a, b) } else { (b, a) };
        self.meets[&key].clone()
    }

    /// Completeness: every maximal cone is full-dimensional and the union of
    /// the cones covers the valuation cone.
    pub fn is_complete(&self, v: &Cone) -> bool {
        if let Some((cv, c)) = self.complete.get() {
            if cv.same_as(v) {
                return *c;
            }
        }
        let c = completeness_failures(self, v).is_empty();
        let _ = self.complete.set((v.clone(), c));
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub cone_ids: Vec<String>,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.cone_ids.join(", "), self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FanReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
    pub complete: bool,
    /// Reasons the fan is not complete, if any.
    pub incomplete: Vec<String>,
}

impl FanReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sums `Σ λ_i g_i` as affine expressions in the λ variables (offset, count).
fn combo_rows(gens: &[Vec<BigInt>], offset: usize, nvars: usize, r: usize) -> Vec<Vec<BigRational>> {
    // rows[k] = coefficient vector of coordinate k
    let mut rows = vec![vec![BigRational::zero(); nvars]; r];
    for (i, g) in gens.iter().enumerate() {
        for k in 0..r {
            rows[k][offset + i] = BigRational::from_integer(g[k].clone());
        }
    }
    rows
}

fn apply_functional(f: &[BigInt], rows: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut out = vec![BigRational::zero(); n];
    for (fk, row) in f.iter().zip(rows) {
        if fk.is_zero() {
            continue;
        }
        let fq = BigRational::from_integer(fk.clone());
        for (o, x) in out.iter_mut().zip(row) {
            *o += &fq * x;
        }
    }
    out
}

fn v_constraints(v: &Cone, rows: &[Vec<BigRational>], strict: bool) -> Vec<Constraint> {
    let mut cs = Vec::new();
    for e in v.equalities() {
        cs.push(Constraint::new(apply_functional(e, rows), Relation::Eq));
    }
    for f in v.facets() {
        cs.push(Constraint::new(apply_functional(f, rows), if strict { Relation::Gt } else { Relation::Ge }));
    }
    cs
}

fn positive_vars(offset: usize, count: usize, nvars: usize) -> Vec<Constraint> {
    (0..count)
        .map(|i| {
            let mut c = vec![BigRational::zero(); nvars];
            c[offset + i] = BigRational::from_integer(1.into());
            Constraint::new(c, Relation::Gt)
        })
        .collect()
}

/// relint(c) meets V (or relint(V) when `strict_v`).
pub(crate) fn relint_meets(c: &Cone, v: &Cone, strict_v: bool) -> bool {
    let gens = c.rays();
    let n = gens.len();
    let rows = combo_rows(gens, 0, n, c.rank());
    let mut cs = positive_vars(0, n, n);
    cs.extend(v_constraints(v, &rows, strict_v));
    feasible_simplex(n, &cs).is_some()
}

fn relints_overlap_in(a: &Cone, b: &Cone, v: &Cone) -> bool {
    let (na, nb) = (a.rays().len(), b.rays().len());
    let n = na + nb;
    let r = a.rank();
    let ra = combo_rows(a.rays(), 0, n, r);
    let rb = combo_rows(b.rays(), na, n, r);
    let mut cs = positive_vars(0, na, n);
    cs.extend(positive_vars(na, nb, n));
    for k in 0..r {
        let diff: Vec<BigRational> = ra[k].iter().zip(&rb[k]).map(|(x, y)| x - y).collect();
        cs.push(Constraint::new(diff, Relation::Eq));
    }
    cs.extend(v_constraints(v, &ra, false));
    feasible_simplex(n, &cs).is_some()
}

fn completeness_failures(fan: &ColoredFan, v: &Cone) -> Vec<String> {
    let mut out = Vec::new();
    let maxes: Vec<&ColoredCone> = fan.maximal_cones().collect();
    if !maxes.iter().any(|c| relint_meets(&c.cone, v, false)) {
        out.push("no cone meets the valuation cone".to_string());
    }
    for c in &maxes {
        if !c.cone.is_full_dimensional() {
            out.push(format!("maximal cone {} is not full-dimensional", c.id));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for c in &maxes {
        for (normal, face) in c.cone.facet_cones() {
            if !relint_meets(&face, v, true) {
                continue;
            }
            let shared = maxes.iter().any(|d| d.id != c.id && face.is_face_of(&d.cone));
            if !shared {
                let n: Vec<String> = normal.iter().map(|x| x.to_string()).collect();
                out.push(format!(
                    "facet ({}) of {} meets the interior of the valuation cone and bounds no other cone",
                    n.join(", "),
                    c.id
                ));
            }
        }
    }
    out
}

/// Checks the colored-fan axioms and completeness.
pub fn fan_validate(fan: &ColoredFan, datum: &SphericalDatum) -> FanReport {
    let v = &datum.valuation_cone;
    let mut rep = FanReport::default();
    let mut bad = |ids: Vec<&str>, msg: String| {
        rep.violations.push(Violation { cone_ids: ids.into_iter().map(String::from).collect(), message: msg });
    };
    for c in &fan.cones {
        for d in &c.colors {
            if let Some(col) = datum.color(d) {
                if col.rho.iter().all(|x| x.is_zero()) {
                    bad(vec![&c.id], format!("color {d} has zero image"));
                } else if !c.cone.contains(&col.rho) {
                    bad(vec![&c.id], format!("image of color {d} is not in the cone"));
                }
            }
        }
        if !relint_meets(&c.cone, v, false) {
            bad(vec![&c.id], "relative interior misses the valuation cone".to_string());
        }
        for g in &datum.gstable_rays {
            if c.cone.contains(&g.rho) {
                let ray = Cone::from_int_rays(std::slice::from_ref(&g.rho), fan.rank).expect("nonzero ray");
                if !ray.is_face_of(&c.cone) {
                    bad(vec![&c.id], format!("G-stable ray {} lies in the cone but is not a face", g.label));
                }
            }
        }
    }
    for i in 0..fan.cones.len() {
        for j in i + 1..fan.cones.len() {
            let (a, b) = (&fan.cones[i], &fan.cones[j]);
            if relints_overlap_in(&a.cone, &b.cone, v) {
                bad(vec![&a.id, &b.id], "relative interiors overlap inside the valuation cone".to_string());
                continue;
            }
            let m = a.cone.intersect(&b.cone);
            if !m.is_face_of(&a.cone) || !m.is_face_of(&b.cone) {
                bad(vec![&a.id, &b.id], "intersection is not a face of both cones".to_string());
            }
        }
    }
    for g in &datum.gstable_rays {
        if !fan.cones.iter().any(|c| c.rays.contains(&g.label)) {
            bad(vec![], format!("G-stable divisor {} is not a ray of the fan", g.label));
        }
    }
    for c in &fan.cones {
        if c.cone.contains_line() {
            rep.warnings.push(Violation { cone_ids: vec![c.id.clone()], message: "cone contains a line".to_string() });
        }
    }
    rep.incomplete = completeness_failures(fan, v);
    rep.complete = rep.incomplete.is_empty();
    rep
}

/// Codimension-one common face of two maximal cones, not in the boundary of V.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub face: Cone,
    pub plus_cone: String,
    pub minus_cone: String,
    pub v: CharacterVec,
}

impl Wall {
    pub fn flipped(&self) -> Wall {
        Wall {
            face: self.face.clone(),
            plus_cone: self.minus_cone.clone(),
            minus_cone: self.plus_cone.clone(),
            v: self.v.iter().map(|x| -x).collect(),
        }
    }
}

fn in_boundary_of(face: &Cone, v: &Cone) -> bool {
    if !v.contains_cone(face) {
        return false;
    }
    let p = face.relint_point();
    v.facets().iter().any(|f| dot(f, &p).is_zero())
}

pub fn walls(fan: &ColoredFan, v: &Cone) -> Vec<Wall> {
    let r = fan.rank;
    let maxes: Vec<&ColoredCone> = fan.maximal_cones().collect();
    let mut out = Vec::new();
    for a in 0..maxes.len() {
        for b in a + 1..maxes.len() {
            let face = fan.maximal_meet(a, b);
            if r == 0 || face.dim() + 1 != r || face.equalities().len() != 1 || in_boundary_of(&face, v) {
                continue;
            }
            let w = sign_normalize(&face.equalities()[0]);
            let pa = dot(&w, &maxes[a].cone.relint_point());
            let pb = dot(&w, &maxes[b].cone.relint_point());
            let (plus, minus, w) = if pa.is_positive() && !pb.is_positive() {
                (a, b, w)
            } else if (pb.is_positive() && !pa.is_positive()) || pa.is_negative() {
                (b, a, w)
            } else {
                continue;
            };
            out.push(Wall { face, plus_cone: maxes[plus].id.clone(), minus_cone: maxes[minus].id.clone(), v: w });
        }
    }
    out
}

/// One character per maximal cone.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PLFunction {
    pub per_cone: BTreeMap<String, CharacterVec>,
}

impl PLFunction {
    pub fn get(&self, id: &str) -> Option<&CharacterVec> {
        self.per_cone.get(id)
    }

    /// Adds the same character to every cone.
    pub fn shifted(&self, chi: &[BigInt]) -> PLFunction {
        PLFunction {
            per_cone: self
                .per_cone
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().zip(chi).map(|(a, b)| a + b).collect()))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Convexity {
    NotConvex,
    Convex,
    StrictlyConvex,
}

pub fn pl_convexity(fan: &ColoredFan, l: &PLFunction, _v: &Cone) -> Result<Convexity> {
    let maxes: Vec<&ColoredCone> = fan.maximal_cones().collect();
    let mut chis = Vec::new();
    for c in &maxes {
        let chi = l.get(&c.id).ok_or_else(|| Error::invalid(format!("no character for cone {}", c.id)))?;
        if chi.len() != fan.rank {
            return Err(Error::RankMismatch { expected: fan.rank, got: chi.len() });
        }
        chis.push(chi);
    }
    for a in 0..maxes.len() {
        for b in a + 1..maxes.len() {
            let meet = fan.maximal_meet(a, b);
            let diff: Vec<BigInt> = chis[a].iter().zip(chis[b]).map(|(x, y)| x - y).collect();
            if meet.rays().iter().any(|u| !dot(&diff, u).is_zero()) {
                return Err(Error::NotPiecewiseLinear(format!(
                    "characters of {} and {} differ on their common face",
                    maxes[a].id, maxes[b].id
                )));
            }
        }
    }
    let mut strict = true;
    for (y, cy) in maxes.iter().enumerate() {
        for z in 0..maxes.len() {
            if z == y {
                continue;
            }
            let diff: Vec<BigInt> = chis[y].iter().zip(chis[z]).map(|(x, w)| x - w).collect();
            for u in cy.cone.rays() {
                let val = dot(&diff, u);
                if val.is_negative() {
                    return Ok(Convexity::NotConvex);
                }
                if val.is_zero() && !maxes[z].cone.contains(u) {
                    strict = false;
                }
            }
        }
    }
    Ok(if strict { Convexity::StrictlyConvex } else { Convexity::Convex })
}
