//! Spherical data, B-stable divisors, class and Picard groups, Cartier data,
//! positivity, factoriality, affineness and quasi-projectivity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice_geom::feasibility::{feasible_fm, feasible_simplex, Constraint, Relation};
use crate::lattice_geom::matrix::{dot, int_kernel, int_solve, smith, Cokernel, IntMat, LatticeQuotient};
use crate::lattice_geom::{
    pl_convexity, primitive, walls, CharacterVec, ColoredFan, Cone, Convexity, CovectorZ, PLFunction,
};
use crate::root_weyl::RootSystemDatum;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RaiseType {
    /// Raised with a type U edge; `alpha` and `levi` index simple roots (0-based).
    U { alpha: usize, levi: Vec<usize> },
    T,
    N,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorRecord {
    pub id: String,
    pub rho: CovectorZ,
    pub raise_type: RaiseType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GStableRay {
    pub label: String,
    /// Primitive.
    pub rho: CovectorZ,
}

#[derive(Clone, Debug)]
pub struct SphericalDatum {
    pub rank: usize,
    pub valuation_cone: Cone,
    pub colors: Vec<ColorRecord>,
    pub gstable_rays: Vec<GStableRay>,
    pub root_system: Option<RootSystemDatum>,
}

impl SphericalDatum {
    /// Validates ids, ranks and raising data; G-stable rays are made primitive.
    pub fn new(
        rank: usize,
        valuation_cone: Cone,
        colors: Vec<ColorRecord>,
        gstable_rays: Vec<GStableRay>,
        root_system: Option<RootSystemDatum>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::invalid("rank must be at least 1"));
        }
        if valuation_cone.rank() != rank {
            return Err(Error::RankMismatch { expected: rank, got: valuation_cone.rank() });
        }
        let mut ids = BTreeSet::new();
        for c in &colors {
            if !ids.insert(c.id.clone()) {
                return Err(Error::invalid(format!("duplicate divisor id '{}'", c.id)));
            }
            if c.rho.len() != rank {
                return Err(Error::RankMismatch { expected: rank, got: c.rho.len() });
            }
            if c.rho.iter().all(|x| x.is_zero()) {
                return Err(Error::invalid(format!("color '{}' has zero image", c.id)));
            }
            if let RaiseType::U { alpha, levi } = &c.raise_type {
                let Some(rs) = &root_system else {
                    return Err(Error::invalid(format!("color '{}' of type U needs a root system", c.id)));
                };
                if *alpha >= rs.rank || levi.iter().any(|&i| i >= rs.rank) {
                    return Err(Error::invalid(format!("color '{}' references a simple root outside {}", c.id, rs)));
                }
                if levi.contains(alpha) {
                    return Err(Error::invalid(format!("color '{}': α lies in I", c.id)));
                }
            }
        }
        let mut rays = Vec::new();
        for g in gstable_rays {
            if !ids.insert(g.label.clone()) {
                return Err(Error::invalid(format!("duplicate divisor id '{}'", g.label)));
            }
            if g.rho.len() != rank {
                return Err(Error::RankMismatch { expected: rank, got: g.rho.len() });
            }
            let rho = primitive(&g.rho).map_err(|_| Error::invalid(format!("G-stable ray '{}' is zero", g.label)))?;
            if !valuation_cone.contains(&rho) {
                return Err(Error::invalid(format!("G-stable ray '{}' is not in the valuation cone", g.label)));
            }
            rays.push(GStableRay { label: g.label, rho });
        }
        Ok(SphericalDatum { rank, valuation_cone, colors, gstable_rays: rays, root_system })
    }

    /// Toric datum: valuation cone the whole space, no colors.
    pub fn toric(rank: usize, rays: Vec<(String, CovectorZ)>) -> Result<Self> {
        let rays = rays.into_iter().map(|(label, rho)| GStableRay { label, rho }).collect();
        SphericalDatum::new(rank, Cone::full(rank), Vec::new(), rays, None)
    }

    pub fn color(&self, id: &str) -> Option<&ColorRecord> {
        self.colors.iter().find(|c| c.id == id)
    }

    pub fn gstable_ray(&self, label: &str) -> Option<&GStableRay> {
        self.gstable_rays.iter().find(|g| g.label == label)
    }

    pub fn is_color(&self, id: &str) -> bool {
        self.color(id).is_some()
    }

    pub fn rho(&self, id: &str) -> Option<&CovectorZ> {
        self.color(id).map(|c| &c.rho).or_else(|| self.gstable_ray(id).map(|g| &g.rho))
    }

    /// Colors first, then G-stable divisors, in input order.
    pub fn divisor_ids(&self) -> Vec<String> {
        self.colors.iter().map(|c| c.id.clone()).chain(self.gstable_rays.iter().map(|g| g.label.clone())).collect()
    }

    /// `div(χ) = Σ ⟨ρ(ν_D), χ⟩ D`.
    pub fn principal_divisor(&self, chi: &[BigInt]) -> DivisorZ {
        let mut d = DivisorZ::zero();
        for id in self.divisor_ids() {
            d.set(&id, dot(self.rho(&id).expect("known id"), chi));
        }
        d
    }

    pub fn check_divisor(&self, d: &DivisorZ) -> Result<()> {
        for id in d.coeffs.keys() {
            if self.rho(id).is_none() {
                return Err(Error::unknown("divisor", id.clone()));
            }
        }
        Ok(())
    }
}

/// Integer combination of B-stable prime divisors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DivisorZ {
    pub coeffs: BTreeMap<String, BigInt>,
}

impl DivisorZ {
    pub fn zero() -> Self {
        DivisorZ::default()
    }

    pub fn from_pairs(pairs: &[(&str, i64)]) -> Self {
        let mut d = DivisorZ::zero();
        for (k, v) in pairs {
            d.add_to(k, &BigInt::from(*v));
        }
        d
    }

    pub fn get(&self, id: &str) -> BigInt {
        self.coeffs.get(id).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn set(&mut self, id: &str, v: BigInt) {
        if v.is_zero() {
            self.coeffs.remove(id);
        } else {
            self.coeffs.insert(id.to_string(), v);
        }
    }

    pub fn add_to(&mut self, id: &str, v: &BigInt) {
        let n = self.get(id) + v;
        self.set(id, n);
    }

    pub fn add(&self, other: &DivisorZ) -> DivisorZ {
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_to(k, v);
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> DivisorZ {
        let mut out = DivisorZ::zero();
        for (id, v) in &self.coeffs {
            out.set(id, v * k);
        }
        out
    }

    pub fn sub(&self, other: &DivisorZ) -> DivisorZ {
        self.add(&other.scale(&-BigInt::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient vector in the given id order.
    pub fn vector(&self, ids: &[String]) -> Vec<BigInt> {
        ids.iter().map(|id| self.get(id)).collect()
    }

    /// Renders as `2*D1 + D2 - E` in the given order (other ids appended).
    pub fn render(&self, order: &[String]) -> String {
        let mut keys: Vec<&String> = order.iter().filter(|k| self.coeffs.contains_key(*k)).collect();
        for k in self.coeffs.keys() {
            if !order.contains(k) {
                keys.push(k);
            }
        }
        if keys.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, k) in keys.iter().enumerate() {
            let c = &self.coeffs[*k];
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if a.is_one() {
                out.push_str(k);
            } else {
                out.push_str(&format!("{a}*{k}"));
            }
        }
        out
    }
}

impl fmt::Display for DivisorZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

/// Finitely generated abelian group with class coordinates of named divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FGAbelian {
    pub free_rank: usize,
    /// Elementary divisors greater than one, each dividing the next.
    pub torsion: Vec<BigInt>,
    /// Free coordinates followed by torsion residues.
    pub class_of: BTreeMap<String, Vec<BigInt>>,
}

impl FGAbelian {
    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

impl fmt::Display for FGAbelian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" ⊕ "))
        }
    }
}

/// The partition of B-stable prime divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorSet {
    pub colors: Vec<String>,
    pub gstable: Vec<String>,
    /// Colors containing no G-orbit.
    pub interior_colors: Vec<String>,
    /// `𝒟_Y(X)` for every listed cone.
    pub per_orbit: BTreeMap<String, Vec<String>>,
    pub toroidal: bool,
}

/// Divisors whose image spans or colors the cone of `cone_id`.
pub(crate) fn orbit_divisors(datum: &SphericalDatum, fan: &ColoredFan, cone_id: &str) -> Vec<String> {
    let c = fan.cone(cone_id).expect("known cone");
    let mut out: Vec<String> = datum.colors.iter().filter(|d| c.colors.contains(&d.id)).map(|d| d.id.clone()).collect();
    out.extend(datum.gstable_rays.iter().filter(|g| c.cone.contains(&g.rho)).map(|g| g.label.clone()));
    out
}

pub fn divisor_set(datum: &SphericalDatum, fan: &ColoredFan) -> DivisorSet {
    let used: BTreeSet<&String> = fan.cones.iter().flat_map(|c| c.colors.iter()).collect();
    let colors: Vec<String> = datum.colors.iter().map(|c| c.id.clone()).collect();
    let interior: Vec<String> = colors.iter().filter(|c| !used.contains(c)).cloned().collect();
    let per_orbit = fan.cones.iter().map(|c| (c.id.clone(), orbit_divisors(datum, fan, &c.id))).collect();
    DivisorSet {
        toroidal: interior.len() == colors.len(),
        colors,
        gstable: datum.gstable_rays.iter().map(|g| g.label.clone()).collect(),
        interior_colors: interior,
        per_orbit,
    }
}

fn rho_matrix(datum: &SphericalDatum, ids: &[String]) -> IntMat {
    let rows: Vec<Vec<BigInt>> = ids.iter().map(|id| datum.rho(id).expect("known id").clone()).collect();
    IntMat::from_rows(&rows, datum.rank)
}

/// `Cl(X) = coker(Λ → Z𝒟(X))`.
pub fn class_group(datum: &SphericalDatum) -> (FGAbelian, ClassMap) {
    let ids = datum.divisor_ids();
    let coker = Cokernel::of(&rho_matrix(datum, &ids));
    let mut class_of = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        let mut e = vec![BigInt::zero(); ids.len()];
        e[i] = BigInt::one();
        class_of.insert(id.clone(), coker.class_of(&e));
    }
    let g = FGAbelian { free_rank: coker.free_rank, torsion: coker.torsion.clone(), class_of };
    (g, ClassMap { ids, coker })
}

/// Class map `Z𝒟(X) → Cl(X)`.
#[derive(Clone, Debug)]
pub struct ClassMap {
    ids: Vec<String>,
    coker: Cokernel,
}

impl ClassMap {
    pub fn class_of(&self, d: &DivisorZ) -> Vec<BigInt> {
        self.coker.class_of(&d.vector(&self.ids))
    }

    pub fn linearly_equivalent(&self, a: &DivisorZ, b: &DivisorZ) -> bool {
        self.coker.is_zero_class(&a.sub(b).vector(&self.ids))
    }
}

/// Local characters `χ_Y` with `⟨ρ(ν_D), χ_Y⟩ = n_D` for `D ∈ 𝒟_Y`, one per
/// maximal cone; fails with the first orbit where no integral solution exists.
pub fn cartier_data(datum: &SphericalDatum, fan: &ColoredFan, delta: &DivisorZ) -> Result<PLFunction> {
    datum.check_divisor(delta)?;
    let mut l = PLFunction::default();
    for c in fan.maximal_cones() {
        let ids = orbit_divisors(datum, fan, &c.id);
        let chi = if ids.is_empty() {
            vec![BigInt::zero(); datum.rank]
        } else {
            let rhs: Vec<BigInt> = ids.iter().map(|id| delta.get(id)).collect();
            int_solve(&rho_matrix(datum, &ids), &rhs).ok_or_else(|| Error::NotCartier(c.id.clone()))?
        };
        l.per_cone.insert(c.id.clone(), chi);
    }
    Ok(l)
}

pub fn is_cartier(datum: &SphericalDatum, fan: &ColoredFan, delta: &DivisorZ) -> Result<bool> {
    match cartier_data(datum, fan, delta) {
        Ok(_) => Ok(true),
        Err(Error::NotCartier(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Picard group with the data needed to compute classes of Cartier divisors.
#[derive(Clone, Debug)]
pub struct PicardGroup {
    pub group: FGAbelian,
    /// Basis of compatible families `(χ_Y)` (rows, blocks in maximal-cone order).
    pl_basis: Vec<Vec<BigInt>>,
    interior: Vec<String>,
    block_ids: Vec<String>,
    rank: usize,
    coker: Cokernel,
}

impl PicardGroup {
    /// Class of a Cartier divisor.
    pub fn class_of(&self, datum: &SphericalDatum, fan: &ColoredFan, delta: &DivisorZ) -> Result<Vec<BigInt>> {
        let l = cartier_data(datum, fan, delta)?;
        let mut fam = Vec::new();
        for id in &self.block_ids {
            fam.extend(l.per_cone[id].iter().cloned());
        }
        let coords = if self.pl_basis.is_empty() {
            Vec::new()
        } else {
            let bt = IntMat::from_rows(&self.pl_basis, self.block_ids.len() * self.rank).transpose();
            int_solve(&bt, &fam).ok_or_else(|| {
                Error::Precondition("local characters do not glue to a piecewise linear function".to_string())
            })?
        };
        let mut v = coords;
        v.extend(self.interior.iter().map(|d| delta.get(d)));
        Ok(self.coker.class_of(&v))
    }
}

/// Compatible families `(χ_Y)` across maximal cones, as a lattice basis.
fn pl_lattice(fan: &ColoredFan) -> Vec<Vec<BigInt>> {
    let r = fan.rank;
    let k = fan.closed_orbit_ids.len();
    let mut rows = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for u in fan.maximal_meet(a, b).rays() {
                let mut row = vec![BigInt::zero(); k * r];
                for i in 0..r {
                    row[a * r + i] = u[i].clone();
                    row[b * r + i] = -u[i].clone();
                }
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        let mut basis = Vec::new();
        for i in 0..k * r {
            let mut e = vec![BigInt::zero(); k * r];
            e[i] = BigInt::one();
            basis.push(e);
        }
        return basis;
    }
    int_kernel(&IntMat::from_rows(&rows, k * r))
}

/// `Pic(X)` assembled from `C_X^⊥ → ZΔ̊ → Pic → PL/L → 0`:
/// the quotient of `PL ⊕ ZΔ̊` by `⊕ C_Y^⊥` and the principal divisors.
pub fn picard_group(datum: &SphericalDatum, fan: &ColoredFan) -> Result<PicardGroup> {
    let r = datum.rank;
    let block_ids: Vec<String> = fan.closed_orbit_ids.clone();
    let k = block_ids.len();
    let interior = divisor_set(datum, fan).interior_colors;
    let m = interior.len();
    let pl_basis = pl_lattice(fan);
    let p = pl_basis.len();
    let bt = if p == 0 { None } else { Some(IntMat::from_rows(&pl_basis, k * r).transpose()) };
    let pl_coords = |fam: &[BigInt]| -> Result<Vec<BigInt>> {
        match &bt {
            None => Ok(Vec::new()),
            Some(bt) => int_solve(bt, fam).ok_or_else(|| Error::Precondition("family is not piecewise linear".into())),
        }
    };
    let mut rels: Vec<Vec<BigInt>> = Vec::new();
    for (a, c) in fan.maximal_cones().enumerate() {
        for e in c.cone.equalities() {
            let mut fam = vec![BigInt::zero(); k * r];
            for i in 0..r {
                fam[a * r + i] = e[i].clone();
            }
            let mut v = pl_coords(&fam)?;
            v.extend(std::iter::repeat_n(BigInt::zero(), m));
            rels.push(v);
        }
    }
    for i in 0..r {
        let mut chi = vec![BigInt::zero(); r];
        chi[i] = BigInt::one();
        let fam: Vec<BigInt> = (0..k).flat_map(|_| chi.clone()).collect();
        let mut v = pl_coords(&fam)?;
        v.extend(interior.iter().map(|d| dot(datum.rho(d).expect("known color"), &chi)));
        rels.push(v);
    }
    let rel_mat = if rels.is_empty() { IntMat::zeros(p + m, 0) } else { IntMat::from_rows(&rels, p + m).transpose() };
    let coker = Cokernel::of(&rel_mat);
    let mut pic = PicardGroup {
        group: FGAbelian { free_rank: coker.free_rank, torsion: coker.torsion.clone(), class_of: BTreeMap::new() },
        pl_basis,
        interior,
        block_ids,
        rank: r,
        coker,
    };
    for id in datum.divisor_ids() {
        let d = DivisorZ::from_pairs(&[(id.as_str(), 1)]);
        if let Ok(c) = pic.class_of(datum, fan, &d) {
            pic.group.class_of.insert(id, c);
        }
    }
    Ok(pic)
}

/// `Pic(X)` as Cartier divisors modulo principal divisors, computed directly
/// from the local solvability conditions.
pub fn picard_group_direct(datum: &SphericalDatum, fan: &ColoredFan) -> (FGAbelian, LatticeQuotient) {
    let ids = datum.divisor_ids();
    let n = ids.len();
    let r = datum.rank;
    let maxes: Vec<String> = fan.closed_orbit_ids.clone();
    let nvars = n + maxes.len() * r;
    let mut rows = Vec::new();
    for (a, cid) in maxes.iter().enumerate() {
        for d in orbit_divisors(datum, fan, cid) {
            let j = ids.iter().position(|x| *x == d).expect("known id");
            let mut row = vec![BigInt::zero(); nvars];
            row[j] = -BigInt::one();
            for (i, x) in datum.rho(&d).expect("known id").iter().enumerate() {
                row[n + a * r + i] = x.clone();
            }
            rows.push(row);
        }
    }
    let gens: Vec<Vec<BigInt>> = if rows.is_empty() {
        (0..n)
            .map(|j| {
                let mut e = vec![BigInt::zero(); n];
                e[j] = BigInt::one();
                e
            })
            .collect()
    } else {
        int_kernel(&IntMat::from_rows(&rows, nvars)).into_iter().map(|v| v[..n].to_vec()).collect()
    };
    let gens: Vec<Vec<BigInt>> = gens.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
    let rels: Vec<Vec<BigInt>> = (0..r)
        .map(|i| {
            let mut chi = vec![BigInt::zero(); r];
            chi[i] = BigInt::one();
            datum.principal_divisor(&chi).vector(&ids)
        })
        .collect();
    let q = LatticeQuotient::new(&gens, &rels, n).expect("principal divisors are Cartier");
    let mut class_of = BTreeMap::new();
    for (j, id) in ids.iter().enumerate() {
        let mut e = vec![BigInt::zero(); n];
        e[j] = BigInt::one();
        if let Some(c) = q.class_of(&e) {
            class_of.insert(id.clone(), c);
        }
    }
    (FGAbelian { free_rank: q.coker.free_rank, torsion: q.coker.torsion.clone(), class_of }, q)
}

fn require_complete(datum: &SphericalDatum, fan: &ColoredFan) -> Result<()> {
    if fan.is_complete(&datum.valuation_cone) {
        Ok(())
    } else {
        Err(Error::NotComplete)
    }
}

fn positivity(datum: &SphericalDatum, fan: &ColoredFan, delta: &DivisorZ, strict: bool) -> Result<bool> {
    require_complete(datum, fan)?;
    let l = cartier_data(datum, fan, delta)?;
    let conv = pl_convexity(fan, &l, &datum.valuation_cone)?;
    let need = if strict { Convexity::StrictlyConvex } else { Convexity::Convex };
    if conv < need {
        return Ok(false);
    }
    let interior = divisor_set(datum, fan).interior_colors;
    for chi in l.per_cone.values() {
        for d in &interior {
            let lhs = dot(datum.rho(d).expect("known color"), chi);
            let n = delta.get(d);
            if (strict && lhs >= n) || (!strict && lhs > n) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Global generation on a complete embedding.
pub fn is_globally_generated(datum: &SphericalDatum, fan: &ColoredFan, delta: &DivisorZ) -> Result<bool> {
    positivity(datum, fan, delta, false)
}

/// Ampleness on a complete embedding.
pub fn is_ample(datum: &SphericalDatum, fan: &ColoredFan, delta: &DivisorZ) -> Result<bool> {
    positivity(datum, fan, delta, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Factoriality {
    Neither,
    QFactorial,
    Factorial,
}

impl fmt::Display for Factoriality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Factoriality::Neither => "neither",
            Factoriality::QFactorial => "Q-factorial",
            Factoriality::Factorial => "factorial",
        })
    }
}

/// Verdict plus the first orbit below the next better verdict.
pub fn factoriality(datum: &SphericalDatum, fan: &ColoredFan) -> (Factoriality, Option<String>) {
    let mut verdict = Factoriality::Factorial;
    let mut witness = None;
    for c in fan.maximal_cones() {
        let ids = orbit_divisors(datum, fan, &c.id);
        if ids.is_empty() {
            continue;
        }
        let s = smith(&rho_matrix(datum, &ids));
        let local = if s.rank() < ids.len() {
            Factoriality::Neither
        } else if s.diag.iter().all(|d| d.is_one()) {
            Factoriality::Factorial
        } else {
            Factoriality::QFactorial
        };
        if local < verdict {
            verdict = local;
            witness = Some(c.id.clone());
        }
    }
    (verdict, witness)
}

pub fn is_smooth_toroidal(datum: &SphericalDatum, fan: &ColoredFan) -> Result<bool> {
    if !divisor_set(datum, fan).toroidal {
        return Err(Error::NotToroidal);
    }
    Ok(factoriality(datum, fan).0 == Factoriality::Factorial)
}

fn q(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// Simple and some `χ` with `χ ≤ 0` on V, `χ = 0` on `C_X`, `χ > 0` on `ρ(Δ̊)`.
pub fn is_affine_criterion(datum: &SphericalDatum, fan: &ColoredFan) -> bool {
    affine_witness(datum, fan).is_some()
}

pub fn affine_witness(datum: &SphericalDatum, fan: &ColoredFan) -> Option<CharacterVec> {
    let maxes: Vec<_> = fan.maximal_cones().collect();
    if maxes.len() != 1 {
        return None;
    }
    let mut cs = Vec::new();
    for u in datum.valuation_cone.rays() {
        cs.push(Constraint::new(u.iter().map(|x| -q(x)).collect(), Relation::Ge));
    }
    for u in maxes[0].cone.rays() {
        cs.push(Constraint::new(u.iter().map(q).collect(), Relation::Eq));
    }
    for d in divisor_set(datum, fan).interior_colors {
        cs.push(Constraint::new(datum.rho(&d).expect("known color").iter().map(q).collect(), Relation::Gt));
    }
    let x = feasible_fm(datum.rank, &cs)?;
    let l = x.iter().fold(BigInt::one(), |acc, v| num_integer::Integer::lcm(&acc, v.denom()));
    Some(x.iter().map(|v| (v * q(&l)).to_integer()).collect())
}

/// Existence of a strictly convex rational piecewise linear function on `C_X`.
pub fn is_quasi_projective(datum: &SphericalDatum, fan: &ColoredFan) -> bool {
    let maxes: Vec<_> = fan.maximal_cones().collect();
    let k = maxes.len();
    if k <= 1 {
        return true;
    }
    let r = datum.rank;
    let n = k * r;
    let diff = |a: usize, b: usize, u: &[BigInt]| -> Vec<BigRational> {
        let mut c = vec![BigRational::zero(); n];
        for i in 0..r {
            c[a * r + i] = q(&u[i]);
            c[b * r + i] = -q(&u[i]);
        }
        c
    };
    let mut cs = Vec::new();
    let full_support = datum.valuation_cone.dim() == r
        && datum.valuation_cone.facets().is_empty()
        && fan.is_complete(&datum.valuation_cone);
    if full_support {
        let idx: BTreeMap<&str, usize> = maxes.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
        for w in walls(fan, &datum.valuation_cone) {
            let (a, b) = (idx[w.plus_cone.as_str()], idx[w.minus_cone.as_str()]);
            for u in w.face.rays() {
                cs.push(Constraint::new(diff(a, b, u), Relation::Eq));
            }
            for u in maxes[a].cone.rays().iter().filter(|u| !w.face.contains(u)) {
                cs.push(Constraint::new(diff(a, b, u), Relation::Gt));
            }
        }
    } else {
        for a in 0..k {
            for b in 0..k {
                if a == b {
                    continue;
                }
                if a < b {
                    for u in fan.maximal_meet(a, b).rays() {
                        cs.push(Constraint::new(diff(a, b, u), Relation::Eq));
                    }
                }
                for u in maxes[a].cone.rays() {
                    let rel = if maxes[b].cone.contains(u) { Relation::Ge } else { Relation::Gt };
                    cs.push(Constraint::new(diff(a, b, u), rel));
                }
            }
        }
    }
    feasible_simplex(n, &cs).is_some()
}

/// `χ ↦ ⟨ρ, χ⟩` checks used by tests and reports.
pub fn pairing(rho: &[BigInt], chi: &[BigInt]) -> BigInt {
    dot(rho, chi)
}
