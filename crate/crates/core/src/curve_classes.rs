//! B-stable curve classes: wall classes `C_μ` and color classes `C_{D,Y}`,
//! their pairing with Cartier divisors, and weight formulas for degrees.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::divisor_theory::{cartier_data, divisor_set, orbit_divisors, DivisorZ, SphericalDatum};
use crate::error::{Error, Result};
use crate::lattice_geom::matrix::dot;
use crate::lattice_geom::{walls, CharacterVec, ColoredFan, PLFunction, Wall};
use crate::root_weyl::RootSystemDatum;

#[derive(Clone, Debug)]
pub enum CurveKind {
    Wall(Wall),
    ColorOrbit { color: String, orbit: String },
}

#[derive(Clone, Debug)]
pub struct CurveClass {
    pub kind: CurveKind,
}

impl CurveClass {
    pub fn label(&self) -> String {
        match &self.kind {
            CurveKind::Wall(w) => format!("C[{}|{}]", w.plus_cone, w.minus_cone),
            CurveKind::ColorOrbit { color, orbit } => format!("C[{color},{orbit}]"),
        }
    }

    /// Intersection number with a Cartier divisor.
    pub fn eval(&self, datum: &SphericalDatum, fan: &ColoredFan, delta: &DivisorZ) -> Result<BigRational> {
        match &self.kind {
            CurveKind::Wall(w) => wall_class_eval(datum, fan, w, delta),
            CurveKind::ColorOrbit { color, orbit } => color_orbit_class_eval(datum, fan, color, orbit, delta),
        }
    }

    fn eval_with(&self, datum: &SphericalDatum, delta: &DivisorZ, l: &PLFunction) -> BigRational {
        match &self.kind {
            CurveKind::Wall(w) => wall_value(w, l),
            CurveKind::ColorOrbit { color, orbit } => color_value(datum, color, &l.per_cone[orbit], delta),
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn require_complete(datum: &SphericalDatum, fan: &ColoredFan) -> Result<()> {
    if fan.is_complete(&datum.valuation_cone) {
        Ok(())
    } else {
        Err(Error::NotComplete)
    }
}

fn wall_value(w: &Wall, l: &PLFunction) -> BigRational {
    let plus = &l.per_cone[&w.plus_cone];
    let minus = &l.per_cone[&w.minus_cone];
    let diff: Vec<BigInt> = plus.iter().zip(minus).map(|(a, b)| a - b).collect();
    let k = w.v.iter().position(|x| !x.is_zero()).expect("wall normal is nonzero");
    BigRational::new(diff[k].clone(), w.v[k].clone())
}

fn color_value(datum: &SphericalDatum, color: &str, chi: &[BigInt], delta: &DivisorZ) -> BigRational {
    let rho = datum.rho(color).expect("known color");
    BigRational::from_integer(delta.get(color) - dot(rho, chi))
}

/// `(χ₊ − χ₋) / v` for the wall between `plus_cone` and `minus_cone`.
pub fn wall_class_eval(datum: &SphericalDatum, fan: &ColoredFan, w: &Wall, delta: &DivisorZ) -> Result<BigRational> {
    require_complete(datum, fan)?;
    let l = cartier_data(datum, fan, delta)?;
    Ok(wall_value(w, &l))
}

/// `n_D − ⟨ρ(ν_D), χ_Y⟩` for a color `D` not in `Δ_Y`.
pub fn color_orbit_class_eval(
    datum: &SphericalDatum,
    fan: &ColoredFan,
    color: &str,
    orbit: &str,
    delta: &DivisorZ,
) -> Result<BigRational> {
    check_pair(datum, fan, color, orbit)?;
    require_complete(datum, fan)?;
    let l = cartier_data(datum, fan, delta)?;
    Ok(color_value(datum, color, &l.per_cone[orbit], delta))
}

fn check_pair(datum: &SphericalDatum, fan: &ColoredFan, color: &str, orbit: &str) -> Result<()> {
    if !datum.is_color(color) {
        return Err(Error::unknown("color", color));
    }
    if !fan.closed_orbit_ids.iter().any(|c| c == orbit) {
        return Err(Error::unknown("closed orbit", orbit));
    }
    if orbit_divisors(datum, fan, orbit).iter().any(|d| d == color) {
        return Err(Error::UndefinedClass(format!("{color} contains {orbit}")));
    }
    Ok(())
}

pub fn color_orbit_class(datum: &SphericalDatum, fan: &ColoredFan, color: &str, orbit: &str) -> Result<CurveClass> {
    check_pair(datum, fan, color, orbit)?;
    Ok(CurveClass { kind: CurveKind::ColorOrbit { color: color.to_string(), orbit: orbit.to_string() } })
}

/// Generators of the cone of effective curves.
#[derive(Clone, Debug)]
pub struct EffectiveCone {
    pub generators: Vec<CurveClass>,
    /// One representative `C_{D,Y}` per color in `Δ̊`, a basis of the quotient by wall classes.
    pub quotient_basis: Vec<(String, CurveClass)>,
}

pub fn effective_cone_generators(datum: &SphericalDatum, fan: &ColoredFan) -> Result<EffectiveCone> {
    require_complete(datum, fan)?;
    let mut generators: Vec<CurveClass> =
        walls(fan, &datum.valuation_cone).into_iter().map(|w| CurveClass { kind: CurveKind::Wall(w) }).collect();
    for y in &fan.closed_orbit_ids {
        let inside = orbit_divisors(datum, fan, y);
        for c in &datum.colors {
            if !inside.contains(&c.id) {
                generators.push(CurveClass { kind: CurveKind::ColorOrbit { color: c.id.clone(), orbit: y.clone() } });
            }
        }
    }
    let first = fan.closed_orbit_ids.first().cloned().unwrap_or_default();
    let quotient_basis = divisor_set(datum, fan)
        .interior_colors
        .into_iter()
        .map(|d| {
            let c = CurveClass { kind: CurveKind::ColorOrbit { color: d.clone(), orbit: first.clone() } };
            (d, c)
        })
        .collect();
    Ok(EffectiveCone { generators, quotient_basis })
}

/// Nonnegativity on every generator of the effective cone.
pub fn nef_via_curves(datum: &SphericalDatum, fan: &ColoredFan, delta: &DivisorZ) -> Result<bool> {
    let cone = effective_cone_generators(datum, fan)?;
    let l = cartier_data(datum, fan, delta)?;
    Ok(cone.generators.iter().all(|c| !c.eval_with(datum, delta, &l).is_negative()))
}

/// Table of intersection numbers, rows are curve classes, columns are divisors.
pub fn intersection_table(
    datum: &SphericalDatum,
    fan: &ColoredFan,
    divisors: &[(String, DivisorZ)],
) -> Result<(Vec<CurveClass>, Vec<Vec<BigRational>>)> {
    let cone = effective_cone_generators(datum, fan)?;
    let ls: Vec<PLFunction> =
        divisors.iter().map(|(_, d)| cartier_data(datum, fan, d)).collect::<Result<Vec<_>>>()?;
    let rows = cone
        .generators
        .iter()
        .map(|c| divisors.iter().zip(&ls).map(|((_, d), l)| c.eval_with(datum, d, l)).collect())
        .collect();
    Ok((cone.generators, rows))
}

/// Fixed-point weights `L_x`, `L_y` at the ends of a curve acted on through `χ`.
#[derive(Clone, Debug)]
pub struct WeightDegreeInput {
    pub l_x: CharacterVec,
    pub l_y: CharacterVec,
    pub chi: CharacterVec,
}

/// `(L_x − L_y) / χ`.
pub fn degree_from_weights(inp: &WeightDegreeInput) -> Result<BigRational> {
    let n = inp.chi.len();
    if inp.l_x.len() != n || inp.l_y.len() != n {
        return Err(Error::RankMismatch { expected: n, got: inp.l_x.len().max(inp.l_y.len()) });
    }
    let k = inp.chi.iter().position(|x| !x.is_zero()).ok_or(Error::NotProportional)?;
    let diff: Vec<BigInt> = inp.l_x.iter().zip(&inp.l_y).map(|(a, b)| a - b).collect();
    let c = BigRational::new(diff[k].clone(), inp.chi[k].clone());
    for (d, x) in diff.iter().zip(&inp.chi) {
        if BigRational::from_integer(d.clone()) != &c * BigRational::from_integer(x.clone()) {
            return Err(Error::NotProportional);
        }
    }
    Ok(c)
}

/// `⟨α^∨, L_x⟩` for `L_x` in ambient coordinates; `alpha` is 0-based.
pub fn degree_type_u(rs: &RootSystemDatum, alpha: usize, l_x: &[BigRational]) -> Result<BigInt> {
    if alpha >= rs.rank {
        return Err(Error::invalid(format!("simple root {} outside {}", alpha + 1, rs)));
    }
    if l_x.len() != rs.ambient_dim() {
        return Err(Error::RankMismatch { expected: rs.ambient_dim(), got: l_x.len() });
    }
    let p = rs.coroot_pairing(alpha, l_x);
    if !p.is_integer() {
        return Err(Error::invalid("weight is not integral against the coroot"));
    }
    Ok(p.to_integer())
}
