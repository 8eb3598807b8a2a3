//! B-stable anticanonical divisors: the explicit formula on toroidal complete
//! embeddings and pushforward along a user-supplied toroidal resolution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::divisor_theory::{
    divisor_set, is_smooth_toroidal, ColorRecord, DivisorZ, GStableRay, RaiseType, SphericalDatum,
};
use crate::error::{Error, Result};
use crate::lattice_geom::{ColoredFan, ConeSpec};

/// Coefficient of a color in `−K_X`.
pub fn color_coefficient(datum: &SphericalDatum, c: &ColorRecord) -> Result<BigInt> {
    match &c.raise_type {
        RaiseType::T | RaiseType::N => Ok(BigInt::one()),
        RaiseType::U { alpha, levi } => {
            let rs = datum
                .root_system
                .as_ref()
                .ok_or_else(|| Error::invalid(format!("color '{}' of type U needs a root system", c.id)))?;
            Ok(BigInt::from(2) * rs.rho_pairing(*alpha, levi)?)
        }
    }
}

/// `−K_X` on a toroidal complete embedding.
pub fn anticanonical_toroidal(datum: &SphericalDatum, fan: &ColoredFan) -> Result<DivisorZ> {
    if !divisor_set(datum, fan).toroidal {
        return Err(Error::NotToroidal);
    }
    if !fan.is_complete(&datum.valuation_cone) {
        return Err(Error::NotComplete);
    }
    let mut d = DivisorZ::zero();
    for g in &datum.gstable_rays {
        d.set(&g.label, BigInt::one());
    }
    for c in &datum.colors {
        let a = color_coefficient(datum, c)?;
        if a < BigInt::one() {
            return Err(Error::invalid(format!("color '{}' gets coefficient {a} < 1", c.id)));
        }
        d.set(&c.id, a);
    }
    Ok(d)
}

/// Equivariant map of embeddings on the level of B-stable divisors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FanMap {
    /// Source G-stable ray to target G-stable divisor, `None` when contracted.
    pub ray_image: BTreeMap<String, Option<String>>,
    /// Source color to target color.
    pub color_image: BTreeMap<String, String>,
}

impl FanMap {
    pub fn identity(datum: &SphericalDatum) -> FanMap {
        FanMap {
            ray_image: datum.gstable_rays.iter().map(|g| (g.label.clone(), Some(g.label.clone()))).collect(),
            color_image: datum.colors.iter().map(|c| (c.id.clone(), c.id.clone())).collect(),
        }
    }

    pub fn validate(&self, source: &SphericalDatum, target: &SphericalDatum) -> Result<()> {
        for g in &source.gstable_rays {
            match self.ray_image.get(&g.label) {
                None => return Err(Error::BadResolution(format!("ray '{}' has no image", g.label))),
                Some(Some(t)) if target.gstable_ray(t).is_none() => {
                    return Err(Error::BadResolution(format!("ray '{}' maps to unknown '{t}'", g.label)))
                }
                _ => {}
            }
        }
        for k in self.ray_image.keys() {
            if source.gstable_ray(k).is_none() {
                return Err(Error::BadResolution(format!("unknown source ray '{k}'")));
            }
        }
        let mut hit = BTreeSet::new();
        for c in &source.colors {
            let t = self
                .color_image
                .get(&c.id)
                .ok_or_else(|| Error::BadResolution(format!("color '{}' has no image", c.id)))?;
            if target.color(t).is_none() {
                return Err(Error::BadResolution(format!("color '{}' maps to unknown '{t}'", c.id)));
            }
            if !hit.insert(t.clone()) {
                return Err(Error::BadResolution(format!("color '{t}' is hit twice")));
            }
        }
        if hit.len() != target.colors.len() || self.color_image.len() != source.colors.len() {
            return Err(Error::BadResolution("color map is not a bijection".to_string()));
        }
        Ok(())
    }

    /// `other ∘ self`.
    pub fn compose(&self, other: &FanMap) -> Result<FanMap> {
        let mut ray_image = BTreeMap::new();
        for (k, v) in &self.ray_image {
            let img = match v {
                None => None,
                Some(b) => other
                    .ray_image
                    .get(b)
                    .cloned()
                    .ok_or_else(|| Error::BadResolution(format!("'{b}' has no image")))?,
            };
            ray_image.insert(k.clone(), img);
        }
        let mut color_image = BTreeMap::new();
        for (k, b) in &self.color_image {
            let c = other.color_image.get(b).ok_or_else(|| Error::BadResolution(format!("'{b}' has no image")))?;
            color_image.insert(k.clone(), c.clone());
        }
        Ok(FanMap { ray_image, color_image })
    }

    pub fn exceptional(&self) -> Vec<String> {
        self.ray_image.iter().filter(|(_, v)| v.is_none()).map(|(k, _)| k.clone()).collect()
    }
}

pub fn pushforward_divisor(map: &FanMap, delta: &DivisorZ) -> Result<DivisorZ> {
    let mut out = DivisorZ::zero();
    for (id, c) in &delta.coeffs {
        if let Some(t) = map.color_image.get(id) {
            out.add_to(t, c);
        } else if let Some(img) = map.ray_image.get(id) {
            if let Some(t) = img {
                out.add_to(t, c);
            }
        } else {
            return Err(Error::unknown("divisor", id.clone()));
        }
    }
    Ok(out)
}

/// A toroidal embedding mapping onto a given one.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub datum: SphericalDatum,
    pub fan: ColoredFan,
    pub map: FanMap,
}

impl Resolution {
    /// Source colors are copies of the target colors named by `color_image`.
    pub fn new(
        target: &SphericalDatum,
        gstable_rays: Vec<GStableRay>,
        specs: &[ConeSpec],
        ray_image: BTreeMap<String, Option<String>>,
        color_image: BTreeMap<String, String>,
    ) -> Result<Resolution> {
        let mut colors = Vec::new();
        for (src, tgt) in &color_image {
            let c = target.color(tgt).ok_or_else(|| Error::BadResolution(format!("unknown target color '{tgt}'")))?;
            colors.push(ColorRecord { id: src.clone(), rho: c.rho.clone(), raise_type: c.raise_type.clone() });
        }
        let datum = SphericalDatum::new(
            target.rank,
            target.valuation_cone.clone(),
            colors,
            gstable_rays,
            target.root_system.clone(),
        )?;
        let fan = ColoredFan::new(&datum, specs)?;
        let map = FanMap { ray_image, color_image };
        map.validate(&datum, target)?;
        Ok(Resolution { datum, fan, map })
    }

    pub fn identity(datum: &SphericalDatum, fan: &ColoredFan) -> Resolution {
        Resolution { datum: datum.clone(), fan: fan.clone(), map: FanMap::identity(datum) }
    }
}

/// `−K_X = π_*(−K_X̃)` for a smooth toroidal complete resolution `X̃ → X`.
pub fn canonical_general(datum: &SphericalDatum, res: &Resolution) -> Result<DivisorZ> {
    if !is_smooth_toroidal(&res.datum, &res.fan)? {
        return Err(Error::BadResolution("resolution is not smooth".to_string()));
    }
    if !res.fan.is_complete(&res.datum.valuation_cone) {
        return Err(Error::BadResolution("resolution is not complete".to_string()));
    }
    res.map.validate(&res.datum, datum)?;
    let k = anticanonical_toroidal(&res.datum, &res.fan)?;
    pushforward_divisor(&res.map, &k)
}

/// `−K_X` with coefficient 1 on G-stable divisors and unknowns `a_D ≥ 0` on colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnticanonicalPrototype {
    pub fixed: DivisorZ,
    pub unknowns: Vec<String>,
}

impl AnticanonicalPrototype {
    /// Whether `d` is an instance of the prototype.
    pub fn matches(&self, d: &DivisorZ) -> bool {
        let mut rest = d.clone();
        for u in &self.unknowns {
            if d.get(u) < BigInt::zero() {
                return false;
            }
            rest.set(u, BigInt::zero());
        }
        rest == self.fixed
    }
}

impl fmt::Display for AnticanonicalPrototype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.fixed.coeffs.keys().cloned().collect();
        parts.extend(self.unknowns.iter().map(|u| format!("a[{u}]*{u}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

pub fn anticanonical_prototype(datum: &SphericalDatum) -> AnticanonicalPrototype {
    let mut fixed = DivisorZ::zero();
    for g in &datum.gstable_rays {
        fixed.set(&g.label, BigInt::one());
    }
    AnticanonicalPrototype { fixed, unknowns: datum.colors.iter().map(|c| c.id.clone()).collect() }
}
