use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::matrix::{dot, dot_iq, int_kernel, rank_of_rows, IntMat};
use super::{primitive, primitive_q, CharacterVec, CovectorQ};
use crate::error::{Error, Result};

/// Rational polyhedral cone in `Λ^∨ ⊗ Q`, stored by primitive generators and
/// by the dual description (equalities and facet functionals).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    rank: usize,
    rays: Vec<Vec<BigInt>>,
    equalities: Vec<CharacterVec>,
    facets: Vec<CharacterVec>,
    dim: usize,
    contains_line: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// The closed cone.
    Boundary,
    /// The relative interior.
    Interior,
}

/// Normalized primitive rational cone generated by `rays` in rank `r`.
pub fn cone_from_rays(rays: &[CovectorQ], rank: usize) -> Result<Cone> {
    let mut ints = Vec::new();
    for v in rays {
        if v.len() != rank {
            return Err(Error::RankMismatch { expected: rank, got: v.len() });
        }
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        ints.push(primitive_q(v)?);
    }
    Ok(Cone::build(ints, rank))
}

/// `v` lies in the cone (boundary mode) or in its relative interior.
pub fn cone_membership(c: &Cone, v: &CovectorQ, mode: Membership) -> Result<bool> {
    if v.len() != c.rank {
        return Err(Error::RankMismatch { expected: c.rank, got: v.len() });
    }
    Ok(c.contains_q(v, mode))
}

impl Cone {
    pub fn from_int_rays(rays: &[Vec<BigInt>], rank: usize) -> Result<Cone> {
        let mut ints = Vec::new();
        for v in rays {
            if v.len() != rank {
                return Err(Error::RankMismatch { expected: rank, got: v.len() });
            }
            if v.iter().all(|x| x.is_zero()) {
                continue;
            }
            ints.push(primitive(v)?);
        }
        Ok(Cone::build(ints, rank))
    }

    pub fn zero(rank: usize) -> Cone {
        Cone::build(Vec::new(), rank)
    }

    /// The whole space, generated by `±e_i`.
    pub fn full(rank: usize) -> Cone {
        let mut rays = Vec::new();
        for i in 0..rank {
            for s in [1, -1] {
                let mut v = vec![BigInt::zero(); rank];
                v[i] = BigInt::from(s);
                rays.push(v);
            }
        }
        Cone::build(rays, rank)
    }

    fn build(mut rays: Vec<Vec<BigInt>>, rank: usize) -> Cone {
        rays.sort();
        rays.dedup();
        let dim = rank_of_rows(&rays, rank);
        let equalities = if rays.is_empty() {
            (0..rank).map(|i| unit(rank, i)).collect()
        } else {
            int_kernel(&IntMat::from_rows(&rays, rank))
        };
        let facets = enumerate_facets(&rays, &equalities, dim, rank);
        let mut lin = equalities.clone();
        lin.extend(facets.iter().cloned());
        let contains_line = rank_of_rows(&lin, rank) < rank;
        let mut cone = Cone { rank, rays, equalities, facets, dim, contains_line };
        if !cone.contains_line {
            cone.prune_rays();
        }
        cone
    }

    /// Keeps only extreme rays (pointed cones).
    fn prune_rays(&mut self) {
        let keep: Vec<Vec<BigInt>> = self
            .rays
            .iter()
            .filter(|u| {
                let mut tight = self.equalities.clone();
                tight.extend(self.facets.iter().filter(|f| dot(f, u).is_zero()).cloned());
                rank_of_rows(&tight, self.rank) + 1 == self.rank
            })
            .cloned()
            .collect();
        self.rays = keep;
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn facets(&self) -> &[CharacterVec] {
        &self.facets
    }

    pub fn equalities(&self) -> &[CharacterVec] {
        &self.equalities
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains_line(&self) -> bool {
        self.contains_line
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.rank
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.equalities.iter().all(|e| dot(e, v).is_zero())
            && self.facets.iter().all(|f| !dot(f, v).is_negative())
    }

    pub fn contains_relint(&self, v: &[BigInt]) -> bool {
        self.equalities.iter().all(|e| dot(e, v).is_zero())
            && self.facets.iter().all(|f| dot(f, v).is_positive())
    }

    pub fn contains_q(&self, v: &[BigRational], mode: Membership) -> bool {
        if !self.equalities.iter().all(|e| dot_iq(e, v).is_zero()) {
            return false;
        }
        match mode {
            Membership::Boundary => self.facets.iter().all(|f| !dot_iq(f, v).is_negative()),
            Membership::Interior => self.facets.iter().all(|f| dot_iq(f, v).is_positive()),
        }
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.rays.iter().all(|u| self.contains(u))
    }

    pub fn same_as(&self, other: &Cone) -> bool {
        self.contains_cone(other) && other.contains_cone(self)
    }

    /// Sum of the generators; lies in the relative interior.
    pub fn relint_point(&self) -> Vec<BigInt> {
        let mut p = vec![BigInt::zero(); self.rank];
        for u in &self.rays {
            for (a, b) in p.iter_mut().zip(u) {
                *a += b;
            }
        }
        p
    }

    /// Generators of the dual cone: facets and both signs of the equalities.
    pub fn dual_generators(&self) -> Vec<CharacterVec> {
        let mut g = self.facets.clone();
        for e in &self.equalities {
            g.push(e.clone());
            g.push(e.iter().map(|x| -x).collect());
        }
        g
    }

    pub fn dual(&self) -> Cone {
        Cone::build(self.dual_generators().into_iter().map(|v| primitive(&v).unwrap()).collect(), self.rank)
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        assert_eq!(self.rank, other.rank);
        let mut gens = self.dual_generators();
        gens.extend(other.dual_generators());
        let d = Cone::build(gens.into_iter().map(|v| primitive(&v).unwrap()).collect(), self.rank);
        d.dual()
    }

    /// Generators of the smallest face containing `p` (assumed in the cone).
    pub fn face_containing(&self, p: &[BigInt]) -> Vec<Vec<BigInt>> {
        let tight: Vec<&CharacterVec> = self.facets.iter().filter(|f| dot(f, p).is_zero()).collect();
        self.rays
            .iter()
            .filter(|u| tight.iter().all(|f| dot(f, u).is_zero()))
            .cloned()
            .collect()
    }

    pub fn is_face_of(&self, big: &Cone) -> bool {
        if !big.contains_cone(self) {
            return false;
        }
        let p = self.relint_point();
        big.face_containing(&p).iter().all(|u| self.contains(u))
    }

    /// Faces of codimension one, as cones.
    pub fn facet_cones(&self) -> Vec<(CharacterVec, Cone)> {
        self.facets
            .iter()
            .map(|f| {
                let rays: Vec<Vec<BigInt>> =
                    self.rays.iter().filter(|u| dot(f, u).is_zero()).cloned().collect();
                (f.clone(), Cone::build(rays, self.rank))
            })
            .collect()
    }
}

fn unit(r: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); r];
    v[i] = BigInt::from(1);
    v
}

/// Facets by exhaustive search over `(dim − 1)`-subsets of generators.
fn enumerate_facets(
    rays: &[Vec<BigInt>],
    equalities: &[CharacterVec],
    dim: usize,
    rank: usize,
) -> Vec<CharacterVec> {
    if dim == 0 {
        return Vec::new();
    }
    let mut out: Vec<CharacterVec> = Vec::new();
    for subset in (0..rays.len()).combinations(dim - 1) {
        let mut rows: Vec<Vec<BigInt>> = subset.iter().map(|&i| rays[i].clone()).collect();
        if rank_of_rows(&rows, rank) != dim - 1 {
            continue;
        }
        rows.extend(equalities.iter().cloned());
        let ker = int_kernel(&IntMat::from_rows(&rows, rank));
        if ker.len() != 1 {
            continue;
        }
        let mut f = ker.into_iter().next().unwrap();
        let vals: Vec<BigInt> = rays.iter().map(|u| dot(&f, u)).collect();
        let has_pos = vals.iter().any(|v| v.is_positive());
        let has_neg = vals.iter().any(|v| v.is_negative());
        if has_pos && has_neg {
            continue;
        }
        if has_neg {
            f = f.iter().map(|x| -x).collect();
        } else if !has_pos {
            continue;
        }
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out.sort();
    out
}
