//! Exact lattices, rational polyhedral cones, colored fans, walls and
//! piecewise-linear functions.

mod cone;
mod fan;
pub mod feasibility;
pub mod matrix;

pub use cone::{cone_from_rays, cone_membership, Cone, Membership};
pub use fan::{
    fan_validate, pl_convexity, walls, ColoredCone, ColoredFan, ConeSpec, Convexity, FanReport,
    PLFunction, Violation, Wall,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Element of the weight lattice `Λ`.
pub type CharacterVec = Vec<BigInt>;
/// Element of `Λ^∨ ⊗ Q`.
pub type CovectorQ = Vec<BigRational>;
/// Integral element of `Λ^∨`.
pub type CovectorZ = Vec<BigInt>;

/// Positive multiple of `v` with coprime integer coordinates.
pub fn primitive(v: &[BigInt]) -> Result<Vec<BigInt>> {
    let g = matrix::gcd_all(v);
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// Clears denominators, then divides by the gcd.
pub fn primitive_q(v: &[BigRational]) -> Result<Vec<BigInt>> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    primitive(&ints)
}

pub fn int_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn rat_vec(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

/// `Some(x)` when every entry of `v` is an integer.
pub fn integral(v: &[BigRational]) -> Option<Vec<BigInt>> {
    v.iter().map(|x| if x.is_integer() { Some(x.to_integer()) } else { None }).collect()
}

/// Sign-normalizes a nonzero vector so its first nonzero entry is positive.
pub fn sign_normalize(v: &[BigInt]) -> Vec<BigInt> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.iter().map(|y| -y).collect(),
        _ => v.to_vec(),
    }
}
