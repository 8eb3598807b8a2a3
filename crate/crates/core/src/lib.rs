//! Exact combinatorics of spherical varieties.
//!
//! The crate works over the integers and rationals only. Lattice data lives in
//! [`lattice_geom`], Weyl group arithmetic in [`root_weyl`], B-orbit graphs in
//! [`orbit_graph`], divisors and positivity in [`divisor_theory`], curves in
//! [`curve_classes`], canonical divisors in [`canonical_divisor`]. The
//! [`toric_oracle`] module is an independent classical implementation used for
//! differential testing, and [`cli_io`] holds the document schema and the
//! command runner behind the `spherical` binary.

pub mod canonical_divisor;
pub mod cli_io;
pub mod curve_classes;
pub mod divisor_theory;
pub mod error;
pub mod lattice_geom;
pub mod orbit_graph;
pub mod root_weyl;
pub mod toric_oracle;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
