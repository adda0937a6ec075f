//! Exact constructions and verification of hypercube and polytope-product
//! triangulations: staircase lifts, colorings, the Cayley trick and a small
//! seed catalog.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod seeds;
pub mod staircase;
pub mod cayley;
pub mod coloring;
pub mod combinatorics;
pub mod complex;
pub mod oracle;
pub mod pipeline;

pub use error::{Error, Result};
pub use geometry::{
    affine_rank, ambient_normalized_volume, normalized_volume, ConfigLabel, LatticeScalar, NormalizedVolume,
};

/// Exact rational number used for weights, bounds and expectations.
pub type Rational = num_rational::BigRational;

/// Lattice point with machine-integer coordinates.
pub type Point = geometry::Point<i64>;
/// Lattice point with arbitrary-precision coordinates.
pub type BigPoint = geometry::Point<num_bigint::BigInt>;
/// Point configuration with machine-integer coordinates.
pub type PointConfiguration = geometry::PointConfiguration<i64>;
