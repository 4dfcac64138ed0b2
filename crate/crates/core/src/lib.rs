//! Exact finite models of stably compact spaces.
//!
//! Finite posets carry the Alexandrov topology whose opens are the
//! *down*-sets. On top of that the crate provides Birkhoff/Stone duality for
//! finite distributive lattices, nuclei and sublocales of finite frames,
//! saturated compact and elementary compact subsets, de Groot duality, patch
//! topology, pro-finite towers, sheaves of rational vector spaces on posets,
//! and K₀-level descent checks.
//!
//! Linear algebra is generic over [`scalar::Field`]; every check that must
//! hold exactly uses the [`Rational`] instantiation.

pub mod dlattice;
pub mod dot;
pub mod error;
pub mod frame;
pub mod kzero;
pub mod linalg;
pub mod poset;
pub mod scalar;
pub mod space;
pub mod sweep;
pub mod tower;
pub mod vsheaf;

pub use error::{Error, Result};
pub use poset::{FinitePoset, MonotoneMap, SubsetMask};

/// Exact rationals with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;
/// Arbitrary-precision integers.
pub type Integer = num_bigint::BigInt;

pub type QMatrix = linalg::Matrix<Rational>;
pub type ZMatrix = linalg::Matrix<Integer>;
pub type QDiagram = vsheaf::PosetDiagram<Rational>;
pub type QSheaf = vsheaf::VecSheaf<Rational>;
pub type QCube = vsheaf::CubeDiagram<Rational>;
