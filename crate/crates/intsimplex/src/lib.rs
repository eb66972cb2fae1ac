//! Exact-arithmetic toolkit for integral simplices.
//!
//! A d-dimensional integral simplex is a set of d+1 points in Euclidean
//! d-space with pairwise integer distances and full affine rank. This crate
//! enumerates them up to isometry (= relabeling of the distance matrix),
//! decides realizability of candidate distance matrices over exact rational
//! arithmetic, relates the two-distance case to integer partitions, and
//! produces explicit coordinate embeddings.
//!
//! Modules:
//!
//! * [`exact`] - big rationals, squared-distance matrices, fraction-free
//!   determinants.
//! * [`geometry`] - realizability of a squared-distance matrix in a target
//!   dimension, minimal embedding dimension, and a floating-point Gram
//!   cross-check.
//! * [`bijection`] - integer partitions and the correspondence between
//!   partitions of d+1 and {1, lambda}-distance d-simplices.
//! * [`embedding`] - exact Gram matrices and float coordinates for the
//!   block construction behind that correspondence.
//! * [`census`] - isomorph-free exhaustive enumeration of integral
//!   simplices by dimension and diameter.

pub mod bijection;
pub mod census;
pub mod embedding;
pub mod exact;
pub mod geometry;

pub use exact::{Rational, SquareMatrix, SquaredDistanceMatrix};
