//! Exterior Bernoulli free-boundary problem on rough discs.
//!
//! The crate computes the wall-law constant `B0` from a periodic cell
//! problem, solves the rough free-boundary problem by fixed-point iteration
//! on the outer star curve, and compares the result with the explicit disc
//! solution of the corrected smooth problem.
//!
//! Numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below are the double precision types used by the command-line tool.

// `!(x > 0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bernoulli;
pub mod cell;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod io;
pub mod radial;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type RoughnessProfile64 = geometry::RoughnessProfile<f64>;
pub type StarCurve64 = geometry::StarCurve<f64>;
pub type AnnulusBounds64 = geometry::AnnulusBounds<f64>;
pub type RadialSolution64 = radial::RadialSolution<f64>;
pub type AnnularMesh64 = elliptic::AnnularMesh<f64>;
pub type GridField64 = elliptic::GridField<f64>;
pub type CellSolution64 = cell::CellSolution<f64>;
pub type WallLawConstant64 = cell::WallLawConstant<f64>;
pub type BernoulliParams64 = bernoulli::BernoulliParams<f64>;
pub type FreeBoundaryState64 = bernoulli::FreeBoundaryState<f64>;

pub type StarCurve32 = geometry::StarCurve<f32>;
pub type RadialSolution32 = radial::RadialSolution<f32>;
