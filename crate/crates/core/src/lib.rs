//! Numerical machinery for fractional Hardy inequalities on domains with
//! thin (low Aikawa dimension) boundaries.
//!
//! The crate is organized bottom-up:
//!
//! - [`geometry`]: planar domains with exact distance oracles (polygons,
//!   Koch snowflakes, complements of Cantor dust).
//! - [`dyadic`]: dyadic cubes, Whitney covers and near-boundary cube families.
//! - [`approx`]: local polynomial approximation, discrete Triebel–Lizorkin
//!   norms and the Gagliardo seminorm.
//! - [`chains`]: chain decompositions with shadows and their condition checks.
//! - [`inequality`]: Aikawa integrals, dimension and porosity estimators,
//!   Hardy functionals, reverse Hölder checks, extension and multiplier tests.
//! - [`experiment`]: JSON-configured batch runs with CSV/JSON reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod chains;
pub mod dyadic;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod inequality;
pub mod quadrature;
pub mod sum;

pub use error::{Error, Result};
pub use geometry::{Aabb, Domain, Point, SetOracle};

/// Crate version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
