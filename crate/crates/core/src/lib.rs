//! Green's function and local density of states of two electrons with
//! repulsive Coulomb interaction.

// negated comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coulomb_gf;
pub mod dyson;
pub mod error;
pub mod ldos;
pub mod pair_gf;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};

/// Cartesian 3-vector in Bohr radii.
pub type Vec3 = nalgebra::Vector3<f64>;
