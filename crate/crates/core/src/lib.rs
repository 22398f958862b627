//! Computational order theory for finite-dimensional operator algebras.
//!
//! The crate works with subalgebras of `M_n` and the positivity notions that
//! live on them: accretive elements, the cones `𝔉` and `½𝔉`, sectorial
//! angles, principal fractional powers, support and peak projections, and
//! feasibility solvers that produce interpolating elements.

pub mod algebra;
pub mod cones;
pub mod error;
pub mod gen;
pub mod interp;
pub mod linalg;
pub mod matrix;
pub mod powers;
pub mod projections;
pub mod quadrature;
pub mod tol;
pub mod transforms;

pub use algebra::MatrixAlgebra;
pub use error::{Error, Result};
pub use matrix::{c, ComplexMatrix, C64};
pub use tol::{Tolerances, Verdict};
