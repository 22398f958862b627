//! Feasibility engine and interpolation solvers.

pub mod engine;
pub mod instances;
pub mod region;
pub mod theorems;

pub use engine::{
    solve_feasibility, EngineOptions, Equality, FeasibilityProblem, FeasibilitySolution, LinMap, Residual,
    SolverVerdict, Spectral, SpectralKind, SOLVER_TOL,
};
pub use region::{ConvexRegion, HalfPlane};
pub use theorems::{
    decompose, dominate, interp_np, peak_interpolate, strict_urysohn, tietze_lift, urysohn_interpolate, Check,
    InterpOptions, Interpolant, UrysohnMode, NEAR_EPS,
};
