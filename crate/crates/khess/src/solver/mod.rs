//! Finite-difference Dirichlet solver for sigma_k(D^2 u) = f on rectangular
//! grids (dimension 2 and 3) and the radial ODE oracle on balls.

pub mod field;
pub mod grid;
pub mod linsolve;
pub mod newton;
pub mod radial;
pub mod rhs;
pub mod spline;

pub use field::{discrete_hessian, gradient_at, gradient_field, laplacian_at, ScalarField};
pub use grid::{Coords, DomainShape, GridDomain, Point};
pub use newton::{
    solve_dirichlet_from, field_cone_deficit,
    apply_boundary, field_admissible, initial_guess, min_hessian_eigenvalue, residual_norm,
    solve_dirichlet, solve_dirichlet_with, subsolution_slope, BoundaryFn, DirichletProblem,
    SolveReport, SolverOptions,
};
pub use radial::{solve_radial, RadialProfile};
pub use rhs::{RhsConfig, RhsKind, RhsSpec};
pub use spline::spline_resample;
