//! khess: a numerical laboratory for k-Hessian equations at desk scale.
//!
//! The crate provides:
//!
//! - [`symfun`]: exact calculus of elementary symmetric polynomials on
//!   spectra (values, restricted polynomials, first/second partials, and
//!   the second-derivative bilinear form of symmetric matrix functions);
//! - [`cone`]: Garding-cone membership, the admissibility shift
//!   K0 = n sup_f^{1/k}, and cone samplers;
//! - [`solver`]: a damped-Newton finite-difference solver for the Dirichlet
//!   problem sigma_k(D^2 u) = f(x, u, grad u) on boxes and masked domains in
//!   dimension 2 and 3, plus a radial ODE oracle on balls;
//! - [`estimates`]: interior-estimate quantities (weighted second-derivative
//!   maxima, shifted power sums) and randomized verification suites for the
//!   algebraic inequalities behind them;
//! - [`rigidity`]: the rescaling experiment that measures how solutions with
//!   quadratically growing data flatten toward quadratic polynomials;
//! - [`cli`]: the command-line driver behind the `khess` binary.

pub mod cli;
pub mod cone;
pub mod error;
pub mod estimates;
pub mod linalg;
pub mod report;
pub mod rigidity;
pub mod rng;
pub mod solver;
pub mod symfun;

pub use error::{Error, Result};
