//! Verification harnesses for interior-estimate quantities and the algebraic
//! inequalities behind them: weighted second-derivative maxima on solved
//! fields, shifted power sums, quotient-concavity and shifted-dominance gap
//! checks, randomized suites, and mesh-refinement scans.

pub mod inequalities;
pub mod quantities;
pub mod refinement;
pub mod suites;

pub use inequalities::{
    quotient_ratio_gap, quotient_weighted_gap, restricted_growth_bounds, restricted_newton_gap,
    shifted_dominance_gap, GapResult, GrowthBoundsVerdict,
};
pub use quantities::{
    depth_laplacian_max, pogorelov_quantity, shifted_power_sum, PogorelovConfig,
};
pub use refinement::{
    boundedness_verdict, refinement_scan, EstimateReport, LevelRecord, QuantityTag,
    RefinementProblem, ScanGeometry,
};
pub use suites::{
    run_quotient_ratio_suite, run_quotient_weighted_suite, run_restricted_newton_suite,
    run_shifted_dominance_suite, SuiteReport, Violation,
};
