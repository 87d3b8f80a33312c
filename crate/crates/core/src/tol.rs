//! Numeric tolerances and iteration budgets, centralized so implementations
//! and tests agree on what "converged" and "equal" mean.

/// Closed-form projections (ball, axis-aligned box) are exact up to rounding;
/// tests compare them against analytic oracles at this tolerance.
pub const TOL_PROJ_EXACT: f64 = 1e-9;

/// Iterative projections (Dykstra for intersections, cyclic corrected
/// projection for polytopes) stop once a full pass moves the iterate less
/// than a tenth of this and every constraint residual is below it.
pub const TOL_PROJ_ITER: f64 = 1e-7;

/// Hard cap on Dykstra passes before the projection reports failure.
pub const MAX_PROJ_ITERS: usize = 10_000;

/// Absolute slack on constraint residuals when deciding membership.
/// Polytope rows are normalized to unit norm at construction so this is a
/// geometric distance for them too.
pub const TOL_MEM: f64 = 1e-12;

/// Chord endpoints below this magnitude on both sides mean the query point
/// is not interior.
pub const TOL_CHORD: f64 = 1e-9;

/// Reflection-coupled chains snap together when their distance falls below
/// `MERGE_TOL_FACTOR * sqrt(eta)`. Note that the coupled difference walk
/// moves ~2*sqrt(eta) per step, so this radius is three orders of magnitude
/// below the walk's resolution; see the coupling diagnostics for the
/// measured consequences.
pub const MERGE_TOL_FACTOR: f64 = 1e-3;

/// Node count of the grid inverse-CDF used for hit-and-run's 1-D draw.
pub const HR_GRID_NODES: usize = 1024;

/// Projected-gradient-ascent budget per scale for approximate support
/// functions (polytopes and intersections have no closed form).
pub const SUPP_ITERS_PER_SCALE: usize = 80;
pub const SUPP_SCALES: usize = 6;

/// Relative slack allowed in the gauge/support duality test when one side
/// comes from an iterative (not closed-form) oracle.
pub const DUALITY_REL_TOL: f64 = 1e-5;

/// The rejection oracle aborts once its measured acceptance rate drops below
/// this after at least a million attempts.
pub const REJECTION_MIN_RATE: f64 = 1e-6;
