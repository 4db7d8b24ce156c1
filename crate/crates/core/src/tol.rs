//! Centralized numeric tolerances and enumeration caps.
//!
//! Every threshold used for validation, classification, or zero-testing is
//! defined here rather than inline, so the trade-offs stay auditable.

/// Unit-norm acceptance window for input vectors. Columns whose norm deviates
/// from 1 by more than this are still accepted but renormalized with the
/// applied scale recorded; within the window bits are preserved untouched.
pub const UNIT_TOL: f64 = 1e-8;

/// Columns with norm below this are rejected outright: a zero (or almost-zero)
/// direction has no meaningful normalization.
pub const MIN_NORM: f64 = 1e-12;

/// Relative singular-value cutoff: singular values below `RANK_TOL * sigma_max`
/// count as zero for rank decisions and for the log-det domain check.
pub const RANK_TOL: f64 = 1e-10;

/// Allowed absolute deviation of `sum(c) - d` before rescaling is refused.
pub const SUM_TOL: f64 = 1e-8;

/// Base tolerance for SVD-derived identities (orthonormality of U, Q = V S^2 V^T,
/// gradient sums). Scaled by problem size where noted.
pub const FRO_TOL: f64 = 1e-9;

/// Symmetry tolerance for transformations claiming the symmetric square-root form.
pub const SYM_TOL: f64 = 1e-8;

/// Relative determinant cutoff below which a d-subset counts as dependent
/// (`Delta_S = 0`). Measured against the product of the submatrix column norms.
pub const DET_ZERO_TOL: f64 = 1e-10;

/// Cap on the number of d-subsets any Cauchy-Binet style enumeration may visit.
pub const ENUMERATION_CAP: u64 = 200_000;

/// Cap on the number of subsets the exhaustive halfspace / bipartition checks
/// may visit (2^20).
pub const MEMBERSHIP_CAP: u64 = 1 << 20;

/// Equality window for boundary classification in the halfspace check,
/// scaled by the ambient dimension d.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// log-range of t beyond which exp() work is refused instead of overflowing.
pub const T_RANGE_LIMIT: f64 = 700.0;

/// Convergence tolerance for the alternating projection onto the projected box.
pub const PROJECTION_TOL: f64 = 1e-12;
