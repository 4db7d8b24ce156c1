//! Radial isotropic position, numerically.
//!
//! Given unit vectors `x_1..x_n` spanning R^d and positive weights `c` with
//! `sum c_i = d`, this crate finds a nonsingular linear map `T` such that the
//! normalized images `T x_i / |T x_i|` satisfy
//! `sum_i c_i z_i z_i^T = I_d`, to a user-specified accuracy. The map is
//! obtained by minimizing the convex potential
//! `f(t) = log det(sum_i e^{t_i} x_i x_i^T) - <c, t>` with projected gradient
//! descent; the gradient comes from one SVD of the reweighted configuration.
//!
//! Modules:
//! - [`model`]: validated domain types and the instance grammar;
//! - [`potential`]: the potential, its gradient and Hessian (SVD path plus a
//!   subset-enumeration oracle path);
//! - [`polytope`]: feasibility (basis-polytope membership), irreducibility and
//!   decomposition, and the conditioning bounds;
//! - [`descent`]: the projected gradient descent solvers;
//! - [`oracle`]: independent high-precision references used for validation;
//! - [`synth`]: seeded instance generators for tests and benchmarks.

pub mod descent;
pub mod error;
pub mod model;
pub mod oracle;
pub mod polytope;
pub mod potential;
mod simplex;
pub mod subsets;
pub mod synth;
pub mod tol;

pub use error::{Error, Result};
pub use model::{
    normalize_scaling, parse_instance, serialize_instance_json, CSpec, InstanceFormat,
    IsotropyResult, MethodKind, Normalization, Provenance, ScalingVector, TracePoint,
    Transformation, VectorSet, WeightVector,
};
pub use potential::{
    assemble, f_value, grad_f, grad_phi, grad_phi_subsets, hessian, phi, phi_cauchy_binet,
    spectral_bound_check, HessianMatrix, WeightedGram,
};
