//! Seeded instance generators for tests, benchmarks, and the regression
//! suite. Everything here is deterministic given the seed.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{VectorSet, WeightVector};
use crate::subsets::{binomial, delta_s, Subsets};
use crate::tol;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; avoids pulling in a distributions crate for one density.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Random configuration of n unit vectors spanning R^d.
pub fn random_unit_vectors(d: usize, n: usize, rng: &mut ChaCha8Rng) -> VectorSet {
    loop {
        let m = DMatrix::from_fn(d, n, |_, _| standard_normal(rng));
        if let Ok(x) = VectorSet::new(d, m) {
            return x;
        }
    }
}

/// Random configuration in general position: every d-subset is a basis.
/// Verified exhaustively when the subset count is small enough; Gaussian
/// samples are in general position almost surely either way.
pub fn random_general_position(d: usize, n: usize, rng: &mut ChaCha8Rng) -> VectorSet {
    'outer: loop {
        let x = random_unit_vectors(d, n, rng);
        if binomial(n as u64, d as u64).is_some_and(|c| c <= tol::ENUMERATION_CAP) {
            for s in Subsets::new(n, d) {
                if delta_s(x.matrix(), &s) == 0.0 {
                    continue 'outer;
                }
            }
        }
        return x;
    }
}

/// Random weights strictly inside (0, 1) summing to d. For a configuration in
/// general position this lands in the relative interior of the basis polytope.
pub fn random_interior_weights(d: usize, n: usize, rng: &mut ChaCha8Rng) -> WeightVector {
    loop {
        let raw: Vec<f64> = (0..n).map(|_| 0.2 + 0.8 * rng.random::<f64>()).collect();
        let sum: f64 = raw.iter().sum();
        let scaled: Vec<f64> = raw.iter().map(|v| v * d as f64 / sum).collect();
        if scaled.iter().all(|&v| v < 0.98) {
            if let Ok(c) = WeightVector::from_slice(d, &scaled) {
                return c;
            }
        }
    }
}

/// Random log-weight vector with `|t|_inf <= bound`.
pub fn random_scaling(n: usize, bound: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| (2.0 * rng.random::<f64>() - 1.0) * bound)
}

/// The planar triple `(cos t, +/- sin t)`, `(0, 1)` used as the worked
/// closed-form configuration; its uniform-weight minimizer is
/// `t = (2 ln(1/(2 sin t)), same, 0)`.
pub fn planar_triple(theta_deg: f64) -> VectorSet {
    let t = theta_deg.to_radians();
    VectorSet::from_vectors(
        2,
        &[
            vec![t.cos(), t.sin()],
            vec![t.cos(), -t.sin()],
            vec![0.0, 1.0],
        ],
    )
    .expect("planar triple is valid for 0 < theta < 90")
}

/// Closed-form minimizer (min-zero normalized) of the planar triple under
/// uniform weights.
pub fn planar_triple_optimum(theta_deg: f64) -> DVector<f64> {
    let w = 2.0 * (theta_deg.to_radians()).sin();
    let t12 = 2.0 * (1.0 / w).ln();
    DVector::from_column_slice(&[t12, t12, 0.0])
}

/// Reducible instance with two mutually orthogonal planar blocks in R^4,
/// three vectors per block. Uniform weights are feasible (each class sums
/// to its block dimension).
pub fn two_block_instance() -> (VectorSet, WeightVector) {
    let mut vectors = Vec::new();
    for ang in [0.0f64, 60.0, 120.0] {
        let r = ang.to_radians();
        vectors.push(vec![r.cos(), r.sin(), 0.0, 0.0]);
    }
    for ang in [15.0f64, 75.0, 135.0] {
        let r = ang.to_radians();
        vectors.push(vec![0.0, 0.0, r.cos(), r.sin()]);
    }
    let x = VectorSet::from_vectors(4, &vectors).unwrap();
    let c = WeightVector::uniform(4, 6).unwrap();
    (x, c)
}
