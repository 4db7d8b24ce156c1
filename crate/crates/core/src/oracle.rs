//! Independent high-precision references used to validate the other modules:
//! a damped Newton solver driven entirely by the subset-enumeration gradient
//! (no SVD anywhere on its path), convex-combination weights over bases,
//! residuals of the polynomial optimality systems, and the entropy identities.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{
    normalize_scaling, Normalization, ScalingVector, Transformation, VectorSet, WeightVector,
};
use crate::polytope::{equivalence_classes, membership, membership_lp, Membership};
use crate::potential::{assemble, grad_phi, grad_phi_subsets, phi, phi_cauchy_binet};
use crate::subsets::{check_enumeration_cap, delta_s, LogSum, Subsets};
use crate::tol;

/// High-precision reference minimizer with its convex-combination weights.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    /// Min-zero normalized minimizer.
    pub t_star: ScalingVector,
    pub f_star: f64,
    /// Basis index set -> lambda weight; positive, summing to one, with
    /// per-index marginals equal to c.
    pub lambda: BTreeMap<Vec<usize>, f64>,
    /// Final gradient norm reached by the Newton iteration.
    pub newton_residual: f64,
}

fn feasible_interior(x: &VectorSet, c: &WeightVector) -> Result<()> {
    let report = if x.count() <= 16 {
        membership(x, c)?
    } else {
        membership_lp(x, c)?
    };
    if report.member != Membership::Interior {
        return Err(Error::Infeasible {
            reason: "reference solver needs strictly interior weights".into(),
            report: Box::new(report),
        });
    }
    Ok(())
}

/// Orthonormal basis of the hyperplane orthogonal to the all-ones vector.
fn ones_complement_basis(n: usize) -> DMatrix<f64> {
    let u = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut v = -u;
    v[0] += 1.0;
    v /= v.norm();
    let house = DMatrix::identity(n, n) - 2.0 * &v * v.transpose();
    house.columns(1, n - 1).into_owned()
}

/// Damped Newton iteration on the mean-zero slice, with gradient and
/// objective from the subset-enumeration path and the Hessian from central
/// finite differences of that gradient. Shares no numerical kernel with the
/// SVD-based descent it validates.
pub fn newton_reference(x: &VectorSet, c: &WeightVector, tol: f64) -> Result<ReferenceSolution> {
    let (n, d) = (x.count(), x.dim());
    check_enumeration_cap(n, d, "newton_reference")?;
    feasible_interior(x, c)?;
    // Interior membership already implies the per-class weight sums match the
    // class dimensions, so reducible instances are solvable here too: the
    // extra kernel directions of the Hessian (the class indicators) are
    // handled by the pseudo-inverse fallback. Keep the classes around only to
    // pick the minimizer reachable from the origin.
    let _ = equivalence_classes(x);
    let tol = if tol > 0.0 { tol } else { 1e-12 };

    let grad_at = |t: &DVector<f64>| -> Result<DVector<f64>> {
        Ok(grad_phi_subsets(x, &ScalingVector::raw(t.clone()))? - c.vector())
    };
    let f_at = |t: &DVector<f64>| -> Result<f64> {
        Ok(phi_cauchy_binet(x, &ScalingVector::raw(t.clone()))? - c.vector().dot(t))
    };

    let p = ones_complement_basis(n);
    let mut t = DVector::zeros(n);
    let mut f = f_at(&t)?;
    let mut grad = grad_at(&t)?;
    let fd_step = 1e-4;
    for _iter in 0..200 {
        if grad.norm() <= tol {
            break;
        }
        // Central finite differences of the subset gradient.
        let mut h = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut tp = t.clone();
            tp[k] += fd_step;
            let mut tm = t.clone();
            tm[k] -= fd_step;
            let col = (grad_at(&tp)? - grad_at(&tm)?) / (2.0 * fd_step);
            h.set_column(k, &col);
        }
        h = (&h + h.transpose()) / 2.0;
        // Restrict to the complement of the all-ones kernel and solve there.
        let hr = p.transpose() * &h * &p;
        let gr = p.transpose() * &grad;
        let step_r = hr
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&gr))
            .or_else(|| {
                // Fall back to an eigenvalue pseudo-inverse if finite
                // difference noise spoils positive definiteness.
                hr.try_symmetric_eigen(f64::EPSILON, 0).map(|eig| {
                    let lmax = eig.eigenvalues.amax();
                    let mut coeffs = eig.eigenvectors.transpose() * &gr;
                    for (i, v) in coeffs.iter_mut().enumerate() {
                        let lam = eig.eigenvalues[i];
                        *v = if lam > 1e-12 * lmax { *v / lam } else { 0.0 };
                    }
                    &eig.eigenvectors * coeffs
                })
            })
            .ok_or_else(|| Error::Divergence("Newton system could not be solved".into()))?;
        let direction = -(&p * step_r);

        // Backtracking halving until f decreases. Near the optimum the
        // per-step decrease of f falls below floating-point resolution while
        // the gradient is still above the target, so a full step is also
        // accepted when it shrinks the gradient norm.
        let mut step = 1.0f64;
        let mut accepted = false;
        for halving in 0..60 {
            let cand = &t + step * &direction;
            let fc = f_at(&cand)?;
            if fc < f {
                t = cand;
                f = fc;
                accepted = true;
                break;
            }
            if halving == 0 {
                let cand_grad = grad_at(&cand)?;
                if cand_grad.norm() < grad.norm() {
                    t = cand;
                    f = fc;
                    accepted = true;
                    break;
                }
            }
            step /= 2.0;
        }
        if !accepted {
            return Err(Error::Divergence(
                "Newton backtracking exhausted 60 halvings without descent".into(),
            ));
        }
        // Keep the iterate mean-zero; the objective is shift-invariant.
        let mean = t.mean();
        t.apply(|v| *v -= mean);
        grad = grad_at(&t)?;
    }
    let grad_norm = grad.norm();
    if grad_norm > tol {
        return Err(Error::Divergence(format!(
            "Newton stalled at gradient norm {grad_norm:.3e} (target {tol:.0e})"
        )));
    }
    let t_star = normalize_scaling(&ScalingVector::raw(t), Normalization::MinZero);
    let f_star = f_at(t_star.vector())?;
    let lambda = lambda_weights(x, &t_star)?;
    Ok(ReferenceSolution {
        t_star,
        f_star,
        lambda,
        newton_residual: grad_norm,
    })
}

/// Convex-combination weights over bases at a given scaling:
/// `lambda_S = e^{sum_{i in S} t_i} Delta_S / sum_S' e^{...} Delta_S'`.
pub fn lambda_weights(x: &VectorSet, t: &ScalingVector) -> Result<BTreeMap<Vec<usize>, f64>> {
    let (n, d) = (x.count(), x.dim());
    check_enumeration_cap(n, d, "lambda_weights")?;
    let tv = t.vector();
    let mut terms: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut total = LogSum::new();
    for s in Subsets::new(n, d) {
        let delta = delta_s(x.matrix(), &s);
        if delta > 0.0 {
            let l: f64 = s.iter().map(|&i| tv[i]).sum::<f64>() + delta.ln();
            total.add(l);
            terms.push((s, l));
        }
    }
    if total.is_empty() {
        return Err(Error::Rank("no independent d-subset found".into()));
    }
    let log_total = total.value();
    Ok(terms
        .into_iter()
        .map(|(s, l)| (s, (l - log_total).exp()))
        .collect())
}

/// Normalized residual of the stationarity system
/// `c_i sum_S Delta_S z^S = sum_{S : i in S} Delta_S z^S` with `z_i = e^{t_i}`;
/// zero exactly at a minimizer, and invariant under shifts along all-ones.
pub fn polynomial_residual(
    x: &VectorSet,
    c: &WeightVector,
    t: &ScalingVector,
) -> Result<DVector<f64>> {
    let marginals = grad_phi_subsets(x, t)?;
    Ok(c.vector() - marginals)
}

/// Frobenius deviation of the transformed, renormalized configuration from
/// the weighted identity resolution: the defect of the d^2-equation system.
pub fn transformation_residual(
    x: &VectorSet,
    c: &WeightVector,
    transform: &Transformation,
) -> Result<f64> {
    if transform.dim() != x.dim() {
        return Err(Error::Dimension(format!(
            "transform is {}x{} but d = {}",
            transform.dim(),
            transform.dim(),
            x.dim()
        )));
    }
    let d = x.dim();
    let mut acc = DMatrix::<f64>::zeros(d, d);
    for i in 0..x.count() {
        let image = transform.matrix() * x.column(i);
        let norm = image.norm();
        if norm < tol::MIN_NORM {
            return Err(Error::Precondition(format!(
                "transform sends vector {} to norm {norm:.3e}",
                i + 1
            )));
        }
        let z = image / norm;
        acc += c.get(i) * &z * z.transpose();
    }
    Ok((acc - DMatrix::identity(d, d)).norm())
}

/// For a configuration already in radial c-isotropic position, checks the
/// closed-form value of the dual optimum and its attaining vector: returns
/// `(sum_i c_i log c_i, t with t_i = log c_i)` after verifying both the
/// duality identity (to 1e-9) and the gradient match (to 1e-7).
pub fn entropy_check(z: &VectorSet, c: &WeightVector) -> Result<(f64, ScalingVector)> {
    let identity = Transformation::new(
        DMatrix::identity(z.dim(), z.dim()),
        crate::model::Provenance::QInvSqrtSymmetric,
    )?;
    let residual = transformation_residual(z, c, &identity)?;
    if residual > 1e-8 {
        return Err(Error::Precondition(format!(
            "input is not in radial c-isotropic position (residual {residual:.3e})"
        )));
    }
    let phi_star: f64 = c.vector().iter().map(|&ci| ci * ci.ln()).sum();
    let t = ScalingVector::raw(c.vector().map(|ci| ci.ln()));
    let g = assemble(z, &t, f64::EPSILON)?;
    let dual_value = t.vector().dot(c.vector()) - phi(&g)?;
    if (dual_value - phi_star).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "duality identity off by {:.3e}",
            (dual_value - phi_star).abs()
        )));
    }
    let grad_defect = (grad_phi(&g) - c.vector()).amax();
    if grad_defect > 1e-7 {
        return Err(Error::Precondition(format!(
            "gradient at t = log c deviates from c by {grad_defect:.3e}"
        )));
    }
    Ok((phi_star, t))
}

/// Solves the entropy-minimal convex-combination problem
/// `min sum_S lambda_S log(lambda_S / Delta_S)` subject to the marginal
/// constraints, by iterative proportional fitting on the dual multipliers.
pub fn entropy_min_weights(x: &VectorSet, c: &WeightVector) -> Result<BTreeMap<Vec<usize>, f64>> {
    let (n, d) = (x.count(), x.dim());
    check_enumeration_cap(n, d, "entropy_min_weights")?;
    feasible_interior(x, c)?;
    let mut bases: Vec<(Vec<usize>, f64)> = Vec::new();
    for s in Subsets::new(n, d) {
        let delta = delta_s(x.matrix(), &s);
        if delta > 0.0 {
            bases.push((s, delta.ln()));
        }
    }
    // Multipliers t with lambda_S = Delta_S e^{<t, 1_S> - 1}; coordinate
    // updates match each marginal in turn (Sinkhorn-style), which converges
    // for this exponential family.
    let mut t = DVector::zeros(n);
    let marginal = |t: &DVector<f64>, i: usize, bases: &[(Vec<usize>, f64)]| -> f64 {
        let mut ls = LogSum::new();
        for (s, log_delta) in bases {
            if s.contains(&i) {
                ls.add(log_delta + s.iter().map(|&j| t[j]).sum::<f64>() - 1.0);
            }
        }
        ls.value().exp()
    };
    let mut converged = false;
    for _sweep in 0..20_000 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let m = marginal(&t, i, &bases);
            let update = (c.get(i) / m).ln();
            t[i] += update;
            worst = worst.max(update.abs());
        }
        if worst < 1e-12 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Divergence(
            "entropy weight fitting failed to converge".into(),
        ));
    }
    Ok(bases
        .into_iter()
        .map(|(s, log_delta)| {
            let l = log_delta + s.iter().map(|&j| t[j]).sum::<f64>() - 1.0;
            (s, l.exp())
        })
        .collect())
}

/// Fits `b a^{-1}` to a scaled orthogonal map: returns `(lambda, defect)`
/// where `defect = ||(b a^{-1})^T (b a^{-1}) - lambda^2 I||_F` for the
/// best-fitting scale. Zero defect means the two transforms agree up to
/// rotation and scale.
pub fn rotation_scale_defect(a: &Transformation, b: &Transformation) -> Result<(f64, f64)> {
    let inv = a
        .matrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("transform not invertible".into()))?;
    let m = b.matrix() * inv;
    let gram = m.transpose() * &m;
    let d = gram.nrows() as f64;
    let lambda_sq = gram.trace() / d;
    let defect = (&gram - DMatrix::identity(gram.nrows(), gram.ncols()) * lambda_sq).norm();
    Ok((lambda_sq.sqrt(), defect))
}
