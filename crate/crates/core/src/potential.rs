//! The log-determinant potential and its derivatives.
//!
//! The production path computes everything from one SVD of the reweighted
//! configuration `X(t) = {e^{t_i/2} x_i}`: the gradient entries are the
//! squared row norms of U, and the Hessian entries are squared inner products
//! of those rows. The subset-enumeration path evaluates the same quantities
//! through the Cauchy-Binet expansion and serves as a small-instance oracle;
//! the two share no numerical kernel.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{ScalingVector, VectorSet, WeightVector};
use crate::subsets::{check_enumeration_cap, delta_s, LogSum, Subsets};
use crate::tol;

/// SVD view of the reweighted Gram matrix `Q(t) = sum_i e^{t_i} x_i x_i^T`.
///
/// The mean of `t` is removed before exponentiation and tracked separately,
/// so the factorization stays well scaled for any shift along the all-ones
/// direction; `Q`, `phi` and the singular values account for the shift on
/// the way out, while `U`, `V`, the gradient and the Hessian are invariant.
#[derive(Debug, Clone)]
pub struct WeightedGram {
    t: DVector<f64>,
    shift: f64,
    u: DMatrix<f64>,
    sigma: DVector<f64>,
    v: DMatrix<f64>,
}

impl WeightedGram {
    pub fn t(&self) -> &DVector<f64> {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    pub fn count(&self) -> usize {
        self.u.nrows()
    }

    /// Rows of U; the j-th row is `u_j = Q^{-1/2}(t) e^{t_j/2} x_j` for the
    /// non-symmetric square root.
    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn u_row(&self, j: usize) -> DVector<f64> {
        self.u.row(j).transpose()
    }

    /// Singular values of `X(t)^T`, descending.
    pub fn sigma(&self) -> DVector<f64> {
        let s = (self.shift / 2.0).exp();
        &self.sigma * s
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// The weighted Gram matrix `Q(t) = V S^2 V^T`.
    pub fn q(&self) -> DMatrix<f64> {
        let s2 = self.shift.exp();
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for k in 0..self.dim() {
            let col = self.v.column(k);
            let w = s2 * self.sigma[k] * self.sigma[k];
            m += w * &col * col.transpose();
        }
        m
    }

    /// The symmetric positive definite square root inverse `V S^{-1} V^T`.
    pub fn q_inv_sqrt_symmetric(&self) -> Result<DMatrix<f64>> {
        self.check_nonsingular()?;
        let s = (-self.shift / 2.0).exp();
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for k in 0..self.dim() {
            let col = self.v.column(k);
            m += (s / self.sigma[k]) * &col * col.transpose();
        }
        Ok(m)
    }

    /// The non-symmetric square root inverse `S^{-1} V^T` (the symmetric form
    /// composed with a rotation).
    pub fn q_inv_sqrt(&self) -> Result<DMatrix<f64>> {
        self.check_nonsingular()?;
        let s = (-self.shift / 2.0).exp();
        let mut m = self.v.transpose();
        for k in 0..self.dim() {
            let row_scale = s / self.sigma[k];
            m.row_mut(k).apply(|x| *x *= row_scale);
        }
        Ok(m)
    }

    fn check_nonsingular(&self) -> Result<()> {
        let smax = self.sigma.max();
        let smin = self.sigma.min();
        if !(smin > tol::RANK_TOL * smax) {
            return Err(Error::Singular(format!(
                "weighted Gram matrix is numerically singular (sigma_min/sigma_max = {:.3e})",
                smin / smax
            )));
        }
        Ok(())
    }

    /// Checks the factorization identities: `Q = V S^2 V^T`, orthonormal U
    /// columns, and `|u_j| <= 1` for every row.
    pub fn validate(&self) -> Result<()> {
        let n = self.count() as f64;
        let gram = self.u.transpose() * &self.u;
        let ortho = (&gram - DMatrix::identity(self.dim(), self.dim())).norm();
        if ortho > n * tol::FRO_TOL {
            return Err(Error::Singular(format!(
                "U columns deviate from orthonormality by {ortho:.3e}"
            )));
        }
        for j in 0..self.count() {
            let r = self.u.row(j).norm();
            if r > 1.0 + n * tol::FRO_TOL {
                return Err(Error::Singular(format!("row |u_{j}| = {r} exceeds 1")));
            }
        }
        Ok(())
    }
}

/// Builds the weighted Gram view at `t` with the requested SVD accuracy
/// (additive, relative to the Frobenius norm of the reweighted configuration).
pub fn assemble(x: &VectorSet, t: &ScalingVector, svd_tol: f64) -> Result<WeightedGram> {
    let tv = t.vector();
    if tv.len() != x.count() {
        return Err(Error::Dimension(format!(
            "t has {} entries, expected n = {}",
            tv.len(),
            x.count()
        )));
    }
    if tv.iter().any(|v| !v.is_finite()) {
        return Err(Error::Range("t has non-finite entries".into()));
    }
    let range = tv.max() - tv.min();
    if range > tol::T_RANGE_LIMIT {
        return Err(Error::Range(format!(
            "spread of t is {range:.1} log-units, beyond the overflow guard of {}",
            tol::T_RANGE_LIMIT
        )));
    }
    let shift = tv.mean();
    let n = x.count();
    let d = x.dim();
    // Rows of M are e^{(t_i - shift)/2} x_i^T.
    let mut m = DMatrix::zeros(n, d);
    for i in 0..n {
        let w = ((tv[i] - shift) / 2.0).exp();
        m.set_row(i, &(w * x.matrix().column(i).transpose()));
    }
    let eps = svd_tol.clamp(f64::EPSILON, 1e-4);
    let svd = m
        .try_svd(true, true, eps, 0)
        .ok_or_else(|| Error::Singular("SVD iteration failed to converge".into()))?;
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v requested");
    Ok(WeightedGram {
        t: tv.clone(),
        shift,
        u,
        sigma: svd.singular_values,
        v: v_t.transpose(),
    })
}

/// `phi(t) = log det Q(t)`, computed as `2 sum_k log sigma_k`.
pub fn phi(g: &WeightedGram) -> Result<f64> {
    g.check_nonsingular()?;
    let logs: f64 = g.sigma.iter().map(|s| s.ln()).sum();
    Ok(2.0 * logs + g.shift * g.dim() as f64)
}

/// `f(t) = phi(t) - <c, t>`, the objective whose minimizer yields the
/// isotropy transform.
pub fn f_value(g: &WeightedGram, c: &WeightVector) -> Result<f64> {
    Ok(phi(g)? - c.vector().dot(&g.t))
}

/// Gradient of phi: squared row norms of U. Entries are strictly positive
/// and sum to d.
pub fn grad_phi(g: &WeightedGram) -> DVector<f64> {
    DVector::from_fn(g.count(), |j, _| g.u.row(j).norm_squared())
}

/// Gradient of f: `grad phi - c`.
pub fn grad_f(g: &WeightedGram, c: &WeightVector) -> DVector<f64> {
    grad_phi(g) - c.vector()
}

/// Subset-enumeration evaluation of phi via the Cauchy-Binet expansion,
/// accumulated with log-sum-exp.
pub fn phi_cauchy_binet(x: &VectorSet, t: &ScalingVector) -> Result<f64> {
    let (n, d) = (x.count(), x.dim());
    check_enumeration_cap(n, d, "phi_cauchy_binet")?;
    let tv = t.vector();
    let mut total = LogSum::new();
    for s in Subsets::new(n, d) {
        let delta = delta_s(x.matrix(), &s);
        if delta > 0.0 {
            let l: f64 = s.iter().map(|&i| tv[i]).sum::<f64>() + delta.ln();
            total.add(l);
        }
    }
    if total.is_empty() {
        return Err(Error::Rank("no independent d-subset found".into()));
    }
    Ok(total.value())
}

/// Subset-enumeration evaluation of the gradient of phi: the ratio of
/// restricted to full Cauchy-Binet sums per coordinate.
pub fn grad_phi_subsets(x: &VectorSet, t: &ScalingVector) -> Result<DVector<f64>> {
    let (n, d) = (x.count(), x.dim());
    check_enumeration_cap(n, d, "grad_phi_subsets")?;
    let tv = t.vector();
    let mut total = LogSum::new();
    let mut per_index = vec![LogSum::new(); n];
    for s in Subsets::new(n, d) {
        let delta = delta_s(x.matrix(), &s);
        if delta > 0.0 {
            let l: f64 = s.iter().map(|&i| tv[i]).sum::<f64>() + delta.ln();
            total.add(l);
            for &i in &s {
                per_index[i].add(l);
            }
        }
    }
    if total.is_empty() {
        return Err(Error::Rank("no independent d-subset found".into()));
    }
    let log_total = total.value();
    Ok(DVector::from_fn(n, |j, _| {
        if per_index[j].is_empty() {
            0.0
        } else {
            (per_index[j].value() - log_total).exp()
        }
    }))
}

/// The n x n Hessian of phi (equivalently of f).
#[derive(Debug, Clone)]
pub struct HessianMatrix {
    h: DMatrix<f64>,
}

impl HessianMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.h.nrows()
    }

    /// Checks `H 1 = 0`, diagonal within [0, 1/4], and non-positive
    /// off-diagonal entries.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let slack = n as f64 * tol::FRO_TOL;
        let row_sums = &self.h * DVector::from_element(n, 1.0);
        if row_sums.amax() > slack {
            return Err(Error::Singular(format!(
                "H*1 deviates from zero by {:.3e}",
                row_sums.amax()
            )));
        }
        for i in 0..n {
            let dii = self.h[(i, i)];
            if !(-slack..=0.25 + slack).contains(&dii) {
                return Err(Error::Singular(format!("H_{{{i},{i}}} = {dii} out of [0, 1/4]")));
            }
            for j in 0..n {
                if i != j && self.h[(i, j)] > slack {
                    return Err(Error::Singular(format!(
                        "off-diagonal H_{{{i},{j}}} = {} is positive",
                        self.h[(i, j)]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Hessian from the SVD rows: `H_jj = |u_j|^2 - |u_j|^4`,
/// `H_jk = -<u_j, u_k>^2`.
pub fn hessian(g: &WeightedGram) -> HessianMatrix {
    let n = g.count();
    let gram = g.u() * g.u().transpose();
    let mut h = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let p = gram[(j, k)];
            if j == k {
                h[(j, k)] = p - p * p;
            } else {
                h[(j, k)] = -p * p;
            }
        }
    }
    HessianMatrix { h }
}

/// Largest eigenvalue magnitude of the Hessian. Callers assert the 1/2
/// spectral bound against this value.
pub fn spectral_bound_check(h: &HessianMatrix) -> f64 {
    let eig = h
        .h
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .expect("symmetric eigensolver converges");
    eig.eigenvalues.amax()
}
