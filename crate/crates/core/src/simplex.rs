//! Minimal dense two-phase simplex with Bland's rule.
//!
//! Solves `max c^T x  s.t.  A x = b, x >= 0` with `b >= 0`. Bland's rule makes
//! the pivot sequence (and therefore the reported optimum and basis) fully
//! deterministic, which the membership reports rely on.

use nalgebra::{DMatrix, DVector};

const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// Optimal solution found: objective value and primal vector.
    Optimal { objective: f64, x: DVector<f64> },
    /// Phase 1 could not drive the artificials to zero: no feasible point.
    Infeasible { residual: f64 },
    Unbounded,
}

pub fn solve_lp(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> LpOutcome {
    let (m, n) = (a.nrows(), a.ncols());
    debug_assert_eq!(b.len(), m);
    debug_assert_eq!(c.len(), n);
    debug_assert!(b.iter().all(|&v| v >= 0.0));

    // Tableau with artificial variables appended: columns 0..n are the real
    // variables, n..n+m the artificials.
    let total = n + m;
    let mut t = DMatrix::zeros(m, total);
    t.view_mut((0, 0), (m, n)).copy_from(a);
    for i in 0..m {
        t[(i, n + i)] = 1.0;
    }
    let mut rhs = b.clone();
    let mut basis: Vec<usize> = (n..total).collect();

    // Phase 1: minimize the sum of artificials.
    let mut phase1_obj = DVector::zeros(total);
    for j in n..total {
        phase1_obj[j] = -1.0;
    }
    run_simplex(&mut t, &mut rhs, &mut basis, &phase1_obj, n);
    let residual: f64 = basis
        .iter()
        .zip(rhs.iter())
        .filter(|(&j, _)| j >= n)
        .map(|(_, &v)| v)
        .sum();
    if residual > 1e-9 {
        return LpOutcome::Infeasible { residual };
    }
    // Pivot any residual (degenerate) artificials out of the basis.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[(i, j)].abs() > PIVOT_TOL) {
                pivot(&mut t, &mut rhs, &mut basis, i, j);
            }
            // A row with no real pivot is redundant; its artificial stays at
            // value zero and never re-enters because phase 2 bars it.
        }
    }

    // Phase 2: maximize the real objective, artificials barred.
    let mut phase2_obj = DVector::zeros(total);
    phase2_obj.rows_mut(0, n).copy_from(c);
    if !run_simplex(&mut t, &mut rhs, &mut basis, &phase2_obj, n) {
        return LpOutcome::Unbounded;
    }

    let mut x = DVector::zeros(n);
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = rhs[i];
        }
    }
    LpOutcome::Optimal {
        objective: c.dot(&x),
        x,
    }
}

/// Runs simplex iterations in place; returns false on unboundedness.
fn run_simplex(
    t: &mut DMatrix<f64>,
    rhs: &mut DVector<f64>,
    basis: &mut [usize],
    obj: &DVector<f64>,
    n_real: usize,
) -> bool {
    let (m, total) = (t.nrows(), t.ncols());
    let barred = |j: usize| obj[j] == 0.0 && j >= n_real;
    let mut in_basis = vec![false; total];
    for &j in basis.iter() {
        in_basis[j] = true;
    }
    loop {
        // Reduced costs: r_j = obj_j - y^T a_j with y from the basis rows.
        let mut y = DVector::zeros(m);
        for (i, &j) in basis.iter().enumerate() {
            y[i] = obj[j];
        }
        let mut entering = None;
        for j in 0..total {
            if in_basis[j] || barred(j) {
                continue;
            }
            let reduced = obj[j] - y.dot(&t.column(j).into_owned());
            if reduced > PIVOT_TOL {
                entering = Some(j);
                break; // Bland: smallest index.
            }
        }
        let Some(j) = entering else {
            return true;
        };
        // Ratio test, ties broken by smallest basis index (Bland).
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[(i, j)];
            if a > PIVOT_TOL {
                let ratio = rhs[i] / a;
                match leaving {
                    None => leaving = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - PIVOT_TOL
                            || (ratio < lr + PIVOT_TOL && basis[i] < basis[li])
                        {
                            leaving = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leaving else {
            return false;
        };
        in_basis[basis[i]] = false;
        in_basis[j] = true;
        pivot(t, rhs, basis, i, j);
    }
}

fn pivot(
    t: &mut DMatrix<f64>,
    rhs: &mut DVector<f64>,
    basis: &mut [usize],
    row: usize,
    col: usize,
) {
    let m = t.nrows();
    let p = t[(row, col)];
    let mut r = t.row_mut(row);
    r /= p;
    rhs[row] /= p;
    for i in 0..m {
        if i != row {
            let factor = t[(i, col)];
            if factor != 0.0 {
                let pivot_row = t.row(row).into_owned();
                let mut target = t.row_mut(i);
                target -= factor * pivot_row;
                rhs[i] -= factor * rhs[row];
                if rhs[i] < 0.0 && rhs[i] > -1e-12 {
                    rhs[i] = 0.0;
                }
            }
        }
    }
    basis[row] = col;
}
