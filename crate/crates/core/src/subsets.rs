//! Lexicographic d-subset enumeration, squared subset determinants, and
//! log-sum-exp accumulation. Shared by the Cauchy-Binet evaluation paths,
//! basis enumeration, and the reference oracle.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tol;

/// Checked binomial coefficient; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// Errors out unless `C(n, k)` subsets fit under the enumeration cap.
pub fn check_enumeration_cap(n: usize, k: usize, what: &str) -> Result<u64> {
    let count = binomial(n as u64, k as u64).unwrap_or(u64::MAX);
    if count > tol::ENUMERATION_CAP {
        return Err(Error::Cap(format!(
            "{what}: C({n},{k}) = {count} exceeds the cap of {}",
            tol::ENUMERATION_CAP
        )));
    }
    Ok(count)
}

/// Iterator over k-element subsets of `0..n` in lexicographic order.
pub struct Subsets {
    n: usize,
    k: usize,
    current: Vec<usize>,
    done: bool,
}

impl Subsets {
    pub fn new(n: usize, k: usize) -> Self {
        let done = k > n;
        Subsets {
            n,
            k,
            current: (0..k).collect(),
            done,
        }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let item = self.current.clone();
        // Advance to the lexicographic successor.
        if self.k == 0 {
            self.done = true;
            return Some(item);
        }
        let mut i = self.k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] < self.n - self.k + i {
                self.current[i] += 1;
                for j in i + 1..self.k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(item)
    }
}

/// Determinant of the d x d submatrix of unit columns indexed by `s`.
pub fn subset_determinant(columns: &DMatrix<f64>, s: &[usize]) -> f64 {
    let d = columns.nrows();
    debug_assert_eq!(s.len(), d);
    let mut m = DMatrix::zeros(d, d);
    for (j, &i) in s.iter().enumerate() {
        m.set_column(j, &columns.column(i));
    }
    m.determinant()
}

/// Squared subset determinant `Delta_S`, snapped to zero when the determinant
/// falls below the relative dependence threshold.
pub fn delta_s(columns: &DMatrix<f64>, s: &[usize]) -> f64 {
    let det = subset_determinant(columns, s);
    let norm_product: f64 = s.iter().map(|&i| columns.column(i).norm()).product();
    if det.abs() < tol::DET_ZERO_TOL * norm_product {
        0.0
    } else {
        det * det
    }
}

/// Streaming log-sum-exp accumulator: represents `ln(sum_i exp(l_i))`
/// without overflow for arbitrarily large terms.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub fn add(&mut self, l: f64) {
        if l == f64::NEG_INFINITY {
            return;
        }
        if l <= self.max {
            self.sum += (l - self.max).exp();
        } else {
            self.sum = if self.max == f64::NEG_INFINITY {
                1.0
            } else {
                self.sum * (self.max - l).exp() + 1.0
            };
            self.max = l;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.max == f64::NEG_INFINITY
    }
}

impl Default for LogSum {
    fn default() -> Self {
        LogSum::new()
    }
}
