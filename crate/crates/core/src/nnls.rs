//! Lawson-Hanson active-set nonnegative least squares.

use nalgebra::{DMatrix, DVector};

/// Minimizes `||A x - b||` over `x >= 0`.
///
/// `warm` lists columns to try in the passive set first; the result does not
/// depend on it beyond rounding, only the iteration count does.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, warm: &[usize]) -> DVector<f64> {
    let k = a.ncols();
    let mut x = DVector::zeros(k);
    let mut passive = vec![false; k];
    let scale = a.norm() * b.norm().max(1.0);
    let tol = 1e-13 * scale.max(1e-300);

    if !warm.is_empty() {
        let cols: Vec<usize> = warm.iter().copied().filter(|&j| j < k).collect();
        let s = restricted_lstsq(a, b, &cols);
        for (&j, &v) in cols.iter().zip(s.iter()) {
            if v > 0.0 {
                x[j] = v;
                passive[j] = true;
            }
        }
        inner_loop(a, b, &mut x, &mut passive);
    }

    for _ in 0..(3 * k + 10) {
        let w = a.transpose() * (b - a * &x);
        let mut best: Option<usize> = None;
        for j in 0..k {
            if !passive[j] && w[j] > tol && best.is_none_or(|bj| w[j] > w[bj]) {
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        passive[j] = true;
        if !inner_loop(a, b, &mut x, &mut passive) {
            // the new column made no progress; it stays out
            passive[j] = false;
            x[j] = 0.0;
            break;
        }
    }
    x
}

/// Restores `x_P > 0` with `x_P` the least-squares solution on the passive
/// set. Returns false if the passive set empties.
fn inner_loop(a: &DMatrix<f64>, b: &DVector<f64>, x: &mut DVector<f64>, passive: &mut [bool]) -> bool {
    for _ in 0..(3 * passive.len() + 10) {
        let cols: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
        if cols.is_empty() {
            return false;
        }
        let s = restricted_lstsq(a, b, &cols);
        if s.iter().all(|&v| v > 0.0) {
            x.fill(0.0);
            for (&j, &v) in cols.iter().zip(s.iter()) {
                x[j] = v;
            }
            return true;
        }
        let mut alpha = f64::INFINITY;
        let mut hit = cols[0];
        for (&j, &v) in cols.iter().zip(s.iter()) {
            if v <= 0.0 {
                let d = x[j] - v;
                let ratio = if d > 0.0 { x[j] / d } else { 0.0 };
                if ratio < alpha {
                    alpha = ratio;
                    hit = j;
                }
            }
        }
        for (&j, &v) in cols.iter().zip(s.iter()) {
            x[j] += alpha * (v - x[j]);
        }
        x[hit] = 0.0;
        passive[hit] = false;
        for &j in &cols {
            if x[j] <= 0.0 {
                x[j] = 0.0;
                passive[j] = false;
            }
        }
    }
    true
}

fn restricted_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, cols: &[usize]) -> DVector<f64> {
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, j| a[(i, cols[j])]);
    let svd = sub.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1e-300);
    svd.solve(b, eps).unwrap_or_else(|_| DVector::zeros(cols.len()))
}
