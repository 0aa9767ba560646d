//! Dense tableau simplex for small linear programs whose origin is feasible.
//!
//! Solves `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0`, starting from the
//! all-slack basis. Bland's rule guards against cycling, which matters here:
//! the contact rows all have zero right-hand side.

use nalgebra::DMatrix;

use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
/// Column entries below this are ignored by the ratio test. Callers scale
/// rows to unit max-norm, so this is relative.
const RATIO_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;
/// Pivots between rebuilds of the tableau from the original data.
const REFACTOR_EVERY: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Nonnegative multipliers, one per row of `A`.
    pub duals: Vec<f64>,
}

/// `max c.x` subject to `A x <= b`, `x >= 0`, with every `b_i >= 0`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let nv = c.len();
    let m = a.len();
    if b.len() != m || a.iter().any(|r| r.len() != nv) {
        return Err(Error::Lp("inconsistent dimensions".into()));
    }
    if b.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::Lp("right-hand side must be nonnegative".into()));
    }
    let width = nv + m + 1;
    let rhs = nv + m;
    let mut t = vec![0.0; (m + 1) * width];
    for i in 0..m {
        let row = &mut t[i * width..(i + 1) * width];
        row[..nv].copy_from_slice(&a[i]);
        row[nv + i] = 1.0;
        row[rhs] = b[i];
    }
    let obj = m * width;
    for j in 0..nv {
        t[obj + j] = -c[j];
    }
    let original = t.clone();
    let mut basis: Vec<usize> = (nv..nv + m).collect();
    let scale = c.iter().fold(1.0f64, |s, v| s.max(v.abs()));

    // Dantzig pricing with the largest pivot among tied ratios; after a long
    // run of degenerate pivots, Bland's rule takes over to rule out cycling.
    let mut pivots = 0;
    let mut degenerate_run = 0;
    let mut bland = false;
    let mut fresh = true;
    loop {
        let enter = if bland {
            (0..nv + m).find(|&j| t[obj + j] < -PIVOT_TOL * scale)
        } else {
            (0..nv + m)
                .filter(|&j| t[obj + j] < -PIVOT_TOL * scale)
                .min_by(|&a, &b| t[obj + a].total_cmp(&t[obj + b]).then(a.cmp(&b)))
        };
        let Some(enter) = enter else {
            if fresh {
                break;
            }
            // confirm optimality on a tableau rebuilt from the data
            refactor(&mut t, &original, width, m, &basis)?;
            fresh = true;
            continue;
        };
        let mut best = f64::INFINITY;
        for i in 0..m {
            let aij = t[i * width + enter];
            if aij > RATIO_TOL {
                best = best.min(t[i * width + rhs] / aij);
            }
        }
        if best == f64::INFINITY {
            return Err(Error::Lp("unbounded".into()));
        }
        let mut leave: Option<usize> = None;
        for i in 0..m {
            let aij = t[i * width + enter];
            if aij > RATIO_TOL && t[i * width + rhs] / aij <= best + 1e-12 {
                let better = match leave {
                    None => true,
                    Some(l) if bland => basis[i] < basis[l],
                    Some(l) => aij > t[l * width + enter],
                };
                if better {
                    leave = Some(i);
                }
            }
        }
        let r = leave.expect("a row attains the minimum ratio");
        if best <= 1e-12 {
            degenerate_run += 1;
            if degenerate_run > 50 {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
        pivot(&mut t, width, m, r, enter);
        basis[r] = enter;
        pivots += 1;
        fresh = false;
        if pivots % REFACTOR_EVERY == 0 {
            refactor(&mut t, &original, width, m, &basis)?;
            fresh = true;
        }
        if pivots > MAX_PIVOTS {
            return Err(Error::Lp("pivot limit exceeded".into()));
        }
    }

    let mut x = vec![0.0; nv];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nv {
            x[bv] = t[i * width + rhs];
        }
    }
    let duals = (0..m).map(|i| t[obj + nv + i].max(0.0)).collect();
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, value, duals })
}

/// Recomputes `B^{-1} [A I b]` and the objective row for the current basis,
/// discarding accumulated round-off.
fn refactor(t: &mut [f64], original: &[f64], width: usize, m: usize, basis: &[usize]) -> Result<()> {
    let bm = DMatrix::from_fn(m, m, |i, k| original[i * width + basis[k]]);
    let full = DMatrix::from_fn(m, width, |i, j| original[i * width + j]);
    let x = bm.lu().solve(&full).ok_or_else(|| Error::Lp("singular basis".into()))?;
    let obj = m * width;
    for j in 0..width {
        let mut acc = original[obj + j];
        for i in 0..m {
            t[i * width + j] = x[(i, j)];
            // objective coefficients of basic columns are -c_B
            acc -= original[obj + basis[i]] * x[(i, j)];
        }
        t[obj + j] = acc;
    }
    for i in 0..m {
        // clean round-off in the basic columns and keep rhs feasible
        for k in 0..m {
            t[i * width + basis[k]] = if i == k { 1.0 } else { 0.0 };
        }
        t[obj + basis[i]] = 0.0;
        let rhs = width - 1;
        if t[i * width + rhs] < 0.0 && t[i * width + rhs] > -1e-9 {
            t[i * width + rhs] = 0.0;
        }
    }
    Ok(())
}

fn pivot(t: &mut [f64], width: usize, m: usize, r: usize, col: usize) {
    let p = t[r * width + col];
    for j in 0..width {
        t[r * width + j] /= p;
    }
    for i in 0..=m {
        if i == r {
            continue;
        }
        let f = t[i * width + col];
        if f != 0.0 {
            for j in 0..width {
                t[i * width + j] -= f * t[r * width + j];
            }
            t[i * width + col] = 0.0;
        }
    }
}

/// Solution of `max c.x  s.t.  G x <= 0, |x_j| <= bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxLpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Multipliers of the rows of `G`.
    pub row_duals: Vec<f64>,
}

/// Homogeneous constraints in a box. `x = u - v` with `0 <= u, v <= bound`
/// keeps the origin a feasible starting vertex. Rows are scaled to unit
/// max-norm internally; the reported duals refer to the rows as given.
pub fn maximize_in_box(c: &[f64], g: &[Vec<f64>], bound: f64) -> Result<BoxLpSolution> {
    let nv = c.len();
    let mut cc = c.to_vec();
    cc.extend(c.iter().map(|v| -v));
    let mut rows = Vec::with_capacity(g.len() + 2 * nv);
    let mut rhs = Vec::with_capacity(g.len() + 2 * nv);
    let scales: Vec<f64> = g.iter().map(|r| r.iter().fold(0.0f64, |m, v| m.max(v.abs()))).collect();
    for (r, &s) in g.iter().zip(&scales) {
        let inv = if s > 0.0 { 1.0 / s } else { 1.0 };
        let mut row: Vec<f64> = r.iter().map(|v| v * inv).collect();
        row.extend(r.iter().map(|v| -v * inv));
        rows.push(row);
        rhs.push(0.0);
    }
    for j in 0..2 * nv {
        let mut row = vec![0.0; 2 * nv];
        row[j] = 1.0;
        rows.push(row);
        rhs.push(bound);
    }
    let sol = maximize(&cc, &rows, &rhs)?;
    let x: Vec<f64> = (0..nv).map(|j| sol.x[j] - sol.x[nv + j]).collect();
    let slack = 1e-7 * bound.max(1.0);
    let inside = x.iter().all(|v| v.abs() <= bound + slack)
        && rows[..g.len()].iter().all(|r| r[..nv].iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() <= slack);
    if !inside {
        return Err(Error::Lp("numerical breakdown: solution violates the constraints".into()));
    }
    let row_duals =
        sol.duals[..g.len()].iter().zip(&scales).map(|(y, &s)| if s > 0.0 { y / s } else { *y }).collect();
    Ok(BoxLpSolution { x, value: sol.value, row_duals })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_instance() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36; duals (0, 3/2, 1)
        let s = maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert!((s.value - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        assert!(s.duals[0].abs() < 1e-12);
        assert!((s.duals[1] - 1.5).abs() < 1e-12);
        assert!((s.duals[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_detected() {
        assert!(matches!(maximize(&[1.0], &[vec![-1.0]], &[0.0]), Err(Error::Lp(_))));
    }

    #[test]
    fn box_lp_against_vertex_enumeration() {
        let mut rng = crate::random::rng(3);
        use rand::Rng;
        for _ in 0..30 {
            let nv = 4;
            let m = rng.random_range(0..5);
            let c: Vec<f64> = (0..nv).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g: Vec<Vec<f64>> = (0..m).map(|_| (0..nv).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            let sol = maximize_in_box(&c, &g, 1.0).unwrap();
            let mut rows = g.clone();
            let mut h = vec![0.0; m];
            for j in 0..nv {
                let mut e = vec![0.0; nv];
                e[j] = 1.0;
                rows.push(e.clone());
                h.push(1.0);
                e[j] = -1.0;
                rows.push(e);
                h.push(1.0);
            }
            let best = oracle::vertex_enumeration(&c, &rows, &h);
            assert!((sol.value - best).abs() < 1e-9, "{} vs {best}", sol.value);
            for r in &g {
                assert!(r.iter().zip(&sol.x).map(|(a, b)| a * b).sum::<f64>() <= 1e-10);
            }
        }
    }
}
