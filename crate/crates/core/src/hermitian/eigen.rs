//! Cyclic complex Jacobi eigensolver for small hermitian matrices.

use nalgebra::{DMatrix, DVector};

use crate::{CMatrix, C64};

/// Relative off-diagonal Frobenius tolerance at which sweeps stop.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and a unitary matrix whose columns are the
/// matching eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a hermitian matrix. The caller is responsible for
/// hermiticity; only the upper triangle's conjugate symmetry is assumed.
///
/// Sweeps run over pairs `(p, q)` with `p < q` in row-major order, so the
/// result is fully deterministic.
pub(crate) fn jacobi_eigh(m: &CMatrix) -> Eigh {
    let n = m.nrows();
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= OFF_DIAGONAL_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // Phase e^{i phi} of a_pq is absorbed into column q, leaving a real
                // symmetric 2x2 problem.
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * r);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U restricted to (p, q): [[c, s], [-s conj(phase), c conj(phase)]]
                let u_pp = C64::new(c, 0.0);
                let u_pq = C64::new(s, 0.0);
                let u_qp = -phase.conj() * s;
                let u_qq = phase.conj() * c;

                // A <- A U
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                // A <- U* A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                // V <- V U
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let values = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)].re));
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Eigh { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &Eigh) -> CMatrix {
        let d = CMatrix::from_diagonal(&e.values.map(|x| C64::new(x, 0.0)));
        &e.vectors * d * e.vectors.adjoint()
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        );
        let e = jacobi_eigh(&m);
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        assert!((reconstruct(&e) - &m).norm() < 1e-13);
    }

    #[test]
    fn zero_matrix() {
        let e = jacobi_eigh(&CMatrix::zeros(3, 3));
        assert!(e.values.iter().all(|&x| x == 0.0));
        assert!((e.vectors - CMatrix::identity(3, 3)).norm() == 0.0);
    }
}
