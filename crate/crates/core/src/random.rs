//! Seeded random generators for matrices, vectors and ellipsoids.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hermitian::{spectral, Eigh, HermitianMatrix, HpdForm};
use crate::{CMatrix, CVector, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn random_complex_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    DVector::from_fn(n, |_, _| complex_normal(rng))
}

pub fn random_complex_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    DMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    let v = random_complex_vector(rng, n);
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    let g = random_complex_matrix(rng, n);
    HermitianMatrix::symmetrized(&g)
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian
/// matrix, with the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_complex_matrix(rng, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// `U diag(lambda) U*` with eigenvalues log-uniform in `[lo, hi]`.
pub fn random_hpd_log_uniform<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> HpdForm {
    let (a, b) = (lo.ln(), hi.ln());
    let values = DVector::from_fn(n, |_, _| (a + (b - a) * rng.random::<f64>()).exp());
    let eig = Eigh { values, vectors: random_unitary(rng, n) };
    HpdForm::new(spectral(&eig, |x| x)).expect("positive spectrum")
}

/// Positive definite form with eigenvalues in `[0.2, 5]`.
pub fn random_hpd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HpdForm {
    random_hpd_log_uniform(rng, n, 0.2, 5.0)
}
