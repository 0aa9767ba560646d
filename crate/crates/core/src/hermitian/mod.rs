//! Hermitian forms, ellipsoids and their volumes.
//!
//! A form is stored as its matrix `H` with the convention
//! `h(z, w) = w* H z`, linear in the first argument. With this convention
//! `h(Tz, z) = z* H T z = tr(T z z* H)`, which is what turns the integral
//! optimality condition into the matrix identity `sum_i mu_i z_i z_i* = H^{-1}`.

mod eigen;
mod geodesic;

pub use eigen::{Eigh, OFF_DIAGONAL_TOL};
pub use geodesic::{geodesic_point, geodesic_point_extrapolated, transport_operator, GeodesicSpec};

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::serde_complex;
use crate::{CMatrix, CVector, Error, Result, C64};

pub const MAX_DIM: usize = 8;
/// Elementwise tolerance for accepting a matrix as hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::Dimension(n));
    }
    Ok(())
}

/// Square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates hermiticity to within [`HERMITIAN_TOL`] and stores the exactly
    /// symmetrized matrix.
    pub fn new(m: CMatrix) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.ncols() });
        }
        check_dim(n)?;
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::symmetrized(&m))
    }

    /// `(M + M*) / 2` without validation; used on results of arithmetic that is
    /// hermitian up to rounding.
    pub fn symmetrized(m: &CMatrix) -> Self {
        let mut s = (m + m.adjoint()) * C64::new(0.5, 0.0);
        for i in 0..s.nrows() {
            s[(i, i)] = C64::new(s[(i, i)].re, 0.0);
        }
        HermitianMatrix(s)
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        check_dim(n)?;
        let mut m = CMatrix::zeros(n, n);
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        Self::new(m)
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(HermitianMatrix(CMatrix::identity(n, n)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn eigh(&self) -> Eigh {
        eigen::jacobi_eigh(&self.0)
    }

    /// `V f(diag(lambda)) V*` for a real function of the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let e = self.eigh();
        spectral(&e, f)
    }
}

pub(crate) fn spectral(e: &Eigh, f: impl Fn(f64) -> f64) -> HermitianMatrix {
    let n = e.values.len();
    let mut scaled = e.vectors.clone();
    for j in 0..n {
        let fj = f(e.values[j]);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    HermitianMatrix::symmetrized(&(scaled * e.vectors.adjoint()))
}

/// Eigendecomposition of a hermitian matrix.
///
/// Returns ascending eigenvalues and a unitary eigenvector matrix with
/// `M = V diag(lambda) V*`.
pub fn eigh(m: &HermitianMatrix) -> Eigh {
    m.eigh()
}

/// Matrix of a positive definite hermitian form, with its spectral
/// decomposition cached.
#[derive(Clone, Debug)]
pub struct HpdForm {
    matrix: HermitianMatrix,
    eig: Eigh,
}

impl PartialEq for HpdForm {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl HpdForm {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let eig = matrix.eigh();
        let min = eig.values[0];
        if !(min > 0.0) {
            return Err(Error::NotPositiveDefinite(min));
        }
        Ok(HpdForm { matrix, eig })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(d)?)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(HermitianMatrix::identity(n)?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.as_matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &Eigh {
        &self.eig
    }

    /// `h(z, w) = w* H z`.
    pub fn eval(&self, z: &CVector, w: &CVector) -> C64 {
        w.dotc(&(self.matrix() * z))
    }

    /// `h(z, z)`, real.
    pub fn quad(&self, z: &CVector) -> f64 {
        self.eval(z, z).re
    }

    pub fn det(&self) -> f64 {
        self.eig.values.iter().product()
    }

    pub fn log_det(&self) -> f64 {
        self.eig.values.iter().map(|x| x.ln()).sum()
    }

    /// `H^t` via the spectral decomposition.
    pub fn power(&self, t: f64) -> HermitianMatrix {
        if t == 0.0 {
            return HermitianMatrix(CMatrix::identity(self.dim(), self.dim()));
        }
        if t == 1.0 {
            return self.matrix.clone();
        }
        spectral(&self.eig, |x| x.powf(t))
    }

    pub fn inverse(&self) -> HermitianMatrix {
        spectral(&self.eig, |x| 1.0 / x)
    }

    pub fn sqrt(&self) -> HermitianMatrix {
        spectral(&self.eig, f64::sqrt)
    }

    pub fn inv_sqrt(&self) -> HermitianMatrix {
        spectral(&self.eig, |x| 1.0 / x.sqrt())
    }

    pub fn scaled(&self, s: f64) -> Result<HpdForm> {
        HpdForm::from_matrix(self.matrix() * C64::new(s, 0.0))
    }
}

/// Fractional power of a positive definite form; the result is again
/// positive definite.
pub fn frac_power(h: &HpdForm, t: f64) -> Result<HpdForm> {
    HpdForm::new(h.power(t))
}

/// `E = {z : h(z - c, z - c) < 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    form: HpdForm,
    center: CVector,
}

impl Ellipsoid {
    pub fn new(form: HpdForm, center: CVector) -> Result<Self> {
        if center.len() != form.dim() {
            return Err(Error::DimensionMismatch { expected: form.dim(), got: center.len() });
        }
        if center.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Ellipsoid { form, center })
    }

    pub fn centered(form: HpdForm) -> Self {
        let n = form.dim();
        Ellipsoid { form, center: CVector::zeros(n) }
    }

    /// Euclidean ball of the given radius about `center`.
    pub fn ball(center: CVector, radius: f64) -> Result<Self> {
        let n = center.len();
        let d = vec![1.0 / (radius * radius); n];
        Self::new(HpdForm::from_real_diagonal(&d)?, center)
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn form(&self) -> &HpdForm {
        &self.form
    }

    pub fn center(&self) -> &CVector {
        &self.center
    }

    pub fn is_centered(&self) -> bool {
        self.center.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    /// `h(z - c, z - c)`; `< 1` inside, `= 1` on the boundary.
    pub fn gauge(&self, z: &CVector) -> f64 {
        self.form.quad(&(z - &self.center))
    }

    pub fn volume(&self) -> f64 {
        volume(self)
    }

    pub fn log_volume(&self) -> f64 {
        let n = self.dim();
        n as f64 * PI.ln() - ln_factorial(n) - self.form.log_det()
    }

    /// The same form and center scaled by `s` about the center (`H / s^2`).
    pub fn dilated(&self, s: f64) -> Result<Ellipsoid> {
        Ellipsoid::new(self.form.scaled(1.0 / (s * s))?, self.center.clone())
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Lebesgue volume in real dimension `2n`: `(pi^n / n!) / det H`.
///
/// Under a complex-linear map `A` this scales by `|det A|^2`.
pub fn volume(e: &Ellipsoid) -> f64 {
    let n = e.dim();
    let unit_ball = PI.powi(n as i32) / (2..=n).map(|k| k as f64).product::<f64>();
    unit_ball / e.form.det()
}

#[derive(Serialize, Deserialize)]
struct EllipsoidJson {
    n: usize,
    center: Vec<[f64; 2]>,
    #[serde(rename = "H")]
    h: Vec<Vec<[f64; 2]>>,
}

impl Serialize for Ellipsoid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EllipsoidJson {
            n: self.dim(),
            center: serde_complex::vec_to_pairs(&self.center),
            h: serde_complex::mat_to_pairs(self.form.matrix()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ellipsoid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = EllipsoidJson::deserialize(d)?;
        let h = serde_complex::pairs_to_mat(&raw.h).ok_or_else(|| D::Error::custom("ragged H"))?;
        if h.nrows() != raw.n || raw.center.len() != raw.n {
            return Err(D::Error::custom(format!("dimension fields disagree with n = {}", raw.n)));
        }
        let form = HpdForm::from_matrix(h).map_err(D::Error::custom)?;
        Ellipsoid::new(form, serde_complex::pairs_to_vec(&raw.center)).map_err(D::Error::custom)
    }
}

pub fn real_vec(v: &[f64]) -> CVector {
    DVector::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0)))
}
