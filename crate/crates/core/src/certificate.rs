//! Discrete contact measures certifying (or refuting) maximality.
//!
//! With `h(z, w) = w* H z`, the condition `sum_i mu_i h(T z_i, z_i) = tr T`
//! for all operators `T` is equivalent to `sum_i mu_i z_i z_i* = H^{-1}`; the
//! translated variant becomes `sum_i mu_i (z_i - c) = 0` together with
//! `sum_i mu_i z_i (z_i - c)* = H^{-1}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::containment::ContactSet;
use crate::hermitian::HpdForm;
use crate::nnls::nnls;
use crate::random::{random_complex_matrix, rng};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Residual above which a fitted measure is not accepted as a certificate.
pub const FIT_THRESHOLD: f64 = 1e-4;

/// Finitely supported nonnegative measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactMeasure {
    #[serde(with = "crate::serde_complex::vectors")]
    pub points: Vec<CVector>,
    pub weights: Vec<f64>,
}

impl ContactMeasure {
    pub fn new(points: Vec<CVector>, weights: Vec<f64>) -> Result<Self> {
        let m = ContactMeasure { points, weights };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() != self.weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} points but {} weights",
                self.points.len(),
                self.weights.len()
            )));
        }
        if let Some(w) = self.weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidMeasure(format!("weight {w} is not a nonnegative number")));
        }
        if let Some(p) = self.points.first() {
            let n = p.len();
            if self.points.iter().any(|q| q.len() != n) {
                return Err(Error::InvalidMeasure("points of differing dimension".into()));
            }
            if self.points.iter().flat_map(|q| q.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite point coordinate".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_i mu_i (z_i - c) (z_i - c)*` with `c = 0` when `None`.
    fn second_moment(&self, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for (z, &w) in self.points.iter().zip(&self.weights) {
            m += z * z.adjoint() * C64::new(w, 0.0);
        }
        m
    }
}

fn check_dims(h: &HpdForm, m: &ContactMeasure) -> Result<()> {
    m.validate()?;
    if let Some(p) = m.points.first() {
        if p.len() != h.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), got: p.len() });
        }
    }
    Ok(())
}

/// `||sum_i mu_i z_i z_i* - H^{-1}||_F`.
pub fn centered_residual(h: &HpdForm, m: &ContactMeasure) -> Result<f64> {
    check_dims(h, m)?;
    Ok((m.second_moment(h.dim()) - h.inverse().as_matrix()).norm())
}

/// `|sum_i mu_i h(T z_i, z_i) - tr T|`.
pub fn check_trace_identity(h: &HpdForm, m: &ContactMeasure, t: &CMatrix) -> Result<f64> {
    check_dims(h, m)?;
    let mut acc = C64::new(0.0, 0.0);
    for (z, &w) in m.points.iter().zip(&m.weights) {
        acc += h.eval(&(t * z), z) * w;
    }
    Ok((acc - t.trace()).norm())
}

/// `|sum_i mu_i h(T z_i, z_i - c) - tr T|`.
pub fn check_translate_trace_identity(h: &HpdForm, c: &CVector, m: &ContactMeasure, t: &CMatrix) -> Result<f64> {
    check_dims(h, m)?;
    let mut acc = C64::new(0.0, 0.0);
    for (z, &w) in m.points.iter().zip(&m.weights) {
        acc += h.eval(&(t * z), &(z - c)) * w;
    }
    Ok((acc - t.trace()).norm())
}

/// `(||sum_i mu_i (z_i - c)||, ||sum_i mu_i z_i (z_i - c)* - H^{-1}||_F)`.
pub fn translate_residuals(h: &HpdForm, c: &CVector, m: &ContactMeasure) -> Result<(f64, f64)> {
    check_dims(h, m)?;
    let n = h.dim();
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: c.len() });
    }
    let mut first = CVector::zeros(n);
    let mut second = CMatrix::zeros(n, n);
    for (z, &w) in m.points.iter().zip(&m.weights) {
        let u = z - c;
        first += &u * C64::new(w, 0.0);
        second += z * u.adjoint() * C64::new(w, 0.0);
    }
    Ok((first.norm(), (second - h.inverse().as_matrix()).norm()))
}

/// Real coordinates of a hermitian matrix in which the Euclidean norm equals
/// the Frobenius norm: diagonal entries, then `sqrt 2 Re`, `sqrt 2 Im` of the
/// strict upper triangle.
fn hermitian_coords(m: &CMatrix, out: &mut Vec<f64>) {
    let n = m.nrows();
    let r2 = std::f64::consts::SQRT_2;
    for i in 0..n {
        out.push(m[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(r2 * m[(i, j)].re);
            out.push(r2 * m[(i, j)].im);
        }
    }
}

fn centered_column(z: &CVector) -> Vec<f64> {
    let mut v = Vec::new();
    hermitian_coords(&(z * z.adjoint()), &mut v);
    v
}

fn translate_column(z: &CVector, c: &CVector) -> Vec<f64> {
    let u = z - c;
    let mut v = Vec::new();
    hermitian_coords(&(&u * u.adjoint()), &mut v);
    v.extend(u.iter().map(|x| x.re));
    v.extend(u.iter().map(|x| x.im));
    v
}

fn build_system(cols: &[Vec<f64>], target: Vec<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let d = target.len();
    let a = DMatrix::from_fn(d, cols.len(), |i, j| cols[j][i]);
    (a, DVector::from_vec(target))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Found,
    NotFound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Necessary and sufficient for maximality among centered ellipsoids.
    Centered,
    /// Necessary only, among translated ellipsoids.
    Translate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub kind: CertificateKind,
    /// Frobenius residual of the matrix identity (centered or translated form).
    pub matrix_residual: f64,
    pub total_mass: f64,
    /// `|mass - n|`.
    pub mass_deviation: f64,
    /// Trace identity errors for `T = Id` and four seeded random operators.
    pub trace_checks: Vec<f64>,
    /// `||sum mu_i (z_i - c)||`, translate kind only.
    pub vector_residual: Option<f64>,
    pub support: usize,
    pub threshold: f64,
    pub status: CertificateStatus,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.status == CertificateStatus::Found
    }

    pub fn worst_residual(&self) -> f64 {
        self.matrix_residual.max(self.vector_residual.unwrap_or(0.0))
    }
}

fn spot_operators(n: usize) -> Vec<CMatrix> {
    let mut r = rng(0x7ace);
    let mut ts = vec![CMatrix::identity(n, n)];
    ts.extend((0..4).map(|_| random_complex_matrix(&mut r, n)));
    ts
}

/// Evaluates a centered certificate against `threshold`.
pub fn centered_report(h: &HpdForm, m: &ContactMeasure, threshold: f64) -> Result<CertificateReport> {
    let residual = centered_residual(h, m)?;
    let trace_checks =
        spot_operators(h.dim()).iter().map(|t| check_trace_identity(h, m, t)).collect::<Result<Vec<_>>>()?;
    let mass = m.mass();
    Ok(CertificateReport {
        kind: CertificateKind::Centered,
        matrix_residual: residual,
        total_mass: mass,
        mass_deviation: (mass - h.dim() as f64).abs(),
        trace_checks,
        vector_residual: None,
        support: m.weights.iter().filter(|&&w| w > 0.0).count(),
        threshold,
        status: if residual <= threshold { CertificateStatus::Found } else { CertificateStatus::NotFound },
    })
}

/// Evaluates the translated-ellipsoid conditions against `threshold`.
pub fn translate_report(h: &HpdForm, c: &CVector, m: &ContactMeasure, threshold: f64) -> Result<CertificateReport> {
    let (vr, mr) = translate_residuals(h, c, m)?;
    let trace_checks = spot_operators(h.dim())
        .iter()
        .map(|t| check_translate_trace_identity(h, c, m, t))
        .collect::<Result<Vec<_>>>()?;
    let mass = m.mass();
    Ok(CertificateReport {
        kind: CertificateKind::Translate,
        matrix_residual: mr,
        total_mass: mass,
        mass_deviation: (mass - h.dim() as f64).abs(),
        trace_checks,
        vector_residual: Some(vr),
        support: m.weights.iter().filter(|&&w| w > 0.0).count(),
        threshold,
        status: if vr.max(mr) <= threshold { CertificateStatus::Found } else { CertificateStatus::NotFound },
    })
}

fn warm_indices(warm: &[f64]) -> Vec<usize> {
    warm.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(i, _)| i).collect()
}

/// Nonnegative least-squares fit of `sum mu_i z_i z_i* = H^{-1}` over the
/// given points, pruned to minimal support.
pub fn fit_centered(h: &HpdForm, points: &[CVector], warm: &[f64]) -> Result<(ContactMeasure, CertificateReport)> {
    if points.is_empty() {
        return Err(Error::InvalidMeasure("no contact points to fit".into()));
    }
    let cols: Vec<Vec<f64>> = points.iter().map(centered_column).collect();
    let mut target = Vec::new();
    hermitian_coords(h.inverse().as_matrix(), &mut target);
    let (a, b) = build_system(&cols, target);
    let x = nnls(&a, &b, &warm_indices(warm));
    let m = ContactMeasure::new(points.to_vec(), x.iter().map(|v| v.max(0.0)).collect())?;
    let m = prune_support(&m);
    let report = centered_report(h, &m, FIT_THRESHOLD)?;
    Ok((m, report))
}

/// Centered certificate fit over a contact set.
pub fn fit_measure(h: &HpdForm, contacts: &ContactSet) -> Result<(ContactMeasure, CertificateReport)> {
    fit_centered(h, &contacts.points, &[])
}

/// Fit of the translated conditions about `c`.
pub fn fit_translate(
    h: &HpdForm,
    c: &CVector,
    points: &[CVector],
    warm: &[f64],
) -> Result<(ContactMeasure, CertificateReport)> {
    if points.is_empty() {
        return Err(Error::InvalidMeasure("no contact points to fit".into()));
    }
    let cols: Vec<Vec<f64>> = points.iter().map(|z| translate_column(z, c)).collect();
    let mut target = Vec::new();
    hermitian_coords(h.inverse().as_matrix(), &mut target);
    target.extend(std::iter::repeat_n(0.0, 2 * h.dim()));
    let (a, b) = build_system(&cols, target);
    let x = nnls(&a, &b, &warm_indices(warm));
    let m = ContactMeasure::new(points.to_vec(), x.iter().map(|v| v.max(0.0)).collect())?;
    let m = prune_translate_support(&m, c);
    let report = translate_report(h, c, &m, FIT_THRESHOLD)?;
    Ok((m, report))
}

/// Drops zero weights, then removes points by walking along null vectors of
/// the moment map until the support is no larger than its dimension
/// (`n^2 + 1` with the mass row), which is within `2n^2 + 1`.
pub fn prune_support(m: &ContactMeasure) -> ContactMeasure {
    let mut cols: Vec<Vec<f64>> = m
        .points
        .iter()
        .map(|z| {
            let mut v = centered_column(z);
            v.push(1.0);
            v
        })
        .collect();
    caratheodory(m, &mut cols)
}

/// As [`prune_support`], preserving first moments about `c` as well.
pub fn prune_translate_support(m: &ContactMeasure, c: &CVector) -> ContactMeasure {
    let mut cols: Vec<Vec<f64>> = m.points.iter().map(|z| translate_column(z, c)).collect();
    caratheodory(m, &mut cols)
}

fn caratheodory(m: &ContactMeasure, cols: &mut [Vec<f64>]) -> ContactMeasure {
    let wmax = m.weights.iter().fold(0.0f64, |a, &b| a.max(b));
    let floor = 1e-14 * wmax;
    let mut idx: Vec<usize> = (0..m.len()).filter(|&i| m.weights[i] > floor).collect();
    let mut w: Vec<f64> = m.weights.clone();
    let d = cols.first().map_or(0, |c| c.len());
    while idx.len() > d {
        let k = idx.len();
        // square (k x k) padding so the SVD exposes the full right null space
        let a = DMatrix::from_fn(k, k, |i, j| if i < d { cols[idx[j]][i] } else { 0.0 });
        let svd = a.svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
        let mut v: Vec<f64> = (0..k).map(|j| vt[(imin, j)]).collect();
        if !v.iter().any(|&x| x > 0.0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let mut alpha = f64::INFINITY;
        let mut hit = 0;
        for (j, &vj) in v.iter().enumerate() {
            if vj > 0.0 {
                let r = w[idx[j]] / vj;
                if r < alpha {
                    alpha = r;
                    hit = j;
                }
            }
        }
        for (j, &vj) in v.iter().enumerate() {
            w[idx[j]] -= alpha * vj;
        }
        w[idx[hit]] = 0.0;
        idx.retain(|&i| w[i] > floor);
    }
    ContactMeasure {
        points: idx.iter().map(|&i| m.points[i].clone()).collect(),
        weights: idx.iter().map(|&i| w[i]).collect(),
    }
}
