//! Geodesics in the space of centered hermitian ellipsoids.
//!
//! For `E0 = E_{H0}` and `E1 = E_{H1}` put `M = H0^{-1/2} H1 H0^{-1/2}`. The
//! transport operator `A = H0^{-1/2} M^{-1/2} H0^{1/2}` is positive and
//! self-adjoint for `h0`, maps `E0` onto `E1`, and the geodesic is
//! `E(t) = A^t E0`, whose form matrix is `H_t = H0^{1/2} M^t H0^{1/2}`.

use serde::Serialize;

use super::{spectral, Ellipsoid, HermitianMatrix, HpdForm};
use crate::{CMatrix, Error, Result};

fn check_pair(e0: &Ellipsoid, e1: &Ellipsoid) -> Result<()> {
    if e0.dim() != e1.dim() {
        return Err(Error::DimensionMismatch { expected: e0.dim(), got: e1.dim() });
    }
    if !e0.is_centered() || !e1.is_centered() {
        return Err(Error::NotCentered);
    }
    Ok(())
}

/// `H0^{-1/2} H1 H0^{-1/2}` as a positive form.
fn relative_form(h0: &HpdForm, h1: &HpdForm) -> Result<HpdForm> {
    let r = h0.inv_sqrt();
    let m = r.as_matrix() * h1.matrix() * r.as_matrix();
    HpdForm::new(HermitianMatrix::symmetrized(&m))
}

/// Positive operator `A`, self-adjoint for the form of `e0`, with `A E0 = E1`.
pub fn transport_operator(e0: &Ellipsoid, e1: &Ellipsoid) -> Result<CMatrix> {
    check_pair(e0, e1)?;
    let h0 = e0.form();
    let m = relative_form(h0, e1.form())?;
    let b = spectral(m.eigen(), |x| x.powf(-0.5));
    Ok(h0.inv_sqrt().as_matrix() * b.as_matrix() * h0.sqrt().as_matrix())
}

fn point_unchecked(e0: &Ellipsoid, e1: &Ellipsoid, t: f64) -> Result<Ellipsoid> {
    if t == 0.0 {
        return Ok(e0.clone());
    }
    if t == 1.0 {
        return Ok(e1.clone());
    }
    let h0 = e0.form();
    let m = relative_form(h0, e1.form())?;
    let mt = spectral(m.eigen(), |x| x.powf(t));
    let s = h0.sqrt();
    let ht = s.as_matrix() * mt.as_matrix() * s.as_matrix();
    Ok(Ellipsoid::centered(HpdForm::new(HermitianMatrix::symmetrized(&ht))?))
}

/// The geodesic `E(t)` for `t` in `[0, 1]`; endpoints are returned unchanged.
pub fn geodesic_point(e0: &Ellipsoid, e1: &Ellipsoid, t: f64) -> Result<Ellipsoid> {
    check_pair(e0, e1)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParameterOutOfRange(t));
    }
    point_unchecked(e0, e1, t)
}

/// Same as [`geodesic_point`] but accepts any finite `t`.
pub fn geodesic_point_extrapolated(e0: &Ellipsoid, e1: &Ellipsoid, t: f64) -> Result<Ellipsoid> {
    check_pair(e0, e1)?;
    if !t.is_finite() {
        return Err(Error::ParameterOutOfRange(t));
    }
    point_unchecked(e0, e1, t)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicSpec {
    pub start: Ellipsoid,
    pub end: Ellipsoid,
    #[serde(with = "crate::serde_complex::matrix")]
    pub transport: CMatrix,
}

impl GeodesicSpec {
    pub fn new(start: Ellipsoid, end: Ellipsoid) -> Result<Self> {
        let transport = transport_operator(&start, &end)?;
        Ok(GeodesicSpec { start, end, transport })
    }

    pub fn point(&self, t: f64) -> Result<Ellipsoid> {
        geodesic_point(&self.start, &self.end, t)
    }

    pub fn point_extrapolated(&self, t: f64) -> Result<Ellipsoid> {
        geodesic_point_extrapolated(&self.start, &self.end, t)
    }

    /// `A^t = H0^{-1/2} M^{-t/2} H0^{1/2}`.
    pub fn transport_power(&self, t: f64) -> Result<CMatrix> {
        let h0 = self.start.form();
        let m = relative_form(h0, self.end.form())?;
        let b = spectral(m.eigen(), |x| x.powf(-0.5 * t));
        Ok(h0.inv_sqrt().as_matrix() * b.as_matrix() * h0.sqrt().as_matrix())
    }
}
