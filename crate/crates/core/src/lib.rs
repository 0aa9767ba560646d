//! Maximal inscribed hermitian ellipsoids in pseudoconvex domains of `C^n`.
//!
//! The crate models ellipsoids `{z : h(z - c, z - c) < 1}` for positive definite
//! hermitian forms `h(z, w) = w* H z`, domains `{rho < 0}` given by plurisubharmonic
//! defining functions, and a volume-ascent solver whose outputs carry checkable
//! contact-measure certificates.

pub mod certificate;
pub mod containment;
pub mod domain;
pub mod harness;
mod error;
pub mod hermitian;
pub mod lp;
pub mod nnls;
pub mod random;
pub mod repro;
pub mod sampling;
pub mod serde_complex;
pub mod slice;
pub mod solver;

#[cfg(test)]
mod testutil;

pub use certificate::{CertificateReport, CertificateStatus, ContactMeasure};
pub use containment::{BoundaryMax, ContactSet, Containment, ContainmentConfig};
pub use domain::{Disc, Domain, DomainSpec};
pub use error::{Error, Result};
pub use solver::{Mode, SolveConfig, SolveReport, Termination};
pub use hermitian::{Ellipsoid, GeodesicSpec, HermitianMatrix, HpdForm};

pub type C64 = num_complex::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;
