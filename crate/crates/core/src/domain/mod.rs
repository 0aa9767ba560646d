//! Bounded domains given by smooth defining functions.
//!
//! A domain is `{rho < 0}` where `rho` combines one or more smooth components
//! by `max` (intersections) or, for unions of planar discs, by `min`. Contact
//! and ascent logic always works with the active smooth component.

mod polynomial;

pub use polynomial::{Polynomial, Term};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::hermitian::HermitianMatrix;
use crate::random::rng;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Disc `{|z - center| < radius}` in the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    #[serde(with = "crate::serde_complex::scalar")]
    pub center: C64,
    pub radius: f64,
}

/// Serialized description of a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum DomainSpec {
    /// `|z - center|^2 - radius^2`.
    Ball {
        #[serde(with = "crate::serde_complex::vector")]
        center: CVector,
        radius: f64,
    },
    /// `max_k |z_k|^2 - r_k^2`.
    Polydisc { radii: Vec<f64> },
    /// `{|xy| < product_bound, |x|, |y| < box_bound}` in two variables.
    HyperbolaBox { product_bound: f64, box_bound: f64 },
    /// `{|z - p| |z + p| < lambda^2}`, `p = (1, 0)`.
    Cassini { lambda: f64 },
    /// Union of planar discs, `rho = min_j (|z - c_j| - r_j)`.
    PlanarUnion { discs: Vec<Disc> },
    /// Intersection of polynomial sublevel sets. The enclosing radius cannot be
    /// derived in general and must be supplied.
    SublevelIntersection { n: usize, bound: f64, components: Vec<Polynomial> },
}

#[derive(Clone, Debug)]
enum Component {
    Sphere { center: Vec<C64>, r2: f64 },
    Coordinate { k: usize, r2: f64 },
    Product { bound2: f64 },
    Cassini { lambda4: f64 },
    Disc { center: C64, radius: f64 },
    Poly(Polynomial),
}

impl Component {
    fn value(&self, z: &[C64]) -> f64 {
        match self {
            Component::Sphere { center, r2 } => {
                z.iter().zip(center).map(|(a, c)| (a - c).norm_sqr()).sum::<f64>() - r2
            }
            Component::Coordinate { k, r2 } => z[*k].norm_sqr() - r2,
            Component::Product { bound2 } => z[0].norm_sqr() * z[1].norm_sqr() - bound2,
            Component::Cassini { lambda4 } => {
                let s = z[0].norm_sqr() + z[1].norm_sqr();
                (s + 1.0).powi(2) - 4.0 * z[0].re * z[0].re - lambda4
            }
            Component::Disc { center, radius } => (z[0] - center).norm() - radius,
            Component::Poly(p) => p.value(z),
        }
    }

    fn grad(&self, z: &[C64], out: &mut [C64]) {
        match self {
            Component::Sphere { center, .. } => {
                for ((o, a), c) in out.iter_mut().zip(z).zip(center) {
                    *o = (a - c).conj();
                }
            }
            Component::Coordinate { k, .. } => {
                out.fill(C64::new(0.0, 0.0));
                out[*k] = z[*k].conj();
            }
            Component::Product { .. } => {
                out[0] = z[0].conj() * z[1].norm_sqr();
                out[1] = z[1].conj() * z[0].norm_sqr();
            }
            Component::Cassini { .. } => {
                let s = z[0].norm_sqr() + z[1].norm_sqr();
                out[0] = z[0].conj() * (2.0 * s) - z[0] * 2.0;
                out[1] = z[1].conj() * (2.0 * (s + 1.0));
            }
            Component::Disc { center, .. } => {
                let w = z[0] - center;
                let r = w.norm();
                out[0] = if r > 0.0 { w.conj() / (2.0 * r) } else { C64::new(0.0, 0.0) };
            }
            Component::Poly(p) => p.grad(z, out),
        }
    }

    fn levi(&self, z: &[C64]) -> CMatrix {
        let n = z.len();
        match self {
            Component::Sphere { .. } => CMatrix::identity(n, n),
            Component::Coordinate { k, .. } => {
                let mut m = CMatrix::zeros(n, n);
                m[(*k, *k)] = C64::new(1.0, 0.0);
                m
            }
            Component::Product { .. } => CMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::new(z[1].norm_sqr(), 0.0),
                    z[0].conj() * z[1],
                    z[0] * z[1].conj(),
                    C64::new(z[0].norm_sqr(), 0.0),
                ],
            ),
            Component::Cassini { .. } => {
                let (ax, ay) = (z[0].norm_sqr(), z[1].norm_sqr());
                CMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        C64::new(2.0 * (2.0 * ax + ay), 0.0),
                        z[0].conj() * z[1] * 2.0,
                        z[0] * z[1].conj() * 2.0,
                        C64::new(2.0 * (ax + 2.0 * ay + 1.0), 0.0),
                    ],
                )
            }
            Component::Disc { center, .. } => {
                let r = (z[0] - center).norm();
                let v = if r > 0.0 { 1.0 / (4.0 * r) } else { f64::MAX };
                CMatrix::from_element(1, 1, C64::new(v, 0.0))
            }
            Component::Poly(p) => p.levi(z),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    Max,
    Min,
}

/// Which component realizes `rho` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Active {
    pub value: f64,
    pub component: usize,
    /// Another component attains the same value within `1e-12` relative:
    /// `rho` is not differentiable here and derivatives are those of
    /// `component`.
    pub tied: bool,
}

/// A validated domain with its defining function and enclosing radius.
#[derive(Clone, Debug)]
pub struct Domain {
    spec: DomainSpec,
    dim: usize,
    enclosing_radius: f64,
    combine: Combine,
    components: Vec<Component>,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("{name} must be positive and finite, got {x}")))
    }
}

impl Domain {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        let (dim, radius, combine, components) = match &spec {
            DomainSpec::Ball { center, radius } => {
                positive("radius", *radius)?;
                let n = center.len();
                let c: Vec<C64> = center.iter().copied().collect();
                let r = center.norm() + radius;
                (n, r, Combine::Max, vec![Component::Sphere { center: c, r2: radius * radius }])
            }
            DomainSpec::Polydisc { radii } => {
                for &r in radii {
                    positive("polydisc radius", r)?;
                }
                let comps = radii
                    .iter()
                    .enumerate()
                    .map(|(k, r)| Component::Coordinate { k, r2: r * r })
                    .collect();
                let r = radii.iter().map(|r| r * r).sum::<f64>().sqrt();
                (radii.len(), r, Combine::Max, comps)
            }
            DomainSpec::HyperbolaBox { product_bound, box_bound } => {
                positive("product_bound", *product_bound)?;
                positive("box_bound", *box_bound)?;
                let b2 = box_bound * box_bound;
                let comps = vec![
                    Component::Product { bound2: product_bound * product_bound },
                    Component::Coordinate { k: 0, r2: b2 },
                    Component::Coordinate { k: 1, r2: b2 },
                ];
                (2, box_bound * 2f64.sqrt(), Combine::Max, comps)
            }
            DomainSpec::Cassini { lambda } => {
                if !(lambda.is_finite() && *lambda > 1.0) {
                    return Err(Error::InvalidDomain(format!("cassini lambda must exceed 1, got {lambda}")));
                }
                // |x| < lambda + 1 and |y| < lambda on the domain
                let r = ((lambda + 1.0).powi(2) + lambda * lambda).sqrt();
                (2, r, Combine::Max, vec![Component::Cassini { lambda4: lambda.powi(4) }])
            }
            DomainSpec::PlanarUnion { discs } => {
                if discs.is_empty() {
                    return Err(Error::InvalidDomain("planar union needs at least one disc".into()));
                }
                for d in discs {
                    positive("disc radius", d.radius)?;
                }
                let r = discs.iter().map(|d| d.center.norm() + d.radius).fold(0.0, f64::max);
                let comps = discs
                    .iter()
                    .map(|d| Component::Disc { center: d.center, radius: d.radius })
                    .collect();
                (1, r, Combine::Min, comps)
            }
            DomainSpec::SublevelIntersection { n, bound, components } => {
                positive("bound", *bound)?;
                if components.is_empty() {
                    return Err(Error::InvalidDomain("no components".into()));
                }
                for p in components {
                    p.validate(*n).map_err(Error::InvalidDomain)?;
                }
                let comps = components.iter().cloned().map(Component::Poly).collect();
                (*n, *bound, Combine::Max, comps)
            }
        };
        if dim == 0 || dim > crate::hermitian::MAX_DIM {
            return Err(Error::Dimension(dim));
        }
        Ok(Domain { spec, dim, enclosing_radius: radius, combine, components })
    }

    pub fn ball(center: CVector, radius: f64) -> Result<Self> {
        Self::new(DomainSpec::Ball { center, radius })
    }

    pub fn unit_ball(n: usize) -> Result<Self> {
        Self::ball(CVector::zeros(n), 1.0)
    }

    pub fn polydisc(radii: &[f64]) -> Result<Self> {
        Self::new(DomainSpec::Polydisc { radii: radii.to_vec() })
    }

    pub fn hyperbola_box(product_bound: f64, box_bound: f64) -> Result<Self> {
        Self::new(DomainSpec::HyperbolaBox { product_bound, box_bound })
    }

    pub fn cassini(lambda: f64) -> Result<Self> {
        Self::new(DomainSpec::Cassini { lambda })
    }

    pub fn planar_union(discs: Vec<Disc>) -> Result<Self> {
        Self::new(DomainSpec::PlanarUnion { discs })
    }

    /// `{|z - 2| < 2} ∪ {|z| < 1}`.
    pub fn disc_union() -> Result<Self> {
        Self::planar_union(vec![
            Disc { center: C64::new(2.0, 0.0), radius: 2.0 },
            Disc { center: C64::new(0.0, 0.0), radius: 1.0 },
        ])
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Radius of a ball about the origin containing the domain.
    pub fn enclosing_radius(&self) -> f64 {
        self.enclosing_radius
    }

    pub fn combine(&self) -> Combine {
        self.combine
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn rho(&self, z: &[C64]) -> f64 {
        self.rho_active(z).value
    }

    pub fn rho_active(&self, z: &[C64]) -> Active {
        let mut best = self.components[0].value(z);
        let mut idx = 0;
        for (j, c) in self.components.iter().enumerate().skip(1) {
            let v = c.value(z);
            let better = match self.combine {
                Combine::Max => v > best,
                Combine::Min => v < best,
            };
            if better {
                best = v;
                idx = j;
            }
        }
        let tol = 1e-12 * (1.0 + best.abs());
        let tied = self
            .components
            .iter()
            .enumerate()
            .any(|(j, c)| j != idx && (c.value(z) - best).abs() <= tol);
        Active { value: best, component: idx, tied }
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        self.rho(z) < 0.0
    }

    fn check_component(&self, j: usize) -> Result<()> {
        if j >= self.components.len() {
            return Err(Error::InvalidDomain(format!("component {j} out of range")));
        }
        Ok(())
    }

    /// `(d rho_j / d z_k)_k`.
    pub fn wirtinger_grad(&self, j: usize, z: &[C64]) -> Result<CVector> {
        self.check_component(j)?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.components[j].grad(z, &mut out);
        Ok(CVector::from_vec(out))
    }

    /// Allocation-free gradient of component `j` into `out`.
    pub(crate) fn grad_into(&self, j: usize, z: &[C64], out: &mut [C64]) {
        self.components[j].grad(z, out);
    }

    /// Matrix `(d^2 rho_j / dz_k d conj(z_l))_{kl}`.
    pub fn levi_form(&self, j: usize, z: &[C64]) -> Result<HermitianMatrix> {
        self.check_component(j)?;
        Ok(HermitianMatrix::symmetrized(&self.components[j].levi(z)))
    }
}

impl Serialize for Domain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = DomainSpec::deserialize(d)?;
        Domain::new(spec).map_err(serde::de::Error::custom)
    }
}

/// Axis-aligned box in real coordinates `(Re z_1, Im z_1, ..., Re z_n, Im z_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn enclosing(d: &Domain) -> Self {
        let r = d.enclosing_radius();
        SampleBox { lo: vec![-r; 2 * d.dim()], hi: vec![r; 2 * d.dim()] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentLeviStats {
    pub active_samples: usize,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeviReport {
    pub samples: usize,
    pub min_eigenvalue: f64,
    #[serde(with = "crate::serde_complex::vector")]
    pub argmin: CVector,
    pub per_component: Vec<ComponentLeviStats>,
}

/// Samples the smallest Levi eigenvalue of the active component at `count`
/// uniform points of `region`.
///
/// This is evidence of plurisubharmonicity on the sampled set, not a proof.
pub fn psh_sample_check(d: &Domain, region: &SampleBox, count: usize, seed: u64) -> Result<LeviReport> {
    let n = d.dim();
    if count == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1".into()));
    }
    if region.lo.len() != 2 * n || region.hi.len() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, got: region.lo.len() });
    }
    let mut r = rng(seed);
    let mut stats = vec![ComponentLeviStats { active_samples: 0, min_eigenvalue: f64::INFINITY }; d.components.len()];
    let mut min_eig = f64::INFINITY;
    let mut argmin = CVector::zeros(n);
    let mut z = vec![C64::new(0.0, 0.0); n];
    for _ in 0..count {
        for (k, zk) in z.iter_mut().enumerate() {
            let re = region.lo[2 * k] + (region.hi[2 * k] - region.lo[2 * k]) * r.random::<f64>();
            let im = region.lo[2 * k + 1] + (region.hi[2 * k + 1] - region.lo[2 * k + 1]) * r.random::<f64>();
            *zk = C64::new(re, im);
        }
        let active = d.rho_active(&z);
        let lev = HermitianMatrix::symmetrized(&d.components[active.component].levi(&z));
        let e = lev.eigh().values[0];
        let st = &mut stats[active.component];
        st.active_samples += 1;
        st.min_eigenvalue = st.min_eigenvalue.min(e);
        if e < min_eig {
            min_eig = e;
            argmin = CVector::from_column_slice(&z);
        }
    }
    Ok(LeviReport { samples: count, min_eigenvalue: min_eig, argmin, per_component: stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn finite_difference_grad(d: &Domain, j: usize, z: &[C64], step: f64) -> Vec<C64> {
        // d/dz = (d/dx - i d/dy) / 2
        let f = |w: &[C64]| d.components[j].value(w);
        (0..z.len())
            .map(|k| {
                let mut zp = z.to_vec();
                let mut zm = z.to_vec();
                zp[k] += c(step, 0.0);
                zm[k] -= c(step, 0.0);
                let dx = (f(&zp) - f(&zm)) / (2.0 * step);
                let mut zp = z.to_vec();
                let mut zm = z.to_vec();
                zp[k] += c(0.0, step);
                zm[k] -= c(0.0, step);
                let dy = (f(&zp) - f(&zm)) / (2.0 * step);
                c(dx / 2.0, -dy / 2.0)
            })
            .collect()
    }

    fn builtins() -> Vec<Domain> {
        vec![
            Domain::ball(testutil::random_complex_vector(&mut testutil::rng(1), 2) * c(0.1, 0.0), 1.3).unwrap(),
            Domain::polydisc(&[1.0, 2.0]).unwrap(),
            Domain::hyperbola_box(1.0, 3.0).unwrap(),
            Domain::cassini(1.2).unwrap(),
            Domain::disc_union().unwrap(),
            non_psh_domain(),
        ]
    }

    /// `max(|x|^2 - |y|^2 - 1/4, |x|^2 + |y|^2 - 1)`; the first component has
    /// Levi form `diag(1, -1)`.
    fn non_psh_domain() -> Domain {
        let t = |re: f64, z: [u32; 2], zbar: [u32; 2]| Term { coef: c(re, 0.0), z: z.to_vec(), zbar: zbar.to_vec() };
        Domain::new(DomainSpec::SublevelIntersection {
            n: 2,
            bound: 1.0,
            components: vec![
                Polynomial { terms: vec![t(1.0, [1, 0], [1, 0]), t(-1.0, [0, 1], [0, 1]), t(-0.25, [0, 0], [0, 0])] },
                Polynomial { terms: vec![t(1.0, [1, 0], [1, 0]), t(1.0, [0, 1], [0, 1]), t(-1.0, [0, 0], [0, 0])] },
            ],
        })
        .unwrap()
    }

    #[test]
    fn cassini_critical_values() {
        let lam: f64 = 1.0005;
        let d = Domain::cassini(lam).unwrap();
        assert!((d.rho(&[c(0.0, 0.0), c(0.0, 0.0)]) - (1.0 - lam.powi(4))).abs() < 1e-15);
        assert!((d.rho(&[c(1.0, 0.0), c(0.0, 0.0)]) + lam.powi(4)).abs() < 1e-15);
        assert!((d.rho(&[c(-1.0, 0.0), c(0.0, 0.0)]) + lam.powi(4)).abs() < 1e-15);
        // rho = |z-p|^2 |z+p|^2 - lambda^4 literally
        let z = [c(0.3, -0.7), c(0.2, 0.4)];
        let a = (z[0] - 1.0).norm_sqr() + z[1].norm_sqr();
        let b = (z[0] + 1.0).norm_sqr() + z[1].norm_sqr();
        assert!((d.rho(&z) - (a * b - lam.powi(4))).abs() < 1e-14);
    }

    #[test]
    fn hyperbola_box_origin() {
        let d = Domain::hyperbola_box(1.0, 3.0).unwrap();
        assert_eq!(d.rho(&[c(0.0, 0.0), c(0.0, 0.0)]), -1.0);
    }

    #[test]
    fn cassini_gradient_closed_form() {
        let d = Domain::cassini(1.2).unwrap();
        let (x, y) = (c(0.4, 0.3), c(-0.2, 0.5));
        let g = d.wirtinger_grad(0, &[x, y]).unwrap();
        let s = x.norm_sqr() + y.norm_sqr();
        assert!((g[0] - (x.conj() * 2.0 * s - x * 2.0)).norm() < 1e-15);
        assert!((g[1] - y.conj() * 2.0 * (s + 1.0)).norm() < 1e-15);
    }

    #[test]
    fn ball_gradient_vanishes_at_center() {
        let ctr = CVector::from_vec(vec![c(0.2, 0.1), c(-0.3, 0.0)]);
        let d = Domain::ball(ctr.clone(), 1.0).unwrap();
        let g = d.wirtinger_grad(0, ctr.as_slice()).unwrap();
        assert_eq!(g.norm(), 0.0);
        let lev = d.levi_form(0, ctr.as_slice()).unwrap();
        assert_eq!(lev.as_matrix(), &CMatrix::identity(2, 2));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut r = testutil::rng(42);
        for d in builtins() {
            for _ in 0..100 {
                let z: Vec<C64> = testutil::random_complex_vector(&mut r, d.dim()).iter().map(|v| v * 0.8).collect();
                for j in 0..d.component_count() {
                    let g = d.wirtinger_grad(j, &z).unwrap();
                    let fd = finite_difference_grad(&d, j, &z, 1e-5);
                    let scale = 1.0 + g.norm();
                    for k in 0..d.dim() {
                        assert!((g[k] - fd[k]).norm() <= 1e-6 * scale, "{:?} comp {j}: {} vs {}", d.spec(), g[k], fd[k]);
                    }
                }
            }
        }
    }

    #[test]
    fn levi_forms_match_finite_differences_of_gradient() {
        // d/d conj(z_l) of g_k = (d/dx_l + i d/dy_l) g_k / 2
        let mut r = testutil::rng(43);
        let h = 1e-5;
        for d in builtins() {
            for _ in 0..20 {
                let z: Vec<C64> = testutil::random_complex_vector(&mut r, d.dim()).iter().map(|v| v * 0.8).collect();
                for j in 0..d.component_count() {
                    let lev = d.levi_form(j, &z).unwrap();
                    for l in 0..d.dim() {
                        let shifted = |delta: C64| {
                            let mut w = z.clone();
                            w[l] += delta;
                            d.wirtinger_grad(j, &w).unwrap()
                        };
                        let gx = (shifted(c(h, 0.0)) - shifted(c(-h, 0.0))) / c(2.0 * h, 0.0);
                        let gy = (shifted(c(0.0, h)) - shifted(c(0.0, -h))) / c(2.0 * h, 0.0);
                        for k in 0..d.dim() {
                            let fd = (gx[k] + c(0.0, 1.0) * gy[k]) * 0.5;
                            let scale = 1.0 + lev.as_matrix()[(k, l)].norm();
                            assert!((lev.as_matrix()[(k, l)] - fd).norm() < 1e-5 * scale);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cassini_levi_at_origin() {
        let d = Domain::cassini(1.2).unwrap();
        let lev = d.levi_form(0, &[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((lev.as_matrix() - testutil::real_diag(&[0.0, 2.0])).norm() == 0.0);
        let e = lev.eigh();
        assert_eq!(e.values.as_slice(), &[0.0, 2.0]);
    }

    #[test]
    fn psh_checks() {
        let cas = Domain::cassini(1.2).unwrap();
        let rep = psh_sample_check(&cas, &SampleBox::enclosing(&cas), 2000, 1).unwrap();
        assert_eq!(rep.samples, 2000);
        assert!(rep.min_eigenvalue >= -1e-9);
        let again = psh_sample_check(&cas, &SampleBox::enclosing(&cas), 2000, 1).unwrap();
        assert_eq!(rep, again);

        let ball = Domain::unit_ball(2).unwrap();
        let rep = psh_sample_check(&ball, &SampleBox::enclosing(&ball), 50, 2).unwrap();
        assert_eq!(rep.min_eigenvalue, 1.0);

        let bad = non_psh_domain();
        let rep = psh_sample_check(&bad, &SampleBox::enclosing(&bad), 500, 3).unwrap();
        assert!((rep.min_eigenvalue + 1.0).abs() < 1e-12);
        assert!(rep.per_component[0].active_samples > 0);
    }

    #[test]
    fn tie_flagged_at_switch_point() {
        let d = Domain::polydisc(&[1.0, 1.0]).unwrap();
        let a = d.rho_active(&[c(0.5, 0.0), c(0.0, 0.5)]);
        assert!(a.tied);
        let a = d.rho_active(&[c(0.5, 0.0), c(0.0, 0.1)]);
        assert!(!a.tied);
        assert_eq!(a.component, 0);
    }

    #[test]
    fn planar_union_uses_min() {
        let d = Domain::disc_union().unwrap();
        assert_eq!(d.combine(), Combine::Min);
        assert!(d.contains(&[c(3.5, 0.0)]));
        assert!(d.contains(&[c(-0.5, 0.0)]));
        assert!(!d.contains(&[c(-1.5, 0.0)]));
        assert!((d.rho(&[c(0.0, 1.0)])).abs() < 1e-15);
    }

    #[test]
    fn rays_exit_before_enclosing_radius() {
        let mut r = testutil::rng(5);
        for d in builtins() {
            let rad = d.enclosing_radius();
            let mut tried = 0;
            while tried < 50 {
                let start: Vec<C64> = testutil::random_complex_vector(&mut r, d.dim()).iter().map(|v| v * 0.5).collect();
                if !d.contains(&start) {
                    continue;
                }
                tried += 1;
                let dir = testutil::random_unit_vector(&mut r, d.dim());
                let mut s = 0.0;
                let exit = loop {
                    s += rad / 2000.0;
                    let z: Vec<C64> = start.iter().zip(dir.iter()).map(|(a, v)| a + v * s).collect();
                    if !d.contains(&z) {
                        break z;
                    }
                };
                let norm = exit.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                // the first outside sample overshoots the boundary by at most one step
                assert!(norm <= rad * (1.0 + 1.0 / 2000.0), "{:?}: exit at {norm} beyond {rad}", d.spec());
            }
        }
    }

    #[test]
    fn json_shapes() {
        let d: Domain = serde_json::from_str(r#"{"tag":"cassini","lambda":1.0005}"#).unwrap();
        assert_eq!(d, Domain::cassini(1.0005).unwrap());
        let s = serde_json::to_string(&Domain::disc_union().unwrap()).unwrap();
        assert_eq!(
            s,
            r#"{"tag":"planar_union","discs":[{"center":[2.0,0.0],"radius":2.0},{"center":[0.0,0.0],"radius":1.0}]}"#
        );
        assert!(serde_json::from_str::<Domain>(r#"{"tag":"cassini","lambda":0.9}"#).is_err());
        let hb: Domain = serde_json::from_str(r#"{"tag":"hyperbola_box","product_bound":1,"box_bound":3}"#).unwrap();
        assert_eq!(hb.dim(), 2);
    }
}
