//! Inscription tests and contact extraction.
//!
//! The maximum of `rho` over `∂E` is searched in sphere coordinates
//! `z = c + H^{-1/2} w`, `|w| = 1`: low-discrepancy samples of `w` seed
//! projected gradient ascents from the best, mutually separated, samples. The
//! reported maximum is a lower bound of the true one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::hermitian::Ellipsoid;
use crate::sampling::{angle, SphereSequence};
use crate::{CVector, Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContainmentConfig {
    pub sphere_samples: usize,
    pub ascent_starts: usize,
    pub ascent_steps: usize,
    /// Boundary points with `rho >= -contact_eps` count as contacts.
    pub contact_eps: f64,
    /// Minimum real angle between kept directions `w`.
    pub dedup_angle: f64,
    /// `E` is inscribed when the maximum of `rho` is at most this.
    pub inscribed_tol: f64,
    /// Upper bound on the size of a contact set.
    pub max_contacts: usize,
    pub seed: u64,
}

impl Default for ContainmentConfig {
    fn default() -> Self {
        ContainmentConfig {
            sphere_samples: 4096,
            ascent_starts: 32,
            ascent_steps: 200,
            contact_eps: 1e-6,
            dedup_angle: 0.05,
            inscribed_tol: 1e-9,
            max_contacts: 128,
            seed: 0,
        }
    }
}

impl ContainmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sphere_samples == 0 || self.ascent_starts == 0 || self.ascent_steps == 0 || self.max_contacts == 0 {
            return Err(Error::InvalidConfig("containment counts must be at least 1".into()));
        }
        for (name, v) in [
            ("contact_eps", self.contact_eps),
            ("dedup_angle", self.dedup_angle),
            ("inscribed_tol", self.inscribed_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Best boundary value of `rho` found, and where.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryMax {
    pub value: f64,
    #[serde(with = "crate::serde_complex::vector")]
    pub argmax: CVector,
    #[serde(with = "crate::serde_complex::vector")]
    pub direction: CVector,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Containment {
    pub contained: bool,
    /// `-max rho`; nonnegative when contained up to tolerance.
    pub margin: f64,
    pub worst: BoundaryMax,
}

/// Approximate `∂Ω ∩ ∂E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactSet {
    #[serde(with = "crate::serde_complex::vectors")]
    pub points: Vec<CVector>,
    #[serde(with = "crate::serde_complex::vectors")]
    pub directions: Vec<CVector>,
    pub rho: Vec<f64>,
    /// `|h(z - c, z - c) - 1|` per point.
    pub form_residual: Vec<f64>,
    pub max_rho: f64,
}

impl ContactSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// One row per point: `re_1,im_1,...,re_n,im_n,rho,form_residual`.
    pub fn to_csv(&self) -> String {
        let n = self.points.first().map_or(0, |p| p.len());
        let mut s = String::new();
        for k in 1..=n {
            s.push_str(&format!("re_{k},im_{k},"));
        }
        s.push_str("rho,form_residual\n");
        for ((p, r), f) in self.points.iter().zip(&self.rho).zip(&self.form_residual) {
            for z in p.iter() {
                s.push_str(&format!("{:.17e},{:.17e},", z.re, z.im));
            }
            s.push_str(&format!("{r:.17e},{f:.17e}\n"));
        }
        s
    }
}

/// `c + H^{-1/2} w` for a unit vector `w`.
pub fn boundary_point(e: &Ellipsoid, w: &CVector) -> CVector {
    e.center() + e.form().inv_sqrt().as_matrix() * w
}

struct Probe<'a> {
    domain: &'a Domain,
    n: usize,
    /// Row-major `H^{-1/2}`.
    l: Vec<C64>,
    c: Vec<C64>,
}

#[derive(Clone, Debug)]
struct Ascent {
    value: f64,
    w: Vec<C64>,
    z: Vec<C64>,
}

impl<'a> Probe<'a> {
    fn new(e: &Ellipsoid, domain: &'a Domain) -> Result<Self> {
        if e.dim() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), got: e.dim() });
        }
        let n = e.dim();
        let lm = e.form().inv_sqrt();
        let l = (0..n * n).map(|i| lm.as_matrix()[(i / n, i % n)]).collect();
        Ok(Probe { domain, n, l, c: e.center().iter().copied().collect() })
    }

    fn map(&self, w: &[C64], scale: f64, z: &mut [C64]) {
        for i in 0..self.n {
            let mut acc = self.c[i];
            for j in 0..self.n {
                acc += self.l[i * self.n + j] * w[j] * scale;
            }
            z[i] = acc;
        }
    }

    fn eval(&self, w: &[C64], z: &mut [C64]) -> f64 {
        self.map(w, 1.0, z);
        self.domain.rho(z)
    }

    /// Tangent gradient of `w -> rho(c + H^{-1/2} w)` on the unit sphere.
    fn tangent_grad(&self, w: &[C64], z: &[C64], g: &mut [C64], gw: &mut [C64]) {
        let n = self.n;
        let active = self.domain.rho_active(z);
        self.domain.grad_into(active.component, z, g);
        // real gradient in w: 2 H^{-1/2} conj(grad rho)
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.l[i * n + j] * g[j].conj();
            }
            gw[i] = acc * 2.0;
        }
        let radial: f64 = w.iter().zip(gw.iter()).map(|(a, b)| (a.conj() * b).re).sum();
        for i in 0..n {
            gw[i] -= w[i] * radial;
        }
    }

    /// Projected gradient ascent on the unit sphere. Steps follow the
    /// Barzilai-Borwein length, halved until the value strictly increases;
    /// the ascent ends when no step above `1e-12` improves it.
    fn ascend(&self, w0: &[C64], steps: usize) -> Ascent {
        let n = self.n;
        let mut w = w0.to_vec();
        let mut z = vec![C64::new(0.0, 0.0); n];
        let mut f = self.eval(&w, &mut z);
        let mut g = vec![C64::new(0.0, 0.0); n];
        let mut gw = vec![C64::new(0.0, 0.0); n];
        let mut prev_w = w.clone();
        let mut prev_gw = vec![C64::new(0.0, 0.0); n];
        let mut trial = vec![C64::new(0.0, 0.0); n];
        let mut zt = vec![C64::new(0.0, 0.0); n];
        let mut alpha: Option<f64> = None;
        for k in 0..steps {
            self.tangent_grad(&w, &z, &mut g, &mut gw);
            let gnorm = gw.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if !(gnorm > 1e-300) {
                break;
            }
            if k > 0 {
                let mut ss = 0.0;
                let mut sy = 0.0;
                for i in 0..n {
                    let si = w[i] - prev_w[i];
                    let yi = gw[i] - prev_gw[i];
                    ss += si.norm_sqr();
                    sy += (si.conj() * yi).re;
                }
                alpha = (sy.abs() > 1e-300).then(|| ss / sy.abs());
            }
            // angular length of the first trial step
            let mut len = alpha.map_or(0.25, |a| a * gnorm).min(1.0);
            let mut improved = false;
            while len >= 1e-12 {
                let mut tn = 0.0;
                for i in 0..n {
                    trial[i] = w[i] + gw[i] * (len / gnorm);
                    tn += trial[i].norm_sqr();
                }
                let inv = 1.0 / tn.sqrt();
                for t in trial.iter_mut() {
                    *t *= inv;
                }
                let ft = self.eval(&trial, &mut zt);
                if ft > f {
                    f = ft;
                    prev_w.copy_from_slice(&w);
                    prev_gw.copy_from_slice(&gw);
                    std::mem::swap(&mut w, &mut trial);
                    std::mem::swap(&mut z, &mut zt);
                    improved = true;
                    break;
                }
                len *= 0.5;
            }
            if !improved {
                break;
            }
        }
        Ascent { value: f, w, z }
    }
}

struct Survey {
    ascents: Vec<Ascent>,
    /// Sphere samples `w`, row-major, and the values of `rho` at their images.
    ws: Vec<C64>,
    values: Vec<f64>,
    /// Largest value at the center and on the half-size shell.
    interior_max: f64,
    interior_arg: Vec<C64>,
}

fn survey(e: &Ellipsoid, d: &Domain, cfg: &ContainmentConfig) -> Result<Survey> {
    cfg.validate()?;
    let probe = Probe::new(e, d)?;
    let n = probe.n;
    let seq = SphereSequence::new(n, cfg.seed);
    let mut ws = vec![C64::new(0.0, 0.0); n * cfg.sphere_samples];
    let mut values = Vec::with_capacity(cfg.sphere_samples);
    let mut z = vec![C64::new(0.0, 0.0); n];
    let mut interior_max = probe.domain.rho(&probe.c);
    let mut interior_arg = probe.c.clone();
    for i in 0..cfg.sphere_samples {
        let w = &mut ws[i * n..(i + 1) * n];
        seq.point_into(i, w);
        values.push(probe.eval(w, &mut z));
        probe.map(w, 0.5, &mut z);
        let inner = probe.domain.rho(&z);
        if inner > interior_max {
            interior_max = inner;
            interior_arg.copy_from_slice(&z);
        }
    }
    let mut order: Vec<usize> = (0..cfg.sphere_samples).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut starts: Vec<usize> = Vec::with_capacity(cfg.ascent_starts);
    for &i in &order {
        if starts.len() == cfg.ascent_starts {
            break;
        }
        let wi = &ws[i * n..(i + 1) * n];
        if starts.iter().all(|&j| angle(wi, &ws[j * n..(j + 1) * n]) >= cfg.dedup_angle) {
            starts.push(i);
        }
    }
    let ascents = starts
        .par_iter()
        .map(|&i| probe.ascend(&ws[i * n..(i + 1) * n], cfg.ascent_steps))
        .collect();
    Ok(Survey { ascents, ws, values, interior_max, interior_arg })
}

/// Largest `rho` found on the closed ellipsoid, with its location.
///
/// Deterministic for a fixed configuration; a lower bound of the true value.
pub fn max_rho_on_ellipsoid(e: &Ellipsoid, d: &Domain, cfg: &ContainmentConfig) -> Result<BoundaryMax> {
    let s = survey(e, d, cfg)?;
    Ok(best_of(&s))
}

fn best_of(s: &Survey) -> BoundaryMax {
    let mut best = 0;
    for (i, a) in s.ascents.iter().enumerate() {
        if a.value > s.ascents[best].value {
            best = i;
        }
    }
    let a = &s.ascents[best];
    if s.interior_max > a.value {
        return BoundaryMax {
            value: s.interior_max,
            argmax: CVector::from_column_slice(&s.interior_arg),
            direction: CVector::from_column_slice(&a.w),
        };
    }
    BoundaryMax {
        value: a.value,
        argmax: CVector::from_column_slice(&a.z),
        direction: CVector::from_column_slice(&a.w),
    }
}

pub fn inscribed(e: &Ellipsoid, d: &Domain, cfg: &ContainmentConfig) -> Result<Containment> {
    let worst = max_rho_on_ellipsoid(e, d, cfg)?;
    Ok(Containment { contained: worst.value <= cfg.inscribed_tol, margin: -worst.value, worst })
}

/// Separated boundary near-maximizers with `rho >= -contact_eps`.
///
/// Empty when the ellipsoid is strictly inside by more than `contact_eps`.
pub fn contact_points(e: &Ellipsoid, d: &Domain, cfg: &ContainmentConfig) -> Result<ContactSet> {
    let s = survey(e, d, cfg)?;
    let best = best_of(&s);
    let mut order: Vec<usize> = (0..s.ascents.len()).collect();
    order.sort_by(|&a, &b| s.ascents[b].value.total_cmp(&s.ascents[a].value).then(a.cmp(&b)));
    let n = e.dim();
    // ascent endpoints first, then raw samples in sequence order, which
    // spreads the set over flat stretches of contact
    let candidates = order
        .iter()
        .map(|&i| (&s.ascents[i].w[..], s.ascents[i].value))
        .chain((0..s.values.len()).map(|i| (&s.ws[i * n..(i + 1) * n], s.values[i])));
    let mut kept: Vec<(&[C64], f64)> = Vec::new();
    for (w, value) in candidates {
        if kept.len() == cfg.max_contacts {
            break;
        }
        if value < -cfg.contact_eps {
            continue;
        }
        if kept.iter().all(|(k, _)| angle(w, k) >= cfg.dedup_angle) {
            kept.push((w, value));
        }
    }
    let mut set = ContactSet {
        points: Vec::with_capacity(kept.len()),
        directions: Vec::with_capacity(kept.len()),
        rho: Vec::with_capacity(kept.len()),
        form_residual: Vec::with_capacity(kept.len()),
        max_rho: best.value,
    };
    for (w, value) in kept {
        let w = CVector::from_column_slice(w);
        let z = boundary_point(e, &w);
        set.form_residual.push((e.gauge(&z) - 1.0).abs());
        set.points.push(z);
        set.directions.push(w);
        set.rho.push(value);
    }
    Ok(set)
}
