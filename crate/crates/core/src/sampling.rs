//! Deterministic low-discrepancy points on the unit sphere of `C^n`.
//!
//! A Kronecker (additive recurrence) sequence in `[0, 1)^{2n}` with the
//! generalized golden ratio is shifted by a seeded random offset, pushed
//! through Box-Muller pairs to a complex Gaussian vector and normalized.
//! Prefixes are nested: the first `k` points do not depend on how many are
//! requested.

use rand::Rng;

use crate::random::rng;
use crate::{CVector, C64};

/// Unique positive root of `x^{d+1} = x + 1`.
fn generalized_golden(d: usize) -> f64 {
    let mut x = 2.0f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (d as f64 + 1.0));
    }
    x
}

pub struct SphereSequence {
    n: usize,
    alpha: Vec<f64>,
    offset: Vec<f64>,
}

impl SphereSequence {
    pub fn new(n: usize, seed: u64) -> Self {
        let d = 2 * n;
        let g = generalized_golden(d);
        let alpha = (1..=d).map(|k| g.powi(-(k as i32)).fract()).collect();
        let mut r = rng(seed);
        let offset = (0..d).map(|_| r.random::<f64>()).collect();
        SphereSequence { n, alpha, offset }
    }

    /// The `i`-th point, written into `out` (length `n`).
    pub fn point_into(&self, i: usize, out: &mut [C64]) {
        let k = (i + 1) as f64;
        let u = |j: usize| {
            let v = (self.offset[j] + k * self.alpha[j]).fract();
            v.max(1e-300)
        };
        let mut norm2 = 0.0;
        for (m, o) in out.iter_mut().enumerate().take(self.n) {
            let r = (-2.0 * u(2 * m).ln()).sqrt();
            let th = 2.0 * std::f64::consts::PI * u(2 * m + 1);
            *o = C64::from_polar(r, th);
            norm2 += r * r;
        }
        if norm2 == 0.0 {
            out[0] = C64::new(1.0, 0.0);
            return;
        }
        let inv = 1.0 / norm2.sqrt();
        for o in out.iter_mut() {
            *o *= inv;
        }
    }

    pub fn point(&self, i: usize) -> CVector {
        let mut v = vec![C64::new(0.0, 0.0); self.n];
        self.point_into(i, &mut v);
        CVector::from_vec(v)
    }
}

/// Real angle `arccos Re <a, b>` between unit vectors.
pub fn angle(a: &[C64], b: &[C64]) -> f64 {
    let ip: f64 = a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum();
    ip.clamp(-1.0, 1.0).acos()
}
