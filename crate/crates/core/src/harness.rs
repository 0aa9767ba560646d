//! Probes for geodesic convexity of the inscribed set and for
//! (non-)uniqueness of maximal ellipsoids.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::containment::{inscribed, max_rho_on_ellipsoid, ContainmentConfig};
use crate::domain::Domain;
use crate::hermitian::{geodesic_point, Ellipsoid, HpdForm};
use crate::random::{random_hpd_log_uniform, rng};
use crate::solver::{solve, SolveConfig, Termination};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Frobenius threshold on determinant-normalized forms.
pub const CLUSTER_THRESHOLD: f64 = 0.05;
const MAX_HALVINGS: usize = 60;

/// `0.1, 0.2, ..., 0.9`.
pub fn default_grid() -> Vec<f64> {
    (1..10).map(|k| k as f64 / 10.0).collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty t grid".into()));
    }
    if grid.iter().any(|t| !(0.0..=1.0).contains(t)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("t grid must be strictly increasing inside [0, 1]".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub grid: Vec<f64>,
    /// `-max rho` on each interpolant.
    pub margins: Vec<f64>,
    pub min_margin: f64,
    /// Where the worst interpolant pokes out, when it does.
    #[serde(with = "crate::serde_complex::option_vector")]
    pub witness: Option<CVector>,
    /// Largest deviation of log volume from the chord between the endpoints.
    pub log_volume_defect: f64,
}

impl ConvexityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,margin\n");
        for (t, m) in self.grid.iter().zip(&self.margins) {
            out.push_str(&format!("{t},{m:.17e}\n"));
        }
        out
    }
}

/// Inscribed margins along the geodesic from `e0` to `e1`.
pub fn convexity_probe(
    d: &Domain,
    e0: &Ellipsoid,
    e1: &Ellipsoid,
    grid: &[f64],
    cfg: &ContainmentConfig,
) -> Result<ConvexityReport> {
    check_grid(grid)?;
    if !e0.is_centered() || !e1.is_centered() {
        return Err(Error::NotCentered);
    }
    for (index, e) in [e0, e1].into_iter().enumerate() {
        let c = inscribed(e, d, cfg)?;
        if !c.contained {
            return Err(Error::EndpointNotInscribed { index, value: c.worst.value });
        }
    }
    let (l0, l1) = (e0.log_volume(), e1.log_volume());
    let points = grid
        .iter()
        .map(|&t| {
            let e = geodesic_point(e0, e1, t)?;
            let m = max_rho_on_ellipsoid(&e, d, cfg)?;
            let defect = (e.log_volume() - ((1.0 - t) * l0 + t * l1)).abs();
            Ok((m, defect))
        })
        .collect::<Result<Vec<_>>>()?;
    let margins: Vec<f64> = points.iter().map(|(m, _)| -m.value).collect();
    let (worst, min_margin) =
        margins.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &m)| if m < acc.1 { (i, m) } else { acc });
    Ok(ConvexityReport {
        grid: grid.to_vec(),
        witness: (min_margin < -cfg.inscribed_tol).then(|| points[worst].0.argmax.clone()),
        log_volume_defect: points.iter().fold(0.0f64, |a, (_, d)| a.max(*d)),
        margins,
        min_margin,
    })
}

/// Random centered ellipsoid inscribed in `d`: eigenvalues log-uniform in
/// `[0.1, 1]`, a random unitary frame, halved until inscribed. With `tighten`
/// the scale is then bisected back up towards first contact.
pub fn random_inscribed<R: Rng + ?Sized>(
    d: &Domain,
    rng: &mut R,
    cfg: &ContainmentConfig,
    tighten: bool,
) -> Result<Ellipsoid> {
    let n = d.dim();
    let base = Ellipsoid::centered(random_hpd_log_uniform(rng, n, 0.1, 1.0));
    let mut scale = 1.0;
    let mut halvings = 0;
    while !inscribed(&base.dilated(scale)?, d, cfg)?.contained {
        halvings += 1;
        if halvings > MAX_HALVINGS {
            return Err(Error::NoInscribedSeed(MAX_HALVINGS));
        }
        scale *= 0.5;
    }
    if tighten && halvings > 0 {
        let (mut lo, mut hi) = (scale, 2.0 * scale);
        for _ in 0..20 {
            let mid = 0.5 * (lo + hi);
            if inscribed(&base.dilated(mid)?, d, cfg)?.contained {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        scale = lo;
    }
    base.dilated(scale)
}

/// Per-seed generator: independent streams indexed by seed position.
pub fn seed_rng(seed: u64, index: usize) -> crate::random::SeededRng {
    rng(seed ^ (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub index: usize,
    pub seed: Ellipsoid,
    pub ellipsoid: Ellipsoid,
    pub volume: f64,
    pub termination: Termination,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub members: Vec<usize>,
    /// Mean of the members' form matrices.
    #[serde(with = "crate::serde_complex::matrix")]
    pub center: CMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub runs: Vec<SeedRun>,
    /// Pairwise Frobenius distances of determinant-normalized forms.
    pub distances: Vec<Vec<f64>>,
    pub threshold: f64,
    pub clusters: Vec<Cluster>,
    pub cluster_count: usize,
    /// `max volume - min volume`.
    pub volume_spread: f64,
}

/// `H / det(H)^{1/n}`.
pub fn normalized_form(h: &HpdForm) -> CMatrix {
    let s = (-h.log_det() / h.dim() as f64).exp();
    h.matrix() * C64::new(s, 0.0)
}

/// Leader clustering in run order: each form joins the first cluster whose
/// leader lies within `threshold`, so clusters cannot chain.
pub fn cluster_forms(forms: &[HpdForm], threshold: f64) -> Vec<Cluster> {
    let normed: Vec<CMatrix> = forms.iter().map(normalized_form).collect();
    let mut clusters: Vec<Cluster> = Vec::new();
    for (i, m) in normed.iter().enumerate() {
        match clusters.iter_mut().find(|c| (&normed[c.members[0]] - m).norm() <= threshold) {
            Some(c) => c.members.push(i),
            None => clusters.push(Cluster { members: vec![i], center: CMatrix::zeros(m.nrows(), m.ncols()) }),
        }
    }
    for c in clusters.iter_mut() {
        let n = forms[c.members[0]].dim();
        let sum = c.members.iter().fold(CMatrix::zeros(n, n), |acc, &i| acc + forms[i].matrix());
        c.center = sum / C64::new(c.members.len() as f64, 0.0);
    }
    clusters
}

/// Solves from `n_seeds` random inscribed seeds and clusters the results.
pub fn uniqueness_probe(d: &Domain, n_seeds: usize, cfg: &SolveConfig) -> Result<UniquenessReport> {
    if n_seeds < 2 {
        return Err(Error::InvalidConfig("uniqueness probe needs at least two seeds".into()));
    }
    cfg.validate()?;
    let ccfg = cfg.effective_containment();
    let runs = (0..n_seeds)
        .into_par_iter()
        .map(|index| {
            let seed = random_inscribed(d, &mut seed_rng(cfg.seed, index), &ccfg, false)?;
            let rep = solve(d, &seed, cfg)?;
            Ok(SeedRun {
                index,
                seed,
                volume: rep.volume,
                termination: rep.termination,
                iterations: rep.iterations.len(),
                ellipsoid: rep.ellipsoid,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let forms: Vec<HpdForm> = runs.iter().map(|r| r.ellipsoid.form().clone()).collect();
    let normed: Vec<CMatrix> = forms.iter().map(normalized_form).collect();
    let distances = normed.iter().map(|a| normed.iter().map(|b| (a - b).norm()).collect()).collect();
    let clusters = cluster_forms(&forms, CLUSTER_THRESHOLD);
    let (lo, hi) = runs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r.volume), h.max(r.volume)));
    Ok(UniquenessReport { runs, distances, threshold: CLUSTER_THRESHOLD, cluster_count: clusters.len(), clusters, volume_spread: hi - lo })
}
