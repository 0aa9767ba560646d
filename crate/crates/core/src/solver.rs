//! Volume ascent over inscribed ellipsoids.
//!
//! Each iteration collects ε-contacts, solves a small LP for an operator `T`
//! (and a translation `a`) that does not push any contact outward to first
//! order while increasing `Re tr T`, then moves along `e^{tT}` by
//! backtracking. A nonpositive LP value ends the run; its duals seed the
//! certificate fit.

use serde::{Deserialize, Serialize};

use crate::certificate::{
    centered_report, fit_centered, fit_translate, translate_report, CertificateReport, ContactMeasure,
    FIT_THRESHOLD,
};
use crate::containment::{contact_points, inscribed, ContactSet, ContainmentConfig};
use crate::domain::Domain;
use crate::hermitian::{spectral, Ellipsoid, HermitianMatrix, HpdForm};
use crate::lp::maximize_in_box;
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Ellipsoids centered at the origin.
    #[default]
    Centered,
    /// Ellipsoids with a free center. Certificates are necessary conditions only.
    Translate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub mode: Mode,
    pub max_iters: usize,
    pub lp_stop_tol: f64,
    /// Overrides `containment.contact_eps`.
    pub contact_eps: f64,
    pub step_init: f64,
    pub step_shrink: f64,
    pub min_step: f64,
    pub containment: ContainmentConfig,
    /// Overrides `containment.seed`.
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            mode: Mode::Centered,
            max_iters: 200,
            lp_stop_tol: 1e-6,
            contact_eps: 1e-6,
            step_init: 0.1,
            step_shrink: 0.5,
            min_step: 1e-10,
            containment: ContainmentConfig::default(),
            seed: 0,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lp_stop_tol", self.lp_stop_tol),
            ("contact_eps", self.contact_eps),
            ("step_init", self.step_init),
            ("min_step", self.min_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::InvalidConfig(format!("step_shrink must lie in (0, 1), got {}", self.step_shrink)));
        }
        if self.min_step > self.step_init {
            return Err(Error::InvalidConfig("min_step exceeds step_init".into()));
        }
        self.effective_containment().validate()
    }

    /// Containment settings with the solver's tolerance and seed applied.
    pub fn effective_containment(&self) -> ContainmentConfig {
        ContainmentConfig { contact_eps: self.contact_eps, seed: self.seed, ..self.containment.clone() }
    }
}

/// Ascent direction: `z -> c + t a + e^{tT} (z - c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction {
    pub t: CMatrix,
    pub a: CVector,
    /// `Re tr T` at the LP optimum.
    pub value: f64,
    /// Multipliers of the contact constraints.
    pub duals: Vec<f64>,
}

impl Direction {
    /// `T - sigma Id` with `sigma = frac * value / n`: contacts then move
    /// strictly inward at first order while `Re tr` keeps a `1 - frac` share
    /// of the LP value.
    pub fn shifted(&self, frac: f64) -> Direction {
        let n = self.t.nrows();
        let sigma = frac * self.value.max(0.0) / n as f64;
        Direction {
            t: &self.t - CMatrix::identity(n, n) * C64::new(sigma, 0.0),
            a: self.a.clone(),
            value: self.value * (1.0 - frac),
            duals: self.duals.clone(),
        }
    }
}

/// Share of the LP value traded for strict inward motion of the contacts.
pub const STRICT_SHIFT: f64 = 0.5;

/// Maximizes `Re tr T` over `|Re T_jk|, |Im T_jk| <= 1` (and the same for `a`
/// in translate mode) subject to `Re h(T u_i + a, u_i) <= 0` with
/// `u_i = z_i - c` for every contact `z_i`.
///
/// With no contacts the LP is the bare box and returns `T = Id`.
pub fn direction_lp(h: &HpdForm, c: &CVector, contacts: &[CVector], mode: Mode) -> Result<Direction> {
    let n = h.dim();
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: c.len() });
    }
    if mode == Mode::Centered && c.iter().any(|v| *v != C64::new(0.0, 0.0)) {
        return Err(Error::NotCentered);
    }
    let nt = 2 * n * n;
    let nv = if mode == Mode::Translate { nt + 2 * n } else { nt };
    let mut obj = vec![0.0; nv];
    for j in 0..n {
        obj[2 * (j * n + j)] = 1.0;
    }
    let rows: Vec<Vec<f64>> = contacts
        .iter()
        .map(|z| {
            if z.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: z.len() });
            }
            let u = z - c;
            let v = h.matrix() * &u;
            let mut row = vec![0.0; nv];
            for j in 0..n {
                for k in 0..n {
                    let q = v[j].conj() * u[k];
                    row[2 * (j * n + k)] = q.re;
                    row[2 * (j * n + k) + 1] = -q.im;
                }
                if mode == Mode::Translate {
                    row[nt + 2 * j] = v[j].re;
                    row[nt + 2 * j + 1] = v[j].im;
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let sol = maximize_in_box(&obj, &rows, 1.0)?;
    let t = CMatrix::from_fn(n, n, |j, k| C64::new(sol.x[2 * (j * n + k)], sol.x[2 * (j * n + k) + 1]));
    let a = if mode == Mode::Translate {
        CVector::from_fn(n, |j, _| C64::new(sol.x[nt + 2 * j], sol.x[nt + 2 * j + 1]))
    } else {
        CVector::zeros(n)
    };
    Ok(Direction { t, a, value: sol.value, duals: sol.row_duals })
}

/// `c + s a + e^{sT} (E - c)`, using the part of `T` that is self-adjoint for
/// `h`. The remaining part generates `h`-unitary maps, which fix the
/// ellipsoid; dropping it makes every step a geodesic:
/// `H' = H^{1/2} e^{-2sK} H^{1/2}` with `K` the hermitian part of
/// `H^{1/2} T H^{-1/2}`.
pub fn deform(e: &Ellipsoid, dir: &Direction, s: f64) -> Result<Ellipsoid> {
    let f = e.form();
    let hs = f.sqrt();
    let m = hs.as_matrix() * &dir.t * f.inv_sqrt().as_matrix();
    let k = HermitianMatrix::symmetrized(&m);
    let decay = spectral(&k.eigh(), |x| (-2.0 * s * x).exp());
    let hm = hs.as_matrix() * decay.as_matrix() * hs.as_matrix();
    let form = HpdForm::from_matrix(HermitianMatrix::symmetrized(&hm).into_matrix())?;
    Ellipsoid::new(form, e.center() + &dir.a * C64::new(s, 0.0))
}

/// Backtracking from `step_init` by `step_shrink` to the first admissible
/// length (inscribed and gaining volume), then bisection between it and the
/// last rejected length until the bracket is below `contact_eps / 10`. The
/// largest admissible length tested is returned, so steps end at first
/// contact instead of creeping towards it.
pub fn step(e: &Ellipsoid, dir: &Direction, d: &Domain, cfg: &SolveConfig) -> Result<(Ellipsoid, f64)> {
    let ccfg = cfg.effective_containment();
    let v0 = e.log_volume();
    let admissible = |s: f64| -> Result<Option<Ellipsoid>> {
        let cand = deform(e, dir, s)?;
        Ok((cand.log_volume() > v0 && inscribed(&cand, d, &ccfg)?.contained).then_some(cand))
    };
    let mut s = cfg.step_init;
    while s >= cfg.min_step {
        if let Some(mut best) = admissible(s)? {
            if s < cfg.step_init {
                let (mut lo, mut hi) = (s, s / cfg.step_shrink);
                for _ in 0..BISECTION_ROUNDS {
                    if hi - lo <= 0.1 * cfg.contact_eps {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    match admissible(mid)? {
                        Some(c) => {
                            lo = mid;
                            best = c;
                        }
                        None => hi = mid,
                    }
                }
                s = lo;
            }
            return Ok((best, s));
        }
        s *= cfg.step_shrink;
    }
    Err(Error::StepStall(cfg.min_step))
}

const BISECTION_ROUNDS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    LpOptimal,
    MaxIters,
    StepStall,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub volume: f64,
    pub max_rho: f64,
    pub contacts: usize,
    pub lp_value: f64,
    /// Accepted step length; absent on the final iteration.
    pub step: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub measure: ContactMeasure,
    pub report: CertificateReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: Mode,
    /// True in translate mode: the certificate conditions are necessary but
    /// do not imply maximality there.
    pub local_only: bool,
    pub termination: Termination,
    pub ellipsoid: Ellipsoid,
    pub volume: f64,
    /// Volume before the first step and after every accepted step.
    pub volume_trace: Vec<f64>,
    pub iterations: Vec<IterationRecord>,
    pub certificate: Certificate,
}

impl SolveReport {
    pub fn volume_trace_csv(&self) -> String {
        let mut out = String::from("step,volume\n");
        for (i, v) in self.volume_trace.iter().enumerate() {
            out.push_str(&format!("{i},{v:.17e}\n"));
        }
        out
    }
}

fn check_seed(d: &Domain, e0: &Ellipsoid, cfg: &SolveConfig) -> Result<()> {
    cfg.validate()?;
    if e0.dim() != d.dim() {
        return Err(Error::DimensionMismatch { expected: d.dim(), got: e0.dim() });
    }
    if cfg.mode == Mode::Centered {
        if !e0.is_centered() {
            return Err(Error::NotCentered);
        }
        let zero = vec![C64::new(0.0, 0.0); d.dim()];
        let r0 = d.rho(&zero);
        if r0 >= 0.0 {
            return Err(Error::OriginOutside(r0));
        }
    }
    let c = inscribed(e0, d, &cfg.effective_containment())?;
    if !c.contained {
        return Err(Error::SeedNotInscribed(c.worst.value));
    }
    Ok(())
}

fn certify(e: &Ellipsoid, contacts: &ContactSet, warm: &[f64], mode: Mode) -> Result<Certificate> {
    if contacts.is_empty() {
        let measure = ContactMeasure { points: Vec::new(), weights: Vec::new() };
        let report = match mode {
            Mode::Centered => centered_report(e.form(), &measure, FIT_THRESHOLD)?,
            Mode::Translate => translate_report(e.form(), e.center(), &measure, FIT_THRESHOLD)?,
        };
        return Ok(Certificate { measure, report });
    }
    let warm = if warm.len() == contacts.len() { warm } else { &[] };
    let (measure, report) = match mode {
        Mode::Centered => fit_centered(e.form(), &contacts.points, warm)?,
        Mode::Translate => fit_translate(e.form(), e.center(), &contacts.points, warm)?,
    };
    Ok(Certificate { measure, report })
}

/// Runs the ascent from an inscribed seed.
pub fn solve(d: &Domain, e0: &Ellipsoid, cfg: &SolveConfig) -> Result<SolveReport> {
    check_seed(d, e0, cfg)?;
    let ccfg = cfg.effective_containment();
    let mut e = e0.clone();
    let mut trace = vec![e.volume()];
    let mut iterations = Vec::new();
    let mut termination = Termination::MaxIters;
    let mut last: Option<(ContactSet, Vec<f64>)> = None;
    for iter in 0..cfg.max_iters {
        let contacts = contact_points(&e, d, &ccfg)?;
        let dir = direction_lp(e.form(), e.center(), &contacts.points, cfg.mode)?;
        let mut rec = IterationRecord {
            iter,
            volume: e.volume(),
            max_rho: contacts.max_rho,
            contacts: contacts.len(),
            lp_value: dir.value,
            step: None,
        };
        if dir.value <= cfg.lp_stop_tol {
            iterations.push(rec);
            termination = Termination::LpOptimal;
            last = Some((contacts, dir.duals));
            break;
        }
        match step(&e, &dir.shifted(STRICT_SHIFT), d, cfg) {
            Ok((next, s)) => {
                rec.step = Some(s);
                iterations.push(rec);
                e = next;
                trace.push(e.volume());
            }
            Err(Error::StepStall(_)) => {
                iterations.push(rec);
                termination = Termination::StepStall;
                last = Some((contacts, dir.duals));
                break;
            }
            Err(err) => return Err(err),
        }
    }
    let (contacts, duals) = match last {
        Some(v) => v,
        None => (contact_points(&e, d, &ccfg)?, Vec::new()),
    };
    let certificate = certify(&e, &contacts, &duals, cfg.mode)?;
    Ok(SolveReport {
        mode: cfg.mode,
        local_only: cfg.mode == Mode::Translate,
        termination,
        volume: e.volume(),
        ellipsoid: e,
        volume_trace: trace,
        iterations,
        certificate,
    })
}
