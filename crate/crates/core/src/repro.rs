//! Self-checking fixtures: each carries its expected values and where they
//! come from, runs end to end, and reports pass or fail per check.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificate::{centered_residual, translate_residuals, ContactMeasure};
use crate::containment::inscribed;
use crate::domain::{psh_sample_check, Domain, SampleBox};
use crate::harness::{uniqueness_probe, CLUSTER_THRESHOLD};
use crate::hermitian::{real_vec, Ellipsoid, HpdForm};
use crate::solver::{solve, Mode, SolveConfig, Termination};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Stated in the literature for this example.
    Literature,
    /// Closed form worked out for this fixture.
    ClosedForm,
    /// Immediate from the definitions.
    Elementary,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Literature => "literature",
            Source::ClosedForm => "closed-form",
            Source::Elementary => "elementary",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|computed - expected| <= tolerance`.
    Within,
    /// `computed <= expected + tolerance`.
    AtMost,
    /// `computed >= expected - tolerance`.
    AtLeast,
    /// `computed < expected`.
    Below,
    /// `computed > expected`.
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub source: Source,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, computed: f64, relation: Relation, expected: f64, tolerance: f64, source: Source) -> Self {
        let passed = match relation {
            Relation::Within => (computed - expected).abs() <= tolerance,
            Relation::AtMost => computed <= expected + tolerance,
            Relation::AtLeast => computed >= expected - tolerance,
            Relation::Below => computed < expected,
            Relation::Above => computed > expected,
        };
        Check { name: name.into(), computed, expected, tolerance, relation, source, passed }
    }

    fn flag(name: &str, ok: bool, source: Source) -> Self {
        Check::new(name, if ok { 1.0 } else { 0.0 }, Relation::Within, 1.0, 0.0, source)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fixture {
    Ball,
    HyperbolaBox,
    Cassini,
    DiscUnion,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [Fixture::Ball, Fixture::HyperbolaBox, Fixture::Cassini, Fixture::DiscUnion];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Ball => "ball",
            Fixture::HyperbolaBox => "hyperbola-box",
            Fixture::Cassini => "cassini",
            Fixture::DiscUnion => "disc-union",
        }
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown fixture `{s}`")))
    }
}

/// Tunable parameters of the fixtures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReproParams {
    /// Cassini parameter.
    pub lambda: f64,
    /// Member of the hyperbola-box family checked directly.
    pub p: f64,
    /// Random seeds for the uniqueness probe.
    pub seeds: usize,
}

impl Default for ReproParams {
    fn default() -> Self {
        ReproParams { lambda: 1.0005, p: 1.5, seeds: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureSummary {
    pub fixture: Fixture,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl FixtureSummary {
    fn new(fixture: Fixture, checks: Vec<Check>, notes: Vec<String>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        FixtureSummary { fixture, checks, notes, passed }
    }

    /// Fixed-width text table, one check per row.
    pub fn table(&self) -> String {
        let mut out = format!("== {} ==\n", self.fixture.name());
        out.push_str(&format!(
            "{:<44} {:>16} {:>3} {:>16} {:>9} {:<12} {}\n",
            "check", "computed", "", "expected", "tol", "source", "result"
        ));
        for c in &self.checks {
            let rel = match c.relation {
                Relation::Within => "~",
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
                Relation::Below => "<",
                Relation::Above => ">",
            };
            out.push_str(&format!(
                "{:<44} {:>16.10e} {:>3} {:>16.10e} {:>9.1e} {:<12} {}\n",
                c.name,
                c.computed,
                rel,
                c.expected,
                c.tolerance,
                c.source.to_string(),
                if c.passed { "PASS" } else { "FAIL" }
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

/// `diag(p^2/2, p^-2/2)`: the ellipsoids `p^2/2 |x|^2 + p^-2/2 |y|^2 < 1`.
pub fn hyperbola_family(p: f64) -> Result<Ellipsoid> {
    Ok(Ellipsoid::centered(HpdForm::from_real_diagonal(&[p * p / 2.0, 1.0 / (2.0 * p * p)])?))
}

/// Two-point measure `{(1/p, p), (-1/p, p)}` with unit weights.
pub fn hyperbola_certificate(p: f64) -> ContactMeasure {
    ContactMeasure { points: vec![real_vec(&[1.0 / p, p]), real_vec(&[-1.0 / p, p])], weights: vec![1.0, 1.0] }
}

/// `{i, -i}` with weights `1/2`.
pub fn disc_union_certificate() -> ContactMeasure {
    ContactMeasure {
        points: vec![CVector::from_element(1, C64::new(0.0, 1.0)), CVector::from_element(1, C64::new(0.0, -1.0))],
        weights: vec![0.5, 0.5],
    }
}

/// Upper bound `pi^2 (lambda^2 - 1)(2 lambda + 1)^2 / 2` on the volume of a
/// centered ellipsoid in the Cassini domain.
pub fn cassini_centered_bound(lambda: f64) -> f64 {
    PI * PI * (lambda * lambda - 1.0) * (2.0 * lambda + 1.0).powi(2) / 2.0
}

/// Ball of radius `1/3` about `(1, 0)`, volume `pi^2 / 162`.
pub fn cassini_ball() -> Result<Ellipsoid> {
    Ellipsoid::ball(real_vec(&[1.0, 0.0]), 1.0 / 3.0)
}

fn frob_to_identity(m: &CMatrix) -> f64 {
    (m - CMatrix::identity(m.nrows(), m.ncols())).norm()
}

fn ball(cfg: &SolveConfig) -> Result<FixtureSummary> {
    let d = Domain::unit_ball(2)?;
    let cfg = SolveConfig { mode: Mode::Centered, contact_eps: cfg.contact_eps.min(1e-8), ..cfg.clone() };
    let rep = solve(&d, &Ellipsoid::ball(CVector::zeros(2), 0.3)?, &cfg)?;
    let checks = vec![
        Check::flag("terminates lp_optimal", rep.termination == Termination::LpOptimal, Source::Elementary),
        Check::new("||H - Id||_F", frob_to_identity(rep.ellipsoid.form().matrix()), Relation::AtMost, 0.0, 1e-6, Source::Elementary),
        Check::new("volume", rep.volume, Relation::Within, PI * PI / 2.0, 1e-5, Source::Elementary),
        Check::new("certificate residual", rep.certificate.report.matrix_residual, Relation::AtMost, 0.0, 1e-4, Source::ClosedForm),
    ];
    Ok(FixtureSummary::new(Fixture::Ball, checks, vec!["the maximal ellipsoid of the ball is the ball".into()]))
}

fn hyperbola_box(params: &ReproParams, cfg: &SolveConfig) -> Result<FixtureSummary> {
    let d = Domain::hyperbola_box(1.0, 3.0)?;
    let target = 2.0 * PI * PI;
    let ccfg = cfg.effective_containment();
    let mut checks = Vec::new();
    for p in [0.6, 1.0, params.p] {
        let e = hyperbola_family(p)?;
        let c = inscribed(&e, &d, &ccfg)?;
        checks.push(Check::new(&format!("E_p margin, p = {p}"), c.margin.abs(), Relation::AtMost, 0.0, 1e-6, Source::Literature));
        let r = centered_residual(e.form(), &hyperbola_certificate(p))?;
        checks.push(Check::new(&format!("2-point certificate residual, p = {p}"), r, Relation::AtMost, 0.0, 1e-10, Source::ClosedForm));
        checks.push(Check::new(&format!("volume(E_p) / 2pi^2, p = {p}"), e.volume() / target, Relation::Within, 1.0, 1e-9, Source::Literature));
    }
    let cfg = SolveConfig { mode: Mode::Centered, ..cfg.clone() };
    let u = uniqueness_probe(&d, params.seeds.max(2), &cfg)?;
    checks.push(Check::new("clusters among solver runs", u.cluster_count as f64, Relation::AtLeast, 2.0, 0.0, Source::Literature));
    let worst = u.runs.iter().map(|r| (r.volume / target - 1.0).abs()).fold(0.0, f64::max);
    checks.push(Check::new("max |volume / 2pi^2 - 1| over runs", worst, Relation::AtMost, 0.0, 1e-3, Source::Literature));
    let notes = vec![
        format!("{} seeds, {} clusters at threshold {CLUSTER_THRESHOLD}", u.runs.len(), u.cluster_count),
        "maximal ellipsoids form a one-parameter family: not unique".into(),
    ];
    Ok(FixtureSummary::new(Fixture::HyperbolaBox, checks, notes))
}

fn cassini(params: &ReproParams, cfg: &SolveConfig) -> Result<FixtureSummary> {
    let lambda = params.lambda;
    let d = Domain::cassini(lambda)?;
    let ccfg = cfg.effective_containment();
    let bound = cassini_centered_bound(lambda);
    let ball_volume = PI * PI / 162.0;
    let b = cassini_ball()?;
    let c = inscribed(&b, &d, &ccfg)?;
    let tcfg = SolveConfig { mode: Mode::Translate, ..cfg.clone() };
    let rep = solve(&d, &b, &tcfg)?;
    let monotone = rep.volume_trace.windows(2).all(|w| w[1] >= w[0]);
    let ccfg_solve = SolveConfig { mode: Mode::Centered, ..cfg.clone() };
    let centered = solve(&d, &Ellipsoid::ball(CVector::zeros(2), 1e-3)?, &ccfg_solve)?;
    let origin = CVector::zeros(2);
    let levi0 = d.levi_form(0, origin.as_slice())?.eigh().values;
    let psh = psh_sample_check(&d, &SampleBox::enclosing(&d), 4096, cfg.seed)?;
    let checks = vec![
        Check::new("centered volume bound", bound, Relation::Below, ball_volume, 0.0, Source::Literature),
        Check::new("ball radius 1/3 at p: margin", c.margin, Relation::Above, 0.0, 0.0, Source::Literature),
        Check::new("ball volume", b.volume(), Relation::Within, ball_volume, 1e-12, Source::Literature),
        Check::new("translate solve: final volume", rep.volume, Relation::AtLeast, ball_volume, 1e-6, Source::Literature),
        Check::flag("translate solve: volume trace nondecreasing", monotone, Source::Elementary),
        Check::flag("translate solve: local_only", rep.local_only, Source::Literature),
        Check::new("centered solve: volume", centered.volume, Relation::AtMost, bound, 1e-9, Source::Literature),
        Check::new("Levi form at 0: smaller eigenvalue", levi0[0], Relation::Within, 0.0, 1e-12, Source::Literature),
        Check::new("Levi form at 0: larger eigenvalue", levi0[1], Relation::Within, 2.0, 1e-12, Source::Literature),
        Check::new("sampled min Levi eigenvalue", psh.min_eigenvalue, Relation::AtLeast, 0.0, 1e-9, Source::ClosedForm),
    ];
    let notes = vec![
        format!("lambda = {lambda}: every centered ellipsoid has volume <= {bound:.6e} < {ball_volume:.6e}"),
        format!("translate solve ended {:?} at volume {:.6e}", rep.termination, rep.volume),
        "a translated ball beats every centered ellipsoid".into(),
    ];
    Ok(FixtureSummary::new(Fixture::Cassini, checks, notes))
}

fn disc_union(cfg: &SolveConfig) -> Result<FixtureSummary> {
    let d = Domain::disc_union()?;
    let unit = Ellipsoid::ball(CVector::zeros(1), 1.0)?;
    let m = disc_union_certificate();
    let (vr, mr) = translate_residuals(unit.form(), unit.center(), &m)?;
    let c = inscribed(&unit, &d, &cfg.effective_containment())?;
    let big = Ellipsoid::ball(real_vec(&[2.0]), 2.0)?;
    let tcfg = SolveConfig { mode: Mode::Translate, ..cfg.clone() };
    let rep = solve(&d, &unit, &tcfg)?;
    let checks = vec![
        Check::new("vector residual at unit disc", vr, Relation::AtMost, 0.0, 1e-12, Source::Literature),
        Check::new("matrix residual at unit disc", mr, Relation::AtMost, 0.0, 1e-12, Source::Literature),
        Check::new("unit disc margin", c.margin, Relation::AtLeast, 0.0, 1e-9, Source::Elementary),
        Check::new("volume(unit disc)", unit.volume(), Relation::Within, PI, 1e-12, Source::Literature),
        Check::new("volume(unit disc) vs volume(D)", unit.volume(), Relation::Below, big.volume(), 0.0, Source::Literature),
        Check::new("volume(D)", big.volume(), Relation::Within, 4.0 * PI, 1e-12, Source::Literature),
        Check::flag("translate solve stops at the unit disc", rep.termination == Termination::LpOptimal && (rep.volume - PI).abs() < 1e-9, Source::Literature),
    ];
    let notes = vec![
        "necessary-only (translate mode): the certificate holds at the unit disc".into(),
        "yet the disc |z - 2| < 2 inside the domain has four times the area".into(),
    ];
    Ok(FixtureSummary::new(Fixture::DiscUnion, checks, notes))
}

pub fn run_fixture(f: Fixture, params: &ReproParams, cfg: &SolveConfig) -> Result<FixtureSummary> {
    match f {
        Fixture::Ball => ball(cfg),
        Fixture::HyperbolaBox => hyperbola_box(params, cfg),
        Fixture::Cassini => cassini(params, cfg),
        Fixture::DiscUnion => disc_union(cfg),
    }
}
