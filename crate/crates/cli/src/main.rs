use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hermjohn::certificate::{centered_report, translate_report, ContactMeasure};
use hermjohn::containment::{contact_points, inscribed};
use hermjohn::harness::{convexity_probe, default_grid};
use hermjohn::hermitian::geodesic_point;
use hermjohn::repro::{
    cassini_ball, disc_union_certificate, hyperbola_certificate, hyperbola_family, run_fixture, Fixture,
    ReproParams,
};
use hermjohn::slice::{slice, SlicePlane};
use hermjohn::solver::{solve, Mode, SolveConfig, Termination};
use hermjohn::{CVector, Domain, DomainSpec, Ellipsoid, Error};
use serde::Serialize;
use serde_json::Value;

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_SOFTWARE: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "hermjohn", version, about = "Maximal inscribed hermitian ellipsoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the volume ascent from a seed ellipsoid.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Seed ellipsoid JSON; defaults to an inscribed ball.
        #[arg(long)]
        start: Option<PathBuf>,
    },
    /// Check a contact measure against an ellipsoid.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, required_unless_present = "fixture")]
        ellipsoid: Option<PathBuf>,
        #[arg(long, required_unless_present = "fixture")]
        measure: Option<PathBuf>,
        /// Use a builtin ellipsoid and measure instead of files.
        #[arg(long, value_parser = ["hyperbola-box", "disc-union"], conflicts_with_all = ["ellipsoid", "measure"])]
        fixture: Option<String>,
        #[arg(long, default_value_t = 1e-4)]
        threshold: f64,
    },
    /// Inscribed margins along the geodesic between two centered ellipsoids.
    Geodesic {
        #[command(flatten)]
        common: Common,
        /// Endpoint JSON; defaults to E_p with p = 0.6.
        #[arg(long)]
        from: Option<PathBuf>,
        /// Endpoint JSON; defaults to E_p with p from --p.
        #[arg(long)]
        to: Option<PathBuf>,
    },
    /// Containment margin and contact points of an ellipsoid.
    Contain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        ellipsoid: PathBuf,
    },
    /// Run the builtin fixtures and compare against expected values.
    Repro {
        #[command(flatten)]
        common: Common,
        /// Fixture names; all when omitted.
        fixtures: Vec<String>,
        /// Random seeds for the uniqueness probe.
        #[arg(long, default_value_t = 16)]
        seeds: usize,
    },
    /// Contours of rho = 0 and of an ellipsoid in a real 2-plane.
    Slice {
        #[command(flatten)]
        common: Common,
        /// Two real coordinates: 2k is Re z_k, 2k+1 is Im z_k.
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        axes: Vec<usize>,
        #[arg(long)]
        ellipsoid: Option<PathBuf>,
        #[arg(long)]
        extent: Option<f64>,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// `builtin:NAME` (ball, polydisc, hyperbola-box, cassini, disc-union) or a domain JSON file.
    #[arg(long, default_value = "builtin:ball")]
    domain: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Centered)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "hermjohn-out")]
    out: PathBuf,
    /// JSON file with solver configuration overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cassini parameter.
    #[arg(long)]
    lambda: Option<f64>,
    /// Hyperbola-box family parameter.
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated geodesic parameters.
    #[arg(long, value_delimiter = ',')]
    t_grid: Option<Vec<f64>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Centered,
    Translate,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Centered => Mode::Centered,
            ModeArg::Translate => Mode::Translate,
        }
    }
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EX_USAGE, message: message.into() }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure { code: EX_DATAERR, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Json(_) | Error::InvalidMeasure(_) | Error::NotHermitian(_) | Error::NonFinite => EX_DATAERR,
            Error::Lp(_) | Error::StepStall(_) => EX_SOFTWARE,
            _ => EX_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    domain: String,
    domain_spec: DomainSpec,
    mode: Mode,
    seed: u64,
    config: SolveConfig,
    config_overrides: Value,
    outputs: Vec<String>,
}

#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    manifest: &'a RunManifest,
    report: &'a T,
}

struct Run {
    common: Common,
    domain: Domain,
    config: SolveConfig,
    overrides: Value,
}

impl Run {
    fn new(common: Common) -> CliResult<Run> {
        let domain = load_domain(&common)?;
        let overrides = match &common.config {
            Some(path) => serde_json::from_str::<Value>(&read(path)?)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?,
            None => Value::Object(Default::default()),
        };
        let mut base = serde_json::to_value(SolveConfig::default()).expect("config serializes");
        merge(&mut base, &overrides);
        let mut config: SolveConfig =
            serde_json::from_value(base).map_err(|e| Failure::usage(format!("bad config: {e}")))?;
        config.mode = common.mode.into();
        config.seed = common.seed;
        config.validate()?;
        Ok(Run { common, domain, config, overrides })
    }

    fn manifest(&self, command: &str, outputs: &[&str]) -> RunManifest {
        RunManifest {
            tool: "hermjohn",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            domain: self.common.domain.clone(),
            domain_spec: self.domain.spec().clone(),
            mode: self.config.mode,
            seed: self.config.seed,
            config: self.config.clone(),
            config_overrides: self.overrides.clone(),
            outputs: outputs.iter().map(|o| self.common.out.join(o).display().to_string()).collect(),
        }
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<()> {
        fs::create_dir_all(&self.common.out)
            .map_err(|e| Failure::usage(format!("cannot create {}: {e}", self.common.out.display())))?;
        let path = self.common.out.join(name);
        fs::write(&path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
    }

    fn write_json<T: Serialize>(&self, name: &str, manifest: &RunManifest, report: &T) -> CliResult<()> {
        let text = serde_json::to_string_pretty(&Artifact { manifest, report }).expect("report serializes");
        self.write(name, &(text + "\n"))
    }
}

fn merge(base: &mut Value, over: &Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, o) => *b = o.clone(),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_file<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn load_domain(c: &Common) -> CliResult<Domain> {
    let Some(name) = c.domain.strip_prefix("builtin:") else {
        let spec: DomainSpec = parse_file(Path::new(&c.domain))?;
        return Ok(Domain::new(spec)?);
    };
    let d = match name {
        "ball" => Domain::unit_ball(2)?,
        "polydisc" => Domain::polydisc(&[1.0, 2.0])?,
        "hyperbola-box" => Domain::hyperbola_box(1.0, 3.0)?,
        "cassini" => Domain::cassini(c.lambda.unwrap_or(1.2))?,
        "disc-union" => Domain::disc_union()?,
        other => return Err(Failure::usage(format!("unknown builtin domain `{other}`"))),
    };
    Ok(d)
}

/// Reads a bare JSON value, or the `report` field of an emitted artifact.
fn load_value(path: &Path) -> CliResult<Value> {
    let v: Value = parse_file(path)?;
    Ok(match v {
        Value::Object(mut o) if o.contains_key("manifest") => o.remove("report").unwrap_or(Value::Null),
        v => v,
    })
}

/// An ellipsoid file, or a solve artifact holding one.
fn load_ellipsoid(path: &Path) -> CliResult<Ellipsoid> {
    let mut v = load_value(path)?;
    if let Some(e) = v.get_mut("ellipsoid") {
        v = e.take();
    }
    serde_json::from_value(v).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

/// A measure file, or a solve artifact holding a certificate.
fn load_measure(path: &Path) -> CliResult<ContactMeasure> {
    let mut v = load_value(path)?;
    if let Some(m) = v.pointer_mut("/certificate/measure") {
        v = m.take();
    }
    serde_json::from_value(v).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

/// Largest ball about `center` of radius `R / 2^k` that is inscribed.
fn inscribed_ball(run: &Run, center: CVector) -> CliResult<Ellipsoid> {
    let ccfg = run.config.effective_containment();
    let mut r = run.domain.enclosing_radius();
    for _ in 0..60 {
        let e = Ellipsoid::ball(center.clone(), r)?;
        if inscribed(&e, &run.domain, &ccfg)?.contained {
            return Ok(e);
        }
        r *= 0.5;
    }
    Err(Error::NoInscribedSeed(60).into())
}

fn default_start(run: &Run) -> CliResult<Ellipsoid> {
    let n = run.domain.dim();
    if run.config.mode == Mode::Translate {
        match run.domain.spec() {
            DomainSpec::Cassini { .. } => return Ok(cassini_ball()?),
            DomainSpec::PlanarUnion { .. } => return inscribed_ball(run, CVector::zeros(1)),
            _ => {}
        }
    }
    inscribed_ball(run, CVector::zeros(n))
}

fn cmd_solve(common: Common, start: Option<PathBuf>) -> CliResult<u8> {
    let run = Run::new(common)?;
    let e0 = match &start {
        Some(p) => load_ellipsoid(p)?,
        None => default_start(&run)?,
    };
    let rep = solve(&run.domain, &e0, &run.config)?;
    let manifest = run.manifest("solve", &["solve.json", "volume_trace.csv"]);
    run.write_json("solve.json", &manifest, &rep)?;
    run.write("volume_trace.csv", &rep.volume_trace_csv())?;
    println!(
        "{:?} after {} iterations: volume {:.12e}, certificate {:?} (residual {:.3e})",
        rep.termination,
        rep.iterations.len(),
        rep.volume,
        rep.certificate.report.status,
        rep.certificate.report.worst_residual()
    );
    if rep.local_only {
        eprintln!("warning: translate mode; the certificate is a necessary condition only");
    }
    Ok(match rep.termination {
        Termination::LpOptimal => 0,
        Termination::MaxIters => 2,
        Termination::StepStall => 3,
    })
}

fn cmd_certify(
    common: Common,
    ellipsoid: Option<PathBuf>,
    measure: Option<PathBuf>,
    fixture: Option<String>,
    threshold: f64,
) -> CliResult<u8> {
    let mut common = common;
    let (e, m) = match fixture.as_deref() {
        Some("hyperbola-box") => {
            let p = common.p.unwrap_or(1.5);
            (hyperbola_family(p)?, hyperbola_certificate(p))
        }
        Some(_) => {
            common.mode = ModeArg::Translate;
            (Ellipsoid::ball(CVector::zeros(1), 1.0)?, disc_union_certificate())
        }
        None => {
            let e = load_ellipsoid(ellipsoid.as_deref().expect("required by clap"))?;
            let m = load_measure(measure.as_deref().expect("required by clap"))?;
            m.validate().map_err(|err| Failure::data(err.to_string()))?;
            (e, m)
        }
    };
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Failure::usage("threshold must be positive"));
    }
    if m.points.iter().any(|z| z.len() != e.dim()) {
        return Err(Failure::data("measure points do not match the ellipsoid dimension"));
    }
    let report = match common.mode {
        ModeArg::Centered => {
            if !e.is_centered() {
                return Err(Failure::usage("centered certificate needs an ellipsoid centered at 0"));
            }
            centered_report(e.form(), &m, threshold)?
        }
        ModeArg::Translate => translate_report(e.form(), e.center(), &m, threshold)?,
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if common.mode == ModeArg::Translate {
        eprintln!("warning: necessary-only (translate mode)");
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_geodesic(common: Common, from: Option<PathBuf>, to: Option<PathBuf>) -> CliResult<u8> {
    let run = Run::new(common)?;
    let e0 = match &from {
        Some(p) => load_ellipsoid(p)?,
        None => hyperbola_family(0.6)?,
    };
    let e1 = match &to {
        Some(p) => load_ellipsoid(p)?,
        None => hyperbola_family(run.common.p.unwrap_or(1.5))?,
    };
    let grid = run.common.t_grid.clone().unwrap_or_else(default_grid);
    let rep = convexity_probe(&run.domain, &e0, &e1, &grid, &run.config.effective_containment())?;
    let points = grid.iter().map(|&t| geodesic_point(&e0, &e1, t)).collect::<Result<Vec<_>, _>>()?;
    #[derive(Serialize)]
    struct GeodesicOut<'a> {
        probe: &'a hermjohn::harness::ConvexityReport,
        points: Vec<Ellipsoid>,
    }
    let manifest = run.manifest("geodesic", &["geodesic.json", "margins.csv"]);
    run.write_json("geodesic.json", &manifest, &GeodesicOut { probe: &rep, points })?;
    run.write("margins.csv", &rep.to_csv())?;
    println!("min margin {:.3e}, log-volume defect {:.3e}", rep.min_margin, rep.log_volume_defect);
    Ok(if rep.min_margin >= -1e-6 { 0 } else { 1 })
}

fn cmd_contain(common: Common, ellipsoid: PathBuf) -> CliResult<u8> {
    let run = Run::new(common)?;
    let e = load_ellipsoid(&ellipsoid)?;
    let ccfg = run.config.effective_containment();
    let c = inscribed(&e, &run.domain, &ccfg)?;
    let contacts = contact_points(&e, &run.domain, &ccfg)?;
    #[derive(Serialize)]
    struct ContainOut<'a> {
        containment: &'a hermjohn::Containment,
        contacts: &'a hermjohn::ContactSet,
    }
    let manifest = run.manifest("contain", &["contain.json", "contacts.csv"]);
    run.write_json("contain.json", &manifest, &ContainOut { containment: &c, contacts: &contacts })?;
    run.write("contacts.csv", &contacts.to_csv())?;
    println!("contained: {} (margin {:.3e}), {} contact points", c.contained, c.margin, contacts.len());
    Ok(if c.contained { 0 } else { 1 })
}

fn cmd_repro(common: Common, names: Vec<String>, seeds: usize) -> CliResult<u8> {
    let fixtures = if names.is_empty() {
        Fixture::ALL.to_vec()
    } else {
        names.iter().map(|n| n.parse::<Fixture>()).collect::<Result<Vec<_>, _>>()?
    };
    let run = Run::new(common)?;
    let params = ReproParams {
        lambda: run.common.lambda.unwrap_or(ReproParams::default().lambda),
        p: run.common.p.unwrap_or(ReproParams::default().p),
        seeds,
    };
    let summaries = fixtures.iter().map(|&f| run_fixture(f, &params, &run.config)).collect::<Result<Vec<_>, _>>()?;
    let mut table = String::new();
    for s in &summaries {
        table.push_str(&s.table());
        table.push('\n');
    }
    print!("{table}");
    let manifest = run.manifest("repro", &["repro.json", "repro.txt"]);
    run.write_json("repro.json", &manifest, &summaries)?;
    run.write("repro.txt", &table)?;
    Ok(if summaries.iter().all(|s| s.passed) { 0 } else { 1 })
}

fn cmd_slice(
    common: Common,
    axes: Vec<usize>,
    ellipsoid: Option<PathBuf>,
    extent: Option<f64>,
    resolution: usize,
) -> CliResult<u8> {
    let run = Run::new(common)?;
    let &[a0, a1] = axes.as_slice() else {
        return Err(Failure::usage("--axes takes exactly two coordinates"));
    };
    let e = ellipsoid.as_deref().map(load_ellipsoid).transpose()?;
    let mut plane = SlicePlane::for_domain(&run.domain, [a0, a1]);
    if let Some(x) = extent {
        plane.extent = x;
    }
    plane.resolution = resolution;
    let s = slice(&run.domain, e.as_ref(), &plane)?;
    run.write("slice.csv", &s.to_csv())?;
    run.write("slice.svg", &s.to_svg())?;
    let manifest = run.manifest("slice", &["slice.json", "slice.csv", "slice.svg"]);
    run.write_json("slice.json", &manifest, &s.plane)?;
    println!("{} domain segments, {} ellipsoid segments", s.domain.len(), s.ellipsoid.len());
    Ok(0)
}

fn dispatch(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Solve { common, start } => cmd_solve(common, start),
        Command::Certify { common, ellipsoid, measure, fixture, threshold } => {
            cmd_certify(common, ellipsoid, measure, fixture, threshold)
        }
        Command::Geodesic { common, from, to } => cmd_geodesic(common, from, to),
        Command::Contain { common, ellipsoid } => cmd_contain(common, ellipsoid),
        Command::Repro { common, fixtures, seeds } => cmd_repro(common, fixtures, seeds),
        Command::Slice { common, axes, ellipsoid, extent, resolution } => {
            cmd_slice(common, axes, ellipsoid, extent, resolution)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
