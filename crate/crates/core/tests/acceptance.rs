//! Acceptance criteria 1 to 9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use hermjohn::certificate::{centered_residual, check_trace_identity, translate_residuals, ContactMeasure};
use hermjohn::containment::{inscribed, max_rho_on_ellipsoid};
use hermjohn::domain::{psh_sample_check, SampleBox};
use hermjohn::harness::{convexity_probe, default_grid, random_inscribed, uniqueness_probe};
use hermjohn::hermitian::real_vec;
use hermjohn::random::{random_complex_matrix, random_complex_vector, random_hpd, random_unitary, rng};
use hermjohn::repro::{run_fixture, Fixture, ReproParams};
use hermjohn::solver::{solve, Mode, SolveConfig, Termination};
use hermjohn::{CMatrix, CVector, ContainmentConfig, Domain, Ellipsoid, HpdForm, C64};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn diag(d: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| C64::new(x, 0.0))))
}

/// `p^2/2 |x|^2 + p^-2/2 |y|^2 < 1`, built independently of the library fixtures.
fn e_p(p: f64) -> Ellipsoid {
    Ellipsoid::centered(HpdForm::from_matrix(diag(&[p * p / 2.0, 0.5 / (p * p)])).unwrap())
}

/// Volume of a centered ellipsoid in `C^2` from its diagonal, `pi^2 / 2 / (h1 h2)`.
fn volume_oracle_diag(h1: f64, h2: f64) -> f64 {
    PI * PI / 2.0 / (h1 * h2)
}

/// `sum_i mu_i z_i z_i^*` summed term by term.
fn moment(m: &ContactMeasure) -> CMatrix {
    let n = m.points[0].len();
    let mut acc = CMatrix::zeros(n, n);
    for (z, &w) in m.points.iter().zip(&m.weights) {
        for i in 0..n {
            for j in 0..n {
                acc[(i, j)] += z[i] * z[j].conj() * w;
            }
        }
    }
    acc
}

fn tight() -> SolveConfig {
    SolveConfig { contact_eps: 1e-8, ..SolveConfig::default() }
}

fn c1_hyperbola_family() -> Outcome {
    let d = e(Domain::hyperbola_box(1.0, 3.0))?;
    let cfg = ContainmentConfig::default();
    let target = 2.0 * PI * PI;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for p in [0.6, 1.0, 1.5] {
        let ell = e_p(p);
        let bm = e(max_rho_on_ellipsoid(&ell, &d, &cfg))?;
        ensure(bm.value.abs() <= 1e-6, || format!("p = {p}: max rho {:e}", bm.value))?;
        ensure(e(inscribed(&ell, &d, &cfg))?.contained, || format!("p = {p}: not inscribed"))?;
        let cert = ContactMeasure::new(vec![real_vec(&[1.0 / p, p]), real_vec(&[-1.0 / p, p])], vec![1.0, 1.0])
            .map_err(|x| x.to_string())?;
        let r = e(centered_residual(ell.form(), &cert))?;
        ensure(r <= 1e-10, || format!("p = {p}: residual {r:e}"))?;
        let oracle = volume_oracle_diag(p * p / 2.0, 0.5 / (p * p));
        ensure((oracle / target - 1.0).abs() <= 1e-12, || format!("oracle volume {oracle}"))?;
        let rel = (ell.volume() / target - 1.0).abs();
        ensure(rel <= 1e-9, || format!("p = {p}: volume relative error {rel:e}"))?;
        worst = (worst.0.max(bm.value.abs()), worst.1.max(r), worst.2.max(rel));
    }
    Ok(format!("max |margin| {:.1e}, max residual {:.1e}, max volume rel err {:.1e}", worst.0, worst.1, worst.2))
}

fn c2_non_uniqueness() -> Outcome {
    let d = e(Domain::hyperbola_box(1.0, 3.0))?;
    let u = e(uniqueness_probe(&d, 16, &SolveConfig::default()))?;
    let target = 2.0 * PI * PI;
    let worst = u.runs.iter().map(|r| (r.volume / target - 1.0).abs()).fold(0.0, f64::max);
    ensure(u.cluster_count >= 2, || format!("{} cluster(s)", u.cluster_count))?;
    ensure(worst <= 1e-3, || format!("volume rel err {worst:e}"))?;
    Ok(format!("{} clusters over 16 seeds, max volume rel err {worst:.1e}", u.cluster_count))
}

fn c3_uniqueness_evidence() -> Outcome {
    let ball = e(Domain::unit_ball(2))?;
    let ub = e(uniqueness_probe(&ball, 8, &tight()))?;
    ensure(ub.cluster_count == 1, || format!("ball: {} clusters", ub.cluster_count))?;
    let dist = (&ub.clusters[0].center - CMatrix::identity(2, 2)).norm();
    ensure(dist <= 1e-5, || format!("ball center off identity by {dist:e}"))?;
    let cas = e(Domain::cassini(1.2))?;
    let uc = e(uniqueness_probe(&cas, 8, &SolveConfig::default()))?;
    ensure(uc.cluster_count == 1, || format!("cassini(1.2): {} clusters", uc.cluster_count))?;
    Ok(format!("ball 1 cluster (center off Id by {dist:.1e}), cassini(1.2) 1 cluster"))
}

fn c4_geodesic_convexity() -> Outcome {
    let domains = [e(Domain::polydisc(&[1.0, 2.0]))?, e(Domain::hyperbola_box(1.0, 3.0))?, e(Domain::cassini(1.2))?];
    let cfg = ContainmentConfig::default();
    let grid = default_grid();
    let mut r = rng(0xacce);
    let (mut worst_margin, mut worst_defect) = (f64::INFINITY, 0.0f64);
    for k in 0..20 {
        let d = &domains[k % domains.len()];
        let a = e(random_inscribed(d, &mut r, &cfg, true))?;
        let b = e(random_inscribed(d, &mut r, &cfg, true))?;
        let rep = e(convexity_probe(d, &a, &b, &grid, &cfg))?;
        // the chord of log volume, evaluated independently
        let (la, lb) = (a.volume().ln(), b.volume().ln());
        for &t in &grid {
            let mid = e(hermjohn::hermitian::geodesic_point(&a, &b, t))?;
            let defect = (mid.volume().ln() - ((1.0 - t) * la + t * lb)).abs();
            worst_defect = worst_defect.max(defect);
        }
        worst_margin = worst_margin.min(rep.min_margin);
    }
    ensure(worst_margin >= -1e-6, || format!("min margin {worst_margin:e}"))?;
    ensure(worst_defect <= 1e-10, || format!("log-volume defect {worst_defect:e}"))?;
    Ok(format!("20 pairs, min margin {worst_margin:.1e}, max log-volume defect {worst_defect:.1e}"))
}

fn c5_certificate_equivalence() -> Outcome {
    let mut r = rng(0xce47);
    let mut worst_trace = 0.0f64;
    let mut mass_checked = 0;
    for k in 0..100 {
        let n = 1 + k % 3;
        let h = random_hpd(&mut r, n);
        let t = random_complex_matrix(&mut r, n);
        let m = if k % 2 == 0 {
            let size = r.random_range(1..8);
            let pts = (0..size).map(|_| random_complex_vector(&mut r, n)).collect();
            let w = (0..size).map(|_| r.random::<f64>() * 2.0).collect();
            ContactMeasure::new(pts, w).map_err(|x| x.to_string())?
        } else {
            // boundary points z = H^{-1/2} U e_j from two frames, weights s and 1 - s
            let root = h.inv_sqrt();
            let s: f64 = r.random_range(0.1..0.9);
            let mut pts = Vec::new();
            let mut w = Vec::new();
            for weight in [s, 1.0 - s] {
                let u = random_unitary(&mut r, n);
                for j in 0..n {
                    pts.push(root.as_matrix() * u.column(j));
                    w.push(weight);
                }
            }
            ContactMeasure::new(pts, w).map_err(|x| x.to_string())?
        };
        // left side summed point by point, right side from the moment matrix
        let lhs: f64 = m.points.iter().zip(&m.weights).map(|(z, &w)| w * h.eval(&(&t * z), z).re).sum();
        let rhs = (&t * moment(&m) * h.matrix()).trace().re;
        let direct = (lhs - rhs).abs();
        worst_trace = worst_trace.max(direct);
        ensure(direct <= 1e-12, || format!("triple {k}: trace gap {direct:e}"))?;
        // sum - tr T = tr(T (M - H^{-1}) H)
        let residual = e(centered_residual(&h, &m))?;
        let lib = e(check_trace_identity(&h, &m, &t))?;
        let bound = t.norm() * residual * h.matrix().norm() + 1e-12;
        ensure(lib <= bound, || format!("triple {k}: identity gap {lib:e} above {bound:e}"))?;
        if residual <= 1e-10 {
            mass_checked += 1;
            let dev = (m.mass() - n as f64).abs();
            ensure(dev <= 1e-8, || format!("triple {k}: mass deviation {dev:e}"))?;
        }
    }
    ensure(mass_checked >= 40, || format!("only {mass_checked} certified measures"))?;
    Ok(format!("100 triples, max trace gap {worst_trace:.1e}, mass law on {mass_checked} certified measures"))
}

fn c6_disc_union() -> Outcome {
    let d = e(Domain::disc_union())?;
    let unit = e(Ellipsoid::ball(CVector::zeros(1), 1.0))?;
    let m = ContactMeasure::new(
        vec![CVector::from_element(1, C64::new(0.0, 1.0)), CVector::from_element(1, C64::new(0.0, -1.0))],
        vec![0.5, 0.5],
    )
    .map_err(|x| x.to_string())?;
    let (vr, mr) = e(translate_residuals(unit.form(), unit.center(), &m))?;
    ensure(vr <= 1e-12 && mr <= 1e-12, || format!("residuals {vr:e}, {mr:e}"))?;
    ensure(e(inscribed(&unit, &d, &ContainmentConfig::default()))?.contained, || "unit disc not inscribed".into())?;
    let big = e(Ellipsoid::ball(real_vec(&[2.0]), 2.0))?;
    ensure((unit.volume() - PI).abs() <= 1e-12, || format!("unit disc volume {}", unit.volume()))?;
    ensure((big.volume() - 4.0 * PI).abs() <= 1e-12, || format!("D volume {}", big.volume()))?;
    let s = e(run_fixture(Fixture::DiscUnion, &ReproParams::default(), &SolveConfig::default()))?;
    ensure(s.passed, || format!("repro disc-union failed:\n{}", s.table()))?;
    ensure(s.notes.iter().any(|n| n.contains("necessary-only (translate mode)")), || "warning missing".into())?;
    Ok(format!("residuals {vr:.1e}/{mr:.1e}, area pi < 4pi, repro disc-union passes"))
}

fn c7_cassini_bound_chain() -> Outcome {
    let lambda: f64 = 1.0005;
    let d = e(Domain::cassini(lambda))?;
    let bound = PI * PI * (lambda * lambda - 1.0) * (2.0 * lambda + 1.0).powi(2) / 2.0;
    let ball_volume = PI * PI / 162.0;
    ensure((bound - 0.0445).abs() < 5e-4, || format!("bound {bound}"))?;
    ensure(bound < ball_volume, || format!("bound {bound} vs {ball_volume}"))?;
    let b = e(Ellipsoid::ball(real_vec(&[1.0, 0.0]), 1.0 / 3.0))?;
    let c = e(inscribed(&b, &d, &ContainmentConfig::default()))?;
    ensure(c.contained && c.margin > 0.0, || format!("ball margin {:e}", c.margin))?;
    let rep = e(solve(&d, &b, &SolveConfig { mode: Mode::Translate, ..SolveConfig::default() }))?;
    let lowest = rep.volume_trace.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(lowest >= ball_volume - 1e-6, || format!("volume dipped to {lowest:e}"))?;
    ensure(rep.volume >= ball_volume - 1e-6, || format!("final volume {:e}", rep.volume))?;
    Ok(format!(
        "bound {bound:.4} < {ball_volume:.4}, ball margin {:.1e}, translate volume {:.4} ({:?})",
        c.margin, rep.volume, rep.termination
    ))
}

fn c8_levi_ground_truth() -> Outcome {
    let d = e(Domain::cassini(1.2))?;
    let mut r = rng(0x1e71);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = random_complex_vector(&mut r, 2);
        let (x, y) = (z[0], z[1]);
        let (ax, ay) = (x.norm_sqr(), y.norm_sqr());
        let lev = e(d.levi_form(0, z.as_slice()))?;
        let want = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0 * (2.0 * ax + ay), 0.0),
                x.conj() * y * 2.0,
                x * y.conj() * 2.0,
                C64::new(2.0 * (ax + 2.0 * ay + 1.0), 0.0),
            ],
        );
        let g = e(d.wirtinger_grad(0, z.as_slice()))?;
        let gx = x.conj() * 2.0 * (ax + ay) - x * 2.0;
        let gy = y.conj() * 2.0 * (ax + ay + 1.0);
        let gap = (lev.as_matrix() - &want).norm().max((g[0] - gx).norm()).max((g[1] - gy).norm());
        worst = worst.max(gap);
    }
    ensure(worst <= 1e-10, || format!("closed-form gap {worst:e}"))?;
    let eig = e(d.levi_form(0, &[C64::new(0.0, 0.0); 2]))?.eigh().values;
    ensure(eig[0].abs() <= 1e-12 && (eig[1] - 2.0).abs() <= 1e-12, || format!("eigenvalues at 0: {eig:?}"))?;
    let psh = e(psh_sample_check(&d, &SampleBox::enclosing(&d), 4096, 0))?;
    ensure(psh.min_eigenvalue >= -1e-9, || format!("min Levi eigenvalue {:e}", psh.min_eigenvalue))?;
    Ok(format!("closed-form gap {worst:.1e}, eigenvalues at 0 {{0, 2}}, sampled min {:.1e}", psh.min_eigenvalue))
}

fn c9_solver_sanity() -> Outcome {
    let poly = e(Domain::polydisc(&[1.0, 2.0]))?;
    let start = e(Ellipsoid::ball(CVector::zeros(2), 0.5))?;
    let rp = e(solve(&poly, &start, &tight()))?;
    let dp = (rp.ellipsoid.form().matrix() - diag(&[1.0, 0.25])).norm();
    let ball = e(Domain::unit_ball(2))?;
    let rb = e(solve(&ball, &start, &tight()))?;
    let db = (rb.ellipsoid.form().matrix() - CMatrix::identity(2, 2)).norm();
    for (name, rep) in [("polydisc", &rp), ("ball", &rb)] {
        ensure(rep.termination == Termination::LpOptimal, || format!("{name}: {:?}", rep.termination))?;
        let res = rep.certificate.report.matrix_residual;
        ensure(res <= 1e-4, || format!("{name}: certificate residual {res:e}"))?;
    }
    ensure(dp <= 1e-5, || format!("polydisc H off diag(1, 1/4) by {dp:e}"))?;
    ensure(db <= 1e-6, || format!("ball H off Id by {db:e}"))?;
    Ok(format!("polydisc off by {dp:.1e}, ball off by {db:.1e}, both lp_optimal"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 hyperbola-box family and 2-point certificates", c1_hyperbola_family),
        ("2 non-uniqueness in the hyperbola box", c2_non_uniqueness),
        ("3 uniqueness on ball and cassini(1.2)", c3_uniqueness_evidence),
        ("4 geodesic convexity of inscribed sets", c4_geodesic_convexity),
        ("5 trace identity and mass law", c5_certificate_equivalence),
        ("6 disc-union: certificate without maximality", c6_disc_union),
        ("7 cassini(1.0005) centered bound vs translated ball", c7_cassini_bound_chain),
        ("8 cassini Levi form", c8_levi_ground_truth),
        ("9 solver on polydisc and ball", c9_solver_sanity),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
