use hermjohn::certificate::{
    centered_residual, check_trace_identity, fit_centered, prune_support, ContactMeasure,
};
use hermjohn::containment::{contact_points, inscribed, max_rho_on_ellipsoid};
use hermjohn::hermitian::{geodesic_point, transport_operator, GeodesicSpec};
use hermjohn::solver::{solve, SolveConfig};
use hermjohn::{CMatrix, CVector, ContainmentConfig, Domain, Ellipsoid, HpdForm, C64};
use proptest::prelude::*;

fn complex_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| CMatrix::from_iterator(n, n, v.into_iter().map(|(re, im)| C64::new(re, im))))
}

fn complex_vector(n: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_map(move |v| CVector::from_iterator(n, v.into_iter().map(|(re, im)| C64::new(re, im))))
}

/// `B B* + 0.2 Id`: condition number stays moderate.
fn hpd(n: usize) -> impl Strategy<Value = HpdForm> {
    complex_matrix(n).prop_map(move |b| {
        let m = &b * b.adjoint() + CMatrix::identity(n, n) * C64::new(0.2, 0.0);
        HpdForm::from_matrix((&m + m.adjoint()) * C64::new(0.5, 0.0)).unwrap()
    })
}

fn pair(n: usize) -> impl Strategy<Value = (Ellipsoid, Ellipsoid)> {
    (hpd(n), hpd(n)).prop_map(|(a, b)| (Ellipsoid::centered(a), Ellipsoid::centered(b)))
}

fn measure(n: usize) -> impl Strategy<Value = ContactMeasure> {
    (1usize..10).prop_flat_map(move |k| {
        (prop::collection::vec(complex_vector(n), k), prop::collection::vec(0.0f64..2.0, k))
            .prop_map(|(p, w)| ContactMeasure::new(p, w).unwrap())
    })
}

fn dim() -> impl Strategy<Value = usize> {
    1usize..=3
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transport_is_self_adjoint_for_every_interpolant((e0, e1) in dim().prop_flat_map(pair), t in prop::sample::select(vec![0.0, 0.25, 0.5, 0.75, 1.0])) {
        let a = transport_operator(&e0, &e1).unwrap();
        let ht = geodesic_point(&e0, &e1, t).unwrap();
        let lhs = ht.form().matrix() * &a;
        let rhs = a.adjoint() * ht.form().matrix();
        prop_assert!(rel(&lhs, &rhs) <= 1e-9, "gap {}", rel(&lhs, &rhs));
    }

    #[test]
    fn geodesic_is_symmetric((e0, e1) in dim().prop_flat_map(pair), t in 0.0f64..=1.0) {
        let a = geodesic_point(&e0, &e1, t).unwrap();
        let b = geodesic_point(&e1, &e0, 1.0 - t).unwrap();
        prop_assert!(rel(a.form().matrix(), b.form().matrix()) <= 1e-10);
    }

    #[test]
    fn log_volume_is_affine((e0, e1) in dim().prop_flat_map(pair), t in 0.0f64..=1.0) {
        let mid = geodesic_point(&e0, &e1, t).unwrap();
        let chord = (1.0 - t) * e0.log_volume() + t * e1.log_volume();
        prop_assert!((mid.log_volume() - chord).abs() <= 1e-10);
    }

    #[test]
    fn transport_to_interpolant_is_a_power((e0, e1) in dim().prop_flat_map(pair), t in 0.05f64..=1.0) {
        let spec = GeodesicSpec::new(e0.clone(), e1.clone()).unwrap();
        let et = spec.point(t).unwrap();
        let direct = transport_operator(&e0, &et).unwrap();
        let power = spec.transport_power(t).unwrap();
        prop_assert!(rel(&direct, &power) <= 1e-8, "gap {}", rel(&direct, &power));
    }

    #[test]
    fn trace_identity_matches_moment_form((h, m, t) in dim().prop_flat_map(|n| (hpd(n), measure(n), complex_matrix(n)))) {
        let direct: f64 = m.points.iter().zip(&m.weights).map(|(z, &w)| w * h.eval(&(&t * z), z).re).sum();
        let mom = m.points.iter().zip(&m.weights).fold(CMatrix::zeros(h.dim(), h.dim()), |acc, (z, &w)| acc + z * z.adjoint() * C64::new(w, 0.0));
        let via_matrix = (&t * mom * h.matrix()).trace().re;
        prop_assert!((direct - via_matrix).abs() <= 1e-12 * (1.0 + direct.abs()));
        let gap = check_trace_identity(&h, &m, &t).unwrap();
        let res = centered_residual(&h, &m).unwrap();
        prop_assert!(gap <= t.norm() * res * h.matrix().norm() + 1e-12);
    }

    #[test]
    fn mass_law_on_fitted_measures(h in dim().prop_flat_map(hpd), frames in prop::collection::vec(complex_matrix(3), 2..4)) {
        // points on the boundary of E_H spanning every direction
        let n = h.dim();
        let root = h.inv_sqrt();
        let points: Vec<CVector> = frames
            .iter()
            .flat_map(|f| (0..n).map(move |j| f.view((0, 0), (n, n)).column(j).into_owned()))
            .filter(|z| z.norm() > 1e-3)
            .map(|z| root.as_matrix() * (&z / C64::new(z.norm(), 0.0)))
            .chain((0..n).map(|j| root.as_matrix().column(j).into_owned()))
            .collect();
        let (m, _) = fit_centered(&h, &points, &[]).unwrap();
        let delta = centered_residual(&h, &m).unwrap();
        prop_assert!((m.mass() - n as f64).abs() <= n as f64 * delta * h.matrix().norm() + 1e-12);
    }

    #[test]
    fn pruning_preserves_residual(h in dim().prop_flat_map(hpd), m0 in dim().prop_flat_map(measure)) {
        prop_assume!(m0.points[0].len() == h.dim());
        let before = centered_residual(&h, &m0).unwrap();
        let m = prune_support(&m0);
        let after = centered_residual(&h, &m).unwrap();
        prop_assert!(m.len() <= m0.len());
        prop_assert!((after - before).abs() <= 1e-9 * (1.0 + before));
    }

    #[test]
    fn hpd_json_roundtrip(h in dim().prop_flat_map(hpd)) {
        let e = Ellipsoid::centered(h);
        let back: Ellipsoid = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        prop_assert_eq!(back, e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hyperbola_box_containment_matches_closed_form(la in -3.0f64..1.0, lb in -3.0f64..1.0) {
        let (a, b) = (la.exp(), lb.exp());
        let d = Domain::hyperbola_box(1.0, 3.0).unwrap();
        // max of |x||y| on a|x|^2 + b|y|^2 = 1 is 1/(2 sqrt(ab)); the box needs a, b >= 1/9
        let product = 1.0 / (2.0 * (a * b).sqrt());
        let slack = (1.0 - product).min(a.sqrt() * 3.0 - 1.0).min(b.sqrt() * 3.0 - 1.0);
        prop_assume!(slack.abs() > 1e-3);
        let e = Ellipsoid::centered(HpdForm::from_real_diagonal(&[a, b]).unwrap());
        let got = inscribed(&e, &d, &ContainmentConfig::default()).unwrap().contained;
        prop_assert_eq!(got, slack > 0.0);
    }

    #[test]
    fn contacts_lie_on_the_boundary(h in Just(2usize).prop_flat_map(hpd), seed in 0u64..1000) {
        let d = Domain::polydisc(&[1.0, 2.0]).unwrap();
        let e = Ellipsoid::centered(h);
        let top = max_rho_on_ellipsoid(&e, &d, &ContainmentConfig::default()).unwrap().value;
        prop_assume!(top.is_finite());
        let cfg = ContainmentConfig { seed, contact_eps: 0.5, ..ContainmentConfig::default() };
        let cs = contact_points(&e, &d, &cfg).unwrap();
        for z in &cs.points {
            prop_assert!((e.form().quad(z) - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn refining_samples_never_lowers_the_max(h in Just(2usize).prop_flat_map(hpd), seed in 0u64..1000) {
        let d = Domain::cassini(1.2).unwrap();
        let e = Ellipsoid::centered(h);
        let coarse = ContainmentConfig { seed, sphere_samples: 256, ..ContainmentConfig::default() };
        let fine = ContainmentConfig { sphere_samples: 2048, ..coarse.clone() };
        let a = max_rho_on_ellipsoid(&e, &d, &coarse).unwrap().value;
        let b = max_rho_on_ellipsoid(&e, &d, &fine).unwrap().value;
        prop_assert!(b >= a - 1e-12 * (1.0 + a.abs()), "{a} then {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn volume_trace_is_nondecreasing(d1 in 0.1f64..0.6, d2 in 0.1f64..0.6, seed in 0u64..100) {
        let d = Domain::polydisc(&[1.0, 2.0]).unwrap();
        let e0 = Ellipsoid::centered(HpdForm::from_real_diagonal(&[1.0 / (d1 * d1), 1.0 / (d2 * d2)]).unwrap());
        let rep = solve(&d, &e0, &SolveConfig { seed, max_iters: 30, ..SolveConfig::default() }).unwrap();
        prop_assert!(rep.volume_trace.windows(2).all(|w| w[1] >= w[0]));
    }
}
