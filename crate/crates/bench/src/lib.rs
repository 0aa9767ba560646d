//! Fixed inputs shared by the benchmarks.

use hermjohn::random::{random_hpd, rng};
use hermjohn::{Domain, Ellipsoid, HpdForm};

/// Seeded positive definite form of dimension `n`.
pub fn form(n: usize, seed: u64) -> HpdForm {
    random_hpd(&mut rng(seed), n)
}

/// Ellipsoid `E_p` inside the hyperbola box with `p = 1.5`.
pub fn touching_pair() -> (Ellipsoid, Domain) {
    let p: f64 = 1.5;
    let h = HpdForm::from_real_diagonal(&[p * p / 2.0, 1.0 / (2.0 * p * p)]).expect("positive diagonal");
    (Ellipsoid::centered(h), Domain::hyperbola_box(1.0, 2.0).expect("valid bounds"))
}
