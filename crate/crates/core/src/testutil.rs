pub use crate::random::*;

use crate::{CMatrix, C64};

pub fn real_diag(d: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(d.len(), d.len());
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = C64::new(x, 0.0);
    }
    m
}
