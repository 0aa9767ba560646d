//! Real parts of polynomials in `(z, conj z)`.

use serde::{Deserialize, Serialize};

use crate::{CMatrix, C64};

/// `coef * z^z_exp * conj(z)^zbar_exp`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "crate::serde_complex::scalar")]
    pub coef: C64,
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
}

/// `rho(z) = Re sum_terms coef z^a conj(z)^b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub terms: Vec<Term>,
}

fn monomial(z: &[C64], a: &[u32], b: &[u32], skip_a: Option<usize>, skip_b: Option<usize>) -> C64 {
    let mut m = C64::new(1.0, 0.0);
    for k in 0..z.len() {
        let ea = a[k] - u32::from(skip_a == Some(k));
        let eb = b[k] - u32::from(skip_b == Some(k));
        if ea > 0 {
            m *= z[k].powu(ea);
        }
        if eb > 0 {
            m *= z[k].conj().powu(eb);
        }
    }
    m
}

impl Polynomial {
    pub fn validate(&self, n: usize) -> Result<(), String> {
        if self.terms.is_empty() {
            return Err("polynomial component has no terms".into());
        }
        for t in &self.terms {
            if t.z.len() != n || t.zbar.len() != n {
                return Err(format!("term exponent lists must have length {n}"));
            }
            if !t.coef.re.is_finite() || !t.coef.im.is_finite() {
                return Err("non-finite coefficient".into());
            }
        }
        Ok(())
    }

    pub fn value(&self, z: &[C64]) -> f64 {
        self.terms.iter().map(|t| (t.coef * monomial(z, &t.z, &t.zbar, None, None)).re).sum()
    }

    /// `d rho / d z_k = (dP/dz_k + d conj(P)/dz_k) / 2`.
    pub fn grad(&self, z: &[C64], out: &mut [C64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for t in &self.terms {
                if t.z[k] > 0 {
                    acc += t.coef * f64::from(t.z[k]) * monomial(z, &t.z, &t.zbar, Some(k), None);
                }
                if t.zbar[k] > 0 {
                    // conj(P) term is conj(c) conj(z)^a z^b
                    acc += t.coef.conj()
                        * f64::from(t.zbar[k])
                        * monomial(z, &t.zbar, &t.z, Some(k), None);
                }
            }
            *o = acc * 0.5;
        }
    }

    /// Matrix of `d^2 rho / dz_k d conj(z_l)`.
    pub fn levi(&self, z: &[C64]) -> CMatrix {
        let n = z.len();
        CMatrix::from_fn(n, n, |k, l| {
            let mut acc = C64::new(0.0, 0.0);
            for t in &self.terms {
                if t.z[k] > 0 && t.zbar[l] > 0 {
                    acc += t.coef
                        * f64::from(t.z[k] * t.zbar[l])
                        * monomial(z, &t.z, &t.zbar, Some(k), Some(l));
                }
                if t.zbar[k] > 0 && t.z[l] > 0 {
                    acc += t.coef.conj()
                        * f64::from(t.zbar[k] * t.z[l])
                        * monomial(z, &t.zbar, &t.z, Some(k), Some(l));
                }
            }
            acc * 0.5
        })
    }
}
