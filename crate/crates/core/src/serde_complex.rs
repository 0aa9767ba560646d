//! `[re, im]` pair encoding for complex scalars, vectors and matrices.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::C64;

pub fn to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn from_pair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

pub fn vec_to_pairs(v: &DVector<C64>) -> Vec<[f64; 2]> {
    v.iter().map(|z| to_pair(*z)).collect()
}

pub fn pairs_to_vec(p: &[[f64; 2]]) -> DVector<C64> {
    DVector::from_iterator(p.len(), p.iter().map(|&q| from_pair(q)))
}

pub fn mat_to_pairs(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| to_pair(m[(i, j)])).collect())
        .collect()
}

/// Rows must all have the same length; `None` otherwise.
pub fn pairs_to_mat(rows: &[Vec<[f64; 2]>]) -> Option<DMatrix<C64>> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != nc) {
        return None;
    }
    Some(DMatrix::from_fn(nr, nc, |i, j| from_pair(rows[i][j])))
}

pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        to_pair(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        <[f64; 2]>::deserialize(d).map(from_pair)
    }
}

pub mod vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &DVector<C64>, s: S) -> Result<S::Ok, S::Error> {
        vec_to_pairs(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DVector<C64>, D::Error> {
        Vec::<[f64; 2]>::deserialize(d).map(|p| pairs_to_vec(&p))
    }
}

pub mod vectors {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[DVector<C64>], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(vec_to_pairs).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<DVector<C64>>, D::Error> {
        Vec::<Vec<[f64; 2]>>::deserialize(d).map(|vs| vs.iter().map(|p| pairs_to_vec(p)).collect())
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &DMatrix<C64>, s: S) -> Result<S::Ok, S::Error> {
        mat_to_pairs(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<C64>, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        pairs_to_mat(&rows).ok_or_else(|| serde::de::Error::custom("ragged matrix rows"))
    }
}

pub mod option_vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<DVector<C64>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(vec_to_pairs).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<DVector<C64>>, D::Error> {
        Option::<Vec<[f64; 2]>>::deserialize(d).map(|p| p.map(|p| pairs_to_vec(&p)))
    }
}
