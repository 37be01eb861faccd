//! Serde helpers for the `[re, im]` complex encoding and row-major matrices.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{c, CMat, C64};

pub fn c64_to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn pair_to_c64(p: [f64; 2]) -> C64 {
    c(p[0], p[1])
}

pub fn matrix_to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| c64_to_pair(m[(i, j)])).collect()).collect()
}

/// Rows must all have the same length. An empty outer list is the 0×0 matrix.
pub fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMat, String> {
    let r = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != cols) {
        return Err("ragged matrix rows".into());
    }
    if rows.iter().flatten().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err("non-finite matrix entry".into());
    }
    Ok(CMat::from_fn(r, cols, |i, j| pair_to_c64(rows[i][j])))
}

pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        c64_to_pair(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let p = <[f64; 2]>::deserialize(d)?;
        if !p[0].is_finite() || !p[1].is_finite() {
            return Err(D::Error::custom("non-finite complex number"));
        }
        Ok(pair_to_c64(p))
    }
}

pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|&z| c64_to_pair(z)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        if raw.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(D::Error::custom("non-finite complex number"));
        }
        Ok(raw.into_iter().map(pair_to_c64).collect())
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        matrix_to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        rows_to_matrix(&rows).map_err(D::Error::custom)
    }
}

pub mod matrix_vec {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[CMat], s: S) -> Result<S::Ok, S::Error> {
        ms.iter().map(matrix_to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMat>, D::Error> {
        let raw = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
        raw.iter().map(|rows| rows_to_matrix(rows).map_err(D::Error::custom)).collect()
    }
}
