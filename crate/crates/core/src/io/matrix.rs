//! Serde adapter for complex matrices stored as nested `[re, im]` arrays.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{c, C64, CMatrix};

pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    to_rows(m).serialize(s)
}

/// A matrix entry in a file: a plain real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn value(self) -> C64 {
        match self {
            Entry::Real(x) => c(x, 0.0),
            Entry::Complex([re, im]) => c(re, im),
        }
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
    let rows = Vec::<Vec<Entry>>::deserialize(d)?;
    from_entries(&rows).map_err(D::Error::custom)
}

pub fn from_entries(rows: &[Vec<Entry>]) -> Result<CMatrix, String> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err("matrix rows have unequal lengths".into());
    }
    Ok(CMatrix::from_fn(n, m, |i, j| rows[i][j].value()))
}

pub fn to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, String> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err("matrix rows have unequal lengths".into());
    }
    Ok(CMatrix::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub fn complex_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}
