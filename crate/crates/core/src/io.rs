//! JSON interchange: matrices as `{"dim": n, "re": [[..]], "im": [[..]]}`
//! (row-major) and curves as JSON lines `{"t": .., "matrix": {..}}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, HermitianMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub t: f64,
    pub matrix: MatrixJson,
}

impl MatrixJson {
    pub fn from_complex(m: &CMatrix) -> Self {
        let rows = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dim: m.nrows(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn from_hermitian(h: &HermitianMatrix) -> Self {
        Self::from_complex(h.matrix())
    }

    fn part(&self, rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
        let n = self.dim;
        if rows.len() != n {
            return Err(Error::Format(format!("'{name}' has {} rows, expected {n}", rows.len())));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Format(format!("'{name}' row {i} has {} entries, expected {n}", r.len())));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Format(format!("'{name}' contains a non-finite entry")));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn to_complex(&self) -> Result<CMatrix> {
        if self.dim == 0 {
            return Err(Error::Format("dim must be >= 1".into()));
        }
        let re = self.part(&self.re, "re")?;
        let im = self.part(&self.im, "im")?;
        Ok(CMatrix::from_fn(self.dim, self.dim, |i, j| {
            num_complex::Complex64::new(re[(i, j)], im[(i, j)])
        }))
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.to_complex()?)
    }
}

pub fn parse_matrix(text: &str) -> Result<HermitianMatrix> {
    let json: MatrixJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    json.to_hermitian()
}

pub fn parse_complex_matrix(text: &str) -> Result<CMatrix> {
    let json: MatrixJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    json.to_complex()
}

pub fn matrix_to_json(h: &HermitianMatrix) -> String {
    serde_json::to_string(&MatrixJson::from_hermitian(h)).expect("finite matrix serializes")
}

/// One `(t, matrix)` sample per non-empty line.
pub fn parse_curve(text: &str) -> Result<Vec<(f64, HermitianMatrix)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let rec: CurveRecord =
                serde_json::from_str(l).map_err(|e| Error::Format(format!("line {}: {e}", i + 1)))?;
            let m = rec.matrix.to_hermitian().map_err(|e| match e {
                Error::Format(msg) => Error::Format(format!("line {}: {msg}", i + 1)),
                other => other,
            })?;
            Ok((rec.t, m))
        })
        .collect()
}

pub fn curve_to_jsonl(samples: &[(f64, HermitianMatrix)]) -> String {
    let mut out = String::new();
    for (t, m) in samples {
        let rec = CurveRecord {
            t: *t,
            matrix: MatrixJson::from_hermitian(m),
        };
        out.push_str(&serde_json::to_string(&rec).expect("finite matrix serializes"));
        out.push('\n');
    }
    out
}
