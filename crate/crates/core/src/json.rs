//! JSON shapes: complex numbers are `[re, im]`, matrices are row-major arrays
//! of complex numbers, polynomials are coefficient arrays indexed by power.

use serde::{Deserialize, Serialize};

use crate::complex_poly::C64;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::matrix_jordan::{EigenBlocks, JordanSpec};

/// Row-major nested array form of a matrix.
pub type MatrixRows = Vec<Vec<C64>>;

pub fn matrix_to_rows(m: &CMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &MatrixRows) -> Result<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Argument("matrix must be square".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn matrix_from_str(s: &str) -> Result<CMatrix> {
    let rows: MatrixRows =
        serde_json::from_str(s).map_err(|e| Error::Argument(format!("matrix JSON: {e}")))?;
    matrix_from_rows(&rows)
}

pub fn matrix_to_string(m: &CMatrix) -> String {
    serde_json::to_string(&matrix_to_rows(m)).expect("matrix serializes")
}

/// Serialized form of a [`JordanSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecJson {
    pub eigs: Vec<EigenBlocks>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<MatrixRows>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<MatrixRows>,
}

impl SpecJson {
    pub fn into_spec(self) -> Result<JordanSpec> {
        let p = self.p.as_ref().map(matrix_from_rows).transpose()?;
        let b = self.b.as_ref().map(matrix_from_rows).transpose()?;
        JordanSpec::new(self.eigs, p, b)
    }

    pub fn from_spec(spec: &JordanSpec) -> Self {
        SpecJson {
            eigs: spec.eigs().to_vec(),
            p: Some(matrix_to_rows(spec.p())),
            b: (spec.n0() > 0).then(|| matrix_to_rows(spec.b())),
        }
    }
}

pub fn spec_from_str(s: &str) -> Result<JordanSpec> {
    let js: SpecJson =
        serde_json::from_str(s).map_err(|e| Error::Argument(format!("spec JSON: {e}")))?;
    js.into_spec()
}

pub fn spec_to_string(spec: &JordanSpec) -> String {
    serde_json::to_string(&SpecJson::from_spec(spec)).expect("spec serializes")
}
