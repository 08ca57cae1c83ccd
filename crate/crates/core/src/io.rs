//! JSON encodings of structures and tensors.
//!
//! Matrices are arrays of rows; `phi[r][c]` is the `r`-th component of
//! `phi e_c`. Tensor values are nested as `values[i][j][k] = F(e_i, e_j, e_k)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::AcmStructure;
use crate::tensor::Tensor3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureJson {
    pub n: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub n: i64,
    pub values: Vec<Vec<Vec<f64>>>,
}

fn half_dimension(n: i64) -> Result<usize> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    Ok(n as usize)
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, found })
    }
}

fn matrix(what: &'static str, d: usize, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    check_len(what, d, rows.len())?;
    for row in rows {
        check_len(what, d, row.len())?;
    }
    Ok(DMatrix::from_fn(d, d, |r, c| rows[r][c]))
}

fn vector(what: &'static str, d: usize, v: &[f64]) -> Result<DVector<f64>> {
    check_len(what, d, v.len())?;
    Ok(DVector::from_column_slice(v))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl StructureJson {
    /// Fills omitted fields from the standard structure. Axioms are not
    /// checked here.
    pub fn to_structure(&self) -> Result<AcmStructure> {
        let n = half_dimension(self.n)?;
        let base = AcmStructure::standard(n)?;
        let d = base.dim();
        let phi = match &self.phi {
            Some(m) => matrix("phi", d, m)?,
            None => base.phi().clone(),
        };
        let xi = match &self.xi {
            Some(v) => vector("xi", d, v)?,
            None => base.xi().clone(),
        };
        let eta = match &self.eta {
            Some(v) => vector("eta", d, v)?,
            None => base.eta().clone(),
        };
        let g = match &self.g {
            Some(m) => matrix("g", d, m)?,
            None => base.g().clone(),
        };
        AcmStructure::from_parts(n, phi, xi, eta, g)
    }

    pub fn from_structure(s: &AcmStructure) -> Self {
        Self {
            n: s.n() as i64,
            phi: Some(rows(s.phi())),
            xi: Some(s.xi().iter().copied().collect()),
            eta: Some(s.eta().iter().copied().collect()),
            g: Some(rows(s.g())),
        }
    }
}

impl TensorJson {
    pub fn to_tensor(&self) -> Result<Tensor3> {
        let n = half_dimension(self.n)?;
        let d = 2 * n + 1;
        check_len("values", d, self.values.len())?;
        let mut flat = Vec::with_capacity(d * d * d);
        for plane in &self.values {
            check_len("values", d, plane.len())?;
            for row in plane {
                check_len("values", d, row.len())?;
                flat.extend_from_slice(row);
            }
        }
        Tensor3::from_vec(n, flat)
    }

    pub fn from_tensor(t: &Tensor3) -> Self {
        let d = t.dim();
        let values = (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|k| t.get(i, j, k)).collect()).collect())
            .collect();
        Self { n: t.n() as i64, values }
    }
}

pub fn parse_structure(text: &str) -> Result<AcmStructure> {
    serde_json::from_str::<StructureJson>(text)?.to_structure()
}

pub fn parse_tensor(text: &str) -> Result<Tensor3> {
    serde_json::from_str::<TensorJson>(text)?.to_tensor()
}

pub fn tensor_to_string(t: &Tensor3) -> Result<String> {
    Ok(serde_json::to_string(&TensorJson::from_tensor(t))?)
}

pub fn structure_to_string(s: &AcmStructure) -> Result<String> {
    Ok(serde_json::to_string(&StructureJson::from_structure(s))?)
}
