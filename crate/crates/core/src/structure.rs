//! Almost contact metric structures `(phi, xi, eta, g)` on `R^(2n+1)`.
//!
//! Matrices act on column vectors: `phi[(r, c)]` is the `r`-th component of
//! `phi(e_c)`. The algebraic modules assume a `g`-orthonormal basis; use
//! [`AcmStructure::to_orthonormal_frame`] to move arbitrary input there.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::ConstraintBasis;

/// Absolute tolerance for pure-algebra residuals.
pub const TAU_ALG: f64 = 1e-9;

pub const AXIOM_PHI_SQUARED: &str = "phi^2=-I+xi(x)eta";
pub const AXIOM_PHI_XI: &str = "phi(xi)=0";
pub const AXIOM_ETA_PHI: &str = "eta(phi)=0";
pub const AXIOM_XI_UNIT: &str = "g(xi,xi)=1";
pub const AXIOM_COMPATIBLE: &str = "g(phi x,phi y)=g(x,y)-eta(x)eta(y)";
pub const AXIOM_DUALITY: &str = "eta=g(.,xi)";
pub const AXIOM_METRIC: &str = "g symmetric positive definite";

#[derive(Debug, Clone)]
pub struct AcmStructure {
    n: usize,
    phi: DMatrix<f64>,
    xi: DVector<f64>,
    eta: DVector<f64>,
    g: DMatrix<f64>,
    constraint: OnceLock<Arc<ConstraintBasis>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub max_residual: f64,
    pub violated_axioms: Vec<String>,
}

impl AcmStructure {
    /// The canonical structure: `phi e_{2i-1} = e_{2i}`, `phi e_{2i} = -e_{2i-1}`,
    /// `xi = e_{2n+1}`, `g = I`.
    pub fn standard(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let dim = 2 * n + 1;
        let mut phi = DMatrix::zeros(dim, dim);
        for i in 0..n {
            phi[(2 * i + 1, 2 * i)] = 1.0;
            phi[(2 * i, 2 * i + 1)] = -1.0;
        }
        let mut xi = DVector::zeros(dim);
        xi[dim - 1] = 1.0;
        Ok(Self::assemble(n, phi, xi.clone(), xi, DMatrix::identity(dim, dim)))
    }

    /// Builds a structure from raw parts. Only shapes are checked; call
    /// [`validate`](Self::validate) for the axioms.
    pub fn from_parts(
        n: usize,
        phi: DMatrix<f64>,
        xi: DVector<f64>,
        eta: DVector<f64>,
        g: DMatrix<f64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let dim = 2 * n + 1;
        let check = |what, found: usize| {
            if found == dim {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { what, expected: dim, found })
            }
        };
        check("phi rows", phi.nrows())?;
        check("phi columns", phi.ncols())?;
        check("xi", xi.len())?;
        check("eta", eta.len())?;
        check("g rows", g.nrows())?;
        check("g columns", g.ncols())?;
        Ok(Self::assemble(n, phi, xi, eta, g))
    }

    fn assemble(n: usize, phi: DMatrix<f64>, xi: DVector<f64>, eta: DVector<f64>, g: DMatrix<f64>) -> Self {
        Self {
            n,
            phi,
            xi,
            eta,
            g,
            constraint: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn xi(&self) -> &DVector<f64> {
        &self.xi
    }

    pub fn eta(&self) -> &DVector<f64> {
        &self.eta
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Matrix of `h = -phi^2`.
    pub fn h_matrix(&self) -> DMatrix<f64> {
        -(&self.phi * &self.phi)
    }

    /// `h(x) = -phi^2 x`.
    pub fn h_map(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "vector",
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(-(&self.phi * (&self.phi * x)))
    }

    pub(crate) fn constraint_basis(&self) -> Arc<ConstraintBasis> {
        self.constraint
            .get_or_init(|| Arc::new(ConstraintBasis::new(self)))
            .clone()
    }

    /// Checks every axiom on all basis vectors and pairs.
    pub fn validate(&self) -> ValidationReport {
        self.validate_with(TAU_ALG)
    }

    pub fn validate_with(&self, tol: f64) -> ValidationReport {
        let dim = self.dim();
        let eye = DMatrix::<f64>::identity(dim, dim);
        let outer = &self.xi * self.eta.transpose();
        let eta_outer = &self.eta * self.eta.transpose();

        let mut families: Vec<(&str, f64)> = vec![
            (AXIOM_PHI_SQUARED, max_abs(&(&self.phi * &self.phi + &eye - &outer))),
            (AXIOM_PHI_XI, (&self.phi * &self.xi).amax()),
            (AXIOM_ETA_PHI, (self.eta.transpose() * &self.phi).amax()),
            (AXIOM_XI_UNIT, ((self.xi.transpose() * &self.g * &self.xi)[(0, 0)] - 1.0).abs()),
            (
                AXIOM_COMPATIBLE,
                max_abs(&(self.phi.transpose() * &self.g * &self.phi - &self.g + &eta_outer)),
            ),
            (AXIOM_DUALITY, (&self.eta - &self.g * &self.xi).amax()),
        ];
        let asym = max_abs(&(&self.g - self.g.transpose()));
        let sym = (&self.g + self.g.transpose()) * 0.5;
        let min_eig = sym.symmetric_eigenvalues().min();
        // A metric that is not positive definite has no finite residual.
        let metric_residual = if min_eig > 0.0 { asym } else { f64::INFINITY };
        families.push((AXIOM_METRIC, metric_residual));

        let max_residual = families.iter().map(|&(_, r)| r).fold(0.0, f64::max);
        let violated_axioms: Vec<String> = families
            .iter()
            .filter(|&&(_, r)| r > tol || r.is_nan())
            .map(|&(name, _)| name.to_string())
            .collect();
        ValidationReport {
            ok: violated_axioms.is_empty(),
            max_residual,
            violated_axioms,
        }
    }

    /// Re-expresses the structure in the basis whose vectors are the columns
    /// of `basis` (coordinates w.r.t. the current basis).
    pub fn in_basis(&self, basis: &DMatrix<f64>) -> Result<Self> {
        let dim = self.dim();
        if basis.nrows() != dim || basis.ncols() != dim {
            return Err(Error::DimensionMismatch {
                what: "basis",
                expected: dim,
                found: basis.nrows().max(basis.ncols()),
            });
        }
        let inv = basis.clone().try_inverse().ok_or(Error::SingularMetric)?;
        Ok(Self::assemble(
            self.n,
            &inv * &self.phi * basis,
            &inv * &self.xi,
            basis.transpose() * &self.eta,
            basis.transpose() * &self.g * basis,
        ))
    }

    /// Gram–Schmidt under `g` over the coordinate vectors taken in `order`,
    /// with `xi` processed first and pinned to the last column.
    pub fn orthonormal_frame(&self, order: &[usize]) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        let inner = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * &self.g * b)[(0, 0)];
        let xi_norm = inner(&self.xi, &self.xi);
        if xi_norm.is_nan() || xi_norm <= 0.0 {
            return Err(Error::SingularMetric);
        }
        let xi_unit = &self.xi / xi_norm.sqrt();
        let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(dim);
        let mut frame = DMatrix::zeros(dim, dim);
        frame.set_column(dim - 1, &xi_unit);
        let mut reference = vec![xi_unit];
        for &c in order {
            if accepted.len() == dim - 1 {
                break;
            }
            if c >= dim {
                return Err(Error::IndexOutOfRange { index: c, max: dim - 1 });
            }
            let mut v = DVector::zeros(dim);
            v[c] = 1.0;
            let scale = inner(&v, &v).sqrt();
            for u in &reference {
                let proj = inner(&v, u);
                v -= u * proj;
            }
            let norm = inner(&v, &v).max(0.0).sqrt();
            if norm > 1e-6 * scale {
                let u = v / norm;
                reference.push(u.clone());
                accepted.push(u);
            }
        }
        if accepted.len() != dim - 1 {
            return Err(Error::SingularMetric);
        }
        for (c, u) in accepted.iter().enumerate() {
            frame.set_column(c, u);
        }
        Ok(frame)
    }

    /// Moves to a `g`-orthonormal frame with `xi` last. Returns the new
    /// structure and the frame (columns in the old coordinates).
    pub fn to_orthonormal_frame(&self) -> Result<(Self, DMatrix<f64>)> {
        let order: Vec<usize> = (0..self.dim()).collect();
        let frame = self.orthonormal_frame(&order)?;
        Ok((self.in_basis(&frame)?, frame))
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| if v.is_nan() { f64::NAN } else { acc.max(v.abs()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_n1_phi_matrix() {
        let s = AcmStructure::standard(1).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.phi(), &expected);
        assert_eq!(s.dim(), 3);
    }

    #[test]
    fn standard_rejects_zero() {
        assert!(matches!(AcmStructure::standard(0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn standard_validates() {
        for n in 1..=4 {
            let report = AcmStructure::standard(n).unwrap().validate();
            assert!(report.ok, "{report:?}");
            assert!(report.max_residual <= 1e-12);
        }
    }

    #[test]
    fn phi_squared_identity_n2() {
        let s = AcmStructure::standard(2).unwrap();
        let lhs = s.phi() * s.phi();
        let rhs = -DMatrix::<f64>::identity(5, 5) + s.xi() * s.eta().transpose();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn xi_not_unit_is_reported() {
        let s = AcmStructure::standard(2).unwrap();
        let mut g = s.g().clone();
        g[(4, 4)] = 2.0;
        let bad = AcmStructure::from_parts(2, s.phi().clone(), s.xi().clone(), s.eta().clone(), g).unwrap();
        let report = bad.validate();
        assert!(!report.ok);
        assert!(report.violated_axioms.iter().any(|a| a == AXIOM_XI_UNIT));
    }

    #[test]
    fn negated_plane_still_valid() {
        let s = AcmStructure::standard(2).unwrap();
        let mut phi = s.phi().clone();
        phi[(1, 0)] = -1.0;
        phi[(0, 1)] = 1.0;
        let flipped = AcmStructure::from_parts(2, phi, s.xi().clone(), s.eta().clone(), s.g().clone()).unwrap();
        assert!(flipped.validate().ok);
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let s = AcmStructure::standard(1).unwrap();
        let r = AcmStructure::from_parts(1, s.phi().clone(), DVector::zeros(4), s.eta().clone(), s.g().clone());
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
        assert!(s.h_map(&DVector::zeros(5)).is_err());
    }

    #[test]
    fn h_map_examples() {
        let s = AcmStructure::standard(1).unwrap();
        let xi = s.xi().clone();
        assert_eq!(s.h_map(&xi).unwrap(), DVector::zeros(3));
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert_eq!(s.h_map(&e1).unwrap(), e1);
        assert_eq!(s.h_map(&(&e1 + &xi)).unwrap(), e1);
    }

    #[test]
    fn h_is_symmetric_projection_of_rank_2n() {
        for n in 1..=3 {
            let s = AcmStructure::standard(n).unwrap();
            let h = s.h_matrix();
            assert!(max_abs(&(&h * &h - &h)) < 1e-14);
            assert!(max_abs(&(s.g() * &h - h.transpose() * s.g())) < 1e-14);
            assert_eq!(h.rank(1e-10), 2 * n);
            assert!((&h * s.xi()).amax() < 1e-14);
            assert!(max_abs(&(s.phi() * &h - s.phi())) < 1e-14);
            assert!(max_abs(&(&h * s.phi() - s.phi())) < 1e-14);
        }
    }

    #[test]
    fn orthonormalizes_skewed_basis() {
        let s = AcmStructure::standard(2).unwrap();
        let p = DMatrix::from_fn(5, 5, |r, c| if r == c { 2.0 } else { 0.3 * (r as f64 - c as f64) });
        let skewed = s.in_basis(&p).unwrap();
        assert!(skewed.validate().ok);
        let (back, _) = skewed.to_orthonormal_frame().unwrap();
        assert!(back.validate().ok);
        assert!(max_abs(&(back.g() - DMatrix::identity(5, 5))) < 1e-12);
        assert!((back.xi()[4] - 1.0).abs() < 1e-12);
    }
}
