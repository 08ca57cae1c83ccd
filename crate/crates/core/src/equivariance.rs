//! Random elements of `U(n) x 1` and their action on tensors.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::structure::AcmStructure;
use crate::tensor::Tensor3;

/// An orthogonal map fixing `xi` and commuting with `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureIsometry {
    pub a: DMatrix<f64>,
}

impl StructureIsometry {
    pub fn identity(s: &AcmStructure) -> Self {
        Self {
            a: DMatrix::identity(s.dim(), s.dim()),
        }
    }

    /// `exp(generator)`; the generator should be skew, commute with `phi`
    /// and kill `xi`.
    pub fn from_generator(generator: &DMatrix<f64>) -> Self {
        Self { a: generator.exp() }
    }

    pub fn compose(&self, other: &StructureIsometry) -> Self {
        Self { a: &self.a * &other.a }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.a.transpose(),
        }
    }

    /// Largest violation of `a xi = xi`, `a phi = phi a` and `a^T g a = g`.
    pub fn invariant_residual(&self, s: &AcmStructure) -> f64 {
        let a = &self.a;
        let fixes_xi = (a * s.xi() - s.xi()).amax();
        let commutes = (a * s.phi() - s.phi() * a).amax();
        let isometric = (a.transpose() * s.g() * a - s.g()).amax();
        fixes_xi.max(commutes).max(isometric)
    }
}

/// Skew generator on the horizontal space that commutes with `phi`, drawn
/// from a seeded Gaussian.
pub fn random_generator(s: &AcmStructure, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = s.dim();
    let raw = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(&mut rng));
    let skew = (&raw - raw.transpose()) * 0.5;
    let h = s.h_matrix();
    let horizontal = &h * skew * &h;
    let phi = s.phi();
    (&horizontal - phi * &horizontal * phi) * 0.5
}

pub fn random_isometry(s: &AcmStructure, seed: u64) -> StructureIsometry {
    StructureIsometry::from_generator(&random_generator(s, seed))
}

/// `(a.F)(x, y, z) = F(a^-1 x, a^-1 y, a^-1 z)`.
pub fn act(a: &StructureIsometry, f: &Tensor3) -> Tensor3 {
    f.substitute_all(&a.inverse().a)
}
