//! Assigns tensors to the basic classes `W_1 ... W_12`.
//!
//! A verdict needs two independent signals to agree: the component norms
//! from the projections, and the defining conditions of each class checked
//! by direct substitution on basis triples.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::decomposition::{component_defined, spectrum, spectrum_unchecked, ComponentSpectrum, COMPONENT_COUNT};
use crate::error::{Error, Result};
use crate::geometry::{fundamental_f, ChartField, PointTensor, TAU_GEO};
use crate::structure::AcmStructure;
use crate::tensor::{traces, Tensor3};

pub const DEFAULT_TOL_ALGEBRAIC: f64 = 1e-6;
pub const DEFAULT_TOL_GEOMETRY: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelKind {
    Cosymplectic,
    Single,
    Sum,
    UnclassifiedN1Gap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Absolute threshold that norms and residuals were compared against.
    pub threshold: f64,
    /// Component norms; `null` when absent.
    pub norms: Vec<Option<f64>>,
    /// `residuals[i - 1]` is the defining-condition residual of `W_i`;
    /// `null` when absent.
    pub residuals: Vec<Option<f64>>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassLabel {
    pub kind: LabelKind,
    pub classes: Vec<usize>,
    pub tol: f64,
    pub diagnostics: Diagnostics,
}

/// Largest violation of the defining conditions of class `W_index`.
pub fn defining_residual(s: &AcmStructure, index: usize, f: &Tensor3) -> Result<f64> {
    if !(1..=COMPONENT_COUNT).contains(&index) {
        return Err(Error::IndexOutOfRange {
            index,
            max: COMPONENT_COUNT,
        });
    }
    if !component_defined(s.n(), index) {
        return Err(Error::DegenerateHorizontal { index });
    }
    if f.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            what: "tensor",
            expected: s.dim(),
            found: f.dim(),
        });
    }
    let n = s.n();
    let d = s.dim();
    let eta = s.eta();
    let g = s.g();
    let phi = s.phi();
    let tr = traces(s, f);
    let f_xi = tr.f.dot(s.xi());
    let f_star_xi = tr.f_star.dot(s.xi());
    // g(x, phi y)
    let fundamental = g * phi;
    // F(x, xi, z) and F(phi x, xi, phi z)
    let mixed = f.insert_second(s.xi());
    let mixed_twisted = phi.transpose() * &mixed * phi;

    let worst = |cond: &dyn Fn(usize, usize, usize) -> f64| {
        let mut acc: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    acc = acc.max(cond(i, j, k).abs());
                }
            }
        }
        acc
    };
    // F(x,y,z) - [eta(y) M(x,z) - eta(z) M(x,y)]
    let against_pair = |m: &DMatrix<f64>, sign: f64| {
        worst(&|i, j, k| f.get(i, j, k) - sign * (eta[j] * m[(i, k)] - eta[k] * m[(i, j)]))
    };
    // F(x,y,z) - [eta(y) F(z,xi,x) - eta(z) F(y,xi,x)]
    let against_swapped = |sign: f64| {
        worst(&|i, j, k| f.get(i, j, k) - sign * (eta[j] * mixed[(k, i)] - eta[k] * mixed[(j, i)]))
    };
    let horizontal_prefix = || f.insert_first(s.xi()).amax().max(f.insert_third(s.xi()).amax());

    Ok(match index {
        1 => worst(&|i, j, k| f.get(i, j, k) - eta[i] * (eta[j] * tr.omega[k] - eta[k] * tr.omega[j])),
        2 => {
            let c = f_xi / (2 * n) as f64;
            worst(&|i, j, k| f.get(i, j, k) - c * (eta[k] * g[(i, j)] - eta[j] * g[(i, k)]))
        }
        3 => {
            let c = -f_star_xi / (2 * n) as f64;
            worst(&|i, j, k| f.get(i, j, k) - c * (eta[k] * fundamental[(i, j)] - eta[j] * fundamental[(i, k)]))
        }
        4 => against_pair(&mixed_twisted, 1.0).max(against_swapped(1.0)).max(f_xi.abs()),
        5 => against_pair(&mixed_twisted, 1.0).max(against_swapped(-1.0)).max(f_star_xi.abs()),
        6 => against_pair(&mixed_twisted, -1.0).max(against_swapped(1.0)),
        7 => against_pair(&mixed_twisted, -1.0).max(against_swapped(-1.0)),
        8 => f
            .substitute_all(&s.h_matrix())
            .max_abs()
            .max(f.insert_third(s.xi()).amax()),
        9 => {
            let c = 1.0 / (2 * (n - 1)) as f64;
            let theta = &tr.f;
            let theta_phi = phi.transpose() * theta;
            // g(phi x, phi y)
            let gpp = phi.transpose() * g * phi;
            let w = &fundamental;
            horizontal_prefix().max(worst(&|i, j, k| {
                f.get(i, j, k)
                    - c * (gpp[(i, j)] * theta[k] - gpp[(i, k)] * theta[j] - w[(i, j)] * theta_phi[k]
                        + w[(i, k)] * theta_phi[j])
            }))
        }
        10 => {
            let pulled = f.substitute(0, phi).substitute(1, phi);
            horizontal_prefix()
                .max((&pulled - f).max_abs())
                .max(tr.f.amax())
        }
        11 => horizontal_prefix().max(worst(&|i, j, k| f.get(i, j, k) + f.get(j, i, k))),
        12 => horizontal_prefix().max(worst(&|i, j, k| f.get(i, j, k) + f.get(j, k, i) + f.get(k, i, j))),
        _ => unreachable!(),
    })
}

/// Residuals for all twelve classes; `None` where the class is absent.
pub fn defining_residuals(s: &AcmStructure, f: &Tensor3) -> Result<Vec<Option<f64>>> {
    (1..=COMPONENT_COUNT)
        .map(|i| {
            if component_defined(s.n(), i) {
                defining_residual(s, i, f).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect()
}

/// Verdict from component norms and defining residuals.
///
/// Norms and residuals are compared with `tol * max(1, |F|)`. A single
/// dominant component whose defining condition does not hold is reported
/// as a sum with a note, never silently accepted.
pub fn classify(spec: &ComponentSpectrum, residuals: &[Option<f64>], tol: f64) -> Result<ClassLabel> {
    if spec.norms.len() != COMPONENT_COUNT {
        return Err(Error::LengthMismatch {
            expected: COMPONENT_COUNT,
            found: spec.norms.len(),
        });
    }
    if residuals.len() != COMPONENT_COUNT {
        return Err(Error::LengthMismatch {
            expected: COMPONENT_COUNT,
            found: residuals.len(),
        });
    }
    let threshold = tol * spec.total_norm().max(1.0);
    let mut notes = Vec::new();
    let classes: Vec<usize> = spec
        .norms
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.filter(|&v| v > threshold).map(|_| i + 1))
        .collect();
    let absent: Vec<usize> = (1..=COMPONENT_COUNT).filter(|&i| spec.norms[i - 1].is_none()).collect();
    if !absent.is_empty() {
        notes.push(format!("components {absent:?} absent for n = {}", spec.n));
    }

    let kind = match classes.as_slice() {
        [] if spec.residual > threshold => {
            notes.push(format!(
                "defined components vanish but the tensor does not (residual {:.3e})",
                spec.residual
            ));
            LabelKind::UnclassifiedN1Gap
        }
        [] => LabelKind::Cosymplectic,
        [only] => match residuals[only - 1] {
            Some(r) if r <= threshold => LabelKind::Single,
            Some(r) => {
                notes.push(format!(
                    "W{only} projection dominant but defining condition residual {r:.3e} exceeds threshold"
                ));
                LabelKind::Sum
            }
            None => {
                notes.push(format!("W{only} has no defining condition at n = {}", spec.n));
                LabelKind::Sum
            }
        },
        _ => LabelKind::Sum,
    };

    Ok(ClassLabel {
        kind,
        classes,
        tol,
        diagnostics: Diagnostics {
            threshold,
            norms: spec.norms.clone(),
            residuals: residuals.to_vec(),
            notes,
        },
    })
}

/// Spectrum and verdict for an algebraic tensor in the constraint space.
pub fn classify_tensor(s: &AcmStructure, f: &Tensor3, tol: f64) -> Result<(ComponentSpectrum, ClassLabel)> {
    let spec = spectrum(s, f)?;
    let label = classify(&spec, &defining_residuals(s, f)?, tol)?;
    Ok((spec, label))
}

#[derive(Debug, Clone)]
pub struct PointClassification {
    pub point: PointTensor,
    pub spectrum: ComponentSpectrum,
    pub label: ClassLabel,
}

/// Extracts `F` at `p` and classifies it.
pub fn classify_point(chart: &ChartField, p: &[f64], step: f64, tol: f64) -> Result<PointClassification> {
    let point = fundamental_f(chart, p, step)?;
    if point.membership > TAU_GEO * point.tensor.norm().max(1.0) {
        return Err(Error::NotInSpace {
            residual: point.membership,
        });
    }
    let spectrum = spectrum_unchecked(&point.structure, &point.tensor, point.membership)?;
    let residuals = defining_residuals(&point.structure, &point.tensor)?;
    let label = classify(&spectrum, &residuals, tol)?;
    Ok(PointClassification { point, spectrum, label })
}
