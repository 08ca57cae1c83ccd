//! Orthogonal splitting of the constraint space into twelve invariant
//! components, the involutions `L_1 ... L_7` that produce it, and a
//! sampling oracle that rebuilds each component independently.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{associated_form, h_form};
use crate::structure::{AcmStructure, TAU_ALG};
use crate::tensor::{column_space, inner_product, membership_residual, random_element, traces, Tensor3, RANK_CUTOFF};

pub const COMPONENT_COUNT: usize = 12;
pub const INVOLUTION_COUNT: usize = 7;

/// Number of trailing seeds that must not raise the rank before the oracle
/// accepts a basis.
pub const STABILITY_WINDOW: usize = 5;

/// Components 9 and 10 need a horizontal space of complex dimension >= 2.
pub fn component_defined(n: usize, index: usize) -> bool {
    (1..=COMPONENT_COUNT).contains(&index) && !(n == 1 && (index == 9 || index == 10))
}

fn check_index(index: usize, max: usize) -> Result<()> {
    if (1..=max).contains(&index) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, max })
    }
}

/// All twelve projections at once; `None` marks a component that does not
/// exist for this `n`.
pub fn components(s: &AcmStructure, f: &Tensor3) -> Result<Vec<Option<Tensor3>>> {
    let mut forms = Vec::with_capacity(13);
    forms.push(Tensor3::zeros(s.n()));
    for i in 1..=8 {
        forms.push(associated_form(s, i, f)?);
    }
    let quarter = |signs: [f64; 4], extra: &Tensor3| {
        let mut acc = &forms[2] * signs[0];
        acc += &(&forms[4] * signs[1]);
        acc += &(&forms[5] * signs[2]);
        acc += &(&forms[6] * signs[3]);
        acc = &acc - extra;
        &(&acc - &forms[3]) * 0.25
    };
    let zero = Tensor3::zeros(s.n());
    let mut out = vec![
        Some(forms[3].clone()),
        Some(forms[7].clone()),
        Some(forms[8].clone()),
        Some(quarter([1.0, 1.0, 1.0, 1.0], &(&forms[7] * 4.0))),
        Some(quarter([1.0, 1.0, -1.0, -1.0], &(&forms[8] * 4.0))),
        Some(quarter([1.0, -1.0, 1.0, -1.0], &zero)),
        Some(quarter([1.0, -1.0, -1.0, 1.0], &zero)),
        Some(&forms[1] - &forms[3]),
    ];
    if s.n() >= 2 {
        let f9 = associated_form(s, 9, f)?;
        let f10 = associated_form(s, 10, f)?;
        out.push(Some(f9.clone()));
        out.push(Some(&f10 - &f9));
    } else {
        out.extend([None, None]);
    }
    let f11 = associated_form(s, 11, f)?;
    let f12 = associated_form(s, 12, f)?;
    out.push(Some(&f12 - &f11));
    out.insert(10, Some(f11));
    Ok(out)
}

/// The `index`-th component `p_index(F)`.
pub fn project(s: &AcmStructure, index: usize, f: &Tensor3) -> Result<Tensor3> {
    check_index(index, COMPONENT_COUNT)?;
    if !component_defined(s.n(), index) {
        return Err(Error::DegenerateHorizontal { index });
    }
    Ok(components(s, f)?
        .swap_remove(index - 1)
        .expect("defined component"))
}

/// `(operator, domain components, -1 eigenspace, +1 eigenspace)`
pub type InvolutionSplit = (usize, &'static [usize], &'static [usize], &'static [usize]);

/// How each involution acts on a sum of components.
pub const INVOLUTION_SPLITS: &[InvolutionSplit] = &[
    (1, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], &[1], &[2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]),
    (2, &[2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], &[2, 3, 4, 5, 6, 7, 8], &[9, 10, 11, 12]),
    (3, &[2, 3, 4, 5, 6, 7, 8], &[8], &[2, 3, 4, 5, 6, 7]),
    (4, &[2, 3, 4, 5, 6, 7], &[2, 3, 4, 5], &[6, 7]),
    (5, &[2, 3, 4, 5], &[2, 4], &[3, 5]),
    (5, &[6, 7], &[6], &[7]),
    (6, &[2, 4], &[2], &[4]),
    (7, &[3, 5], &[3], &[5]),
];

/// `L_k(F)`, after checking that `F` lies in the operator's domain.
pub fn involution(s: &AcmStructure, k: usize, f: &Tensor3) -> Result<Tensor3> {
    check_index(k, INVOLUTION_COUNT)?;
    check_involution_domain(s, k, f)?;
    let form = |i| associated_form(s, i, f);
    Ok(match k {
        1 => f - &(&form(3)? * 2.0),
        2 => f - &(&(&form(1)? + &form(2)?) * 2.0),
        3 => &form(2)? - &form(1)?,
        4 => -&form(4)?,
        5 => -&form(5)?,
        6 => f - &(&form(7)? * 2.0),
        7 => f - &(&form(8)? * 2.0),
        _ => unreachable!(),
    })
}

/// `(F+, F-) = (F + LF, F - LF) / 2` for `L = L_k`.
pub fn eigen_split(s: &AcmStructure, k: usize, f: &Tensor3) -> Result<(Tensor3, Tensor3)> {
    let lf = involution(s, k, f)?;
    Ok((&(f + &lf) * 0.5, &(f - &lf) * 0.5))
}

/// Checks each defining condition of the domain of `L_k` in turn and names
/// the first one that fails.
pub fn check_involution_domain(s: &AcmStructure, k: usize, f: &Tensor3) -> Result<()> {
    check_index(k, INVOLUTION_COUNT)?;
    let tol = TAU_ALG * f.norm().max(1.0);
    let fail = |condition: &'static str, residual: f64| -> Result<()> {
        if residual <= tol {
            Ok(())
        } else {
            Err(Error::DomainViolation {
                operator: k,
                condition,
                residual,
            })
        }
    };
    fail("F in constraint space", membership_residual(s, f))?;
    if k >= 2 {
        fail("omega(F)=0", traces(s, f).omega.amax())?;
    }
    if k >= 3 {
        fail("hF=0", h_form(s, f)?.max_abs())?;
    }
    if k >= 4 {
        fail("F(xi,y,z)=0", f.insert_first(s.xi()).amax())?;
    }
    let f4 = || associated_form(s, 4, f);
    let f5 = || associated_form(s, 5, f);
    match k {
        5 => {
            let f4 = f4()?;
            let plus = (f - &f4).max_abs();
            let minus = (f + &f4).max_abs();
            fail("F=F4(F) or F=-F4(F)", plus.min(minus))?;
        }
        6 => {
            fail("F=F4(F)", (f - &f4()?).max_abs())?;
            fail("F=F5(F)", (f - &f5()?).max_abs())?;
        }
        7 => {
            fail("F=F4(F)", (f - &f4()?).max_abs())?;
            fail("F=-F5(F)", (f + &f5()?).max_abs())?;
        }
        _ => {}
    }
    Ok(())
}

/// Norms of the twelve components of a tensor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentSpectrum {
    pub n: usize,
    /// `norms[i - 1] = |p_i(F)|`; `None` for components absent at this `n`.
    pub norms: Vec<Option<f64>>,
    /// `|F - sum_i p_i(F)|`
    pub residual: f64,
    /// Constraint-space membership residual of the input.
    pub membership: f64,
}

impl ComponentSpectrum {
    /// Norm of the input reconstructed from its orthogonal pieces.
    pub fn total_norm(&self) -> f64 {
        let sq: f64 = self.norms.iter().flatten().map(|v| v * v).sum();
        (sq + self.residual * self.residual).sqrt()
    }
}

pub fn spectrum(s: &AcmStructure, f: &Tensor3) -> Result<ComponentSpectrum> {
    let membership = membership_residual(s, f);
    if membership > TAU_ALG * f.norm().max(1.0) {
        return Err(Error::NotInSpace { residual: membership });
    }
    spectrum_unchecked(s, f, membership)
}

/// Spectrum without the membership gate; used for finite-difference input
/// whose noise floor sits above the algebraic tolerance.
pub fn spectrum_unchecked(s: &AcmStructure, f: &Tensor3, membership: f64) -> Result<ComponentSpectrum> {
    let comps = components(s, f)?;
    let mut sum = Tensor3::zeros(s.n());
    let mut norms = Vec::with_capacity(COMPONENT_COUNT);
    for c in &comps {
        match c {
            Some(t) => {
                sum += t;
                norms.push(Some(t.norm()));
            }
            None => norms.push(None),
        }
    }
    Ok(ComponentSpectrum {
        n: s.n(),
        norms,
        residual: (f - &sum).norm(),
        membership,
    })
}

/// Orthonormal basis of one component, built by sampling.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub index: usize,
    pub vectors: Vec<Tensor3>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Orthogonal projection `sum_b <T, b> b`.
    pub fn project(&self, t: &Tensor3) -> Result<Tensor3> {
        let mut out = Tensor3::zeros(t.n());
        for b in &self.vectors {
            out += &(b * inner_product(t, b)?);
        }
        Ok(out)
    }
}

/// Span of `p_index(random_element(seed))` over `seeds`, orthonormalized.
///
/// The rank must not grow over the last [`STABILITY_WINDOW`] seeds.
pub fn subspace_basis_oracle(s: &AcmStructure, index: usize, seeds: &[u64]) -> Result<SubspaceBasis> {
    check_index(index, COMPONENT_COUNT)?;
    if !component_defined(s.n(), index) {
        return Err(Error::DegenerateHorizontal { index });
    }
    let mut scale: f64 = 0.0;
    let mut samples = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let r = random_element(s, seed);
        scale = scale.max(r.norm());
        samples.push(project(s, index, &r)?);
    }
    let rows = s.dim().pow(3);
    let stack = |count: usize| DMatrix::from_fn(rows, count, |r, c| samples[c].as_slice()[r]);

    let unstable = |rank: usize| Error::RankNotStabilized {
        index,
        seeds: seeds.len(),
        rank,
    };
    let full = stack(samples.len());
    let singular = full.singular_values();
    // Components can be zero-dimensional, so the cutoff is relative to the
    // unprojected samples rather than to the projected ones.
    let cutoff = RANK_CUTOFF * singular.max().max(scale);
    let rank = singular.iter().filter(|&&v| v > cutoff).count();
    if samples.len() <= STABILITY_WINDOW {
        return Err(unstable(rank));
    }
    let head = stack(samples.len() - STABILITY_WINDOW).singular_values();
    let head_rank = head.iter().filter(|&&v| v > cutoff).count();
    if head_rank != rank {
        return Err(unstable(rank));
    }
    let span = column_space(&full, rank);
    let vectors = span
        .column_iter()
        .map(|c| Tensor3::from_vec(s.n(), c.iter().copied().collect()))
        .collect::<Result<_>>()?;
    Ok(SubspaceBasis { index, vectors })
}
