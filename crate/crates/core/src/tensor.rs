//! Dense (0,3)-tensors, the constraint space of tensors with the symmetries
//! of `g((nabla_x phi) y, z)`, its inner product and trace covectors.
//!
//! Every contraction sums in ascending lexicographic index order so that
//! results are bit-reproducible on one platform.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::structure::AcmStructure;

/// Relative singular-value cutoff for every rank decision.
pub const RANK_CUTOFF: f64 = 1e-8;

/// A (0,3)-tensor stored densely; entry `(i, j, k)` is `F(e_i, e_j, e_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    dim: usize,
    values: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        let dim = 2 * n + 1;
        Self {
            n,
            dim,
            values: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let dim = 2 * n + 1;
        let mut values = Vec::with_capacity(dim * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    values.push(f(i, j, k));
                }
            }
        }
        Self { n, dim, values }
    }

    pub fn from_vec(n: usize, values: Vec<f64>) -> Result<Self> {
        let dim = 2 * n + 1;
        if values.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                what: "tensor values",
                expected: dim * dim * dim,
                found: values.len(),
            });
        }
        Ok(Self { n, dim, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let at = self.idx(i, j, k);
        self.values[at] = v;
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `(x, y, z) -> F(Mx, y, z)` style substitution in one slot (0, 1 or 2).
    pub fn substitute(&self, slot: usize, m: &DMatrix<f64>) -> Tensor3 {
        let d = self.dim;
        match slot {
            0 => Tensor3::from_fn(self.n, |i, j, k| (0..d).map(|a| m[(a, i)] * self.get(a, j, k)).sum()),
            1 => Tensor3::from_fn(self.n, |i, j, k| (0..d).map(|a| m[(a, j)] * self.get(i, a, k)).sum()),
            2 => Tensor3::from_fn(self.n, |i, j, k| (0..d).map(|a| m[(a, k)] * self.get(i, j, a)).sum()),
            _ => panic!("slot {slot} out of range"),
        }
    }

    /// `(x, y, z) -> F(Mx, My, Mz)`.
    pub fn substitute_all(&self, m: &DMatrix<f64>) -> Tensor3 {
        self.substitute(0, m).substitute(1, m).substitute(2, m)
    }

    /// `(y, z) -> F(v, y, z)`.
    pub fn insert_first(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |j, k| (0..d).map(|a| v[a] * self.get(a, j, k)).sum())
    }

    /// `(x, z) -> F(x, v, z)`.
    pub fn insert_second(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |i, k| (0..d).map(|b| v[b] * self.get(i, b, k)).sum())
    }

    /// `(x, y) -> F(x, y, v)`.
    pub fn insert_third(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |i, j| (0..d).map(|c| v[c] * self.get(i, j, c)).sum())
    }

    fn check_same(&self, other: &Tensor3) {
        assert_eq!(self.dim, other.dim, "tensor dimension mismatch");
    }
}

impl Add<&Tensor3> for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        self.check_same(rhs);
        Tensor3 {
            n: self.n,
            dim: self.dim,
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&Tensor3> for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        self.check_same(rhs);
        Tensor3 {
            n: self.n,
            dim: self.dim,
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<f64> for &Tensor3 {
    type Output = Tensor3;
    fn mul(self, s: f64) -> Tensor3 {
        Tensor3 {
            n: self.n,
            dim: self.dim,
            values: self.values.iter().map(|a| a * s).collect(),
        }
    }
}

impl Neg for &Tensor3 {
    type Output = Tensor3;
    fn neg(self) -> Tensor3 {
        self * -1.0
    }
}

impl AddAssign<&Tensor3> for Tensor3 {
    fn add_assign(&mut self, rhs: &Tensor3) {
        self.check_same(rhs);
        for (a, b) in self.values.iter_mut().zip(&rhs.values) {
            *a += b;
        }
    }
}

/// `sum_{ijk} A_ijk B_ijk` over the orthonormal frame.
pub fn inner_product(a: &Tensor3, b: &Tensor3) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            what: "inner product",
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum())
}

/// The covectors `f`, `f*` and `omega` attached to a tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTriple {
    pub f: DVector<f64>,
    pub f_star: DVector<f64>,
    pub omega: DVector<f64>,
}

pub fn traces(s: &AcmStructure, t: &Tensor3) -> TraceTriple {
    let d = s.dim();
    let phi = s.phi();
    let xi = s.xi();
    let f = DVector::from_fn(d, |z, _| (0..d).map(|i| t.get(i, i, z)).sum());
    let f_star = DVector::from_fn(d, |z, _| {
        let mut acc = 0.0;
        for i in 0..d {
            for a in 0..d {
                acc += phi[(a, i)] * t.get(i, a, z);
            }
        }
        acc
    });
    let omega = DVector::from_fn(d, |z, _| {
        let mut acc = 0.0;
        for a in 0..d {
            for b in 0..d {
                acc += xi[a] * xi[b] * t.get(a, b, z);
            }
        }
        acc
    });
    TraceTriple { f, f_star, omega }
}

/// Largest violation of the two defining identities over all basis triples.
pub fn membership_residual(s: &AcmStructure, t: &Tensor3) -> f64 {
    let d = s.dim();
    let phi = s.phi();
    let eta = s.eta();
    let twisted = t.substitute(1, phi).substitute(2, phi);
    let with_xi_second = t.insert_second(s.xi());
    let with_xi_third = t.insert_third(s.xi());
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let v = t.get(i, j, k);
                let anti = (v + t.get(i, k, j)).abs();
                let hermitian = (v + twisted.get(i, j, k)
                    - eta[j] * with_xi_second[(i, k)]
                    - eta[k] * with_xi_third[(i, j)])
                    .abs();
                worst = worst.max(anti).max(hermitian);
            }
        }
    }
    worst
}

/// Row block of the linear constraints acting on the last two slots.
///
/// Both identities leave the first argument free, so the full constraint
/// matrix over all index triples is `I_dim (x) C`; its null space is
/// `R^dim (x) null(C)`.
fn slot_constraint_matrix(s: &AcmStructure) -> DMatrix<f64> {
    let d = s.dim();
    let phi = s.phi();
    let eta = s.eta();
    let xi = s.xi();
    let mut c = DMatrix::zeros(2 * d * d, d * d);
    for j in 0..d {
        for k in 0..d {
            let row = j * d + k;
            c[(row, j * d + k)] += 1.0;
            c[(row, k * d + j)] += 1.0;
            let row = d * d + j * d + k;
            c[(row, j * d + k)] += 1.0;
            for a in 0..d {
                for b in 0..d {
                    c[(row, a * d + b)] += phi[(a, j)] * phi[(b, k)];
                }
                c[(row, a * d + k)] -= eta[j] * xi[a];
                c[(row, j * d + a)] -= eta[k] * xi[a];
            }
        }
    }
    c
}

/// The full constraint matrix over all `dim^3` index triples.
pub fn constraint_matrix(s: &AcmStructure) -> DMatrix<f64> {
    let d = s.dim();
    let block = slot_constraint_matrix(s);
    let (rows, cols) = block.shape();
    let mut full = DMatrix::zeros(d * rows, d * cols);
    for i in 0..d {
        full.view_mut((i * rows, i * cols), (rows, cols)).copy_from(&block);
    }
    full
}

/// Number of singular values above `RANK_CUTOFF * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_CUTOFF * top).count()
}

/// Orthonormal basis of the column space of `m`, given its rank.
///
/// The rank comes from singular values; the vectors come from a
/// column-pivoted QR, which stays accurate on rank-deficient input where
/// the SVD factors may not.
pub(crate) fn column_space(m: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    m.clone().col_piv_qr().q().columns(0, rank).into_owned()
}

/// Orthonormal basis of the null space of `m`, given its rank.
pub(crate) fn null_space(m: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let cols = m.ncols();
    // With at least as many columns as rows, Q is the full orthogonal
    // factor and its trailing columns complete the row space.
    let mut t = DMatrix::zeros(cols, m.nrows().max(cols));
    t.view_mut((0, 0), (cols, m.nrows())).copy_from(&m.transpose());
    t.col_piv_qr().q().columns(rank, cols - rank).into_owned()
}

/// Orthonormal basis of the null space of the slot constraints.
#[derive(Debug, Clone)]
pub struct ConstraintBasis {
    dim: usize,
    null: DMatrix<f64>,
    projector: DMatrix<f64>,
}

impl ConstraintBasis {
    pub(crate) fn new(s: &AcmStructure) -> Self {
        let d = s.dim();
        let c = slot_constraint_matrix(s);
        let null = null_space(&c, numerical_rank(&c));
        let projector = &null * null.transpose();
        Self { dim: d, null, projector }
    }

    fn slice_dim(&self) -> usize {
        self.null.ncols()
    }
}

/// Dimension of the constraint space from the rank of the assembled system.
pub fn space_dimension(s: &AcmStructure) -> usize {
    s.dim() * s.constraint_basis().slice_dim()
}

/// An orthonormal basis of the constraint space.
pub fn space_basis(s: &AcmStructure) -> Vec<Tensor3> {
    let basis = s.constraint_basis();
    let d = basis.dim;
    let mut out = Vec::with_capacity(d * basis.slice_dim());
    for i in 0..d {
        for col in 0..basis.slice_dim() {
            let mut t = Tensor3::zeros(s.n());
            for j in 0..d {
                for k in 0..d {
                    t.set(i, j, k, basis.null[(j * d + k, col)]);
                }
            }
            out.push(t);
        }
    }
    out
}

/// Orthogonal projection onto the constraint space.
pub fn project_to_space(s: &AcmStructure, t: &Tensor3) -> Tensor3 {
    assert_eq!(t.dim(), s.dim(), "tensor dimension mismatch");
    let basis = s.constraint_basis();
    let d = basis.dim;
    let p = &basis.projector;
    let mut out = Tensor3::zeros(s.n());
    for i in 0..d {
        let offset = i * d * d;
        let slice = &t.values[offset..offset + d * d];
        for r in 0..d * d {
            out.values[offset + r] = (0..d * d).map(|c| p[(r, c)] * slice[c]).sum();
        }
    }
    out
}

/// Gaussian tensor with i.i.d. standard normal entries, before projection.
pub fn gaussian_tensor(n: usize, seed: u64) -> Tensor3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 2 * n + 1;
    let values = (0..dim * dim * dim)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    Tensor3 { n, dim, values }
}

/// Deterministic pseudo-random element of the constraint space.
pub fn random_element(s: &AcmStructure, seed: u64) -> Tensor3 {
    project_to_space(s, &gaussian_tensor(s.n(), seed))
}
