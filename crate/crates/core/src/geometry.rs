//! `F(x, y, z) = g((nabla_x phi) y, z)` at points of charted almost contact
//! metric manifolds, via central differences.
//!
//! Charts are closed-form callbacks for `g`, `phi`, `xi` and `eta` in chart
//! coordinates. Derivatives use symmetric differences of width `step`
//! scaled by `max(1, |p_i|)`, so everything is second order in `step`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::structure::AcmStructure;
use crate::tensor::{membership_residual, Tensor3};

/// Tolerance for finite-difference derived quantities.
pub const TAU_GEO: f64 = 1e-5;
pub const DEFAULT_STEP: f64 = 1e-5;

pub type MatrixField = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type VectorField = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;

#[derive(Clone)]
pub struct ChartField {
    pub name: String,
    pub n: usize,
    pub g_at: MatrixField,
    pub phi_at: MatrixField,
    pub xi_at: VectorField,
    pub eta_at: VectorField,
}

impl fmt::Debug for ChartField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartField")
            .field("name", &self.name)
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

impl ChartField {
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                what: "point",
                expected: self.dim(),
                found: p.len(),
            })
        }
    }

    /// Structure at `p` in coordinate components.
    pub fn structure_at(&self, p: &[f64]) -> Result<AcmStructure> {
        self.check_point(p)?;
        AcmStructure::from_parts(self.n, (self.phi_at)(p), (self.xi_at)(p), (self.eta_at)(p), (self.g_at)(p))
    }
}

/// Christoffel symbols `gamma[(k, i, j)]` of the Levi-Civita connection.
#[derive(Debug, Clone)]
pub struct Christoffel {
    dim: usize,
    values: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.values[(k * self.dim + i) * self.dim + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

fn central_difference<T>(
    p: &[f64],
    step: f64,
    axis: usize,
    field: impl Fn(&[f64]) -> T,
) -> (T, T, f64) {
    let h = step * p[axis].abs().max(1.0);
    let mut plus = p.to_vec();
    let mut minus = p.to_vec();
    plus[axis] += h;
    minus[axis] -= h;
    (field(&plus), field(&minus), 2.0 * h)
}

fn matrix_partials(field: &MatrixField, p: &[f64], step: f64) -> Vec<DMatrix<f64>> {
    (0..p.len())
        .map(|axis| {
            let (plus, minus, width) = central_difference(p, step, axis, |q| field(q));
            (plus - minus) / width
        })
        .collect()
}

/// `Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)`.
pub fn christoffel(chart: &ChartField, p: &[f64], step: f64) -> Result<Christoffel> {
    chart.check_point(p)?;
    let d = chart.dim();
    let g_inv = (chart.g_at)(p).try_inverse().ok_or(Error::SingularMetric)?;
    let dg = matrix_partials(&chart.g_at, p, step);
    let mut values = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for l in 0..d {
                    acc += g_inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                values[(k * d + i) * d + j] = 0.5 * acc;
            }
        }
    }
    Ok(Christoffel { dim: d, values })
}

/// A point together with a `g`-orthonormal frame whose last column is `xi`.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub point: Vec<f64>,
    pub frame: DMatrix<f64>,
}

/// Everything extracted at one point.
#[derive(Debug, Clone)]
pub struct PointTensor {
    pub frame: PointFrame,
    /// The structure re-expressed in the frame.
    pub structure: AcmStructure,
    /// `F` in the frame.
    pub tensor: Tensor3,
    /// `F(d_i, d_j, d_k)` in chart coordinates.
    pub coordinate_tensor: Tensor3,
    /// Membership residual of `tensor` in the frame.
    pub membership: f64,
}

/// `F` at `p`, in the default frame (Gram–Schmidt over the coordinate
/// vectors in their natural order).
pub fn fundamental_f(chart: &ChartField, p: &[f64], step: f64) -> Result<PointTensor> {
    let order: Vec<usize> = (0..chart.dim()).collect();
    fundamental_f_in_frame(chart, p, step, &order)
}

/// `F` at `p`, with the frame built from the coordinate vectors in `order`.
pub fn fundamental_f_in_frame(chart: &ChartField, p: &[f64], step: f64, order: &[usize]) -> Result<PointTensor> {
    let s = chart.structure_at(p)?;
    let report = s.validate_with(TAU_GEO);
    if !report.ok {
        return Err(Error::InvalidStructure {
            violated: report.violated_axioms,
            residual: report.max_residual,
        });
    }
    let d = chart.dim();
    let gamma = christoffel(chart, p, step)?;
    let dphi = matrix_partials(&chart.phi_at, p, step);
    let phi = s.phi();
    let g = s.g();

    // (nabla_i phi)^k_j = d_i phi^k_j + Gamma^k_il phi^l_j - Gamma^l_ij phi^k_l
    let coordinate_tensor = Tensor3::from_fn(chart.n, |i, j, m| {
        let mut acc = 0.0;
        for k in 0..d {
            let mut nabla = dphi[i][(k, j)];
            for l in 0..d {
                nabla += gamma.get(k, i, l) * phi[(l, j)] - gamma.get(l, i, j) * phi[(k, l)];
            }
            acc += g[(m, k)] * nabla;
        }
        acc
    });

    let frame = s.orthonormal_frame(order)?;
    let structure = s.in_basis(&frame)?;
    let tensor = coordinate_tensor.substitute_all(&frame);
    let membership = membership_residual(&structure, &tensor);
    Ok(PointTensor {
        frame: PointFrame {
            point: p.to_vec(),
            frame,
        },
        structure,
        tensor,
        coordinate_tensor,
        membership,
    })
}

fn unit(dim: usize, at: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[at] = 1.0;
    v
}

/// Flat `C^n x R` with constant `phi = J + 0`, coordinates `(x_1 .. x_2n, t)`.
pub fn cosymplectic_chart(n: usize) -> ChartField {
    let d = 2 * n + 1;
    let phi = AcmStructure::standard(n).expect("n >= 1").phi().clone();
    ChartField {
        name: format!("cosymplectic-n{n}"),
        n,
        g_at: Arc::new(move |_| DMatrix::identity(d, d)),
        phi_at: Arc::new(move |_| phi.clone()),
        xi_at: Arc::new(move |_| unit(d, d - 1)),
        eta_at: Arc::new(move |_| unit(d, d - 1)),
    }
}

/// `R^3` with `eta = (dz - y dx) / 2`, `g = eta (x) eta + (dx^2 + dy^2) / 4`,
/// `xi = 2 d_z`, coordinates `(x, y, z)`.
pub fn sasakian_chart() -> ChartField {
    let eta = |p: &[f64]| DVector::from_vec(vec![-0.5 * p[1], 0.0, 0.5]);
    ChartField {
        name: "sasakian-r3".into(),
        n: 1,
        g_at: Arc::new(move |p| {
            let e = eta(p);
            DMatrix::from_diagonal(&DVector::from_vec(vec![0.25, 0.25, 0.0])) + &e * e.transpose()
        }),
        // phi(d_x) = d_y, phi(d_y) = -d_x - y d_z
        phi_at: Arc::new(|p| DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, -p[1], 0.0])),
        xi_at: Arc::new(|_| DVector::from_vec(vec![0.0, 0.0, 2.0])),
        eta_at: Arc::new(eta),
    }
}

/// Warped product `dt^2 + e^(2 beta t) |dw|^2` over flat `C^n`, coordinates
/// `(t, w_1 .. w_2n)`, `xi = d_t`.
pub fn kenmotsu_chart(n: usize, beta: f64) -> ChartField {
    let d = 2 * n + 1;
    let phi = {
        let base = AcmStructure::standard(n).expect("n >= 1").phi().clone();
        // move the vertical index from last to first
        DMatrix::from_fn(d, d, |r, c| {
            if r == 0 || c == 0 {
                0.0
            } else {
                base[(r - 1, c - 1)]
            }
        })
    };
    let name = if n == 1 && beta == 1.0 {
        "kenmotsu-r3".to_string()
    } else {
        format!("kenmotsu-n{n}-beta{beta}")
    };
    ChartField {
        name,
        n,
        g_at: Arc::new(move |p| {
            let w = (2.0 * beta * p[0]).exp();
            DMatrix::from_fn(d, d, |r, c| match (r, c) {
                (0, 0) => 1.0,
                (r, c) if r == c => w,
                _ => 0.0,
            })
        }),
        phi_at: Arc::new(move |_| phi.clone()),
        xi_at: Arc::new(move |_| unit(d, 0)),
        eta_at: Arc::new(move |_| unit(d, 0)),
    }
}

/// `(e^(2 c x_1) |dw|^2 on C^2) x R`: a conformally flat Hermitian surface
/// times a line, coordinates `(w_1 .. w_4, t)`.
pub fn lck_product_chart(c: f64) -> ChartField {
    warped_lck_chart(0.0, c, "lck-product-n2".into())
}

/// `dt^2 + e^(2 beta t) e^(2 c w_1) |dw|^2`, coordinates `(w_1 .. w_4, t)`.
pub fn warped_lck_chart(beta: f64, c: f64, name: String) -> ChartField {
    let n = 2;
    let d = 5;
    let phi = AcmStructure::standard(n).expect("n >= 1").phi().clone();
    ChartField {
        name,
        n,
        g_at: Arc::new(move |p| {
            let w = (2.0 * beta * p[4] + 2.0 * c * p[0]).exp();
            DMatrix::from_fn(d, d, |r, col| match (r, col) {
                (4, 4) => 1.0,
                (r, col) if r == col => w,
                _ => 0.0,
            })
        }),
        phi_at: Arc::new(move |_| phi.clone()),
        xi_at: Arc::new(move |_| unit(d, 4)),
        eta_at: Arc::new(move |_| unit(d, 4)),
    }
}

pub fn builtin_charts() -> Vec<ChartField> {
    vec![
        cosymplectic_chart(1),
        cosymplectic_chart(2),
        sasakian_chart(),
        kenmotsu_chart(1, 1.0),
        lck_product_chart(0.5),
        warped_lck_chart(1.0, 0.5, "warped-lck-n2".into()),
    ]
}

pub fn chart_by_name(name: &str) -> Result<ChartField> {
    builtin_charts()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownChart(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::traces;

    #[test]
    fn flat_chart_has_no_christoffel_symbols() {
        let chart = cosymplectic_chart(2);
        let gamma = christoffel(&chart, &[0.3, -0.1, 2.0, 0.0, 1.0], DEFAULT_STEP).unwrap();
        assert_eq!(gamma.max_abs(), 0.0);
    }

    #[test]
    fn warped_christoffel_at_origin() {
        // g = dt^2 + e^{2t}(dx^2 + dy^2): Gamma^x_tx = 1, Gamma^t_xx = -1
        let chart = kenmotsu_chart(1, 1.0);
        for step in [1e-4, 1e-5] {
            let gamma = christoffel(&chart, &[0.0, 0.0, 0.0], step).unwrap();
            assert!((gamma.get(1, 0, 1) - 1.0).abs() < 1e-7);
            assert!((gamma.get(1, 1, 0) - 1.0).abs() < 1e-7);
            assert!((gamma.get(0, 1, 1) + 1.0).abs() < 1e-7);
            assert!(gamma.get(0, 0, 0).abs() < 1e-7);
        }
    }

    #[test]
    fn christoffel_symmetric_in_lower_indices() {
        let chart = warped_lck_chart(0.7, 0.3, "test".into());
        let gamma = christoffel(&chart, &[0.2, 0.1, -0.4, 0.3, 0.5], DEFAULT_STEP).unwrap();
        for k in 0..5 {
            for i in 0..5 {
                for j in 0..5 {
                    assert!((gamma.get(k, i, j) - gamma.get(k, j, i)).abs() < TAU_GEO);
                }
            }
        }
    }

    #[test]
    fn builtin_charts_validate_on_grid() {
        let charts = builtin_charts();
        assert!(charts.len() >= 4);
        for chart in &charts {
            let d = chart.dim();
            for corner in 0..27usize {
                let mut p = vec![0.0; d];
                let mut code = corner;
                for slot in p.iter_mut().take(3) {
                    *slot = (code % 3) as f64 - 1.0;
                    code /= 3;
                }
                let report = chart.structure_at(&p).unwrap().validate_with(TAU_GEO);
                assert!(report.ok, "{} at {p:?}: {report:?}", chart.name);
            }
        }
    }

    #[test]
    fn cosymplectic_tensor_vanishes() {
        let chart = cosymplectic_chart(1);
        let out = fundamental_f(&chart, &[0.4, -2.0, 1.0], DEFAULT_STEP).unwrap();
        assert!(out.tensor.max_abs() <= TAU_GEO);
    }

    #[test]
    fn kenmotsu_trace_at_origin() {
        let chart = kenmotsu_chart(1, 1.0);
        let out = fundamental_f(&chart, &[0.0, 0.0, 0.0], DEFAULT_STEP).unwrap();
        assert!(out.membership <= TAU_GEO);
        let tr = traces(&out.structure, &out.tensor);
        let f_star_xi = tr.f_star.dot(out.structure.xi());
        assert!((f_star_xi - 2.0).abs() < 1e-6);
    }

    #[test]
    fn frame_has_xi_last() {
        let chart = sasakian_chart();
        let out = fundamental_f(&chart, &[0.1, 0.5, -0.3], DEFAULT_STEP).unwrap();
        let g = chart.structure_at(&[0.1, 0.5, -0.3]).unwrap();
        let e = &out.frame.frame;
        assert!((e.transpose() * g.g() * e - DMatrix::identity(3, 3)).amax() < 1e-12);
        assert!((e.column(2) - g.xi()).amax() < 1e-12);
    }

    #[test]
    fn unknown_chart_and_bad_point() {
        assert!(matches!(chart_by_name("nope"), Err(Error::UnknownChart(_))));
        let chart = sasakian_chart();
        assert!(fundamental_f(&chart, &[0.0, 0.0], DEFAULT_STEP).is_err());
    }
}
