//! The associated forms `F_1 ... F_12` and the horizontal part `hF`.
//!
//! Forms 9 to 12 are defined on the horizontal part of their argument, so
//! `associated_form(s, 9, F)` means `F_9(hF)`. Forms 9 and 10 carry the
//! factor `1 / (2(n - 1))` and do not exist for `n = 1`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::structure::AcmStructure;
use crate::tensor::{traces, Tensor3, TraceTriple};

pub const FORM_COUNT: usize = 12;

/// Structure data reused by every form evaluation.
struct FormContext<'a> {
    s: &'a AcmStructure,
    /// `fundamental[(x, y)] = g(x, phi y)`
    fundamental: DMatrix<f64>,
    /// `g(hx, hy)`
    horizontal_metric: DMatrix<f64>,
}

impl<'a> FormContext<'a> {
    fn new(s: &'a AcmStructure) -> Self {
        let h = s.h_matrix();
        Self {
            s,
            fundamental: s.g() * s.phi(),
            horizontal_metric: h.transpose() * s.g() * &h,
        }
    }

    fn n(&self) -> usize {
        self.s.n()
    }

    fn eta(&self) -> &DVector<f64> {
        self.s.eta()
    }

    fn at_xi(&self, covector: &DVector<f64>) -> f64 {
        covector.dot(self.s.xi())
    }

    /// `(x, z) -> F(x, xi, z)`
    fn xi_second(&self, f: &Tensor3) -> DMatrix<f64> {
        f.insert_second(self.s.xi())
    }

    /// `(x, z) -> F(phi x, xi, phi z)`
    fn xi_second_twisted(&self, f: &Tensor3) -> DMatrix<f64> {
        let phi = self.s.phi();
        phi.transpose() * self.xi_second(f) * phi
    }

    /// `eta(y) A(x, z) - eta(z) A(x, y)`
    fn vertical_pair(&self, a: &DMatrix<f64>) -> Tensor3 {
        let eta = self.eta();
        Tensor3::from_fn(self.n(), |i, j, k| eta[j] * a[(i, k)] - eta[k] * a[(i, j)])
    }

    /// `eta(y) A(z, x) - eta(z) A(y, x)`
    fn vertical_pair_swapped(&self, a: &DMatrix<f64>) -> Tensor3 {
        let eta = self.eta();
        Tensor3::from_fn(self.n(), |i, j, k| eta[j] * a[(k, i)] - eta[k] * a[(j, i)])
    }

    fn form(&self, index: usize, f: &Tensor3) -> Result<Tensor3> {
        let eta = self.eta();
        let n = self.n();
        Ok(match index {
            1 => {
                let fx = f.insert_first(self.s.xi());
                Tensor3::from_fn(n, |i, j, k| eta[i] * fx[(j, k)])
            }
            2 => self.vertical_pair(&self.xi_second(f)),
            3 => {
                let omega = traces(self.s, f).omega;
                Tensor3::from_fn(n, |i, j, k| eta[i] * (eta[j] * omega[k] - eta[k] * omega[j]))
            }
            4 => self.vertical_pair(&self.xi_second_twisted(f)),
            5 => self.vertical_pair_swapped(&self.xi_second(f)),
            6 => self.vertical_pair_swapped(&self.xi_second_twisted(f)),
            7 => {
                let c = self.at_xi(&traces(self.s, f).f) / (2 * n) as f64;
                let g = self.s.g();
                Tensor3::from_fn(n, |i, j, k| c * (eta[k] * g[(i, j)] - eta[j] * g[(i, k)]))
            }
            8 => {
                let c = -self.at_xi(&traces(self.s, f).f_star) / (2 * n) as f64;
                let w = &self.fundamental;
                Tensor3::from_fn(n, |i, j, k| c * (eta[k] * w[(i, j)] - eta[j] * w[(i, k)]))
            }
            9 | 10 if n < 2 => return Err(Error::DegenerateHorizontal { index }),
            9 => {
                let hf = self.horizontal(f);
                let theta = traces(self.s, &hf).f;
                let theta_phi = self.s.phi().transpose() * &theta;
                let c = 1.0 / (2 * (n - 1)) as f64;
                let gh = &self.horizontal_metric;
                let w = &self.fundamental;
                Tensor3::from_fn(n, |i, j, k| {
                    c * (gh[(i, j)] * theta[k] - gh[(i, k)] * theta[j] - w[(i, j)] * theta_phi[k]
                        + w[(i, k)] * theta_phi[j])
                })
            }
            10 => {
                let hf = self.horizontal(f);
                let pulled = self.phi_pullback(&hf);
                &(&hf + &pulled) * 0.5
            }
            11 => {
                let hf = self.horizontal(f);
                let pulled = self.phi_pullback(&hf);
                Tensor3::from_fn(n, |i, j, k| {
                    (hf.get(i, j, k) + hf.get(j, k, i) + hf.get(k, i, j)
                        - pulled.get(i, j, k)
                        - pulled.get(j, k, i)
                        - pulled.get(k, i, j))
                        / 6.0
                })
            }
            12 => {
                let hf = self.horizontal(f);
                let pulled = self.phi_pullback(&hf);
                &(&hf - &pulled) * 0.5
            }
            _ => {
                return Err(Error::IndexOutOfRange {
                    index,
                    max: FORM_COUNT,
                })
            }
        })
    }

    fn horizontal(&self, f: &Tensor3) -> Tensor3 {
        f.substitute_all(&self.s.h_matrix())
    }

    /// `(x, y, z) -> F(phi x, phi y, z)`
    fn phi_pullback(&self, f: &Tensor3) -> Tensor3 {
        f.substitute(0, self.s.phi()).substitute(1, self.s.phi())
    }
}

/// `F_index(F)` for `index` in `1..=12`.
pub fn associated_form(s: &AcmStructure, index: usize, f: &Tensor3) -> Result<Tensor3> {
    check_dim(s, f)?;
    FormContext::new(s).form(index, f)
}

/// `(x, y, z) -> F(hx, hy, hz)`.
pub fn h_form(s: &AcmStructure, f: &Tensor3) -> Result<Tensor3> {
    check_dim(s, f)?;
    Ok(f.substitute_all(&s.h_matrix()))
}

fn check_dim(s: &AcmStructure, f: &Tensor3) -> Result<()> {
    if f.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            what: "tensor",
            expected: s.dim(),
            found: f.dim(),
        });
    }
    Ok(())
}

/// One checked identity and how far it is from holding.
#[derive(Debug, Clone)]
pub struct Relation {
    pub label: String,
    pub residual: f64,
}

/// Every composition identity among `F_1 ... F_8` and `h`, evaluated on `f`.
///
/// The `F_8` row is `F_48 = F_84 = F_88 = F_8` and `F_58 = F_85 = -F_8`;
/// this is the sign pattern forced by `f*(F_5(F)) = -f*(F)(xi) eta` and by
/// the `F_3` subspace lying in `{F = F_4(F) = -F_5(F)}`.
pub fn composition_relations(s: &AcmStructure, f: &Tensor3) -> Result<Vec<Relation>> {
    check_dim(s, f)?;
    let ctx = FormContext::new(s);
    let mut first = Vec::with_capacity(9);
    first.push(f.clone());
    for i in 1..=8 {
        first.push(ctx.form(i, f)?);
    }
    let single = |i: usize| &first[i];
    let compose = |i: usize, j: usize| ctx.form(i, &first[j]);
    let zero = Tensor3::zeros(s.n());
    let f2_minus_f3 = single(2) - single(3);
    let neg_f8 = -single(8);

    let mut out = Vec::new();
    let mut push = |label: String, lhs: Tensor3, rhs: &Tensor3| {
        out.push(Relation {
            residual: (&lhs - rhs).norm(),
            label,
        });
    };

    let table: [(usize, [&Tensor3; 5]); 5] = [
        (1, [single(1), single(3), single(3), &zero, &zero]),
        (2, [single(3), single(2), single(3), single(4), single(5)]),
        (3, [single(3), single(3), single(3), &zero, &zero]),
        (4, [&zero, single(4), &zero, &f2_minus_f3, single(6)]),
        (5, [&zero, single(5), &zero, single(6), &f2_minus_f3]),
    ];
    for (i, row) in table {
        for (j, rhs) in row.into_iter().enumerate() {
            push(format!("F{i}{}", j + 1), compose(i, j + 1)?, rhs);
        }
    }

    for (i, j) in [(7, 1), (1, 7), (7, 3), (3, 7), (8, 1), (1, 8), (8, 3)] {
        push(format!("F{i}{j}"), compose(i, j)?, &zero);
    }
    for i in [2, 4, 5, 7] {
        push(format!("F7{i}"), compose(7, i)?, single(7));
        push(format!("F{i}7"), compose(i, 7)?, single(7));
    }
    for (i, j) in [(4, 8), (8, 4), (8, 8)] {
        push(format!("F{i}{j}"), compose(i, j)?, single(8));
    }
    for (i, j) in [(5, 8), (8, 5)] {
        push(format!("F{i}{j}"), compose(i, j)?, &neg_f8);
    }

    let hf = h_form(s, f)?;
    for i in 1..=8 {
        push(format!("h(F{i})"), h_form(s, single(i))?, &zero);
        push(format!("F{i}(h)"), ctx.form(i, &hf)?, &zero);
    }
    Ok(out)
}

pub fn composition_table_residual(s: &AcmStructure, f: &Tensor3) -> Result<f64> {
    Ok(max_residual(&composition_relations(s, f)?))
}

/// The 24 trace identities `f, f*, omega` of `F_1 ... F_8`, evaluated on `f`.
pub fn trace_relations(s: &AcmStructure, f: &Tensor3) -> Result<Vec<Relation>> {
    check_dim(s, f)?;
    let ctx = FormContext::new(s);
    let TraceTriple {
        f: trace,
        f_star,
        omega,
    } = traces(s, f);
    let eta = s.eta();
    let f_xi = eta * ctx.at_xi(&trace);
    let f_star_xi = eta * ctx.at_xi(&f_star);
    let zero = DVector::zeros(s.dim());

    let expected: [[DVector<f64>; 3]; 8] = [
        [omega.clone(), zero.clone(), omega.clone()],
        [&omega + &f_xi, f_star_xi.clone(), omega.clone()],
        [omega.clone(), zero.clone(), omega.clone()],
        [f_xi.clone(), f_star_xi.clone(), zero.clone()],
        [f_xi.clone(), -&f_star_xi, zero.clone()],
        [f_xi.clone(), -&f_star_xi, zero.clone()],
        [f_xi.clone(), zero.clone(), zero.clone()],
        [zero.clone(), f_star_xi.clone(), zero.clone()],
    ];

    let mut out = Vec::with_capacity(24);
    for (row, exp) in expected.iter().enumerate() {
        let i = row + 1;
        let got = traces(s, &ctx.form(i, f)?);
        for (name, lhs, rhs) in [("f", &got.f, &exp[0]), ("f*", &got.f_star, &exp[1]), ("omega", &got.omega, &exp[2])] {
            out.push(Relation {
                label: format!("{name}(F{i})"),
                residual: (lhs - rhs).amax(),
            });
        }
    }
    Ok(out)
}

pub fn trace_table_residual(s: &AcmStructure, f: &Tensor3) -> Result<f64> {
    Ok(max_residual(&trace_relations(s, f)?))
}

fn max_residual(relations: &[Relation]) -> f64 {
    relations.iter().map(|r| r.residual).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::TAU_ALG;
    use crate::tensor::{membership_residual, random_element};

    fn f3_shape(s: &AcmStructure, omega: &[f64]) -> Tensor3 {
        let eta = s.eta();
        Tensor3::from_fn(s.n(), |i, j, k| eta[i] * (eta[j] * omega[k] - eta[k] * omega[j]))
    }

    #[test]
    fn pure_f3_shape_is_fixed_by_f3() {
        let s = AcmStructure::standard(2).unwrap();
        let t = f3_shape(&s, &[0.3, -1.2, 0.5, 2.0, 0.0]);
        assert!(membership_residual(&s, &t) <= TAU_ALG);
        assert!((&associated_form(&s, 3, &t).unwrap() - &t).max_abs() < 1e-14);
        assert!(h_form(&s, &t).unwrap().max_abs() < 1e-14);
        let tr = traces(&s, &associated_form(&s, 3, &t).unwrap());
        let omega = traces(&s, &t).omega;
        assert!((&tr.f - &omega).amax() < 1e-14);
        assert!(tr.f_star.amax() < 1e-14);
    }

    #[test]
    fn f1_vanishes_without_xi_first_slot() {
        let s = AcmStructure::standard(2).unwrap();
        let mut t = random_element(&s, 1);
        for j in 0..5 {
            for k in 0..5 {
                t.set(4, j, k, 0.0);
            }
        }
        assert_eq!(associated_form(&s, 1, &t).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn f4_twice_is_f2_minus_f3() {
        let s = AcmStructure::standard(2).unwrap();
        let t = random_element(&s, 2);
        let f4 = associated_form(&s, 4, &t).unwrap();
        let lhs = associated_form(&s, 4, &f4).unwrap();
        let rhs = &associated_form(&s, 2, &t).unwrap() - &associated_form(&s, 3, &t).unwrap();
        assert!((&lhs - &rhs).max_abs() < 1e-12);
    }

    #[test]
    fn horizontal_tensor_is_fixed_by_h() {
        let s = AcmStructure::standard(2).unwrap();
        let t = h_form(&s, &random_element(&s, 4)).unwrap();
        assert!((&h_form(&s, &t).unwrap() - &t).max_abs() < 1e-14);
    }

    #[test]
    fn reconstruction_from_h_and_vertical_forms() {
        for n in 1..=3 {
            let s = AcmStructure::standard(n).unwrap();
            let t = random_element(&s, 8);
            let sum = &(&(&h_form(&s, &t).unwrap() + &associated_form(&s, 1, &t).unwrap())
                + &associated_form(&s, 2, &t).unwrap())
                - &associated_form(&s, 3, &t).unwrap();
            assert!((&t - &sum).norm() <= TAU_ALG * t.norm());
        }
    }

    #[test]
    fn tables_hold_on_random_member() {
        let s = AcmStructure::standard(2).unwrap();
        let t = random_element(&s, 7);
        for r in composition_relations(&s, &t).unwrap() {
            assert!(r.residual <= TAU_ALG, "{} -> {:e}", r.label, r.residual);
        }
        let t = random_element(&s, 3);
        for r in trace_relations(&s, &t).unwrap() {
            assert!(r.residual <= TAU_ALG, "{} -> {:e}", r.label, r.residual);
        }
        assert_eq!(trace_relations(&s, &t).unwrap().len(), 24);
    }

    #[test]
    fn f5_negates_f8() {
        // F5 acting on F8 flips the sign; F4 fixes it
        let s = AcmStructure::standard(2).unwrap();
        let t = random_element(&s, 7);
        let f8 = associated_form(&s, 8, &t).unwrap();
        assert!(f8.norm() > 1e-3);
        let f58 = associated_form(&s, 5, &f8).unwrap();
        assert!((&f58 - &f8).norm() > 1e-3);
        assert!((&f58 + &f8).norm() < 1e-12);
        let f48 = associated_form(&s, 4, &f8).unwrap();
        assert!((&f48 - &f8).norm() < 1e-12);
    }

    #[test]
    fn zero_tensor_tables() {
        let s = AcmStructure::standard(1).unwrap();
        let z = Tensor3::zeros(1);
        assert_eq!(composition_table_residual(&s, &z).unwrap(), 0.0);
        assert_eq!(trace_table_residual(&s, &z).unwrap(), 0.0);
    }

    #[test]
    fn non_member_still_reports() {
        let s = AcmStructure::standard(2).unwrap();
        let raw = crate::tensor::gaussian_tensor(2, 1);
        assert!(composition_table_residual(&s, &raw).unwrap() > TAU_ALG);
    }

    #[test]
    fn degenerate_forms_at_n1() {
        let s = AcmStructure::standard(1).unwrap();
        let t = random_element(&s, 1);
        assert!(matches!(associated_form(&s, 9, &t), Err(Error::DegenerateHorizontal { index: 9 })));
        assert!(matches!(associated_form(&s, 10, &t), Err(Error::DegenerateHorizontal { index: 10 })));
        assert!(associated_form(&s, 11, &t).is_ok());
        assert!(matches!(associated_form(&s, 13, &t), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(associated_form(&s, 0, &t), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn horizontal_forms_keep_hermitian_symmetries() {
        let s = AcmStructure::standard(3).unwrap();
        let t = random_element(&s, 12);
        let phi = s.phi();
        for i in 9..=12 {
            let out = associated_form(&s, i, &t).unwrap();
            let twisted = out.substitute(1, phi).substitute(2, phi);
            for a in 0..7 {
                for b in 0..7 {
                    for c in 0..7 {
                        assert!((out.get(a, b, c) + out.get(a, c, b)).abs() < 1e-12);
                        assert!((out.get(a, b, c) + twisted.get(a, b, c)).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
