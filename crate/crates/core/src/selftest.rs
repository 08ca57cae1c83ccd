//! The full invariant suite at one size, driven by one seeded generator.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classifier::{classify, defining_residual, defining_residuals, LabelKind};
use crate::decomposition::{
    component_defined, components, involution, spectrum, COMPONENT_COUNT, INVOLUTION_SPLITS,
};
use crate::equivariance::{act, random_isometry};
use crate::error::Result;
use crate::forms::{associated_form, composition_table_residual, h_form, trace_table_residual, FORM_COUNT};
use crate::structure::{AcmStructure, TAU_ALG};
use crate::tensor::{inner_product, membership_residual, random_element, space_dimension, Tensor3};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub space_dimension: usize,
    pub absent_components: Vec<usize>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Default)]
struct Tracker {
    checks: Vec<Check>,
}

impl Tracker {
    fn record(&mut self, name: &'static str, tolerance: f64, value: f64) {
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => c.max_residual = c.max_residual.max(value),
            None => self.checks.push(Check {
                name,
                max_residual: value,
                tolerance,
                pass: false,
            }),
        }
    }

    fn finish(mut self) -> Vec<Check> {
        for c in &mut self.checks {
            c.pass = c.max_residual <= c.tolerance;
        }
        self.checks
    }
}

fn sum_defined(parts: &[Option<Tensor3>], indices: &[usize], n: usize) -> Tensor3 {
    let mut acc = Tensor3::zeros(n);
    for &i in indices {
        if let Some(t) = &parts[i - 1] {
            acc += t;
        }
    }
    acc
}

/// Runs every invariant check on `trials` random tensors of size `n`.
pub fn run(n: usize, trials: usize, seed: u64) -> Result<SelftestReport> {
    let s = AcmStructure::standard(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tracker::default();
    let defined: Vec<usize> = (1..=COMPONENT_COUNT).filter(|&i| component_defined(n, i)).collect();

    t.record("structure axioms", 1e-12, s.validate().max_residual);

    for _ in 0..trials {
        let f = random_element(&s, rng.next_u64());
        let g = random_element(&s, rng.next_u64());
        let a = random_isometry(&s, rng.next_u64());
        let scale = f.norm().max(1.0);
        let sq = f.norm() * f.norm();

        let h = h_form(&s, &f)?;
        let mut closure = membership_residual(&s, &h);
        for i in (1..=FORM_COUNT).filter(|&i| component_defined(n, i)) {
            closure = closure.max(membership_residual(&s, &associated_form(&s, i, &f)?));
        }
        t.record("closure under associated forms", TAU_ALG, closure / scale);
        let rebuilt =
            &(&(&h + &associated_form(&s, 1, &f)?) + &associated_form(&s, 2, &f)?) - &associated_form(&s, 3, &f)?;
        t.record("reconstruction from hF, F1, F2, F3", TAU_ALG, (&f - &rebuilt).norm() / scale);
        t.record("composition table", TAU_ALG, composition_table_residual(&s, &f)? / scale);
        t.record("trace table", TAU_ALG, trace_table_residual(&s, &f)? / scale);

        let parts = components(&s, &f)?;
        let spec = spectrum(&s, &f)?;
        t.record("completeness", TAU_ALG, spec.residual / scale);
        let pyth: f64 = spec.norms.iter().flatten().map(|v| v * v).sum();
        t.record("pythagoras", 1e-8, (pyth - sq).abs() / sq.max(1.0));

        let mut idem: f64 = 0.0;
        let mut orth: f64 = 0.0;
        for &j in &defined {
            let pj = parts[j - 1].as_ref().expect("defined");
            let again = components(&s, pj)?;
            for &i in &defined {
                let pipj = again[i - 1].as_ref().expect("defined");
                let expected = if i == j { pj.clone() } else { Tensor3::zeros(n) };
                idem = idem.max((pipj - &expected).max_abs());
                if i < j {
                    let pi = parts[i - 1].as_ref().expect("defined");
                    orth = orth.max(inner_product(pi, pj)?.abs());
                }
            }
        }
        t.record("idempotence", TAU_ALG, idem / scale);
        t.record("orthogonality", TAU_ALG, orth / sq.max(1.0));

        let moved = components(&s, &act(&a, &f))?;
        let mut equi: f64 = 0.0;
        for &i in &defined {
            let lhs = moved[i - 1].as_ref().expect("defined");
            let rhs = act(&a, parts[i - 1].as_ref().expect("defined"));
            equi = equi.max((lhs - &rhs).max_abs());
        }
        t.record("equivariance of projections", TAU_ALG, equi / scale);
        let ip = inner_product(&act(&a, &f), &act(&a, &g))? - inner_product(&f, &g)?;
        t.record("invariance of inner product", TAU_ALG, ip.abs() / (scale * g.norm().max(1.0)));

        let mut inv: f64 = 0.0;
        for &(k, domain, minus, plus) in INVOLUTION_SPLITS {
            let x = sum_defined(&parts, domain, n);
            let lx = involution(&s, k, &x)?;
            inv = inv.max((&involution(&s, k, &lx)? - &x).max_abs());
            inv = inv.max((lx.norm() - x.norm()).abs());
            let fp = &(&x + &lx) * 0.5;
            let fm = &(&x - &lx) * 0.5;
            inv = inv.max((&fm - &sum_defined(&parts, minus, n)).max_abs());
            inv = inv.max((&fp - &sum_defined(&parts, plus, n)).max_abs());
        }
        t.record("involutions and eigenspaces", TAU_ALG, inv / scale);

        let mut defining: f64 = 0.0;
        let mut mismatches = 0usize;
        let mut overlap: f64 = 0.0;
        for &i in &defined {
            let p = parts[i - 1].as_ref().expect("defined");
            let pscale = p.norm().max(1.0);
            defining = defining.max(defining_residual(&s, i, p)? / pscale);
            let label = classify(&spectrum(&s, p)?, &defining_residuals(&s, p)?, 1e-6)?;
            let ok = if p.norm() <= TAU_ALG {
                label.kind == LabelKind::Cosymplectic
            } else {
                label.kind == LabelKind::Single && label.classes == [i]
            };
            mismatches += usize::from(!ok);
            for &j in defined.iter().filter(|&&j| j != i) {
                if defining_residual(&s, j, p)? <= TAU_ALG * pscale {
                    overlap = overlap.max(p.norm());
                }
            }
        }
        t.record("defining conditions of components", TAU_ALG, defining);
        t.record("classifier verdict mismatches", 0.0, mismatches as f64);
        t.record("norm on two classes at once", TAU_ALG, overlap);
    }

    let zero = Tensor3::zeros(n);
    let label = classify(&spectrum(&s, &zero)?, &defining_residuals(&s, &zero)?, 1e-6)?;
    t.record(
        "classifier verdict mismatches",
        0.0,
        f64::from(u8::from(label.kind != LabelKind::Cosymplectic)),
    );

    let checks = t.finish();
    let pass = checks.iter().all(|c| c.pass);
    Ok(SelftestReport {
        n,
        trials,
        seed,
        space_dimension: space_dimension(&s),
        absent_components: (1..=COMPONENT_COUNT).filter(|&i| !component_defined(n, i)).collect(),
        checks,
        pass,
    })
}
