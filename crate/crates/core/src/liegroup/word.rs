//! Group elements as finite words in exponentials of algebra-valued functions.

use rayon::prelude::*;
use serde::Serialize;

use super::algebra::LieAlgebra;
use super::bch::{bch_truncated, BchConfig};
use super::matfun::{flatten, matrix_exp, matrix_log, to_matrix, Matrix, DEFAULT_TOL};
use crate::domain::{Domain, SamplePlan};
use crate::error::{Error, Result};
use crate::funcmodel::SharedJet;
use crate::holder::{HolderIndex, NormEstimate};

#[derive(Debug, Clone)]
pub struct Letter {
    pub sign: i8,
    pub gamma: SharedJet,
}

/// `x ↦ ∏ exp(sign_i γ_i(x))`, with `γ_i` valued in flattened `d × d` matrices.
#[derive(Debug, Clone)]
pub struct GroupElementWord {
    dim: usize,
    letters: Vec<Letter>,
}

fn matrix_dim_of(gamma: &SharedJet) -> Result<usize> {
    let m = gamma.out_dim();
    let d = (m as f64).sqrt().round() as usize;
    if d * d != m || d == 0 {
        return Err(Error::DimensionMismatch(format!("output dimension {m} is not a square")));
    }
    Ok(d)
}

impl GroupElementWord {
    pub fn identity(dim: usize) -> Self {
        Self { dim, letters: Vec::new() }
    }

    pub fn from_letters(dim: usize, letters: Vec<Letter>) -> Result<Self> {
        for l in &letters {
            if matrix_dim_of(&l.gamma)? != dim {
                return Err(Error::DimensionMismatch(format!("letter is not {dim} × {dim} valued")));
            }
            if l.sign != 1 && l.sign != -1 {
                return Err(Error::ConfigInvalid(format!("letter sign {} must be ±1", l.sign)));
            }
        }
        Ok(Self { dim, letters })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letter_value(&self, i: usize, x: &[f64]) -> Matrix {
        let l = &self.letters[i];
        to_matrix(&l.gamma.eval(x), self.dim) * l.sign as f64
    }

    pub fn evaluate(&self, x: &[f64]) -> Matrix {
        (0..self.letters.len()).fold(Matrix::identity(self.dim, self.dim), |acc, i| {
            acc * matrix_exp(&self.letter_value(i, x), DEFAULT_TOL)
        })
    }

    /// `wⁿ` by repetition.
    pub fn power(&self, n: usize) -> Self {
        let letters = (0..n).flat_map(|_| self.letters.iter().cloned()).collect();
        Self { dim: self.dim, letters }
    }
}

/// Length-one word `(+1, γ)`.
pub fn exp_map(gamma: SharedJet) -> Result<GroupElementWord> {
    let dim = matrix_dim_of(&gamma)?;
    Ok(GroupElementWord { dim, letters: vec![Letter { sign: 1, gamma }] })
}

pub fn group_mul(a: &GroupElementWord, b: &GroupElementWord) -> Result<GroupElementWord> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!("{0}×{0} and {1}×{1} words", a.dim, b.dim)));
    }
    let letters = a.letters.iter().chain(&b.letters).cloned().collect();
    Ok(GroupElementWord { dim: a.dim, letters })
}

pub fn group_inv(w: &GroupElementWord) -> GroupElementWord {
    let letters = w.letters.iter().rev().map(|l| Letter { sign: -l.sign, gamma: l.gamma.clone() }).collect();
    GroupElementWord { dim: w.dim, letters }
}

/// Pointwise collapse of a word to one algebra-valued function on the samples.
#[derive(Debug, Clone, Serialize)]
pub struct NormalFormRecord {
    pub points: Vec<Vec<f64>>,
    /// Flattened `γ̃(x)` from accumulated BCH products.
    pub values: Vec<Vec<f64>>,
    /// `max_x ‖γ̃(x) − log(w(x))‖_F`.
    pub log_discrepancy: f64,
    /// `(0, s)` estimate of `γ̃` under the Frobenius norm.
    pub norm: NormEstimate,
}

impl NormalFormRecord {
    pub fn value_matrix(&self, i: usize, dim: usize) -> Matrix {
        to_matrix(&self.values[i], dim)
    }
}

/// `γ̃(x) = bch(… bch(bch(0, ±γ₁(x)), ±γ₂(x)) …)`, checked against the
/// matrix logarithm of the evaluated word. Only `k = 0` is estimated.
pub fn local_normal_form(
    w: &GroupElementWord,
    alg: &LieAlgebra,
    idx: HolderIndex,
    cfg: &BchConfig,
    d: &Domain,
    plan: &SamplePlan,
) -> Result<NormalFormRecord> {
    if idx.k != 0 {
        return Err(Error::InvalidIndex { k: idx.k, s: idx.s, reason: "only values of the normal form are available".into() });
    }
    if alg.matrix_dim() != w.dim {
        return Err(Error::DimensionMismatch(format!("{} algebra for a {}×{} word", alg.name(), w.dim, w.dim)));
    }
    let set = d.sample_set(plan)?;
    let rows: Vec<(Vec<f64>, f64)> = set
        .points
        .par_iter()
        .map(|x| {
            let mut z = Matrix::zeros(w.dim, w.dim);
            for i in 0..w.len() {
                z = bch_truncated(alg, &z, &w.letter_value(i, x), cfg)?;
            }
            let log = matrix_log(&w.evaluate(x), 1e-12)?;
            Ok((flatten(&z), (&z - log).norm()))
        })
        .collect::<Result<_>>()?;
    let values: Vec<Vec<f64>> = rows.iter().map(|r| r.0.clone()).collect();
    let log_discrepancy = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let frob = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let sup_part = values.iter().map(|v| frob(v)).fold(0.0, f64::max);
    let seminorm_part = if idx.s == 0.0 {
        sup_part
    } else {
        set.pairs
            .iter()
            .zip(&set.dists)
            .map(|(&(i, j), r)| {
                let diff: Vec<f64> = values[i].iter().zip(&values[j]).map(|(a, b)| a - b).collect();
                frob(&diff) / r.powf(idx.s)
            })
            .fold(0.0, f64::max)
    };
    let total = if idx.s == 0.0 { sup_part } else { sup_part + seminorm_part };
    Ok(NormalFormRecord {
        points: set.points.clone(),
        values,
        log_discrepancy,
        norm: NormEstimate { index: idx, sup_part, seminorm_part, total, plan: set.plan.clone() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::funcmodel::{poly_jet, Polynomial, Scaled};
    use crate::liegroup::bch::bch_series;
    use rand::SeedableRng;
    use std::sync::Arc;

    fn small_function(alg: &LieAlgebra, seed: u64, size: f64) -> SharedJet {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let coords = corpus::random_smooth(&mut rng, 2, alg.basis().len());
        alg.embed(Arc::new(Scaled::new(size, coords))).unwrap()
    }

    fn domain() -> Domain {
        Domain::ball(vec![0.0, 0.0], 0.5).unwrap()
    }

    #[test]
    fn identity_and_constants() {
        let one = GroupElementWord::identity(3);
        assert_eq!(one.evaluate(&[0.1, 0.1]), Matrix::identity(3, 3));
        let zero = poly_jet(Polynomial::zero(2, 9));
        assert_eq!(exp_map(zero).unwrap().evaluate(&[0.2, 0.0]), Matrix::identity(3, 3));
        let c = vec![0.0, -0.3, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0];
        let w = exp_map(poly_jet(Polynomial::constant(c.clone(), 2))).unwrap();
        let want = matrix_exp(&to_matrix(&c, 3), DEFAULT_TOL);
        assert_eq!(w.evaluate(&[0.0, 0.3]), want);
        assert!(exp_map(poly_jet(Polynomial::zero(1, 3))).is_err());
    }

    #[test]
    fn group_axioms() {
        let g = LieAlgebra::so3();
        let (a, b, c) = (
            exp_map(small_function(&g, 1, 0.5)).unwrap(),
            exp_map(small_function(&g, 2, 0.5)).unwrap(),
            exp_map(small_function(&g, 3, 0.5)).unwrap(),
        );
        let ab_c = group_mul(&group_mul(&a, &b).unwrap(), &c).unwrap();
        let a_bc = group_mul(&a, &group_mul(&b, &c).unwrap()).unwrap();
        let e = GroupElementWord::identity(3);
        for x in [[0.0, 0.0], [0.2, -0.1], [-0.3, 0.3]] {
            assert!((ab_c.evaluate(&x) - a_bc.evaluate(&x)).norm() < 1e-14);
            let w = group_mul(&ab_c, &group_inv(&ab_c)).unwrap();
            assert!((w.evaluate(&x) - Matrix::identity(3, 3)).norm() < 1e-13);
            assert_eq!(group_mul(&a, &e).unwrap().evaluate(&x), a.evaluate(&x));
            assert_eq!(group_mul(&e, &a).unwrap().evaluate(&x), a.evaluate(&x));
        }
    }

    #[test]
    fn powers_realize_multiples() {
        let g = LieAlgebra::sl2();
        let gamma = small_function(&g, 4, 0.1);
        let w = exp_map(gamma.clone()).unwrap();
        for n in [1, 3, 7] {
            let wn = w.power(n);
            for x in [[0.0, 0.1], [0.3, -0.2]] {
                let want = matrix_exp(&(to_matrix(&gamma.eval(&x), 2) * n as f64), DEFAULT_TOL);
                assert!((wn.evaluate(&x) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn normal_form_of_exponential_is_the_function() {
        let g = LieAlgebra::so3();
        let gamma = small_function(&g, 5, 0.02);
        let plan = SamplePlan::quasirandom(30, 2);
        let rec = local_normal_form(&exp_map(gamma.clone()).unwrap(), &g, HolderIndex::new(0, 0.5).unwrap(), &BchConfig::default(), &domain(), &plan).unwrap();
        for (x, v) in rec.points.iter().zip(&rec.values) {
            let want = gamma.eval(x);
            assert!(v.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-15));
        }
        assert!(rec.log_discrepancy < 1e-9);
        assert!(rec.norm.total >= rec.norm.sup_part);
    }

    #[test]
    fn two_letter_normal_form_is_pointwise_bch() {
        let g = LieAlgebra::so3();
        let (g1, g2) = (small_function(&g, 6, 0.01), small_function(&g, 7, 0.01));
        let w = group_mul(&exp_map(g1.clone()).unwrap(), &exp_map(g2.clone()).unwrap()).unwrap();
        let cfg = BchConfig::default();
        let rec = local_normal_form(&w, &g, HolderIndex::new(0, 0.0).unwrap(), &cfg, &domain(), &SamplePlan::grid(5)).unwrap();
        assert!(rec.log_discrepancy < 1e-8);
        for (i, x) in rec.points.iter().enumerate() {
            let (a, b) = (to_matrix(&g1.eval(x), 3), to_matrix(&g2.eval(x), 3));
            let direct = bch_series(8).eval(&g, &a, &b);
            assert!((rec.value_matrix(i, 3) - direct).norm() < 1e-15);
        }
    }

    #[test]
    fn commuting_letters_add() {
        let g = LieAlgebra::abelian(2);
        let (g1, g2) = (small_function(&g, 8, 0.02), small_function(&g, 9, 0.02));
        let w = group_mul(&exp_map(g1.clone()).unwrap(), &exp_map(g2.clone()).unwrap()).unwrap();
        let rec = local_normal_form(&w, &g, HolderIndex::new(0, 1.0).unwrap(), &BchConfig::default(), &domain(), &SamplePlan::grid(4)).unwrap();
        for (x, v) in rec.points.iter().zip(&rec.values) {
            let want: Vec<f64> = g1.eval(x).iter().zip(g2.eval(x)).map(|(a, b)| a + b).collect();
            assert!(v.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-15));
        }
    }

    #[test]
    fn large_letters_leave_the_domain() {
        let g = LieAlgebra::so3();
        let w = exp_map(small_function(&g, 10, 5.0)).unwrap();
        let err = local_normal_form(&w, &g, HolderIndex::new(0, 0.0).unwrap(), &BchConfig::default(), &domain(), &SamplePlan::grid(3)).unwrap_err();
        assert!(matches!(err, Error::OutsideConvergenceDomain { .. }));
    }
}
