//! Pointwise bilinear products and the product-constant recursion.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::funcmodel::{norm, JetFunction, OpNormBracket, SharedJet, SymMultilinearMap};
use crate::holder::{inclusion_constant_dk, HolderIndex, HolderProfile, InclusionConstant};
use crate::verify::Verdict;

/// `• : ℝ^{m₁} × ℝ^{m₂} → ℝ^m`, stored as `coeffs[(p * m₂ + q) * m + o]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearForm {
    in1: usize,
    in2: usize,
    out: usize,
    coeffs: Vec<f64>,
    op_norm: OpNormBracket,
}

impl BilinearForm {
    pub fn new(in1: usize, in2: usize, out: usize, coeffs: Vec<f64>) -> Result<Self> {
        Self::with_known_bound(in1, in2, out, coeffs, f64::INFINITY)
    }

    /// As [`BilinearForm::new`], with an a priori operator-norm bound that
    /// tightens the upper bracket when smaller than the Frobenius norm.
    pub fn with_known_bound(in1: usize, in2: usize, out: usize, coeffs: Vec<f64>, bound: f64) -> Result<Self> {
        let expected = in1 * in2 * out;
        if coeffs.len() != expected {
            return Err(Error::SizeMismatch { expected, got: coeffs.len() });
        }
        if in1 == 0 || in2 == 0 || out == 0 {
            return Err(Error::DimensionMismatch("bilinear form with a zero dimension".into()));
        }
        let mut b = Self { in1, in2, out, coeffs, op_norm: OpNormBracket { lower: 0.0, upper: 0.0 } };
        let frob = b.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let lower = b.sampled_lower();
        b.op_norm = OpNormBracket { lower, upper: frob.min(bound).max(lower) };
        Ok(b)
    }

    /// Scalar multiplication on ℝ.
    pub fn scalar() -> Self {
        Self::new(1, 1, 1, vec![1.0]).expect("valid")
    }

    /// `(t, z) ↦ t z` on `ℝ × ℝ^m`.
    pub fn scalar_vector(m: usize) -> Self {
        let mut c = vec![0.0; m * m];
        for o in 0..m {
            c[o * m + o] = 1.0;
        }
        Self::with_known_bound(1, m, m, c, 1.0).expect("valid")
    }

    /// Euclidean inner product on ℝ^m.
    pub fn dot(m: usize) -> Self {
        let mut c = vec![0.0; m * m];
        for p in 0..m {
            c[p * m + p] = 1.0;
        }
        Self::with_known_bound(m, m, 1, c, 1.0).expect("valid")
    }

    /// Product of row-major `d × d` matrices; Frobenius norm is submultiplicative.
    pub fn matrix_product(d: usize) -> Self {
        let m = d * d;
        let mut c = vec![0.0; m * m * m];
        for i in 0..d {
            for l in 0..d {
                for j in 0..d {
                    let (p, q, o) = (i * d + l, l * d + j, i * d + j);
                    c[(p * m + q) * m + o] = 1.0;
                }
            }
        }
        Self::with_known_bound(m, m, m, c, 1.0).expect("valid")
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.in1, self.in2, self.out)
    }

    pub fn op_norm(&self) -> OpNormBracket {
        self.op_norm
    }

    pub fn apply(&self, u: &[f64], w: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.out];
        for (p, up) in u.iter().enumerate() {
            if *up == 0.0 {
                continue;
            }
            for (q, wq) in w.iter().enumerate() {
                let f = up * wq;
                if f == 0.0 {
                    continue;
                }
                let base = (p * self.in2 + q) * self.out;
                for (o, zo) in z.iter_mut().enumerate() {
                    *zo += f * self.coeffs[base + o];
                }
            }
        }
        z
    }

    /// `max ‖b(e_p, e_q)‖` over basis pairs and the largest singular value of
    /// each output slice, all lower bounds for `‖•‖_op`.
    fn sampled_lower(&self) -> f64 {
        let mut lower: f64 = 0.0;
        for o in 0..self.out {
            let m = DMatrix::from_fn(self.in1, self.in2, |p, q| self.coeffs[(p * self.in2 + q) * self.out + o]);
            lower = lower.max(m.singular_values().max());
        }
        lower
    }
}

/// `x ↦ γ₁(x) • γ₂(x)` with jets from the Leibniz rule.
#[derive(Debug, Clone)]
pub struct PointwiseProduct {
    g1: SharedJet,
    g2: SharedJet,
    b: Arc<BilinearForm>,
}

pub fn pointwise_product(g1: SharedJet, g2: SharedJet, b: Arc<BilinearForm>) -> Result<PointwiseProduct> {
    if g1.in_dim() != g2.in_dim() {
        return Err(Error::DimensionMismatch(format!("input dims {} and {}", g1.in_dim(), g2.in_dim())));
    }
    if g1.out_dim() != b.in1 || g2.out_dim() != b.in2 {
        return Err(Error::DimensionMismatch(format!(
            "factors map to ℝ^{} and ℝ^{}, form expects ℝ^{} × ℝ^{}",
            g1.out_dim(),
            g2.out_dim(),
            b.in1,
            b.in2
        )));
    }
    Ok(PointwiseProduct { g1, g2, b })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl JetFunction for PointwiseProduct {
    fn in_dim(&self) -> usize {
        self.g1.in_dim()
    }

    fn out_dim(&self) -> usize {
        self.b.out
    }

    fn max_order(&self) -> usize {
        self.g1.max_order().min(self.g2.max_order())
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.b.apply(&self.g1.eval(x), &self.g2.eval(x))
    }

    fn derivative(&self, x: &[f64], order: usize) -> Result<SymMultilinearMap> {
        if order > self.max_order() {
            return Err(Error::OrderExceeded { requested: order, available: self.max_order() });
        }
        let n = self.in_dim();
        let (m1, m2, m) = self.b.dims();
        let mut coeffs = vec![0.0; n.pow(order as u32) * m];
        // Σ_i C(j,i) b(γ₁^{(i)} ⊗ γ₂^{(j−i)}), first i slots to γ₁; symmetrized once at the end
        for i in 0..=order {
            let a = self.g1.derivative(x, i)?;
            let c = self.g2.derivative(x, order - i)?;
            let w = binomial(order, i);
            let (na, nc) = (n.pow(i as u32), n.pow((order - i) as u32));
            let (ac, cc) = (a.coeffs(), c.coeffs());
            for ia in 0..na {
                let u = &ac[ia * m1..(ia + 1) * m1];
                for ic in 0..nc {
                    let z = self.b.apply(u, &cc[ic * m2..(ic + 1) * m2]);
                    let base = (ia * nc + ic) * m;
                    for o in 0..m {
                        coeffs[base + o] += w * z[o];
                    }
                }
            }
        }
        SymMultilinearMap::from_coeffs(order, n, m, coeffs)
    }
}

/// `D_k` and `C_k` up to a fixed order: `C₀ = 2`, `C_{k+1} = (2D_k + 2)C_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductConstants {
    pub inclusion: Vec<InclusionConstant>,
    pub product: Vec<f64>,
}

/// Default order up to which constants are tabulated.
pub const DEFAULT_KMAX: usize = 4;

impl ProductConstants {
    pub fn new(d: &Domain, k_max: usize) -> Self {
        let inclusion: Vec<_> = (0..k_max).map(|k| inclusion_constant_dk(k, d)).collect();
        let mut product = vec![2.0];
        for dk in &inclusion {
            let last = *product.last().expect("nonempty");
            product.push((2.0 * dk.value + 2.0) * last);
        }
        Self { inclusion, product }
    }

    pub fn k_max(&self) -> usize {
        self.product.len() - 1
    }

    pub fn c(&self, k: usize) -> Result<f64> {
        self.product.get(k).copied().ok_or(Error::OrderExceeded { requested: k, available: self.k_max() })
    }

    pub fn d(&self, k: usize) -> Result<f64> {
        self.inclusion
            .get(k)
            .map(|i| i.value)
            .ok_or(Error::OrderExceeded { requested: k, available: self.k_max().saturating_sub(1) })
    }
}

pub fn product_constant(k: usize, d: &Domain) -> f64 {
    ProductConstants::new(d, k).product[k]
}

/// `‖γ₁ • γ₂‖_{(k,s)} ≤ C_k ‖•‖_op ‖γ₁‖_{(k,s)} ‖γ₂‖_{(k,s)}` with the upper
/// bracket of `‖•‖_op`. The three profiles must share one sample set.
pub fn product_inequality_check(
    product: &HolderProfile<'_>,
    p1: &HolderProfile<'_>,
    p2: &HolderProfile<'_>,
    b: &BilinearForm,
    idx: HolderIndex,
    consts: &ProductConstants,
    tol: f64,
) -> Result<Verdict> {
    let lhs = product.norm_total(idx)?;
    let rhs = consts.c(idx.k)? * b.op_norm().upper * p1.norm_total(idx)? * p2.norm_total(idx)?;
    Ok(Verdict::leq(lhs, rhs, tol))
}

/// `p_{(0,s)}(γ₁ • γ₂) ≤ ‖•‖_op (‖γ₁‖∞ p_{(0,s)}(γ₂) + p_{(0,s)}(γ₁) ‖γ₂‖∞)`, `s > 0`.
pub fn subadditivity_check(
    product: &HolderProfile<'_>,
    p1: &HolderProfile<'_>,
    p2: &HolderProfile<'_>,
    b: &BilinearForm,
    s: f64,
    tol: f64,
) -> Result<Verdict> {
    let lhs = product.quotient_sup(0, s)?;
    let rhs = b.op_norm().upper * (p1.sup()? * p2.quotient_sup(0, s)? + p1.quotient_sup(0, s)? * p2.sup()?);
    Ok(Verdict::leq(lhs, rhs, tol))
}

/// Random rank-one probes of `z *₁ A : v ↦ z • Av` and `A *₂ z : v ↦ Av • z`
/// for `A = w ⊗ a ∈ L(ℝⁿ, ·)`; each must satisfy `‖·‖_op ≤ ‖•‖_op ‖z‖ ‖A‖_op`.
pub fn star_probe<R: Rng>(b: &BilinearForm, n: usize, rng: &mut R, tol: f64) -> [Verdict; 2] {
    let (m1, m2, m) = b.dims();
    let mut rand_vec = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let a = rand_vec(n);
    let (z1, w2) = (rand_vec(m1), rand_vec(m2));
    let (w1, z2) = (rand_vec(m1), rand_vec(m2));
    let op = |f: &dyn Fn(&[f64]) -> Vec<f64>| -> f64 {
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                f(&e)
            })
            .collect();
        DMatrix::from_fn(m, n, |r, c| cols[c][r]).singular_values().max()
    };
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let scaled = |w: &[f64], t: f64| w.iter().map(|c| c * t).collect::<Vec<_>>();
    let star1 = op(&|v: &[f64]| b.apply(&z1, &scaled(&w2, dot(&a, v))));
    let star2 = op(&|v: &[f64]| b.apply(&scaled(&w1, dot(&a, v)), &z2));
    let bound = b.op_norm().upper * norm(&a);
    [
        Verdict::leq(star1, bound * norm(&z1) * norm(&w2), tol),
        Verdict::leq(star2, bound * norm(&w1) * norm(&z2), tol),
    ]
}
