//! Functions `Ω → ℝ^m` packaged with exact derivatives, where the j-th
//! derivative at a point is a symmetric j-linear map `ℝⁿ × … × ℝⁿ → ℝ^m`.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Marker for families with derivatives of every order.
pub const UNBOUNDED_ORDER: usize = usize::MAX;

/// Dense symmetric tensor of shape `n^j × m`.
///
/// Coefficients are stored row-major with the output index last:
/// `coeffs[((i1 * n + i2) * n + … + ij) * m + o]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMultilinearMap {
    order: usize,
    in_dim: usize,
    out_dim: usize,
    coeffs: Vec<f64>,
}

impl SymMultilinearMap {
    pub fn zeros(order: usize, in_dim: usize, out_dim: usize) -> Self {
        Self {
            order,
            in_dim,
            out_dim,
            coeffs: vec![0.0; in_dim.pow(order as u32) * out_dim],
        }
    }

    /// Builds a map from raw coefficients, symmetrizing over the input slots.
    pub fn from_coeffs(order: usize, in_dim: usize, out_dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = in_dim.pow(order as u32) * out_dim;
        if coeffs.len() != expected {
            return Err(Error::SizeMismatch { expected, got: coeffs.len() });
        }
        let mut t = Self { order, in_dim, out_dim, coeffs };
        t.symmetrize();
        Ok(t)
    }

    pub fn constant(value: Vec<f64>, in_dim: usize) -> Self {
        Self { order: 0, in_dim, out_dim: value.len(), coeffs: value }
    }

    /// The linear map `v ↦ A v` for a row-major `m × n` matrix.
    pub fn linear(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged matrix".into()));
        }
        let mut t = Self::zeros(1, n, m);
        for (o, row) in rows.iter().enumerate() {
            for (i, a) in row.iter().enumerate() {
                t.coeffs[i * m + o] = *a;
            }
        }
        Ok(t)
    }

    /// `a ⊗ … ⊗ a ⊗ w` (j copies of the covector `a`).
    pub fn tensor_power(a: &[f64], order: usize, w: &[f64]) -> Self {
        let mut coeffs = w.to_vec();
        for _ in 0..order {
            let mut next = Vec::with_capacity(coeffs.len() * a.len());
            for ai in a {
                next.extend(coeffs.iter().map(|c| ai * c));
            }
            coeffs = next;
        }
        Self { order, in_dim: a.len(), out_dim: w.len(), coeffs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.order == other.order && self.in_dim == other.in_dim && self.out_dim == other.out_dim
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::DimensionMismatch("tensor shapes differ".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::DimensionMismatch("tensor shapes differ".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| c * a).collect())
    }

    pub(crate) fn add_scaled_in_place(&mut self, c: f64, other: &Self) {
        debug_assert!(self.same_shape(other));
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }

    fn with_coeffs(&self, coeffs: Vec<f64>) -> Self {
        Self { order: self.order, in_dim: self.in_dim, out_dim: self.out_dim, coeffs }
    }

    /// Fixes the first input slot to `x`, leaving a map of order `j - 1`.
    pub fn contract_first(&self, x: &[f64]) -> Self {
        assert!(self.order > 0, "cannot contract an order-0 map");
        let block = self.coeffs.len() / self.in_dim;
        let mut coeffs = vec![0.0; block];
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0.0 {
                continue;
            }
            for (c, t) in coeffs.iter_mut().zip(&self.coeffs[i * block..(i + 1) * block]) {
                *c += xi * t;
            }
        }
        Self { order: self.order - 1, in_dim: self.in_dim, out_dim: self.out_dim, coeffs }
    }

    pub fn eval(&self, args: &[&[f64]]) -> Result<Vec<f64>> {
        if args.len() != self.order {
            return Err(Error::SizeMismatch { expected: self.order, got: args.len() });
        }
        if let Some(a) = args.iter().find(|a| a.len() != self.in_dim) {
            return Err(Error::SizeMismatch { expected: self.in_dim, got: a.len() });
        }
        let mut t = self.clone();
        for a in args {
            t = t.contract_first(a);
        }
        Ok(t.coeffs)
    }

    /// `T(v, …, v)`.
    pub fn eval_diag(&self, v: &[f64]) -> Vec<f64> {
        let mut t = self.clone();
        for _ in 0..self.order {
            t = t.contract_first(v);
        }
        t.coeffs
    }

    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        for slot in (0..self.order).rev() {
            idx[slot] = flat % self.in_dim;
            flat /= self.in_dim;
        }
        idx
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |f, &i| f * self.in_dim + i)
    }

    /// Replaces each coefficient by its average over the orbit of its
    /// multi-index under slot permutations.
    pub fn symmetrize(&mut self) {
        if self.order < 2 {
            return;
        }
        let m = self.out_dim;
        let blocks = self.coeffs.len() / m;
        let mut out = vec![0.0; self.coeffs.len()];
        let mut done = vec![false; blocks];
        for b in 0..blocks {
            if done[b] {
                continue;
            }
            let mut sorted = self.multi_index(b);
            sorted.sort_unstable();
            let orbit = permutations_of_multiset(&sorted);
            let flats: Vec<usize> = orbit.iter().map(|p| self.flat_index(p)).collect();
            for o in 0..m {
                let avg = flats.iter().map(|f| self.coeffs[f * m + o]).sum::<f64>() / flats.len() as f64;
                for f in &flats {
                    out[f * m + o] = avg;
                }
            }
            for f in flats {
                done[f] = true;
            }
        }
        self.coeffs = out;
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let mut s = self.clone();
        s.symmetrize();
        s.coeffs.iter().zip(&self.coeffs).all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Operator-norm bracket using the given unit-vector sample for the lower end.
    pub fn op_norm_with(&self, sphere: &SphereSample) -> OpNormBracket {
        if self.order == 0 {
            let n = norm(&self.coeffs);
            return OpNormBracket { lower: n, upper: n };
        }
        let lower = sphere
            .directions()
            .iter()
            .map(|v| norm(&self.eval_diag(v)))
            .fold(0.0, f64::max);
        OpNormBracket { lower, upper: self.abs_sum().max(lower) }
    }
}

fn permutations_of_multiset(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![sorted.to_vec()];
    let mut cur = sorted.to_vec();
    // lexicographic next-permutation enumerates each distinct arrangement once
    loop {
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpNormBracket {
    pub lower: f64,
    pub upper: f64,
}

/// `lower ≤ ‖T‖_op ≤ upper` for a symmetric multilinear map, with the default
/// unit-sphere sample of its input dimension.
pub fn multilinear_op_norm(t: &SymMultilinearMap) -> OpNormBracket {
    t.op_norm_with(&SphereSample::default_for(t.in_dim()))
}

/// Deterministic unit vectors in ℝⁿ. Antipodal points are redundant for
/// `|T(v, …, v)|`, so only a half-sphere is covered where that is convenient.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSample {
    dim: usize,
    dirs: Vec<Vec<f64>>,
}

impl SphereSample {
    pub fn new(dim: usize, count: usize) -> Self {
        let count = count.max(1);
        let dirs = match dim {
            0 => vec![vec![]],
            1 => vec![vec![1.0]],
            2 => (0..count)
                .map(|i| {
                    let th = PI * i as f64 / count as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect(),
            3 => {
                // Fibonacci lattice
                let golden = PI * (3.0 - 5f64.sqrt());
                (0..count)
                    .map(|i| {
                        let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                        let r = (1.0 - z * z).sqrt();
                        let th = golden * i as f64;
                        vec![r * th.cos(), r * th.sin(), z]
                    })
                    .collect()
            }
            _ => {
                use rand::SeedableRng;
                use rand_distr_like::gaussian;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(dim as u64);
                let mut dirs: Vec<Vec<f64>> = (0..dim)
                    .map(|a| (0..dim).map(|b| if a == b { 1.0 } else { 0.0 }).collect())
                    .collect();
                while dirs.len() < count.max(dim) {
                    let v: Vec<f64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
                    let n = norm(&v);
                    if n > 1e-12 {
                        dirs.push(v.iter().map(|a| a / n).collect());
                    }
                }
                dirs
            }
        };
        Self { dim, dirs }
    }

    pub fn default_for(dim: usize) -> Self {
        let count = match dim {
            0 | 1 => 1,
            2 => 90,
            3 => 400,
            _ => 64 * dim,
        };
        Self::new(dim, count)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.dirs
    }
}

mod rand_distr_like {
    use rand::Rng;

    /// Box–Muller standard normal draw.
    pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// A function `Ω ⊂ ℝⁿ → ℝ^m` with exact derivatives through `max_order`.
pub trait JetFunction: Debug + Send + Sync {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;
    /// Highest derivative order available; [`UNBOUNDED_ORDER`] for entire families.
    fn max_order(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Vec<f64>;
    /// Order-`j` derivative at `x`; `derivative(x, 0)` holds `eval(x)`.
    fn derivative(&self, x: &[f64], order: usize) -> Result<SymMultilinearMap>;
}

pub type SharedJet = Arc<dyn JetFunction>;

fn check_order(requested: usize, available: usize) -> Result<()> {
    if requested > available {
        Err(Error::OrderExceeded { requested, available })
    } else {
        Ok(())
    }
}

/// `γ = Σ_j γ_j` with `γ_j(x) = T_j(x, …, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    in_dim: usize,
    out_dim: usize,
    parts: Vec<SymMultilinearMap>,
}

impl Polynomial {
    /// `parts[j]` must have order `j`; each part is symmetrized.
    pub fn new(parts: Vec<SymMultilinearMap>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::DimensionMismatch("polynomial without parts".into()))?;
        let (in_dim, out_dim) = (first.in_dim(), first.out_dim());
        for (j, p) in parts.iter().enumerate() {
            if p.order() != j || p.in_dim() != in_dim || p.out_dim() != out_dim {
                return Err(Error::DimensionMismatch(format!(
                    "part {j} has order {} and shape {}→{}",
                    p.order(),
                    p.in_dim(),
                    p.out_dim()
                )));
            }
        }
        let mut parts = parts;
        parts.iter_mut().for_each(SymMultilinearMap::symmetrize);
        Ok(Self { in_dim, out_dim, parts })
    }

    pub fn zero(in_dim: usize, out_dim: usize) -> Self {
        Self { in_dim, out_dim, parts: vec![SymMultilinearMap::zeros(0, in_dim, out_dim)] }
    }

    pub fn constant(value: Vec<f64>, in_dim: usize) -> Self {
        Self { in_dim, out_dim: value.len(), parts: vec![SymMultilinearMap::constant(value, in_dim)] }
    }

    /// Scalar linear form `x ↦ ⟨a, x⟩`.
    pub fn linear_form(a: &[f64]) -> Self {
        let n = a.len();
        Self {
            in_dim: n,
            out_dim: 1,
            parts: vec![
                SymMultilinearMap::zeros(0, n, 1),
                SymMultilinearMap::linear(&[a.to_vec()]).expect("row"),
            ],
        }
    }

    /// Scalar polynomial of one variable from monomial coefficients.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let parts = coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| SymMultilinearMap::tensor_power(&[1.0], j, &[*c]))
            .collect();
        Self { in_dim: 1, out_dim: 1, parts }
    }

    pub fn degree(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn parts(&self) -> &[SymMultilinearMap] {
        &self.parts
    }

    /// `γ_j(x) = T_j(x, …, x)`; zero past the degree.
    pub fn homogeneous_part(&self, j: usize, x: &[f64]) -> Vec<f64> {
        match self.parts.get(j) {
            Some(p) => p.eval_diag(x),
            None => vec![0.0; self.out_dim],
        }
    }
}

fn falling_factorial(j: usize, r: usize) -> f64 {
    ((j - r + 1)..=j).map(|i| i as f64).product()
}

impl JetFunction for Polynomial {
    fn in_dim(&self) -> usize {
        self.in_dim
    }

    fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn max_order(&self) -> usize {
        UNBOUNDED_ORDER
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.out_dim];
        for p in &self.parts {
            for (o, v) in out.iter_mut().zip(p.eval_diag(x)) {
                *o += v;
            }
        }
        out
    }

    fn derivative(&self, x: &[f64], order: usize) -> Result<SymMultilinearMap> {
        // d^r/dx^r of T_j(x, …, x) = j!/(j-r)! · T_j(x, …, x, ·, …, ·)
        let mut acc = SymMultilinearMap::zeros(order, self.in_dim, self.out_dim);
        for (j, p) in self.parts.iter().enumerate().skip(order) {
            let mut t = p.clone();
            for _ in 0..(j - order) {
                t = t.contract_first(x);
            }
            acc.add_scaled_in_place(falling_factorial(j, order), &t);
        }
        Ok(acc)
    }
}

/// Scalar profiles `f` with known derivatives `f⁽ʲ⁾`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarFamily {
    Sin,
    Cos,
    Exp,
    /// `u ↦ |u|^s`, a Hölder-only profile: values but no derivatives.
    Power { exponent: f64 },
}

impl ScalarFamily {
    pub fn max_order(&self) -> usize {
        match self {
            ScalarFamily::Power { .. } => 0,
            _ => UNBOUNDED_ORDER,
        }
    }

    pub fn derivative(&self, u: f64, j: usize) -> f64 {
        match self {
            ScalarFamily::Sin => match j % 4 {
                0 => u.sin(),
                1 => u.cos(),
                2 => -u.sin(),
                _ => -u.cos(),
            },
            ScalarFamily::Cos => match j % 4 {
                0 => u.cos(),
                1 => -u.sin(),
                2 => -u.cos(),
                _ => u.sin(),
            },
            ScalarFamily::Exp => u.exp(),
            ScalarFamily::Power { exponent } => {
                debug_assert_eq!(j, 0);
                u.abs().powf(*exponent)
            }
        }
    }
}

/// `x ↦ f(⟨a, x⟩) · w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    family: ScalarFamily,
    a: Vec<f64>,
    w: Vec<f64>,
    max_order: usize,
}

impl Envelope {
    pub fn scalar(family: ScalarFamily, a: Vec<f64>) -> Self {
        Self::new(family, a, vec![1.0], UNBOUNDED_ORDER)
    }

    /// `max_order` is capped by what the family provides.
    pub fn new(family: ScalarFamily, a: Vec<f64>, w: Vec<f64>, max_order: usize) -> Self {
        let max_order = max_order.min(family.max_order());
        Self { family, a, w, max_order }
    }
}

impl JetFunction for Envelope {
    fn in_dim(&self) -> usize {
        self.a.len()
    }

    fn out_dim(&self) -> usize {
        self.w.len()
    }

    fn max_order(&self) -> usize {
        self.max_order
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let f = self.family.derivative(dot(&self.a, x), 0);
        self.w.iter().map(|w| f * w).collect()
    }

    fn derivative(&self, x: &[f64], order: usize) -> Result<SymMultilinearMap> {
        check_order(order, self.max_order)?;
        let f = self.family.derivative(dot(&self.a, x), order);
        let w: Vec<f64> = self.w.iter().map(|w| f * w).collect();
        Ok(SymMultilinearMap::tensor_power(&self.a, order, &w))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pointwise sum of jets with identical shapes.
#[derive(Debug, Clone)]
pub struct JetSum {
    terms: Vec<SharedJet>,
}

impl JetSum {
    pub fn new(terms: Vec<SharedJet>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::DimensionMismatch("empty sum".into()))?;
        if terms
            .iter()
            .any(|t| t.in_dim() != first.in_dim() || t.out_dim() != first.out_dim())
        {
            return Err(Error::DimensionMismatch("summands differ in shape".into()));
        }
        Ok(Self { terms })
    }
}

impl JetFunction for JetSum {
    fn in_dim(&self) -> usize {
        self.terms[0].in_dim()
    }

    fn out_dim(&self) -> usize {
        self.terms[0].out_dim()
    }

    fn max_order(&self) -> usize {
        self.terms.iter().map(|t| t.max_order()).min().unwrap_or(0)
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.out_dim()];
        for t in &self.terms {
            for (o, v) in out.iter_mut().zip(t.eval(x)) {
                *o += v;
            }
        }
        out
    }

    fn derivative(&self, x: &[f64], order: usize) -> Result<SymMultilinearMap> {
        check_order(order, self.max_order())?;
        let mut acc = SymMultilinearMap::zeros(order, self.in_dim(), self.out_dim());
        for t in &self.terms {
            acc.add_scaled_in_place(1.0, &t.derivative(x, order)?);
        }
        Ok(acc)
    }
}

/// `x ↦ A γ(x)` for a fixed `p × m` matrix `A`; used to embed coordinate
/// functions into a matrix algebra through a basis.
#[derive(Debug, Clone)]
pub struct LinearImage {
    rows: Vec<Vec<f64>>,
    inner: SharedJet,
}

impl LinearImage {
    pub fn new(rows: Vec<Vec<f64>>, inner: SharedJet) -> Result<Self> {
        if rows.iter().any(|r| r.len() != inner.out_dim()) {
            return Err(Error::DimensionMismatch(format!(
                "matrix columns must equal inner output dimension {}",
                inner.out_dim()
            )));
        }
        Ok(Self { rows, inner })
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| dot(r, v)).collect()
    }
}

impl JetFunction for LinearImage {
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }

    fn out_dim(&self) -> usize {
        self.rows.len()
    }

    fn max_order(&self) -> usize {
        self.inner.max_order()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.apply(&self.inner.eval(x))
    }

    fn derivative(&self, x: &[f64], order: usize) -> Result<SymMultilinearMap> {
        let d = self.inner.derivative(x, order)?;
        let m = d.out_dim();
        let blocks = d.coeffs().len() / m.max(1);
        let mut coeffs = Vec::with_capacity(blocks * self.rows.len());
        for b in 0..blocks {
            coeffs.extend(self.apply(&d.coeffs()[b * m..(b + 1) * m]));
        }
        Ok(SymMultilinearMap { order, in_dim: d.in_dim(), out_dim: self.rows.len(), coeffs })
    }
}

/// `x ↦ c · γ(x)`.
#[derive(Debug, Clone)]
pub struct Scaled {
    factor: f64,
    inner: SharedJet,
}

impl Scaled {
    pub fn new(factor: f64, inner: SharedJet) -> Self {
        Self { factor, inner }
    }
}

impl JetFunction for Scaled {
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }

    fn out_dim(&self) -> usize {
        self.inner.out_dim()
    }

    fn max_order(&self) -> usize {
        self.inner.max_order()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.inner.eval(x).into_iter().map(|v| self.factor * v).collect()
    }

    fn derivative(&self, x: &[f64], order: usize) -> Result<SymMultilinearMap> {
        Ok(self.inner.derivative(x, order)?.scale(self.factor))
    }
}

pub fn poly_jet(p: Polynomial) -> SharedJet {
    Arc::new(p)
}

pub fn envelope_jet(family: ScalarFamily, a: Vec<f64>, max_order: usize) -> SharedJet {
    Arc::new(Envelope::new(family, a, vec![1.0], max_order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use rand::SeedableRng;

    fn d(j: &dyn JetFunction, x: &[f64], k: usize) -> Vec<f64> {
        j.derivative(x, k).unwrap().coeffs().to_vec()
    }

    #[test]
    fn square_jets() {
        let p = Polynomial::univariate(&[0.0, 0.0, 1.0]);
        assert_eq!(d(&p, &[0.3], 1), vec![0.6]);
        assert_eq!(d(&p, &[0.3], 2), vec![2.0]);
        assert_eq!(d(&p, &[0.3], 3), vec![0.0]);
        assert_eq!(d(&p, &[0.3], 0), p.eval(&[0.3]));
    }

    #[test]
    fn constants_and_linear_forms() {
        let c = Polynomial::constant(vec![1.5, -2.0], 2);
        for j in 1..4 {
            assert!(d(&c, &[0.1, 0.2], j).iter().all(|v| *v == 0.0));
        }
        let a = [0.3, -0.7, 2.0];
        let l = Polynomial::linear_form(&a);
        assert_eq!(d(&l, &[0.1, 0.2, 0.3], 1), a.to_vec());
        assert_eq!(d(&l, &[-0.4, 0.0, 0.1], 1), a.to_vec());
    }

    #[test]
    fn envelope_jets() {
        let s = envelope_jet(ScalarFamily::Sin, vec![1.0], UNBOUNDED_ORDER);
        assert_eq!(d(s.as_ref(), &[0.0], 1), vec![1.0]);
        let e = envelope_jet(ScalarFamily::Exp, vec![1.0, 0.0], UNBOUNDED_ORDER);
        assert_eq!(d(e.as_ref(), &[0.0, 0.0], 2), vec![1.0, 0.0, 0.0, 0.0]);
        let r = envelope_jet(ScalarFamily::Power { exponent: 0.5 }, vec![1.0], 3);
        assert_eq!(r.max_order(), 0);
        assert!((r.eval(&[0.25])[0] - 0.5).abs() < 1e-15);
        assert_eq!(
            r.derivative(&[0.25], 1).unwrap_err(),
            Error::OrderExceeded { requested: 1, available: 0 }
        );
    }

    #[test]
    fn op_norm_examples() {
        let id = SymMultilinearMap::linear(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let b = multilinear_op_norm(&id);
        assert!((b.lower - 1.0).abs() < 1e-12 && b.upper >= 1.0);

        // T(u, v) = ⟨a,u⟩⟨a,v⟩ with |a| = 2: norm 4, attained at u = v = a/|a|
        let a = [2.0, 0.0];
        let t = SymMultilinearMap::tensor_power(&a, 2, &[1.0]);
        let b = multilinear_op_norm(&t);
        assert!((b.lower - 4.0).abs() < 1e-12, "{b:?}");
        assert!(b.upper >= 4.0);

        let z = SymMultilinearMap::zeros(3, 2, 2);
        assert_eq!(multilinear_op_norm(&z), OpNormBracket { lower: 0.0, upper: 0.0 });
    }

    #[test]
    fn spectral_lower_bound_converges() {
        let rows = vec![vec![0.3, -1.2], vec![0.8, 0.5]];
        let m = nalgebra::DMatrix::from_row_slice(2, 2, &[0.3, -1.2, 0.8, 0.5]);
        let spectral = m.singular_values().max();
        let t = SymMultilinearMap::linear(&rows).unwrap();
        let coarse = t.op_norm_with(&SphereSample::new(2, 8));
        let fine = t.op_norm_with(&SphereSample::new(2, 2000));
        assert!(coarse.lower <= fine.lower + 1e-15);
        assert!(fine.lower <= spectral + 1e-12);
        assert!(spectral - fine.lower < 1e-5);
        assert!(fine.upper >= spectral);
    }

    #[test]
    fn symmetrize_orbit_average() {
        let t = SymMultilinearMap::from_coeffs(2, 2, 1, vec![1.0, 2.0, 4.0, 3.0]).unwrap();
        assert_eq!(t.coeffs(), &[1.0, 3.0, 3.0, 3.0]);
        assert!(t.is_symmetric(0.0));
    }

    #[test]
    fn jet_consistency_by_finite_differences() {
        // first-order decay of |(D^j(x+hv) - D^j(x))(v..)/h - D^{j+1}(x)(v,v..)|
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let jets: Vec<SharedJet> = (0..6)
            .map(|i| {
                if i % 2 == 0 {
                    poly_jet(corpus::random_polynomial(&mut rng, 2, 2, 4))
                } else {
                    corpus::random_smooth(&mut rng, 2, 2)
                }
            })
            .collect();
        let x = [0.1, -0.05];
        let v = [0.6, 0.8];
        for jet in &jets {
            for j in 0..3 {
                let err = |h: f64| {
                    let xh: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + h * b).collect();
                    let fd = jet.derivative(&xh, j).unwrap().sub(&jet.derivative(&x, j).unwrap()).unwrap();
                    let fd: Vec<f64> = fd.eval_diag(&v).iter().map(|c| c / h).collect();
                    let ex = jet.derivative(&x, j + 1).unwrap().eval_diag(&v);
                    norm(&fd.iter().zip(&ex).map(|(a, b)| a - b).collect::<Vec<_>>())
                };
                let (e3, e4) = (err(1e-3), err(1e-4));
                assert!(e4 <= 0.2 * e3 + 1e-9, "slow decay {e3} -> {e4}");
            }
        }
    }

    #[test]
    fn linear_image_maps_derivatives() {
        let inner = poly_jet(Polynomial::univariate(&[1.0, 2.0, 3.0]));
        let img = LinearImage::new(vec![vec![1.0], vec![-2.0]], inner).unwrap();
        assert_eq!(img.eval(&[1.0]), vec![6.0, -12.0]);
        assert_eq!(d(&img, &[1.0], 1), vec![8.0, -16.0]);
    }

    proptest::proptest! {
        #[test]
        fn evaluation_is_permutation_invariant_and_multilinear(
            seed in 0u64..1000,
            alpha in -2.0f64..2.0,
        ) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = corpus::random_polynomial(&mut rng, 3, 2, 3);
            let t = &p.parts()[3];
            let u = corpus::uniform_vec(&mut rng, 3);
            let v = corpus::uniform_vec(&mut rng, 3);
            let w = corpus::uniform_vec(&mut rng, 3);
            let a = t.eval(&[&u, &v, &w]).unwrap();
            let b = t.eval(&[&w, &u, &v]).unwrap();
            for (x, y) in a.iter().zip(&b) {
                proptest::prop_assert!((x - y).abs() < 1e-12);
            }
            let uv: Vec<f64> = u.iter().zip(&v).map(|(x, y)| alpha * x + y).collect();
            let lhs = t.eval(&[&uv, &v, &w]).unwrap();
            let r1 = t.eval(&[&u, &v, &w]).unwrap();
            let r2 = t.eval(&[&v, &v, &w]).unwrap();
            for i in 0..lhs.len() {
                proptest::prop_assert!((lhs[i] - alpha * r1[i] - r2[i]).abs() < 1e-12);
            }
            let s = SphereSample::default_for(3);
            let n1 = t.op_norm_with(&s);
            proptest::prop_assert!(n1.lower <= n1.upper);
        }
    }
}
