//! Lagrange interpolation on a node set `F ⊂ (0, 1)`, extraction of
//! homogeneous components along rays, and Taylor expansion with integral
//! remainder.

use serde::Serialize;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::funcmodel::{norm, JetFunction, SymMultilinearMap};

/// Node set and its Lagrange coefficient matrix: `lambda[μ][j]` is the
/// coefficient of `t^j` in `Λ_μ(t) = ∏_{ν ≠ μ} (t − ν)/(μ − ν)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationNodes {
    nodes: Vec<f64>,
    lambda: Vec<Vec<f64>>,
}

impl InterpolationNodes {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        let lambda = lagrange_coefficients(&nodes)?;
        Ok(Self { nodes, lambda })
    }

    /// `{ i / (k + 2) : i = 1 … k + 1 }`.
    pub fn uniform(k: usize) -> Self {
        let nodes = (1..=k + 1).map(|i| i as f64 / (k as f64 + 2.0)).collect();
        Self::new(nodes).expect("uniform nodes are distinct and interior")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn lambda(&self) -> &[Vec<f64>] {
        &self.lambda
    }

    /// Degree `k = |F| − 1` of the interpolating polynomials.
    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `Σ_μ |λ_{μ,j}|`, zero for `j > k`.
    pub fn constant(&self, j: usize) -> f64 {
        self.lambda.iter().map(|row| row.get(j).map_or(0.0, |c| c.abs())).sum()
    }

    /// Monomial coefficients `c_j = Σ_μ g(μ) λ_{μ,j}` of the interpolant of
    /// vector values `g(μ)`.
    pub fn extract(&self, values: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if values.len() != self.nodes.len() {
            return Err(Error::SizeMismatch { expected: self.nodes.len(), got: values.len() });
        }
        let m = values[0].len();
        if values.iter().any(|v| v.len() != m) {
            return Err(Error::DimensionMismatch("interpolation values differ in length".into()));
        }
        Ok((0..self.nodes.len())
            .map(|j| {
                (0..m)
                    .map(|o| values.iter().zip(&self.lambda).map(|(g, row)| g[o] * row[j]).sum())
                    .collect()
            })
            .collect())
    }
}

/// Expands each Lagrange basis polynomial into monomial coefficients.
pub fn lagrange_coefficients(nodes: &[f64]) -> Result<Vec<Vec<f64>>> {
    if nodes.is_empty() {
        return Err(Error::SizeMismatch { expected: 1, got: 0 });
    }
    if let Some(&bad) = nodes.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::NodeOutOfRange(bad));
    }
    for (i, a) in nodes.iter().enumerate() {
        if nodes[..i].contains(a) {
            return Err(Error::DuplicateNodes);
        }
    }
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(mu, &m)| {
            let mut poly = vec![1.0];
            for (nu, &n) in nodes.iter().enumerate() {
                if nu == mu {
                    continue;
                }
                // poly *= (t - n) / (m - n)
                let d = m - n;
                let mut next = vec![0.0; poly.len() + 1];
                for (j, c) in poly.iter().enumerate() {
                    next[j + 1] += c / d;
                    next[j] -= n * c / d;
                }
                poly = next;
            }
            poly
        })
        .collect())
}

pub fn interpolation_constant(nodes: &InterpolationNodes, j: usize) -> f64 {
    nodes.constant(j)
}

pub fn extract_homogeneous(nodes: &InterpolationNodes, values: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    nodes.extract(values)
}

/// Grid points of the closed Euclidean unit ball in ℝⁿ (cell centers of the
/// cube `[-1, 1]ⁿ` that fall inside), plus the origin.
pub fn unit_ball_grid(n: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let h = 2.0 / per_axis as f64;
    let axis: Vec<f64> = (0..per_axis).map(|i| -1.0 + (i as f64 + 0.5) * h).collect();
    let mut out = vec![vec![0.0; n]];
    let mut idx = vec![0usize; n];
    'outer: loop {
        let p: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
        if norm(&p) <= 1.0 {
            out.push(p);
        }
        for a in (0..n).rev() {
            idx[a] += 1;
            if idx[a] < per_axis {
                continue 'outer;
            }
            idx[a] = 0;
        }
        return out;
    }
}

/// Gauss–Legendre rule mapped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| w * f(*t)).sum()
    }

    /// Componentwise integral of a vector-valued integrand.
    pub fn integrate_vec<F: FnMut(f64) -> Result<Vec<f64>>>(&self, dim: usize, mut f: F) -> Result<Vec<f64>> {
        let mut acc = vec![0.0; dim];
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            for (a, v) in acc.iter_mut().zip(f(*t)?) {
                *a += w * v;
            }
        }
        Ok(acc)
    }
}

impl Default for GaussLegendre {
    fn default() -> Self {
        Self::new(32)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn shifted(x0: &[f64], v: &[f64], t: f64) -> Vec<f64> {
    x0.iter().zip(v).map(|(a, b)| a + t * b).collect()
}

fn check_segment(domain: &Domain, x0: &[f64], v: &[f64]) -> Result<()> {
    if x0.len() != domain.dim() || v.len() != domain.dim() {
        return Err(Error::DimensionMismatch("segment endpoints".into()));
    }
    // convex domain: endpoints interior implies the whole segment is
    if domain.contains(x0) && domain.contains(&shifted(x0, v, 1.0)) {
        Ok(())
    } else {
        Err(Error::SegmentLeavesDomain)
    }
}

/// `Σ_{j ≤ k} γ^{(j)}(x₀)(v, …, v) / j!`.
pub fn taylor_polynomial(gamma: &dyn JetFunction, x0: &[f64], v: &[f64], k: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; gamma.out_dim()];
    for j in 0..=k {
        let term = gamma.derivative(x0, j)?.eval_diag(v);
        let f = factorial(j);
        for (o, t) in out.iter_mut().zip(term) {
            *o += t / f;
        }
    }
    Ok(out)
}

/// Which integral remainder to evaluate.
///
/// * `A`: `∫₀¹ (1−t)^{k−1}/(k−1)! γ^{(k)}(x₀+tv)(v,…,v) dt`, pairing with the
///   degree `k − 1` Taylor polynomial.
/// * `B`: the same weight against `(γ^{(k)}(x₀+tv) − γ^{(k)}(x₀))(v,…,v)`,
///   pairing with the degree `k` Taylor polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RemainderForm {
    A,
    B,
}

impl RemainderForm {
    /// Degree of the Taylor polynomial this remainder completes.
    pub fn polynomial_degree(self, k: usize) -> usize {
        match self {
            RemainderForm::A => k - 1,
            RemainderForm::B => k,
        }
    }
}

pub fn taylor_remainder(
    gamma: &dyn JetFunction,
    domain: &Domain,
    x0: &[f64],
    v: &[f64],
    k: usize,
    form: RemainderForm,
    quad: &GaussLegendre,
) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidIndex { k, s: 0.0, reason: "remainder needs k >= 1".into() });
    }
    check_segment(domain, x0, v)?;
    let base = match form {
        RemainderForm::A => None,
        RemainderForm::B => Some(gamma.derivative(x0, k)?),
    };
    let kf = factorial(k - 1);
    quad.integrate_vec(gamma.out_dim(), |t| {
        let w = (1.0 - t).powi(k as i32 - 1) / kf;
        let mut d = gamma.derivative(&shifted(x0, v, t), k)?;
        if let Some(b) = &base {
            d = d.sub(b)?;
        }
        Ok(d.eval_diag(v).into_iter().map(|c| w * c).collect())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrechetEstimate {
    pub lhs: f64,
    pub rhs: f64,
}

/// `lhs = ‖γ(x+v) − γ(x) − γ′(x)v‖ / ‖v‖` against
/// `rhs = ∫₀¹ ‖γ′(x+tv) − γ′(x)‖_op dt` (upper operator-norm bracket).
pub fn frechet_remainder_estimate(
    gamma: &dyn JetFunction,
    domain: &Domain,
    x: &[f64],
    v: &[f64],
    quad: &GaussLegendre,
) -> Result<FrechetEstimate> {
    check_segment(domain, x, v)?;
    let nv = norm(v);
    if nv == 0.0 {
        return Ok(FrechetEstimate { lhs: 0.0, rhs: 0.0 });
    }
    let d0 = gamma.derivative(x, 1)?;
    let lin = d0.eval_diag(v);
    let fx = gamma.eval(x);
    let fxv = gamma.eval(&shifted(x, v, 1.0));
    let r: Vec<f64> = (0..fx.len()).map(|o| fxv[o] - fx[o] - lin[o]).collect();
    let lhs = norm(&r) / nv;
    let mut err = None;
    let rhs = quad.integrate(|t| {
        match gamma.derivative(&shifted(x, v, t), 1).and_then(|d| d.sub(&d0)) {
            Ok(diff) => op_upper(&diff),
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(FrechetEstimate { lhs, rhs })
}

fn op_upper(t: &SymMultilinearMap) -> f64 {
    crate::funcmodel::multilinear_op_norm(t).upper
}
