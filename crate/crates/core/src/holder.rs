//! Hölder norms and seminorms, estimated from below on a frozen sample.
//!
//! Norms on ℝⁿ and ℝ^m are Euclidean; derivative values carry the multilinear
//! operator norm, estimated on the diagonal `T(v, …, v)` over a unit-sphere
//! sample. `p_{(k,s)}(γ)` is evaluated as `p_{(0,s)}(γ^{(k)})`.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, SamplePlan, SampleSet};
use crate::error::{Error, Result};
use crate::funcmodel::{multilinear_op_norm, norm, JetFunction, SphereSample};
use crate::polyinterp::InterpolationNodes;
use crate::verify::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderIndex {
    pub k: usize,
    pub s: f64,
}

impl HolderIndex {
    pub fn new(k: usize, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidIndex { k, s, reason: "s must lie in [0, 1]".into() });
        }
        Ok(Self { k, s })
    }

    /// Ordering key `k + s`.
    pub fn key(&self) -> f64 {
        self.k as f64 + self.s
    }

    pub fn is_sup_only(&self) -> bool {
        self.k == 0 && self.s == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    pub index: HolderIndex,
    pub sup_part: f64,
    pub seminorm_part: f64,
    pub total: f64,
    pub plan: SamplePlan,
}

/// Per-order samples of `γ^{(k)}`: operator-norm lower bounds at each point and
/// of the difference `γ^{(k)}(x) − γ^{(k)}(y)` on each pair.
#[derive(Debug)]
struct OrderSamples {
    point_norms: Vec<f64>,
    deltas: Vec<f64>,
}

/// A function bound to a sample set. Every estimate taken from one profile
/// shares the same points and pairs.
pub struct HolderProfile<'a> {
    gamma: &'a dyn JetFunction,
    set: &'a SampleSet,
    sphere: SphereSample,
    cache: Mutex<BTreeMap<usize, Arc<OrderSamples>>>,
}

impl<'a> HolderProfile<'a> {
    pub fn new(gamma: &'a dyn JetFunction, set: &'a SampleSet) -> Self {
        let sphere = SphereSample::default_for(gamma.in_dim());
        Self::with_sphere(gamma, set, sphere)
    }

    pub fn with_sphere(gamma: &'a dyn JetFunction, set: &'a SampleSet, sphere: SphereSample) -> Self {
        Self { gamma, set, sphere, cache: Mutex::new(BTreeMap::new()) }
    }

    pub fn sample_set(&self) -> &SampleSet {
        self.set
    }

    fn order(&self, k: usize) -> Result<Arc<OrderSamples>> {
        if let Some(s) = self.cache.lock().expect("cache").get(&k) {
            return Ok(s.clone());
        }
        if k > self.gamma.max_order() {
            return Err(Error::OrderExceeded { requested: k, available: self.gamma.max_order() });
        }
        let samples = Arc::new(self.compute(k)?);
        self.cache.lock().expect("cache").insert(k, samples.clone());
        Ok(samples)
    }

    fn compute(&self, k: usize) -> Result<OrderSamples> {
        // diagonal values T_x(v, …, v) per direction; differences are linear in T
        let dirs: &[Vec<f64>] = if k == 0 { &[] } else { self.sphere.directions() };
        let diag: Vec<Vec<Vec<f64>>> = self
            .set
            .points
            .par_iter()
            .map(|x| {
                let t = self.gamma.derivative(x, k)?;
                Ok(if k == 0 {
                    vec![t.coeffs().to_vec()]
                } else {
                    dirs.iter().map(|v| t.eval_diag(v)).collect()
                })
            })
            .collect::<Result<_>>()?;
        let point_norms = diag
            .iter()
            .map(|vals| vals.iter().map(|v| norm(v)).fold(0.0, f64::max))
            .collect();
        let deltas = self
            .set
            .pairs
            .par_iter()
            .map(|&(i, j)| {
                diag[i]
                    .iter()
                    .zip(&diag[j])
                    .map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt())
                    .fold(0.0, f64::max)
            })
            .collect();
        Ok(OrderSamples { point_norms, deltas })
    }

    /// Sampled `‖γ‖∞`.
    pub fn sup(&self) -> Result<f64> {
        Ok(max(&self.order(0)?.point_norms))
    }

    /// Sampled `sup_x ‖γ^{(k)}(x)‖_op`.
    pub fn derivative_sup(&self, k: usize) -> Result<f64> {
        Ok(max(&self.order(k)?.point_norms))
    }

    /// Sampled `p_{(0,s)}(γ^{(k)})` for `s > 0` as the max of per-pair quotients.
    pub fn quotient_sup(&self, k: usize, s: f64) -> Result<f64> {
        Ok(self.quotients(k, s)?.into_iter().fold(0.0, f64::max))
    }

    /// Per-pair quotients `‖Δγ^{(k)}‖ / ‖x − y‖^s`.
    pub fn quotients(&self, k: usize, s: f64) -> Result<Vec<f64>> {
        let o = self.order(k)?;
        Ok(o.deltas.iter().zip(&self.set.dists).map(|(d, r)| d / r.powf(s)).collect())
    }

    /// Sampled `p_{(k,s)}(γ)`; `p_{(0,0)} = ‖·‖∞`.
    pub fn seminorm(&self, idx: HolderIndex) -> Result<f64> {
        if idx.s == 0.0 {
            self.derivative_sup(idx.k)
        } else {
            self.quotient_sup(idx.k, idx.s)
        }
    }

    pub fn norm(&self, idx: HolderIndex) -> Result<NormEstimate> {
        let sup_part = self.sup()?;
        let seminorm_part = self.seminorm(idx)?;
        let total = if idx.is_sup_only() { sup_part } else { sup_part + seminorm_part };
        Ok(NormEstimate { index: idx, sup_part, seminorm_part, total, plan: self.set.plan.clone() })
    }

    pub fn norm_total(&self, idx: HolderIndex) -> Result<f64> {
        Ok(self.norm(idx)?.total)
    }
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

pub fn sup_norm_estimate(gamma: &dyn JetFunction, d: &Domain, plan: &SamplePlan) -> f64 {
    d.sample_points(plan).iter().map(|x| norm(&gamma.eval(x))).fold(0.0, f64::max)
}

pub fn holder_seminorm_estimate(gamma: &dyn JetFunction, idx: HolderIndex, d: &Domain, plan: &SamplePlan) -> Result<f64> {
    if idx.k > gamma.max_order() {
        return Err(Error::OrderExceeded { requested: idx.k, available: gamma.max_order() });
    }
    if idx.s == 0.0 {
        // no pairs needed
        return d
            .sample_points(plan)
            .iter()
            .map(|x| Ok(multilinear_op_norm(&gamma.derivative(x, idx.k)?).lower))
            .try_fold(0.0, |m, v: Result<f64>| Ok(f64::max(m, v?)));
    }
    let set = d.sample_set(plan)?;
    HolderProfile::new(gamma, &set).seminorm(idx)
}

pub fn holder_norm_estimate(gamma: &dyn JetFunction, idx: HolderIndex, d: &Domain, plan: &SamplePlan) -> Result<NormEstimate> {
    let set = d.sample_set(plan)?;
    HolderProfile::new(gamma, &set).norm(idx)
}

/// Constants of the point-evaluation bound `‖γ^{(k)}(x₀)‖_op ≤ C₄ ‖γ‖_{(k,s)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointEvalConstants {
    pub k: usize,
    pub s: f64,
    pub eps0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn point_eval_from_radius(k: usize, exponent: f64, s: f64, eps0: f64) -> PointEvalConstants {
    let c1 = eps0.powf(exponent) / factorial(k - 1);
    let c2 = 1.0 + c1;
    let c3 = c2 * InterpolationNodes::uniform(k).constant(k);
    let c4 = c3 * factorial(k) / eps0.powi(k as i32);
    PointEvalConstants { k, s, eps0, c1, c2, c3, c4 }
}

fn eps0_at(d: &Domain, x0: &[f64], margin: f64) -> Result<f64> {
    if !d.contains(x0) {
        return Err(Error::BoundaryPoint);
    }
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::ConfigInvalid(format!("margin {margin} outside [0, 1)")));
    }
    Ok(d.boundary_distance(x0) * (1.0 - margin))
}

/// `ε₀ = dist(x₀, ∂Ω)(1 − margin)`, `C₁ = ε₀^{k+s}/(k−1)!`, `C₂ = 1 + C₁`,
/// `C₃ = C₂ Σ_μ |λ_{μ,k}|`, `C₄ = C₃ k!/ε₀^k`, with uniform nodes.
pub fn point_eval_constants(k: usize, s: f64, d: &Domain, x0: &[f64], margin: f64) -> Result<PointEvalConstants> {
    if k == 0 {
        return Err(Error::InvalidIndex { k, s, reason: "point-evaluation constants need k >= 1".into() });
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidIndex { k, s, reason: "s must lie in (0, 1]".into() });
    }
    let eps0 = eps0_at(d, x0, margin)?;
    Ok(point_eval_from_radius(k, k as f64 + s, s, eps0))
}

/// The same chain with `ε₀^k` in place of `ε₀^{k+s}`: since `ε₀ ≤ 1` this
/// dominates every `s ∈ (0, 1]` at once.
pub fn point_eval_constants_uniform(k: usize, d: &Domain, x0: &[f64], margin: f64) -> Result<PointEvalConstants> {
    if k == 0 {
        return Err(Error::InvalidIndex { k, s: 0.0, reason: "point-evaluation constants need k >= 1".into() });
    }
    let eps0 = eps0_at(d, x0, margin)?;
    Ok(point_eval_from_radius(k, k as f64, 0.0, eps0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InclusionConstant {
    pub k: usize,
    /// Uniform `C₄` one order up (bounds `sup ‖γ^{(k+1)}‖` when `s > 0`).
    pub c4_next: f64,
    /// Uniform `C₄` at order `k` (the `s = 0` route); zero for `k = 0`.
    pub c4_here: f64,
    pub diameter: f64,
    pub value: f64,
}

/// Upper bound `D_k` for the inclusion `BC^{k+1,s} → BC^{k,s}`, uniform in `s`
/// and in the codomain, with `x₀` the incenter.
///
/// For `s > 0`: `p_{(0,s)}(γ^{(k)}) ≤ diam^{1−s} p_{(0,1)}(γ^{(k)}) = sup ‖γ^{(k+1)}‖`
/// and `sup ‖γ^{(k+1)}‖ ≤ diam^s p_{(k+1,s)}(γ) + ‖γ^{(k+1)}(x₀)‖ ≤ (1 + C₄)‖γ‖_{(k+1,s)}`.
/// For `s = 0`, `k ≥ 1`: `sup ‖γ^{(k)}‖ ≤ ‖γ^{(k)}(x₀)‖ + diam · sup ‖γ^{(k+1)}‖`
/// with `‖γ‖_{(k,1)} = ‖γ‖_{(k+1,0)}`. Adding `‖γ‖∞ ≤ ‖γ‖_{(k+1,s)}` gives
/// `D_k = 1 + max(1 + C₄(k+1), C₄(k) + diam)`.
pub fn inclusion_constant_dk(k: usize, d: &Domain) -> InclusionConstant {
    let x0 = d.incenter();
    let c4_next = point_eval_constants_uniform(k + 1, d, &x0, 0.0).expect("incenter is interior").c4;
    let c4_here = if k == 0 {
        0.0
    } else {
        point_eval_constants_uniform(k, d, &x0, 0.0).expect("incenter is interior").c4
    };
    let s0_route = if k == 0 { 0.0 } else { c4_here + d.diameter() };
    let value = 1.0 + f64::max(1.0 + c4_next, s0_route);
    InclusionConstant { k, c4_next, c4_here, diameter: d.diameter(), value }
}

/// `p̂_{(k,1)}` and `p̂_{(k+1,0)}` on one profile, which should agree.
pub fn isometry_pair(profile: &HolderProfile<'_>, k: usize) -> Result<(f64, f64)> {
    Ok((profile.quotient_sup(k, 1.0)?, profile.derivative_sup(k + 1)?))
}

/// `p_{(k,s₁)} ≤ diam^{s₂−s₁} p_{(k,s₂)}` and the matching norm inequality
/// with factor `max{1, diam^{s₂−s₁}}`.
pub fn exponent_inclusion_checks(
    profile: &HolderProfile<'_>,
    k: usize,
    s1: f64,
    s2: f64,
    diam: f64,
    tol: f64,
) -> Result<[Verdict; 2]> {
    let f = diam.powf(s2 - s1);
    let p1 = profile.quotient_sup(k, s1)?;
    let p2 = profile.quotient_sup(k, s2)?;
    let sup = profile.sup()?;
    Ok([
        Verdict::leq(p1, f * p2, tol),
        Verdict::leq(sup + p1, f.max(1.0) * (sup + p2), tol),
    ])
}

/// `‖γ^{(k)}(x₀)‖_op ≤ C₄ ‖γ‖_{(k,s)}` with the exact-jet upper bracket on the left.
pub fn point_evaluation_check(
    gamma: &dyn JetFunction,
    profile: &HolderProfile<'_>,
    consts: &PointEvalConstants,
    x0: &[f64],
    tol: f64,
) -> Result<Verdict> {
    let lhs = multilinear_op_norm(&gamma.derivative(x0, consts.k)?).upper;
    let rhs = consts.c4 * profile.norm_total(HolderIndex::new(consts.k, consts.s)?)?;
    Ok(Verdict::leq(lhs, rhs, tol))
}

/// `‖γ‖_{(k,s)} ≤ D_k ‖γ‖_{(k+1,s)}`.
pub fn inclusion_dk_check(profile: &HolderProfile<'_>, k: usize, s: f64, dk: f64, tol: f64) -> Result<Verdict> {
    let lhs = profile.norm_total(HolderIndex::new(k, s)?)?;
    let rhs = dk * profile.norm_total(HolderIndex::new(k + 1, s)?)?;
    Ok(Verdict::leq(lhs, rhs, tol))
}

/// Both sides of `‖γ‖_{(k+1,s)} ≤ ‖γ‖∞ + ‖γ′‖_{(k,s)} ≤ ‖γ‖_{(k+1,s)} + ‖γ‖_{(1,0)}`.
/// `‖γ′‖_{(k,s)}` is `‖γ′‖∞ + p_{(k,s)}(γ′)`, and `p_{(k,s)}(γ′)` is read off
/// the same samples as `p_{(k+1,s)}(γ)`.
pub fn derivative_embedding_checks(profile: &HolderProfile<'_>, k: usize, s: f64, tol: f64) -> Result<[Verdict; 2]> {
    let top = profile.norm_total(HolderIndex::new(k + 1, s)?)?;
    let sup = profile.sup()?;
    let dsup = profile.derivative_sup(1)?;
    let derivative_norm = if k == 0 && s == 0.0 {
        dsup
    } else {
        dsup + profile.seminorm(HolderIndex::new(k + 1, s)?)?
    };
    let mid = sup + derivative_norm;
    let c10 = profile.norm_total(HolderIndex::new(1, 0.0)?)?;
    Ok([Verdict::leq(top, mid, tol), Verdict::leq(mid, top + c10, tol)])
}

/// `p_{(0,t)}(γ^{(k)}) ≤ p_{(0,s)}(γ^{(k)})^λ p_{(0,u)}(γ^{(k)})^{1−λ}` with
/// `t = λs + (1−λ)u`, `0 < s < u ≤ 1`.
pub fn log_convexity_seminorm_check(profile: &HolderProfile<'_>, k: usize, s: f64, u: f64, lambda: f64, tol: f64) -> Result<Verdict> {
    check_triple(s, u, lambda, false)?;
    let t = lambda * s + (1.0 - lambda) * u;
    let lhs = profile.quotient_sup(k, t)?;
    let rhs = profile.quotient_sup(k, s)?.powf(lambda) * profile.quotient_sup(k, u)?.powf(1.0 - lambda);
    Ok(Verdict::leq(lhs, rhs, tol))
}

/// `‖γ‖_{(0,t)} ≤ 2 ‖γ‖_{(0,s)}^λ ‖γ‖_{(0,u)}^{1−λ}`, `0 < s < u ≤ 1`.
///
/// At `s = 0` the inequality is false in general (the identity on `(−½, ½)`
/// with `λ` near 1 violates it), so `s = 0` is rejected.
pub fn log_convexity_norm_check(profile: &HolderProfile<'_>, s: f64, u: f64, lambda: f64, tol: f64) -> Result<Verdict> {
    check_triple(s, u, lambda, false)?;
    log_convexity_norm_verdict(profile, s, u, lambda, tol)
}

pub(crate) fn log_convexity_norm_verdict(profile: &HolderProfile<'_>, s: f64, u: f64, lambda: f64, tol: f64) -> Result<Verdict> {
    let t = lambda * s + (1.0 - lambda) * u;
    let n = |r: f64| profile.norm_total(HolderIndex::new(0, r)?);
    let lhs = n(t)?;
    let rhs = 2.0 * n(s)?.powf(lambda) * n(u)?.powf(1.0 - lambda);
    Ok(Verdict::leq(lhs, rhs, tol))
}

/// For `γ` rescaled so that the sampled `‖γ‖_{(k,u)}` is 1:
/// `p_{(0,t)}(γ^{(k)}) ≤ p_{(0,s)}(γ^{(k)})^λ`, `t = λs + (1−λ)u`.
pub fn unit_ball_interpolation_check(profile: &HolderProfile<'_>, k: usize, s: f64, u: f64, lambda: f64, tol: f64) -> Result<Verdict> {
    check_triple(s, u, lambda, false)?;
    let scale = profile.norm_total(HolderIndex::new(k, u)?)?;
    if scale == 0.0 {
        return Ok(Verdict::leq(0.0, 0.0, tol));
    }
    let t = lambda * s + (1.0 - lambda) * u;
    let lhs = profile.quotient_sup(k, t)? / scale;
    let rhs = (profile.quotient_sup(k, s)? / scale).powf(lambda);
    Ok(Verdict::leq(lhs, rhs, tol))
}

fn check_triple(s: f64, u: f64, lambda: f64, allow_zero: bool) -> Result<()> {
    let s_ok = if allow_zero { s >= 0.0 } else { s > 0.0 };
    if !(s_ok && s < u && u <= 1.0 && lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidIndex {
            k: 0,
            s,
            reason: format!("need 0 < s < u <= 1 and 0 < λ < 1 (u = {u}, λ = {lambda})"),
        });
    }
    Ok(())
}
