//! Norms along the exponents `t_n = s + (1 − s)/n`.

use serde::Serialize;

use crate::domain::{Domain, SamplePlan};
use crate::error::{Error, Result};
use crate::funcmodel::JetFunction;
use crate::holder::{HolderIndex, HolderProfile, NormEstimate};
use crate::verify::Verdict;

#[derive(Debug, Clone, Serialize)]
pub struct ChainEntry {
    pub n: usize,
    pub t: f64,
    pub estimate: NormEstimate,
}

pub fn chain_exponent(s: f64, n: usize) -> f64 {
    s + (1.0 - s) / n as f64
}

/// `‖γ‖_{(k, t_n)}` for `n = 1 … N` on one shared sample set.
pub fn chain_norms(gamma: &dyn JetFunction, k: usize, s: f64, n_max: usize, d: &Domain, plan: &SamplePlan) -> Result<Vec<ChainEntry>> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::InvalidIndex { k, s, reason: "chain base exponent must lie in [0, 1)".into() });
    }
    if n_max < 2 {
        return Err(Error::ConfigInvalid(format!("chain length {n_max} < 2")));
    }
    let set = d.sample_set(plan)?;
    let profile = HolderProfile::new(gamma, &set);
    chain_on_profile(&profile, k, s, n_max)
}

pub fn chain_on_profile(profile: &HolderProfile<'_>, k: usize, s: f64, n_max: usize) -> Result<Vec<ChainEntry>> {
    (1..=n_max)
        .map(|n| {
            let t = chain_exponent(s, n);
            Ok(ChainEntry { n, t, estimate: profile.norm(HolderIndex::new(k, t)?)? })
        })
        .collect()
}

/// `‖γ‖_{(k,t_{n+1})} ≤ ‖γ‖_{(k,t_n)}` for consecutive entries.
pub fn chain_monotone(entries: &[ChainEntry], tol: f64) -> Vec<Verdict> {
    entries.windows(2).map(|w| Verdict::leq(w[1].estimate.total, w[0].estimate.total, tol)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::Polynomial;

    #[test]
    fn exponents() {
        assert_eq!(chain_exponent(0.0, 4), 0.25);
        assert_eq!(chain_exponent(0.5, 1), 1.0);
        assert!((chain_exponent(0.25, 3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constants_are_flat() {
        let d = Domain::ball(vec![0.0, 0.0], 0.5).unwrap();
        let c = Polynomial::constant(vec![0.6, 0.8], 2);
        let ch = chain_norms(&c, 1, 0.25, 6, &d, &SamplePlan::grid(5)).unwrap();
        assert!(ch.iter().all(|e| (e.estimate.total - 1.0).abs() < 1e-15));
    }

    #[test]
    fn identity_on_unit_interval_decreases() {
        let d = Domain::cube(vec![0.0], vec![1.0]).unwrap();
        let id = Polynomial::univariate(&[0.0, 1.0]);
        let ch = chain_norms(&id, 0, 0.0, 10, &d, &SamplePlan::grid(100)).unwrap();
        assert!(chain_monotone(&ch, 0.0).iter().all(|v| v.pass));
        assert!(ch[0].estimate.total > ch[9].estimate.total);
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = Domain::cube(vec![0.0], vec![1.0]).unwrap();
        let id = Polynomial::univariate(&[0.0, 1.0]);
        assert!(chain_norms(&id, 0, 1.0, 5, &d, &SamplePlan::grid(5)).is_err());
        assert!(chain_norms(&id, 0, 0.0, 1, &d, &SamplePlan::grid(5)).is_err());
    }
}
