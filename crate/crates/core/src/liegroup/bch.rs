//! Truncated Baker–Campbell–Hausdorff series.
//!
//! `log(e^X e^Y)` is expanded in the free associative algebra on `X, Y` with
//! exact rational coefficients and turned into right-normed brackets by the
//! Dynkin–Specht–Wever projection `Z_n ↦ (1/n) Σ_w c_w [w]`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::algebra::LieAlgebra;
use super::matfun::Matrix;
use crate::error::{Error, Result};

type Q = Ratio<i128>;
/// Words over `{0 = X, 1 = Y}`.
type Word = Vec<u8>;
type FreeElement = BTreeMap<Word, Q>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BchConfig {
    pub truncation_order: usize,
    pub domain_margin: f64,
}

impl Default for BchConfig {
    fn default() -> Self {
        Self { truncation_order: 8, domain_margin: 0.3 }
    }
}

impl BchConfig {
    pub fn new(truncation_order: usize, domain_margin: f64) -> Result<Self> {
        if truncation_order < 2 {
            return Err(Error::ConfigInvalid(format!("BCH truncation order {truncation_order} < 2")));
        }
        if !(domain_margin > 0.0 && domain_margin < 1.0) {
            return Err(Error::ConfigInvalid(format!("BCH domain margin {domain_margin} outside (0, 1)")));
        }
        Ok(Self { truncation_order, domain_margin })
    }

    /// `ρ log 2`.
    pub fn limit(&self) -> f64 {
        self.domain_margin * std::f64::consts::LN_2
    }
}

/// One term `coeff · [w₁, [w₂, … [w_{n−1}, w_n]]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BchTerm {
    pub word: Vec<u8>,
    pub numer: i128,
    pub denom: i128,
    pub coeff: f64,
}

#[derive(Debug)]
pub struct BchSeries {
    order: usize,
    terms: Vec<BchTerm>,
}

impl BchSeries {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &[BchTerm] {
        &self.terms
    }

    /// Evaluates the series on `x, y`; shared bracket suffixes are computed once.
    pub fn eval(&self, alg: &LieAlgebra, x: &Matrix, y: &Matrix) -> Matrix {
        let mut out = x + y;
        let mut memo: HashMap<&[u8], Matrix> = HashMap::new();
        for t in &self.terms {
            if t.word.len() < 2 {
                continue;
            }
            let b = right_normed(alg, &t.word, x, y, &mut memo);
            out += b * t.coeff;
        }
        out
    }
}

fn right_normed<'w>(alg: &LieAlgebra, w: &'w [u8], x: &Matrix, y: &Matrix, memo: &mut HashMap<&'w [u8], Matrix>) -> Matrix {
    if w.len() == 1 {
        return if w[0] == 0 { x.clone() } else { y.clone() };
    }
    if let Some(m) = memo.get(w) {
        return m.clone();
    }
    let inner = right_normed(alg, &w[1..], x, y, memo);
    let head = if w[0] == 0 { x } else { y };
    let b = alg.bracket(head, &inner);
    memo.insert(w, b.clone());
    b
}

fn mul(a: &FreeElement, b: &FreeElement, max_deg: usize) -> FreeElement {
    let mut out = FreeElement::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > max_deg {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            *out.entry(w).or_insert_with(Q::zero) += *ca * *cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn generate(order: usize) -> BchSeries {
    // e^X e^Y − 1 = Σ_{p+q ≥ 1} X^p Y^q / (p! q!)
    let mut fact = vec![1i128];
    for i in 1..=order as i128 {
        fact.push(fact[fact.len() - 1] * i);
    }
    let mut w = FreeElement::new();
    for p in 0..=order {
        for q in 0..=order - p {
            if p + q == 0 {
                continue;
            }
            let mut word = vec![0u8; p];
            word.extend(std::iter::repeat_n(1u8, q));
            w.insert(word, Q::new(1, fact[p] * fact[q]));
        }
    }
    // log(1 + W) = Σ_j (−1)^{j+1} W^j / j
    let mut z = FreeElement::new();
    let mut power = w.clone();
    for j in 1..=order {
        let c = Q::new(if j % 2 == 1 { 1 } else { -1 }, j as i128);
        for (word, v) in &power {
            *z.entry(word.clone()).or_insert_with(Q::zero) += *v * c;
        }
        power = mul(&power, &w, order);
    }
    // Dynkin–Specht–Wever: right-normed bracket per word, weighted by 1/n
    let mut lie: BTreeMap<Word, Q> = BTreeMap::new();
    for (word, c) in z {
        if c.is_zero() {
            continue;
        }
        let n = word.len();
        if n >= 2 && word[n - 1] == word[n - 2] {
            continue;
        }
        *lie.entry(word).or_insert_with(Q::zero) += c / Q::from_integer(n as i128);
    }
    let mut terms: Vec<BchTerm> = lie
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(word, c)| BchTerm { coeff: *c.numer() as f64 / *c.denom() as f64, numer: *c.numer(), denom: *c.denom(), word })
        .collect();
    terms.sort_by(|a, b| a.word.len().cmp(&b.word.len()).then_with(|| a.word.cmp(&b.word)));
    BchSeries { order, terms }
}

/// Series through degree `order`, generated once per order.
pub fn bch_series(order: usize) -> Arc<BchSeries> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<BchSeries>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("bch cache").get(&order) {
        return s.clone();
    }
    let s = Arc::new(generate(order));
    cache.lock().expect("bch cache").entry(order).or_insert(s).clone()
}

/// `bch_N(x, y)` for `‖x‖_𝔤 + ‖y‖_𝔤 ≤ ρ log 2`.
pub fn bch_truncated(alg: &LieAlgebra, x: &Matrix, y: &Matrix, cfg: &BchConfig) -> Result<Matrix> {
    let sum = alg.norm(x) + alg.norm(y);
    let limit = cfg.limit();
    if !(sum <= limit) {
        return Err(Error::OutsideConvergenceDomain { sum, limit });
    }
    Ok(bch_series(cfg.truncation_order).eval(alg, x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::matfun::{matrix_exp, matrix_log, DEFAULT_TOL};
    use rand::{Rng, SeedableRng};

    fn coeff(series: &BchSeries, word: &[u8]) -> Option<(i128, i128)> {
        series.terms().iter().find(|t| t.word == word).map(|t| (t.numer, t.denom))
    }

    #[test]
    fn low_order_terms() {
        let s = bch_series(3);
        assert_eq!(coeff(&s, &[0]), Some((1, 1)));
        assert_eq!(coeff(&s, &[1]), Some((1, 1)));
        // ½[X,Y] projects to ¼[X,Y] − ¼[Y,X]
        assert_eq!(coeff(&s, &[0, 1]), Some((1, 4)));
        assert_eq!(coeff(&s, &[1, 0]), Some((-1, 4)));
        let g = LieAlgebra::sl2();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let x = g.random_element(&mut rng, 0.5);
            let y = g.random_element(&mut rng, 0.5);
            let xy = g.bracket(&x, &y);
            let two = &x + &y + &xy * 0.5;
            assert!((bch_series(2).eval(&g, &x, &y) - &two).norm() < 1e-15);
            let three = two + (g.bracket(&x, &xy) - g.bracket(&y, &xy)) * (1.0 / 12.0);
            assert!((s.eval(&g, &x, &y) - three).norm() < 1e-15);
        }
    }

    #[test]
    fn degree_four_vanishes_on_commutator_check() {
        // Z₄ = −[Y,[X,[X,Y]]]/24 as a function on so3
        let g = LieAlgebra::so3();
        let s4 = bch_series(4);
        let s3 = bch_series(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let x = g.random_element(&mut rng, 0.3);
            let y = g.random_element(&mut rng, 0.3);
            let diff = s4.eval(&g, &x, &y) - s3.eval(&g, &x, &y);
            let want = g.bracket(&y, &g.bracket(&x, &g.bracket(&x, &y))) * (-1.0 / 24.0);
            assert!((diff - want).norm() < 1e-15);
        }
    }

    #[test]
    fn trivial_inputs() {
        let g = LieAlgebra::sl2();
        let cfg = BchConfig::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let x = g.random_element(&mut rng, 0.04);
        let z = Matrix::zeros(2, 2);
        assert_eq!(bch_truncated(&g, &x, &z, &cfg).unwrap(), x);
        assert_eq!(bch_truncated(&g, &z, &x, &cfg).unwrap(), x);
        let a = LieAlgebra::abelian(3);
        let (p, q) = (a.random_element(&mut rng, 0.05), a.random_element(&mut rng, 0.05));
        assert_eq!(bch_truncated(&a, &p, &q, &cfg).unwrap(), &p + &q);
    }

    #[test]
    fn domain_enforced() {
        let g = LieAlgebra::so3();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let x = g.random_element(&mut rng, 0.1);
        let err = bch_truncated(&g, &x, &x, &BchConfig::default()).unwrap_err();
        assert!(matches!(err, Error::OutsideConvergenceDomain { sum, .. } if (sum - 0.4).abs() < 1e-12));
        assert!(BchConfig::new(1, 0.3).is_err());
        assert!(BchConfig::new(4, 1.0).is_err());
    }

    #[test]
    fn second_order_error_is_cubic() {
        let g = LieAlgebra::so3();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let x0 = g.random_element(&mut rng, 1.0);
        let y0 = g.random_element(&mut rng, 1.0);
        let err = |t: f64| {
            let (x, y) = (&x0 * t, &y0 * t);
            let z = bch_series(2).eval(&g, &x, &y);
            (matrix_exp(&x, DEFAULT_TOL) * matrix_exp(&y, DEFAULT_TOL) - matrix_exp(&z, DEFAULT_TOL)).norm()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 8.0).abs() < 0.5, "{ratio}");
    }

    #[test]
    fn fidelity_against_matrix_log() {
        let cfg = BchConfig::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for g in [LieAlgebra::so3(), LieAlgebra::sl2()] {
            for _ in 0..50 {
                let rx: f64 = rng.gen_range(0.0..0.05);
                let x = g.random_element(&mut rng, rx);
                let ry: f64 = rng.gen_range(0.0..0.05);
                let y = g.random_element(&mut rng, ry);
                let z = bch_truncated(&g, &x, &y, &cfg).unwrap();
                let l = matrix_log(&(matrix_exp(&x, DEFAULT_TOL) * matrix_exp(&y, DEFAULT_TOL)), 1e-13).unwrap();
                assert!((z - l).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn heisenberg_exact_at_two() {
        let g = LieAlgebra::heisenberg();
        let cfg = BchConfig::new(2, 0.3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = g.random_element(&mut rng, 0.05);
            let y = g.random_element(&mut rng, 0.05);
            let z = bch_truncated(&g, &x, &y, &cfg).unwrap();
            let lhs = matrix_exp(&x, DEFAULT_TOL) * matrix_exp(&y, DEFAULT_TOL);
            assert!((lhs - matrix_exp(&z, DEFAULT_TOL)).norm() < 1e-15);
        }
    }

    #[test]
    fn cache_is_shared() {
        assert!(Arc::ptr_eq(&bch_series(5), &bch_series(5)));
        assert_eq!(bch_series(8).order(), 8);
    }
}
