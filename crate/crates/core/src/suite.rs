//! Seeded verification suites over a generated or loaded corpus.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{self, CorpusFile};
use crate::domain::{Domain, SamplePlan, SampleSet, Shape};
use crate::error::{Error, Result};
use crate::funcmodel::{norm, poly_jet, JetFunction, Polynomial, Scaled, SharedJet};
use crate::holder::{
    derivative_embedding_checks, exponent_inclusion_checks, inclusion_dk_check, isometry_pair, point_eval_constants,
    log_convexity_norm_check, log_convexity_seminorm_check, point_evaluation_check, unit_ball_interpolation_check,
    HolderIndex, HolderProfile,
};
use crate::liegroup::chain::{chain_monotone, chain_on_profile};
use crate::liegroup::matfun::{matrix_exp, to_matrix, Matrix, DEFAULT_TOL};
use crate::liegroup::{
    bch_truncated, exp_map, group_inv, group_mul, local_normal_form, rescale_compatible, BchConfig, GroupElementWord,
    LieAlgebra, Letter,
};
use crate::polyinterp::{taylor_polynomial, taylor_remainder, unit_ball_grid, GaussLegendre, InterpolationNodes, RemainderForm};
use crate::product::{
    pointwise_product, product_inequality_check, star_probe, subadditivity_check, BilinearForm, ProductConstants,
};
use crate::report::{CheckRecord, ConstantsTable, Report, SuiteResult, REPORT_SCHEMA_VERSION};
use crate::verify::Verdict;

pub const SUITES: [&str; 9] = ["taylor", "interp", "norms", "inclusions", "convexity", "product", "bch", "group", "chain"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusSpec {
    pub count: usize,
    pub degree: usize,
    pub seed: u64,
    pub out_dim: usize,
    /// Corpus JSON to load instead of generating.
    pub file: Option<String>,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self { count: 20, degree: 3, seed: 1, out_dim: 2, file: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Multiplicative slack on sampled inequalities.
    pub inequality: f64,
    pub taylor: f64,
    pub polynomial_remainder: f64,
    pub interpolation: f64,
    pub isometry: f64,
    pub bch: f64,
    pub nilpotent: f64,
    pub normal_form: f64,
    pub group: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            inequality: 1e-9,
            taylor: 1e-9,
            polynomial_remainder: 1e-12,
            interpolation: 1e-10,
            isometry: 2e-2,
            bch: 1e-10,
            nilpotent: 1e-12,
            normal_form: 1e-9,
            group: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub domain: Shape,
    pub plan: SamplePlan,
    pub corpus: CorpusSpec,
    /// `(k, s)` pairs for the norm-level checks.
    pub indices: Vec<(usize, f64)>,
    pub suites: Vec<String>,
    pub tolerances: Tolerances,
    pub k_max: usize,
    pub algebras: Vec<String>,
    pub bch: BchConfig,
    /// Random pairs per algebra in the bch suite.
    pub bch_pairs: usize,
    /// Random bracket probes per algebra and constant.
    pub rescaling_probes: usize,
    pub chain_length: usize,
    /// Points of the dense 1-D grid in the norms suite.
    pub isometry_grid: usize,
    /// `(s, u, λ)` with `0 < s < u ≤ 1`.
    pub convexity_triples: Vec<(f64, f64, f64)>,
    pub output: Option<String>,
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            domain: Shape::Ball { center: vec![0.0, 0.0], radius: 0.5 },
            plan: SamplePlan::quasirandom(48, 7),
            corpus: CorpusSpec::default(),
            indices: vec![(0, 0.0), (0, 0.5), (1, 0.0), (1, 0.5), (1, 1.0), (2, 0.5)],
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            tolerances: Tolerances::default(),
            k_max: 4,
            algebras: vec!["so3".into(), "sl2".into(), "heisenberg".into(), "abelian3".into()],
            bch: BchConfig::default(),
            bch_pairs: 100,
            rescaling_probes: 1000,
            chain_length: 10,
            isometry_grid: 10_000,
            convexity_triples: vec![(0.1, 1.0, 0.5), (0.25, 0.75, 0.3), (0.2, 0.9, 0.7), (0.5, 1.0, 0.5), (0.05, 0.6, 0.9)],
            output: None,
            timings: false,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))
    }

    /// `.toml` files parse as TOML, anything else as JSON.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "toml") {
            Self::from_toml(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn validate(&self) -> Result<Domain> {
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(Error::ConfigInvalid(format!("unknown suite {s:?}")));
            }
        }
        let d = Domain::new(self.domain.clone())?;
        for &(k, s) in &self.indices {
            HolderIndex::new(k, s)?;
            if k + 1 > self.k_max {
                return Err(Error::ConfigInvalid(format!("index k = {k} needs k_max >= {}", k + 1)));
            }
        }
        for &(s, u, l) in &self.convexity_triples {
            if !(s > 0.0 && s < u && u <= 1.0 && l > 0.0 && l < 1.0) {
                return Err(Error::ConfigInvalid(format!("convexity triple ({s}, {u}, {l})")));
            }
        }
        if self.k_max < 2 {
            return Err(Error::ConfigInvalid("k_max must be at least 2".into()));
        }
        if !(self.tolerances.inequality >= 0.0) {
            return Err(Error::ConfigInvalid("negative tolerance".into()));
        }
        if self.chain_length < 2 {
            return Err(Error::ConfigInvalid("chain_length must be at least 2".into()));
        }
        if self.corpus.out_dim == 0 {
            return Err(Error::ConfigInvalid("corpus out_dim must be positive".into()));
        }
        BchConfig::new(self.bch.truncation_order, self.bch.domain_margin)?;
        for a in &self.algebras {
            LieAlgebra::by_name(a)?;
        }
        d.sample_set(&self.plan)?;
        Ok(d)
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&serde_json::to_value(self).expect("config serializes")).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: String,
    pub jet: SharedJet,
    pub polynomial: Option<Polynomial>,
}

/// Even slots hold random polynomials, odd slots random smooth functions.
pub fn build_corpus(spec: &CorpusSpec, in_dim: usize) -> Result<(Vec<CorpusEntry>, Option<CorpusFile>)> {
    if let Some(file) = &spec.file {
        let text = std::fs::read_to_string(file).map_err(|e| Error::Io(format!("{file}: {e}")))?;
        let cf = CorpusFile::from_json(&text)?;
        let mut out = Vec::new();
        for (id, p) in cf.polynomials()? {
            if p.in_dim() != in_dim {
                return Err(Error::ConfigInvalid(format!("corpus function {id} has input dimension {}", p.in_dim())));
            }
            out.push(CorpusEntry { id, jet: poly_jet(p.clone()), polynomial: Some(p) });
        }
        return Ok((out, Some(cf)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let out = (0..spec.count)
        .map(|i| {
            let id = format!("f{i:04}");
            if i % 2 == 0 {
                let p = corpus::random_polynomial(&mut rng, in_dim, spec.out_dim, spec.degree);
                CorpusEntry { id, jet: poly_jet(p.clone()), polynomial: Some(p) }
            } else {
                CorpusEntry { id, jet: corpus::random_smooth(&mut rng, in_dim, spec.out_dim), polynomial: None }
            }
        })
        .collect();
    Ok((out, None))
}

struct Context {
    cfg: SuiteConfig,
    domain: Domain,
    set: SampleSet,
    corpus: Vec<CorpusEntry>,
    corpus_file: Option<CorpusFile>,
    constants: ProductConstants,
}

fn record(id: String, anchor: &str, v: Result<Verdict>) -> CheckRecord {
    match v {
        Ok(v) => CheckRecord::from_verdict(id, anchor, v),
        Err(e) => CheckRecord::from_error(id, anchor, &e),
    }
}

fn rng_for(seed: u64, salt: &str) -> ChaCha8Rng {
    let h = Sha256::digest(salt.as_bytes());
    let mut b = [0u8; 8];
    b.copy_from_slice(&h[..8]);
    ChaCha8Rng::seed_from_u64(seed ^ u64::from_le_bytes(b))
}

fn per_function<F>(ctx: &Context, f: F) -> Vec<CheckRecord>
where
    F: Fn(&CorpusEntry, &HolderProfile<'_>) -> Vec<CheckRecord> + Sync,
{
    ctx.corpus
        .par_iter()
        .map(|e| {
            let profile = HolderProfile::new(e.jet.as_ref(), &ctx.set);
            f(e, &profile)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn suite_taylor(ctx: &Context) -> Vec<CheckRecord> {
    let quad = GaussLegendre::default();
    let tol = &ctx.cfg.tolerances;
    let pairs = &ctx.set.pairs;
    let mut out = per_function(ctx, |e, _| {
        let mut recs = Vec::new();
        let salt: usize = e.id.bytes().map(|b| b as usize).sum();
        for t in 0..3 {
            let (i, j) = pairs[(salt * 7 + t * 131) % pairs.len()];
            let (x0, y) = (&ctx.set.points[i], &ctx.set.points[j]);
            let v: Vec<f64> = y.iter().zip(x0).map(|(a, b)| a - b).collect();
            let target = e.jet.eval(y);
            for k in 1..=3 {
                for form in [RemainderForm::A, RemainderForm::B] {
                    let id = format!("taylor/{}/t{t}/k{k}/{form:?}", e.id);
                    let v = taylor_polynomial(e.jet.as_ref(), x0, &v, form.polynomial_degree(k)).and_then(|p| {
                        let r = taylor_remainder(e.jet.as_ref(), &ctx.domain, x0, &v, k, form, &quad)?;
                        let err: Vec<f64> = (0..p.len()).map(|o| p[o] + r[o] - target[o]).collect();
                        Ok(Verdict::leq(norm(&err), tol.taylor * (1.0 + norm(&target)), 0.0))
                    });
                    recs.push(record(id, "taylor-integral-remainder", v));
                }
            }
            let id = format!("taylor/{}/t{t}/frechet", e.id);
            let v = crate::polyinterp::frechet_remainder_estimate(e.jet.as_ref(), &ctx.domain, x0, &v, &quad)
                .map(|f| Verdict::leq(f.lhs, f.rhs, tol.inequality));
            recs.push(record(id, "frechet-remainder-bound", v));
        }
        recs
    });
    // degree ≤ k polynomials have vanishing form-B remainder
    let mut rng = rng_for(ctx.cfg.corpus.seed, "taylor-polynomials");
    let n = ctx.domain.dim();
    for i in 0..ctx.cfg.corpus.count.max(1) {
        for k in 1..=3 {
            let degree = rng.gen_range(0..=k);
            let p = corpus::random_polynomial(&mut rng, n, ctx.cfg.corpus.out_dim, degree);
            let (a, b) = pairs[(i * 17 + k * 5) % pairs.len()];
            let x0 = &ctx.set.points[a];
            let v: Vec<f64> = ctx.set.points[b].iter().zip(x0).map(|(p, q)| p - q).collect();
            let id = format!("taylor/poly{i:04}/k{k}");
            let r = taylor_remainder(&p, &ctx.domain, x0, &v, k, RemainderForm::B, &quad)
                .map(|r| Verdict::leq(norm(&r), tol.polynomial_remainder, 0.0));
            out.push(record(id, "taylor-polynomial-remainder", r));
        }
    }
    out
}

fn suite_interp(ctx: &Context) -> Vec<CheckRecord> {
    let tol = &ctx.cfg.tolerances;
    let mut rng = rng_for(ctx.cfg.corpus.seed, "interp");
    let mut out = Vec::new();
    let count = ctx.cfg.corpus.count.max(1);
    for i in 0..count {
        let k = rng.gen_range(0..=4usize);
        let coeffs = corpus::uniform_vec(&mut rng, k + 1);
        let f = InterpolationNodes::uniform(k);
        let values: Vec<Vec<f64>> = f
            .nodes()
            .iter()
            .map(|t| vec![coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)])
            .collect();
        let v = f.extract(&values).map(|got| {
            let err = got.iter().zip(&coeffs).map(|(g, c)| (g[0] - c).abs()).fold(0.0, f64::max);
            Verdict::leq(err, tol.interpolation, 0.0)
        });
        out.push(record(format!("interp/recovery/{i:04}"), "interpolation-recovery", v));
    }
    let n = ctx.domain.dim();
    let ball = unit_ball_grid(n, if n == 1 { 401 } else if n == 2 { 31 } else { 11 });
    for i in 0..count {
        let k = 4;
        let p = corpus::random_polynomial(&mut rng, n, ctx.cfg.corpus.out_dim, k);
        let f = InterpolationNodes::uniform(k);
        // sup over the grid and its images under every node scaling
        let mut sup: f64 = 0.0;
        for v in &ball {
            sup = sup.max(norm(&p.eval(v)));
            for mu in f.nodes() {
                let w: Vec<f64> = v.iter().map(|c| c * mu).collect();
                sup = sup.max(norm(&p.eval(&w)));
            }
        }
        for j in 0..=k {
            let part = ball.iter().map(|v| norm(&p.homogeneous_part(j, v))).fold(0.0, f64::max);
            let v = Verdict::leq(part, f.constant(j) * sup, tol.inequality);
            out.push(CheckRecord::from_verdict(format!("interp/bound/{i:04}/j{j}"), "interpolation-coefficient-bound", v));
        }
    }
    out
}

fn suite_norms(ctx: &Context) -> Vec<CheckRecord> {
    let tol = &ctx.cfg.tolerances;
    let line = match Domain::ball(vec![0.0], 0.5) {
        Ok(d) => d,
        Err(e) => return vec![CheckRecord::from_error("norms/setup", "lipschitz-isometry", &e)],
    };
    let set = match line.sample_set(&SamplePlan::grid(ctx.cfg.isometry_grid).banded(2)) {
        Ok(s) => s,
        Err(e) => return vec![CheckRecord::from_error("norms/setup", "lipschitz-isometry", &e)],
    };
    let mut rng = rng_for(ctx.cfg.corpus.seed, "norms");
    let cubics: Vec<Polynomial> = (0..ctx.cfg.corpus.count.max(1)).map(|_| corpus::random_polynomial(&mut rng, 1, 1, 3)).collect();
    cubics
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let prof = HolderProfile::new(p, &set);
            (0..2)
                .map(|k| {
                    let v = isometry_pair(&prof, k).map(|(a, b)| {
                        let rel = if b == 0.0 { (a - b).abs() } else { (a - b).abs() / b };
                        Verdict::leq(rel, tol.isometry, 0.0)
                    });
                    record(format!("norms/isometry/{i:04}/k{k}"), "lipschitz-isometry", v)
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

const EXPONENT_PAIRS: [(f64, f64); 3] = [(0.25, 0.5), (0.5, 1.0), (0.1, 0.9)];

fn suite_inclusions(ctx: &Context) -> Vec<CheckRecord> {
    let tol = ctx.cfg.tolerances.inequality;
    let diam = ctx.domain.diameter();
    let x0 = ctx.domain.incenter();
    let mut ks: Vec<usize> = ctx.cfg.indices.iter().map(|i| i.0).collect();
    ks.dedup();
    per_function(ctx, |e, prof| {
        let mut recs = Vec::new();
        for &k in &ks {
            for (s1, s2) in EXPONENT_PAIRS {
                let id = format!("inclusions/{}/exponent/k{k}/{s1}-{s2}", e.id);
                match exponent_inclusion_checks(prof, k, s1, s2, diam, tol) {
                    Ok([a, b]) => {
                        recs.push(CheckRecord::from_verdict(format!("{id}/seminorm"), "exponent-inclusion-seminorm", a));
                        recs.push(CheckRecord::from_verdict(format!("{id}/norm"), "exponent-inclusion-norm", b));
                    }
                    Err(err) => recs.push(CheckRecord::from_error(id, "exponent-inclusion-seminorm", &err)),
                }
            }
        }
        for &(k, s) in &ctx.cfg.indices {
            if k >= 1 && s > 0.0 {
                let id = format!("inclusions/{}/point/k{k}/s{s}", e.id);
                let v = point_eval_constants(k, s, &ctx.domain, &x0, 0.0)
                    .and_then(|c| point_evaluation_check(e.jet.as_ref(), prof, &c, &x0, tol));
                recs.push(record(id, "point-evaluation-bound", v));
            }
            let id = format!("inclusions/{}/embedding/k{k}/s{s}", e.id);
            match derivative_embedding_checks(prof, k, s, tol) {
                Ok([a, b]) => {
                    recs.push(CheckRecord::from_verdict(format!("{id}/lower"), "derivative-embedding-lower", a));
                    recs.push(CheckRecord::from_verdict(format!("{id}/upper"), "derivative-embedding-upper", b));
                }
                Err(err) => recs.push(CheckRecord::from_error(id, "derivative-embedding-lower", &err)),
            }
            let id = format!("inclusions/{}/dk/k{k}/s{s}", e.id);
            let v = ctx.constants.d(k).and_then(|dk| inclusion_dk_check(prof, k, s, dk, tol));
            recs.push(record(id, "inclusion-operator-bound", v));
        }
        recs
    })
}

fn suite_convexity(ctx: &Context) -> Vec<CheckRecord> {
    let tol = ctx.cfg.tolerances.inequality;
    let triples = &ctx.cfg.convexity_triples;
    per_function(ctx, |e, prof| {
        let mut recs = Vec::new();
        for (t, &(s, u, l)) in triples.iter().enumerate() {
            let base = format!("convexity/{}/t{t}", e.id);
            recs.push(record(format!("{base}/seminorm"), "log-convexity-seminorm", log_convexity_seminorm_check(prof, 0, s, u, l, tol)));
            recs.push(record(format!("{base}/norm"), "log-convexity-norm", log_convexity_norm_check(prof, s, u, l, tol)));
            for k in 0..2 {
                let v = unit_ball_interpolation_check(prof, k, s, u, l, tol);
                recs.push(record(format!("{base}/unit-ball/k{k}"), "unit-ball-interpolation", v));
            }
        }
        recs
    })
}

const PRODUCT_ORDERS: [usize; 3] = [0, 1, 2];
const PRODUCT_EXPONENTS: [f64; 3] = [0.0, 0.5, 1.0];

fn suite_product(ctx: &Context) -> Vec<CheckRecord> {
    let tol = ctx.cfg.tolerances.inequality;
    let n = ctx.domain.dim();
    let m = ctx.cfg.corpus.out_dim;
    let b = Arc::new(BilinearForm::scalar_vector(m));
    let mut rng = rng_for(ctx.cfg.corpus.seed, "product");
    let scalars: Vec<SharedJet> = (0..ctx.corpus.len())
        .map(|i| {
            if i % 2 == 0 {
                corpus::random_smooth(&mut rng, n, 1)
            } else {
                poly_jet(corpus::random_polynomial(&mut rng, n, 1, ctx.cfg.corpus.degree))
            }
        })
        .collect();
    let mut out: Vec<CheckRecord> = ctx
        .corpus
        .par_iter()
        .zip(&scalars)
        .map(|(e, g1)| {
            let mut recs = Vec::new();
            let prod = match pointwise_product(g1.clone(), e.jet.clone(), b.clone()) {
                Ok(p) => p,
                Err(err) => return vec![CheckRecord::from_error(format!("product/{}", e.id), "product-inequality", &err)],
            };
            let pp = HolderProfile::new(&prod, &ctx.set);
            let p1 = HolderProfile::new(g1.as_ref(), &ctx.set);
            let p2 = HolderProfile::new(e.jet.as_ref(), &ctx.set);
            for k in PRODUCT_ORDERS {
                for s in PRODUCT_EXPONENTS {
                    let id = format!("product/{}/k{k}/s{s}", e.id);
                    let v = HolderIndex::new(k, s)
                        .and_then(|idx| product_inequality_check(&pp, &p1, &p2, &b, idx, &ctx.constants, tol));
                    recs.push(record(id, "product-inequality", v));
                }
            }
            for s in [0.5, 1.0] {
                let id = format!("product/{}/split/s{s}", e.id);
                recs.push(record(id, "product-seminorm-split", subadditivity_check(&pp, &p1, &p2, &b, s, tol)));
            }
            recs
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    // C_k read back per exponent: the recursion never sees s
    let reference = ProductConstants::new(&ctx.domain, ctx.cfg.k_max);
    out.push(CheckRecord::from_verdict("product/constants/c0", "product-constant-base", Verdict::close(reference.product[0], 2.0, 0.0)));
    for s in PRODUCT_EXPONENTS {
        let again = ProductConstants::new(&ctx.domain, ctx.cfg.k_max);
        for k in PRODUCT_ORDERS {
            let diff = (again.product[k] - ctx.constants.product[k]).abs();
            out.push(CheckRecord::from_verdict(format!("product/constants/k{k}/s{s}"), "product-constant-exponent-free", Verdict::leq(diff, 0.0, 0.0)));
        }
    }
    for k in 0..ctx.cfg.k_max {
        let v = Verdict::leq(reference.product[k], reference.product[k + 1], 0.0);
        out.push(CheckRecord::from_verdict(format!("product/constants/increasing/k{k}"), "product-constant-recursion", v));
    }
    let forms = [("scalar", BilinearForm::scalar()), ("scalar-vector", (*b).clone()), ("matrix", BilinearForm::matrix_product(2))];
    for (name, f) in &forms {
        let mut worst = [0.0f64; 2];
        let mut passed = true;
        for _ in 0..200 {
            for (w, v) in worst.iter_mut().zip(star_probe(f, n, &mut rng, tol)) {
                passed &= v.pass;
                if v.rhs > 0.0 {
                    *w = w.max(v.lhs / v.rhs);
                }
            }
        }
        for (slot, w) in worst.iter().enumerate() {
            let mut v = Verdict::leq(*w, 1.0, tol);
            v.pass &= passed;
            out.push(CheckRecord::from_verdict(format!("product/star{}/{name}", slot + 1), "star-operator-bound", v));
        }
    }
    out
}

fn suite_bch(ctx: &Context) -> Vec<CheckRecord> {
    let tol = &ctx.cfg.tolerances;
    let mut out = Vec::new();
    for name in &ctx.cfg.algebras {
        let alg = match LieAlgebra::by_name(name) {
            Ok(a) => a,
            Err(e) => {
                out.push(CheckRecord::from_error(format!("bch/{name}"), "bch-fidelity", &e));
                continue;
            }
        };
        let mut rng = rng_for(ctx.cfg.corpus.seed, &format!("bch/{name}"));
        let nilpotent = alg.name() == "heisenberg";
        let cfg = if nilpotent { BchConfig { truncation_order: 2, ..ctx.cfg.bch } } else { ctx.cfg.bch };
        let (anchor, limit) = if nilpotent { ("bch-nilpotent-exact", tol.nilpotent) } else { ("bch-fidelity", tol.bch) };
        for i in 0..ctx.cfg.bch_pairs {
            let rx: f64 = rng.gen_range(0.0..=0.05);
            let ry: f64 = rng.gen_range(0.0..=0.05);
            let x = alg.random_element(&mut rng, rx);
            let y = alg.random_element(&mut rng, ry);
            let v = bch_truncated(&alg, &x, &y, &cfg).map(|z| {
                let lhs = matrix_exp(&x, DEFAULT_TOL) * matrix_exp(&y, DEFAULT_TOL);
                Verdict::leq((lhs - matrix_exp(&z, DEFAULT_TOL)).norm(), limit, 0.0)
            });
            out.push(record(format!("bch/{name}/fidelity/{i:04}"), anchor, v));
        }
        // worst ratio ‖[x,y]‖' C / (‖x‖'‖y‖') per constant
        for (k, &ck) in ctx.constants.product.iter().enumerate() {
            let id = format!("bch/{name}/rescaling/k{k}");
            let v = rescale_compatible(&alg, ck).map(|h| {
                let mut worst: f64 = 0.0;
                for _ in 0..ctx.cfg.rescaling_probes {
                    let rx: f64 = rng.gen_range(0.0..2.0);
                    let ry: f64 = rng.gen_range(0.0..2.0);
                    let x = h.random_element(&mut rng, rx);
                    let y = h.random_element(&mut rng, ry);
                    let denom = h.norm(&x) * h.norm(&y) / ck;
                    if denom > 0.0 {
                        worst = worst.max(h.norm(&h.bracket(&x, &y)) / denom);
                    }
                }
                Verdict::leq(worst, 1.0, tol.inequality)
            });
            out.push(record(id, "compatible-rescaling", v));
        }
    }
    out
}

/// Algebra-valued function with sampled sup of Frobenius norm `size`.
fn small_algebra_function(alg: &LieAlgebra, rng: &mut ChaCha8Rng, set: &SampleSet, size: f64) -> Result<SharedJet> {
    let coords = corpus::random_smooth(rng, set.points[0].len(), alg.basis().len());
    let lifted = alg.embed(coords)?;
    let sup = set.points.iter().map(|x| norm(&lifted.eval(x))).fold(0.0, f64::max);
    let factor = if sup > 0.0 { size / sup } else { 1.0 };
    Ok(Arc::new(Scaled::new(factor, lifted)))
}

fn max_deviation(points: &[Vec<f64>], f: impl Fn(&[f64]) -> f64) -> f64 {
    points.iter().map(|x| f(x)).fold(0.0, f64::max)
}

fn suite_group(ctx: &Context) -> Vec<CheckRecord> {
    let tol = &ctx.cfg.tolerances;
    let algebras: Vec<LieAlgebra> = ctx.cfg.algebras.iter().filter_map(|a| LieAlgebra::by_name(a).ok()).collect();
    if algebras.is_empty() {
        return Vec::new();
    }
    let idx = HolderIndex { k: 0, s: 0.5 };
    let mut out: Vec<CheckRecord> = (0..ctx.corpus.len())
        .into_par_iter()
        .map(|i| {
            let alg = &algebras[i % algebras.len()];
            let mut rng = rng_for(ctx.cfg.corpus.seed, &format!("group/{i}"));
            let base = format!("group/{}/{:04}", alg.name(), i);
            let mk = |rng: &mut ChaCha8Rng, size: f64| small_algebra_function(alg, rng, &ctx.set, size);
            let (g1, g2, g3) = match (mk(&mut rng, 0.05), mk(&mut rng, 0.3), mk(&mut rng, 0.3)) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                    return vec![CheckRecord::from_error(base, "normal-form-identity", &e)];
                }
            };
            let mut recs = Vec::new();
            let d = alg.matrix_dim();
            let v = exp_map(g1.clone()).and_then(|w| local_normal_form(&w, alg, idx, &ctx.cfg.bch, &ctx.domain, &ctx.cfg.plan)).map(|rec| {
                let dev = rec
                    .points
                    .iter()
                    .zip(&rec.values)
                    .map(|(x, v)| dist(v, &g1.eval(x)))
                    .fold(rec.log_discrepancy, f64::max);
                Verdict::leq(dev, tol.normal_form, 0.0)
            });
            recs.push(record(format!("{base}/normal-form"), "normal-form-identity", v));
            let words = exp_map(g1.clone()).and_then(|a| Ok((a, exp_map(g2.clone())?, exp_map(g3.clone())?)));
            let v = words.and_then(|(a, b, c)| {
                let ab_c = group_mul(&group_mul(&a, &b)?, &c)?;
                let a_bc = group_mul(&a, &group_mul(&b, &c)?)?;
                let inv = group_mul(&ab_c, &group_inv(&ab_c))?;
                let inv_left = group_mul(&group_inv(&ab_c), &ab_c)?;
                let e = GroupElementWord::identity(d);
                let with_e = group_mul(&group_mul(&e, &a)?, &e)?;
                let id = Matrix::identity(d, d);
                let dev = max_deviation(&ctx.set.points, |x| {
                    [
                        (ab_c.evaluate(x) - a_bc.evaluate(x)).norm(),
                        (inv.evaluate(x) - &id).norm(),
                        (inv_left.evaluate(x) - &id).norm(),
                        (with_e.evaluate(x) - a.evaluate(x)).norm(),
                    ]
                    .into_iter()
                    .fold(0.0, f64::max)
                });
                Ok(Verdict::leq(dev, tol.group, 0.0))
            });
            recs.push(record(format!("{base}/axioms"), "group-axioms", v));
            let v = exp_map(g1.clone()).map(|w| {
                let dev = max_deviation(&ctx.set.points, |x| {
                    let m = to_matrix(&g1.eval(x), d);
                    (w.power(3).evaluate(x) - matrix_exp(&(m * 3.0), DEFAULT_TOL)).norm()
                });
                Verdict::leq(dev, tol.group, 0.0)
            });
            recs.push(record(format!("{base}/power"), "exponential-power", v));
            let small2 = mk(&mut rng, 0.05);
            let v = small2.and_then(|h| {
                let w = group_mul(&exp_map(g1.clone())?, &exp_map(h)?)?;
                let rec = local_normal_form(&w, alg, idx, &ctx.cfg.bch, &ctx.domain, &ctx.cfg.plan)?;
                Ok(Verdict::leq(rec.log_discrepancy, 1e-8, 0.0))
            });
            recs.push(record(format!("{base}/pointwise-bch"), "pointwise-bch-product", v));
            recs
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    if let Some(cf) = &ctx.corpus_file {
        for w in &cf.words {
            let id = format!("group/word/{}", w.id);
            out.push(record(id, "normal-form-identity", corpus_word_check(ctx, cf, w)));
        }
    }
    out
}

fn corpus_word_check(ctx: &Context, cf: &CorpusFile, w: &corpus::WordRecord) -> Result<Verdict> {
    let alg = LieAlgebra::by_name(&w.algebra)?;
    let letters = w
        .letters
        .iter()
        .map(|l| Ok(Letter { sign: l.sign, gamma: poly_jet(cf.function(&l.function)?) }))
        .collect::<Result<Vec<_>>>()?;
    let word = GroupElementWord::from_letters(alg.matrix_dim(), letters)?;
    let rec = local_normal_form(&word, &alg, HolderIndex { k: 0, s: 0.5 }, &ctx.cfg.bch, &ctx.domain, &ctx.cfg.plan)?;
    Ok(Verdict::leq(rec.log_discrepancy, 1e-8, 0.0))
}

fn suite_chain(ctx: &Context) -> Vec<CheckRecord> {
    let tol = ctx.cfg.tolerances.inequality;
    let n_max = ctx.cfg.chain_length;
    per_function(ctx, |e, prof| {
        let mut recs = Vec::new();
        for s in [0.0, 0.25] {
            for k in 0..2 {
                let base = format!("chain/{}/k{k}/s{s}", e.id);
                match chain_on_profile(prof, k, s, n_max) {
                    Ok(entries) => {
                        for (n, v) in chain_monotone(&entries, tol).into_iter().enumerate() {
                            recs.push(CheckRecord::from_verdict(format!("{base}/n{:02}", n + 1), "norm-chain-monotone", v));
                        }
                    }
                    Err(err) => recs.push(CheckRecord::from_error(base, "norm-chain-monotone", &err)),
                }
            }
        }
        recs
    })
}

/// Runs the configured suites. Individual check errors become failed records.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    let domain = cfg.validate()?;
    let set = domain.sample_set(&cfg.plan)?;
    let (corpus, corpus_file) = build_corpus(&cfg.corpus, domain.dim())?;
    let constants = ProductConstants::new(&domain, cfg.k_max);
    let ctx = Context { cfg: cfg.clone(), domain: domain.clone(), set, corpus, corpus_file, constants };
    let mut suites = BTreeMap::new();
    let mut timings = BTreeMap::new();
    for name in &cfg.suites {
        if suites.contains_key(name) {
            continue;
        }
        let start = Instant::now();
        let records = match name.as_str() {
            "taylor" => suite_taylor(&ctx),
            "interp" => suite_interp(&ctx),
            "norms" => suite_norms(&ctx),
            "inclusions" => suite_inclusions(&ctx),
            "convexity" => suite_convexity(&ctx),
            "product" => suite_product(&ctx),
            "bch" => suite_bch(&ctx),
            "group" => suite_group(&ctx),
            "chain" => suite_chain(&ctx),
            other => return Err(Error::ConfigInvalid(format!("unknown suite {other:?}"))),
        };
        timings.insert(name.clone(), start.elapsed().as_secs_f64());
        suites.insert(name.clone(), SuiteResult::new(records));
    }
    let total_checks = suites.values().map(|s| s.records.len()).sum();
    let total_failed = suites.values().map(|s| s.failed).sum();
    Ok(Report {
        schema_version: REPORT_SCHEMA_VERSION,
        config_hash: cfg.hash(),
        config: serde_json::to_value(cfg).expect("config serializes"),
        suites,
        constants: ConstantsTable::new(&domain, cfg.k_max),
        total_checks,
        total_failed,
        timings_seconds: cfg.timings.then_some(timings),
    })
}

pub fn emit_constants(cfg: &SuiteConfig) -> Result<ConstantsTable> {
    let d = Domain::new(cfg.domain.clone())?;
    Ok(ConstantsTable::new(&d, cfg.k_max))
}
