//! Check records, the constants table, and the canonical JSON report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::domain::Domain;
use crate::error::Error;
use crate::holder::{inclusion_constant_dk, point_eval_constants_uniform, InclusionConstant, PointEvalConstants};
use crate::polyinterp::InterpolationNodes;
use crate::product::ProductConstants;
use crate::verify::Verdict;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn from_verdict(check_id: impl Into<String>, anchor: &str, v: Verdict) -> Self {
        Self {
            check_id: check_id.into(),
            anchor: anchor.into(),
            lhs: v.lhs,
            rhs: v.rhs,
            margin: v.margin(),
            pass: v.pass,
            error: None,
        }
    }

    /// A check that could not be evaluated counts as a failure.
    pub fn from_error(check_id: impl Into<String>, anchor: &str, e: &Error) -> Self {
        Self {
            check_id: check_id.into(),
            anchor: anchor.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            pass: false,
            error: Some(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub passed: usize,
    pub failed: usize,
    pub records: Vec<CheckRecord>,
}

impl SuiteResult {
    pub fn new(mut records: Vec<CheckRecord>) -> Self {
        records.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        let passed = records.iter().filter(|r| r.pass).count();
        Self { passed, failed: records.len() - passed, records }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationRow {
    pub k: usize,
    pub nodes: Vec<f64>,
    pub lambda: Vec<Vec<f64>>,
    /// `Σ_μ |λ_{μ,j}|` for `j = 0 … k`.
    pub constants: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductRow {
    pub k: usize,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsTable {
    pub domain: Domain,
    pub k_max: usize,
    pub interpolation: Vec<InterpolationRow>,
    /// Uniform-in-`s` point-evaluation constants at the incenter.
    pub point_evaluation: Vec<PointEvalConstants>,
    pub inclusion: Vec<InclusionConstant>,
    pub product: Vec<ProductRow>,
}

impl ConstantsTable {
    pub fn new(d: &Domain, k_max: usize) -> Self {
        let interpolation = (0..=k_max + 1)
            .map(|k| {
                let f = InterpolationNodes::uniform(k);
                InterpolationRow {
                    k,
                    nodes: f.nodes().to_vec(),
                    lambda: f.lambda().to_vec(),
                    constants: (0..=k).map(|j| f.constant(j)).collect(),
                }
            })
            .collect();
        let x0 = d.incenter();
        let point_evaluation = (1..=k_max + 1)
            .map(|k| point_eval_constants_uniform(k, d, &x0, 0.0).expect("incenter is interior"))
            .collect();
        let pc = ProductConstants::new(d, k_max);
        Self {
            domain: d.clone(),
            k_max,
            interpolation,
            point_evaluation,
            inclusion: (0..k_max).map(|k| inclusion_constant_dk(k, d)).collect(),
            product: pc.product.iter().enumerate().map(|(k, &c)| ProductRow { k, c }).collect(),
        }
    }

    /// Long-format CSV: `table,k,j,name,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("table,k,j,name,value\n");
        let mut row = |t: &str, k: usize, j: &str, name: &str, v: f64| {
            writeln!(out, "{t},{k},{j},{name},{v:e}").expect("string write");
        };
        for r in &self.interpolation {
            for (mu, node) in r.nodes.iter().enumerate() {
                row("interpolation", r.k, "", &format!("node{mu}"), *node);
                for (j, l) in r.lambda[mu].iter().enumerate() {
                    row("interpolation", r.k, &j.to_string(), &format!("lambda{mu}"), *l);
                }
            }
            for (j, c) in r.constants.iter().enumerate() {
                row("interpolation", r.k, &j.to_string(), "abs_sum", *c);
            }
        }
        for c in &self.point_evaluation {
            for (name, v) in [("eps0", c.eps0), ("c1", c.c1), ("c2", c.c2), ("c3", c.c3), ("c4", c.c4)] {
                row("point_evaluation", c.k, "", name, v);
            }
        }
        for d in &self.inclusion {
            row("inclusion", d.k, "", "d", d.value);
        }
        for p in &self.product {
            row("product", p.k, "", "c", p.c);
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub suites: BTreeMap<String, SuiteResult>,
    pub constants: ConstantsTable,
    pub total_checks: usize,
    pub total_failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_seconds: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.total_failed == 0
    }

    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.suites.values().flat_map(|s| s.records.iter()).filter(|r| !r.pass)
    }
}
