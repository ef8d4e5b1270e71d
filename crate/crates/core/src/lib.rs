//! Hölder spaces on bounded convex domains, the product theorem, and
//! truncated Baker–Campbell–Hausdorff machinery on matrix Lie groups.

// `!(a < b)` is used on purpose so NaN lands on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod domain;
pub mod error;
pub mod funcmodel;
pub mod holder;
pub mod liegroup;
pub mod polyinterp;
pub mod product;
pub mod report;
pub mod suite;
pub mod verify;

pub use domain::{Domain, PairStrategy, PlanKind, SamplePlan, SampleSet, Shape};
pub use error::{Error, Result};
pub use funcmodel::{JetFunction, Polynomial, SharedJet, SymMultilinearMap};
pub use holder::{HolderIndex, HolderProfile, NormEstimate};
pub use report::{CheckRecord, ConstantsTable, Report};
pub use suite::{emit_constants, run_suite, SuiteConfig};
