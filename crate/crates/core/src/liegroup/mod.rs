//! Matrix Lie algebras, truncated BCH products, and groups of words in
//! exponentials of algebra-valued functions.

pub mod algebra;
pub mod bch;
pub mod chain;
pub mod matfun;
pub mod word;

pub use algebra::{rescale_compatible, LieAlgebra};
pub use bch::{bch_series, bch_truncated, BchConfig};
pub use chain::{chain_monotone, chain_norms};
pub use matfun::{matrix_exp, matrix_log, Matrix};
pub use word::{exp_map, group_inv, group_mul, local_normal_form, GroupElementWord, Letter, NormalFormRecord};
