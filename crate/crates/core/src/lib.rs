// `!(x > y)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod audit;
pub mod domar;
pub mod ensemble;
pub mod error;
pub mod group;
pub mod growth;
pub mod matrix;
pub mod parallel;
pub mod quad;
pub mod report;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, EigenDecomposition};
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
