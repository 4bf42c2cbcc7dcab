//! Exact integer linear algebra.
//!
//! Everything here works over arbitrary-precision integers without rational
//! intermediates: extended gcd, fraction-free determinants, gcd and maximum of
//! the `k x k` minors, Smith normal form with both unimodular transforms, and
//! integer solutions of `A x = c`.

mod det;
mod gcd;
mod matrix;
mod minors;
mod snf;
mod system;

pub use det::determinant;
pub use gcd::{ext_gcd, gcd_all};
pub use matrix::{IntMatrix, MatrixJson};
pub(crate) use minors::minor_min_nonzero_abs;
pub use minors::{minor_max_abs, minor_max_abs_with, minors_gcd, minors_gcd_with};
pub use snf::{smith_normal_form, SnfDecomposition};
pub use system::{heger_check, solve_linear_system};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("extended gcd of (0, 0) is undefined")]
    BothZero,
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("minor order {k} outside 1..={max}")]
    OrderOutOfRange { k: usize, max: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix parse error: {0}")]
    Parse(String),
}
