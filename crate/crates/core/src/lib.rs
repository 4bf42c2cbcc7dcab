//! Integer representations by multilinear forms.
//!
//! Given an integer multilinear form `F` and a target `b`, the solvers in
//! [`solver`] construct an integer vector `a` with `F(a) = b` whenever the
//! coefficients satisfy one of the supported coprimality conditions, and report
//! the explicit search bound that the solution is checked against. [`detforms`]
//! handles determinant forms through unimodular completion and products of
//! linear forms through integer linear systems. [`oracle`] provides exhaustive
//! box search and modular obstruction certificates as an independent check.

pub(crate) mod decimal;
pub mod detforms;
pub mod exec;
pub mod form;
pub mod intlinalg;
pub mod oracle;
pub mod solver;

pub use exec::Execution;
pub use form::{nu, FormError, IndexSet, MultilinearForm, Normalized, ProductForm, Terms};
pub use intlinalg::{IntMatrix, LinAlgError, SnfDecomposition};
pub use oracle::{ObstructionCertificate, SearchConfig};
pub use solver::{solve_auto, Method, SolveError, SolveReport};
