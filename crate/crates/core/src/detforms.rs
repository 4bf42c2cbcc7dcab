//! Determinant forms and products of linear forms.
//!
//! A determinant form fixes the top-left `r x s` block of an `n x n` matrix
//! to `A` and treats the remaining entries as variables. It represents every
//! integer exactly when `r + s <= n`, or when the minors of order `r + s - n`
//! of `A` are coprime. In that case one unimodular completion of `A` yields
//! all targets at once by scaling a single free column.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::form::{FormError, MultilinearForm, ProductForm};
use crate::intlinalg::{
    determinant, heger_check, minor_max_abs, minor_min_nonzero_abs, minors_gcd, smith_normal_form, solve_linear_system,
    IntMatrix, LinAlgError,
};
use crate::oracle::{system_box_search, OracleError, SearchConfig};
use crate::solver::{Method, SolveError, SolveReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetError {
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("not representable: minors of order {order} have gcd {gcd}")]
    NotRepresentable { order: usize, gcd: BigInt },
    #[error("completion has determinant {det}, expected 1")]
    CompletionFailed { det: BigInt },
    #[error("all minors of order {0} vanish")]
    AllMinorsZero(usize),
    #[error("maximal minors of the coefficient matrix have gcd {gcd}{}", if *.heger_fails { "; the target vector fails the Heger criterion" } else { "" })]
    MinorsNotCoprime { gcd: BigInt, heger_fails: bool },
    #[error("no solution within the Borosh radius {radius}")]
    BoroshViolated { radius: BigInt },
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Search(#[from] OracleError),
}

/// The fixed block `A` (`r x s`) of an `n x n` determinant form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetFormInstance {
    a: IntMatrix,
    n: usize,
}

impl DetFormInstance {
    /// Requires `1 <= s <= r <= n` and `s < n`.
    pub fn new(a: IntMatrix, n: usize) -> Result<Self, DetError> {
        let (r, s) = (a.rows(), a.cols());
        if !(1 <= s && s <= r && r <= n && s < n) {
            return Err(DetError::Shape(format!(
                "need 1 <= s <= r <= n and s < n, got r = {r}, s = {s}, n = {n}"
            )));
        }
        Ok(DetFormInstance { a, n })
    }

    pub fn block(&self) -> &IntMatrix {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.a.rows()
    }

    pub fn s(&self) -> usize {
        self.a.cols()
    }

    /// `r + s - n` when positive: the minor order that must be coprime.
    pub fn critical_order(&self) -> Option<usize> {
        (self.r() + self.s()).checked_sub(self.n).filter(|&k| k > 0)
    }
}

/// The free blocks of a solution: `X` below `A`, `Y` to the right of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetSolution {
    /// `(n - r) x s`
    pub x: IntMatrix,
    /// `n x (n - s)`
    pub y: IntMatrix,
    /// Determinant of the assembled matrix, recomputed exactly.
    pub determinant: BigInt,
}

impl DetSolution {
    /// The full `n x n` matrix `[[A, Y_top], [X, Y_bottom]]`.
    pub fn assemble(&self, inst: &DetFormInstance) -> IntMatrix {
        assemble(inst, &self.x, &self.y)
    }
}

fn assemble(inst: &DetFormInstance, x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
    let (n, r, s) = (inst.n, inst.r(), inst.s());
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = if j >= s {
                y[(i, j - s)].clone()
            } else if i < r {
                inst.a[(i, j)].clone()
            } else {
                x[(i - r, j)].clone()
            };
        }
    }
    m
}

/// The order and gcd of the minors blocking representability, if any.
fn obstruction(inst: &DetFormInstance) -> Option<(usize, BigInt)> {
    let k = inst.critical_order()?;
    let gcd = minors_gcd(&inst.a, k).expect("k <= s <= r");
    let by_snf = smith_normal_form(&inst.a).unit_factor_count() >= k;
    assert_eq!(gcd.is_one(), by_snf, "minor gcd and invariant factors disagree");
    (!gcd.is_one()).then_some((k, gcd))
}

/// Whether the determinant form represents every integer.
pub fn representable(inst: &DetFormInstance) -> bool {
    obstruction(inst).is_none()
}

/// An `n x n` matrix of determinant 1 with `A` as its top-left block.
///
/// With `A = U S V`, the diagonal `S` is completed first: a unit invariant
/// factor is its own pivot, every other diagonal position takes one spare
/// row and one spare column through `[[s_i, 1], [1, 0]]`, and leftover
/// spare rows and columns are matched with ones. Conjugating back by `U` and
/// `V` restores `A`; the sign is fixed on a spare column.
pub fn complete_unimodular(inst: &DetFormInstance) -> Result<IntMatrix, DetError> {
    if let Some((order, gcd)) = obstruction(inst) {
        return Err(DetError::NotRepresentable { order, gcd });
    }
    let (n, r, s) = (inst.n, inst.r(), inst.s());
    let snf = smith_normal_form(&inst.a);
    let mut spare_rows = (r..n).rev().collect::<Vec<_>>();
    let mut spare_cols = (s..n).rev().collect::<Vec<_>>();
    let mut core = IntMatrix::zeros(n, n);
    let exhausted = || DetError::CompletionFailed { det: BigInt::zero() };

    for i in 0..s {
        let factor = snf.invariant_factors.get(i).cloned().unwrap_or_default();
        let unit = factor.is_one();
        core[(i, i)] = factor;
        if !unit {
            let row = spare_rows.pop().ok_or_else(exhausted)?;
            let col = spare_cols.pop().ok_or_else(exhausted)?;
            core[(i, col)] = BigInt::one();
            core[(row, i)] = BigInt::one();
        }
    }
    for i in s..r {
        let col = spare_cols.pop().ok_or_else(exhausted)?;
        core[(i, col)] = BigInt::one();
    }
    while let Some(row) = spare_rows.pop() {
        let col = spare_cols.pop().ok_or_else(exhausted)?;
        core[(row, col)] = BigInt::one();
    }

    let mut left = IntMatrix::identity(n);
    let mut right = IntMatrix::identity(n);
    for i in 0..r {
        for j in 0..r {
            left[(i, j)] = snf.u[(i, j)].clone();
        }
    }
    for i in 0..s {
        for j in 0..s {
            right[(i, j)] = snf.v[(i, j)].clone();
        }
    }
    let mut m = left.mul(&core)?.mul(&right)?;
    if determinant(&m)?.is_negative() {
        m.negate_col(s);
    }
    let det = determinant(&m)?;
    if !det.is_one() {
        return Err(DetError::CompletionFailed { det });
    }
    debug_assert!((0..r).all(|i| (0..s).all(|j| m[(i, j)] == inst.a[(i, j)])));
    Ok(m)
}

/// Free blocks with `det = b`: the completion with its first free column
/// multiplied by `b`.
pub fn solve_detform(inst: &DetFormInstance, b: &BigInt) -> Result<DetSolution, DetError> {
    let m = complete_unimodular(inst)?;
    solution_from_completion(inst, &m, b)
}

/// Scales the first free column of a completion by `b`. Reusing one
/// completion gives solutions for every `b`.
pub fn solution_from_completion(
    inst: &DetFormInstance,
    completion: &IntMatrix,
    b: &BigInt,
) -> Result<DetSolution, DetError> {
    let (n, r, s) = (inst.n, inst.r(), inst.s());
    let x = completion.submatrix(&(r..n).collect::<Vec<_>>(), &(0..s).collect::<Vec<_>>());
    let mut y = completion.submatrix(&(0..n).collect::<Vec<_>>(), &(s..n).collect::<Vec<_>>());
    for i in 0..n {
        y[(i, 0)] *= b;
    }
    let det = determinant(&assemble(inst, &x, &y))?;
    if &det != b {
        return Err(DetError::CompletionFailed { det });
    }
    Ok(DetSolution { x, y, determinant: det })
}

/// `n^2 |b| alpha beta (beta + 1)^(n-2)` with `alpha` the largest entry,
/// `D` the smallest nonzero order-`s` minor and `beta = (n-1)! D^n + 1`.
///
/// Only defined for `r = n`. Nothing in this crate relies on solutions
/// actually lying within this value.
pub fn detform_bound(inst: &DetFormInstance, b: &BigInt) -> Result<BigInt, DetError> {
    let (n, r, s) = (inst.n, inst.r(), inst.s());
    if r != n {
        return Err(DetError::Shape(format!("bound needs r = n, got r = {r}, n = {n}")));
    }
    let gcd = minors_gcd(&inst.a, s)?;
    if !gcd.is_one() {
        return Err(DetError::NotRepresentable { order: s, gcd });
    }
    let d = minor_min_nonzero_abs(&inst.a, s)?.ok_or(DetError::AllMinorsZero(s))?;
    let alpha = inst.a.max_abs_entry();
    let factorial: BigInt = (1..n).map(BigInt::from).product();
    let beta = factorial * num_traits::pow(d, n) + 1;
    let tail = num_traits::pow(&beta + 1, n - 2);
    Ok(BigInt::from(n * n) * b.abs() * alpha * beta * tail)
}

/// Result of [`solve_product_linear`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductSolution {
    pub report: SolveReport,
    /// Largest absolute maximal minor of `(A | (b, 1, ..., 1))`.
    #[serde(with = "crate::decimal")]
    pub borosh_radius: BigInt,
}

/// Solves `L_1(a) ... L_m(a) = b` through `L_1(a) = b`, `L_i(a) = 1`.
///
/// `n` defaults to the larger of the highest variable index and `m + 1`.
/// The fast path uses the Smith form; the bounded path returns the
/// lexicographically smallest solution of the linear system within the
/// Borosh radius.
pub fn solve_product_linear(
    factors: &[MultilinearForm],
    n: Option<usize>,
    b: &BigInt,
    bounded: bool,
    cfg: &SearchConfig,
) -> Result<ProductSolution, DetError> {
    let m = factors.len();
    let highest = factors.iter().map(MultilinearForm::max_index).max().unwrap_or(0);
    let n = n.unwrap_or_else(|| highest.max(m + 1));
    if m == 0 || m >= n {
        return Err(DetError::Shape(format!(
            "need 1 <= m < n factors, got m = {m}, n = {n}"
        )));
    }
    let product = ProductForm::new(n, factors.to_vec())?;
    let a = IntMatrix::from_rows(product.coefficient_rows())?;
    let mut target = vec![BigInt::one(); m];
    target[0] = b.clone();

    let gcd = minors_gcd(&a, m)?;
    if !gcd.is_one() {
        let heger_fails = !heger_check(&a, &target)?;
        return Err(DetError::MinorsNotCoprime { gcd, heger_fails });
    }
    let radius = minor_max_abs(&a.augment(&target)?, m)?;
    let solution = if bounded {
        system_box_search(&a, &target, &radius, cfg)?
            .ok_or_else(|| DetError::BoroshViolated { radius: radius.clone() })?
    } else {
        solve_linear_system(&a, &target)?.expect("coprime maximal minors make every system solvable")
    };
    let value = product.evaluate(&solution)?;
    let report = SolveReport::checked(value, b, solution, Method::Product, Some(radius.clone()))?;
    Ok(ProductSolution {
        report,
        borosh_radius: radius,
    })
}
