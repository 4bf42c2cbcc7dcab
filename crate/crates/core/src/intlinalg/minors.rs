//! Folds over all `k x k` minors.
//!
//! Enumeration is binomial in both dimensions, which is fine for the desk-scale
//! matrices these feed (about a dozen columns at most).

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{determinant, IntMatrix, LinAlgError};
use crate::exec::Execution;

fn check_order(m: &IntMatrix, k: usize) -> Result<(), LinAlgError> {
    let max = m.rows().min(m.cols());
    if k == 0 || k > max {
        return Err(LinAlgError::OrderOutOfRange { k, max });
    }
    Ok(())
}

fn fold_minors<T, F, C>(m: &IntMatrix, k: usize, exec: Execution, identity: T, step: F, combine: C) -> T
where
    T: Clone + Send + Sync,
    F: Fn(T, BigInt) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    let row_sets: Vec<Vec<usize>> = (0..m.rows()).combinations(k).collect();
    exec.map_reduce(
        &row_sets,
        identity.clone(),
        |rows| {
            (0..m.cols()).combinations(k).fold(identity.clone(), |acc, cols| {
                let minor = determinant(&m.submatrix(rows, &cols)).expect("square submatrix");
                step(acc, minor)
            })
        },
        &combine,
    )
}

/// Gcd `d_k` of all `k x k` minors; 0 when they all vanish.
pub fn minors_gcd(m: &IntMatrix, k: usize) -> Result<BigInt, LinAlgError> {
    minors_gcd_with(m, k, Execution::default())
}

pub fn minors_gcd_with(m: &IntMatrix, k: usize, exec: Execution) -> Result<BigInt, LinAlgError> {
    check_order(m, k)?;
    Ok(fold_minors(
        m,
        k,
        exec,
        BigInt::zero(),
        |g, minor| if g.is_one() { g } else { g.gcd(&minor) },
        |a, b| a.gcd(&b),
    ))
}

/// Largest absolute `k x k` minor.
pub fn minor_max_abs(m: &IntMatrix, k: usize) -> Result<BigInt, LinAlgError> {
    minor_max_abs_with(m, k, Execution::default())
}

pub fn minor_max_abs_with(m: &IntMatrix, k: usize, exec: Execution) -> Result<BigInt, LinAlgError> {
    check_order(m, k)?;
    Ok(fold_minors(
        m,
        k,
        exec,
        BigInt::zero(),
        |best, minor| best.max(minor.abs()),
        |a, b| a.max(b),
    ))
}

/// Smallest nonzero absolute `k x k` minor, if any minor is nonzero.
pub(crate) fn minor_min_nonzero_abs(m: &IntMatrix, k: usize) -> Result<Option<BigInt>, LinAlgError> {
    check_order(m, k)?;
    let pick = |a: Option<BigInt>, b: Option<BigInt>| match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    };
    Ok(fold_minors(
        m,
        k,
        Execution::default(),
        None,
        |best, minor| {
            if minor.is_zero() {
                best
            } else {
                pick(best, Some(minor.abs()))
            }
        },
        pick,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn gcd_examples() {
        let m = IntMatrix::from_i64(&[[2, 4], [6, 8]]);
        assert_eq!(minors_gcd(&m, 1).unwrap(), big(2));
        assert_eq!(minors_gcd(&m, 2).unwrap(), big(8));
        let col = IntMatrix::from_i64(&[[6], [10], [15]]);
        assert_eq!(minors_gcd(&col, 1).unwrap(), big(1));
        let zero = IntMatrix::zeros(2, 2);
        assert_eq!(minors_gcd(&zero, 2).unwrap(), big(0));
        assert_eq!(minors_gcd(&m, 3), Err(LinAlgError::OrderOutOfRange { k: 3, max: 2 }));
        assert!(minors_gcd(&m, 0).is_err());
    }

    #[test]
    fn max_examples() {
        let aug = IntMatrix::from_i64(&[[1, 1, 1, 6], [0, 1, -1, 1]]);
        assert_eq!(minor_max_abs(&aug, 2).unwrap(), big(7));
        assert_eq!(minor_max_abs(&IntMatrix::identity(3), 3).unwrap(), big(1));
        let m = IntMatrix::from_i64(&[[2, 4], [6, 8]]);
        assert_eq!(minor_max_abs(&m, 2).unwrap(), big(8));
        assert_eq!(minor_min_nonzero_abs(&aug, 2).unwrap(), Some(big(1)));
        assert_eq!(minor_min_nonzero_abs(&IntMatrix::zeros(2, 2), 1).unwrap(), None);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let m = IntMatrix::from_i64(&[
            [3, -7, 2, 9, 0, 4],
            [1, 5, -3, 2, 8, -6],
            [-4, 2, 7, 1, -5, 3],
            [6, 0, -2, 5, 1, 7],
        ]);
        for k in 1..=4 {
            assert_eq!(
                minors_gcd_with(&m, k, Execution::Sequential).unwrap(),
                minors_gcd_with(&m, k, Execution::Parallel).unwrap()
            );
            assert_eq!(
                minor_max_abs_with(&m, k, Execution::Sequential).unwrap(),
                minor_max_abs_with(&m, k, Execution::Parallel).unwrap()
            );
        }
    }
}
