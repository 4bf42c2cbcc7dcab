use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{IntMatrix, LinAlgError};

/// Exact determinant. Cofactor expansion up to 3x3, fraction-free Bareiss
/// elimination beyond; every division in Bareiss is exact.
pub fn determinant(m: &IntMatrix) -> Result<BigInt, LinAlgError> {
    if !m.is_square() {
        return Err(LinAlgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(match m.rows() {
        0 => BigInt::one(),
        1 => m[(0, 0)].clone(),
        2 => &m[(0, 0)] * &m[(1, 1)] - &m[(0, 1)] * &m[(1, 0)],
        3 => {
            &m[(0, 0)] * (&m[(1, 1)] * &m[(2, 2)] - &m[(1, 2)] * &m[(2, 1)])
                - &m[(0, 1)] * (&m[(1, 0)] * &m[(2, 2)] - &m[(1, 2)] * &m[(2, 0)])
                + &m[(0, 2)] * (&m[(1, 0)] * &m[(2, 1)] - &m[(1, 1)] * &m[(2, 0)])
        }
        _ => bareiss(m.clone()),
    })
}

fn bareiss(mut a: IntMatrix) -> BigInt {
    let n = a.rows();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = num / &prev;
            }
        }
        prev = a[(k, k)].clone();
    }
    let det = a[(n - 1, n - 1)].clone();
    if negate {
        -det
    } else {
        det
    }
}
