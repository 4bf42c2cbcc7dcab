use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `A = U * S * V` with `U`, `V` unimodular and `S` diagonal.
///
/// The inverses of both transforms are accumulated alongside, so
/// `S = u_inv * A * v_inv` holds as well.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    /// Positive invariant factors `s_1 | s_2 | ... | s_q`, `q = rank A`.
    pub invariant_factors: Vec<BigInt>,
}

impl SnfDecomposition {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// The `r x c` diagonal matrix `S`.
    pub fn diagonal(&self) -> IntMatrix {
        let mut s = IntMatrix::zeros(self.u.rows(), self.v.rows());
        for (i, f) in self.invariant_factors.iter().enumerate() {
            s[(i, i)] = f.clone();
        }
        s
    }

    /// `U * S * V`.
    pub fn reconstruct(&self) -> IntMatrix {
        self.u
            .mul(&self.diagonal())
            .and_then(|us| us.mul(&self.v))
            .expect("conformable by construction")
    }

    /// Number of invariant factors equal to 1.
    pub fn unit_factor_count(&self) -> usize {
        self.invariant_factors
            .iter()
            .take_while(|f| **f == BigInt::from(1))
            .count()
    }
}

/// Working state: `a` is the partially reduced matrix with
/// `A = u * a * v` and `a = u_inv * A * v_inv` at all times.
struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u_inv.swap_rows(i, j);
        self.u.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v_inv.swap_cols(i, j);
        self.v.swap_rows(i, j);
    }

    /// row[dst] += t * row[src]
    fn add_row(&mut self, dst: usize, src: usize, t: &BigInt) {
        self.a.add_row_multiple(dst, src, t);
        self.u_inv.add_row_multiple(dst, src, t);
        self.u.add_col_multiple(src, dst, &-t);
    }

    /// col[dst] += t * col[src]
    fn add_col(&mut self, dst: usize, src: usize, t: &BigInt) {
        self.a.add_col_multiple(dst, src, t);
        self.v_inv.add_col_multiple(dst, src, t);
        self.v.add_row_multiple(src, dst, &-t);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u_inv.negate_row(i);
        self.u.negate_col(i);
    }

    /// Smallest nonzero |entry| in the trailing block, first in row-major order.
    fn pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in k..self.a.rows() {
            for j in k..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                let mag = x.abs();
                if best.as_ref().is_none_or(|(_, _, b)| mag < *b) {
                    best = Some((i, j, mag));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    /// Clears row and column `k` beyond the diagonal and makes the pivot
    /// divide the trailing block. Returns false when the trailing block is 0.
    fn reduce_at(&mut self, k: usize) -> bool {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        loop {
            let Some((pi, pj)) = self.pivot(k) else {
                return false;
            };
            self.swap_rows(k, pi);
            self.swap_cols(k, pj);

            let mut remainder = false;
            for i in k + 1..rows {
                if !self.a[(i, k)].is_zero() {
                    let q = &self.a[(i, k)] / &self.a[(k, k)];
                    self.add_row(i, k, &-q);
                    remainder |= !self.a[(i, k)].is_zero();
                }
            }
            for j in k + 1..cols {
                if !self.a[(k, j)].is_zero() {
                    let q = &self.a[(k, j)] / &self.a[(k, k)];
                    self.add_col(j, k, &-q);
                    remainder |= !self.a[(k, j)].is_zero();
                }
            }
            if remainder {
                continue;
            }

            let pivot = self.a[(k, k)].clone();
            let offender = (k + 1..rows).find(|&i| (k + 1..cols).any(|j| !self.a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                // the offending row's entries leave nonzero remainders on the
                // next pass, shrinking the pivot
                Some(i) => self.add_row(k, i, &BigInt::from(1)),
                None => {
                    if pivot.is_negative() {
                        self.negate_row(k);
                    }
                    return true;
                }
            }
        }
    }
}

/// Smith normal form with accumulated unimodular transforms.
///
/// Pivot: nonzero entry of least absolute value in the trailing block, ties
/// broken row-major. Invariant factors come out positive.
pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = Reducer {
        a: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    let mut factors = Vec::new();
    for k in 0..rows.min(cols) {
        if !r.reduce_at(k) {
            break;
        }
        factors.push(r.a[(k, k)].clone());
    }
    SnfDecomposition {
        u: r.u,
        v: r.v,
        u_inv: r.u_inv,
        v_inv: r.v_inv,
        invariant_factors: factors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::{determinant, minors_gcd};
    use num_traits::One;
    use proptest::prelude::*;

    fn factors(rows: &[&[i64]]) -> Vec<i64> {
        smith_normal_form(&IntMatrix::from_i64(rows))
            .invariant_factors
            .into_iter()
            .map(|f| f.try_into().unwrap())
            .collect()
    }

    fn check(m: &IntMatrix) {
        let snf = smith_normal_form(m);
        assert_eq!(&snf.reconstruct(), m);
        assert_eq!(determinant(&snf.u).unwrap().abs(), BigInt::one());
        assert_eq!(determinant(&snf.v).unwrap().abs(), BigInt::one());
        assert_eq!(snf.u.mul(&snf.u_inv).unwrap(), IntMatrix::identity(m.rows()));
        assert_eq!(snf.v.mul(&snf.v_inv).unwrap(), IntMatrix::identity(m.cols()));
        let s = snf.u_inv.mul(m).unwrap().mul(&snf.v_inv).unwrap();
        assert_eq!(s, snf.diagonal());
        for w in snf.invariant_factors.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(snf.invariant_factors.iter().all(|f| f.is_positive()));
    }

    #[test]
    fn examples() {
        assert_eq!(factors(&[&[2, 4], &[6, 8]]), vec![2, 4]);
        assert_eq!(factors(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), vec![1, 1, 1]);
        assert_eq!(factors(&[&[6], &[10], &[15]]), vec![1]);
        assert_eq!(factors(&[&[0, 0], &[0, 0]]), Vec::<i64>::new());
        assert_eq!(factors(&[&[2, 0], &[0, 3]]), vec![1, 6]);
        assert_eq!(factors(&[&[-4]]), vec![4]);
    }

    #[test]
    fn transforms_are_consistent() {
        check(&IntMatrix::from_i64(&[[2, 4], [6, 8]]));
        check(&IntMatrix::from_i64(&[[6], [10], [15]]));
        check(&IntMatrix::from_i64(&[[1, 1, 1], [0, 1, -1]]));
        check(&IntMatrix::from_i64(&[[0, 0, 5], [0, 0, 0], [3, 0, 0]]));
        check(&IntMatrix::zeros(2, 3));
    }

    proptest! {
        #[test]
        fn random_matrices(r in 1usize..=5, c in 1usize..=5, e in proptest::collection::vec(-20i64..=20, 25)) {
            let rows: Vec<Vec<i64>> = (0..r).map(|i| e[i * c..(i + 1) * c].to_vec()).collect();
            let m = IntMatrix::from_i64(&rows);
            check(&m);
            let snf = smith_normal_form(&m);
            let mut prev = BigInt::one();
            for (i, s) in snf.invariant_factors.iter().enumerate() {
                let d = minors_gcd(&m, i + 1).unwrap();
                prop_assert_eq!(s * &prev, d.clone());
                prev = d;
            }
        }
    }
}
