use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::{minors_gcd, smith_normal_form, IntMatrix, LinAlgError};

/// An integer `x` with `A x = c`, or `None` when no integer solution exists.
///
/// With `A = U S V`, the system becomes `S y = U^-1 c` for `y = V x`, which is
/// solvable iff each transformed entry is divisible by its invariant factor
/// and the entries past the rank vanish. Free coordinates are set to zero.
pub fn solve_linear_system(a: &IntMatrix, c: &[BigInt]) -> Result<Option<Vec<BigInt>>, LinAlgError> {
    if c.len() != a.rows() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "right-hand side of length {} against {} rows",
            c.len(),
            a.rows()
        )));
    }
    let snf = smith_normal_form(a);
    let t = snf.u_inv.mul_vec(c)?;
    let q = snf.rank();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ti) in t.iter().enumerate() {
        if i < q {
            let (quot, rem) = ti.div_rem(&snf.invariant_factors[i]);
            if !rem.is_zero() {
                return Ok(None);
            }
            y[i] = quot;
        } else if !ti.is_zero() {
            return Ok(None);
        }
    }
    let x = snf.v_inv.mul_vec(&y)?;
    debug_assert_eq!(a.mul_vec(&x)?, c);
    Ok(Some(x))
}

/// Heger's criterion: the gcd of the maximal minors of `A` equals that of
/// `(A | c)`. For `A` of full row rank this decides integer solvability.
pub fn heger_check(a: &IntMatrix, c: &[BigInt]) -> Result<bool, LinAlgError> {
    let m = a.rows();
    if m > a.cols() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "{} rows exceed {} columns",
            m,
            a.cols()
        )));
    }
    let aug = a.augment(c)?;
    Ok(minors_gcd(a, m)? == minors_gcd(&aug, m)?)
}
