use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::LinAlgError;

/// Extended Euclid: `(g, u, v)` with `u*a + v*b = g = gcd(a, b) > 0`.
///
/// The cofactors come straight out of the remainder sequence, which keeps
/// `|u|, |v| <= max(|a|, |b|)`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt), LinAlgError> {
    if a.is_zero() && b.is_zero() {
        return Err(LinAlgError::BothZero);
    }
    let (mut old_r, mut r) = (a.abs(), b.abs());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if a.is_negative() {
        old_s = -old_s;
    }
    if b.is_negative() {
        old_t = -old_t;
    }
    debug_assert_eq!(&old_s * a + &old_t * b, old_r);
    Ok((old_r, old_s, old_t))
}

/// Nonnegative gcd of all values (0 for an empty or all-zero list).
pub fn gcd_all<'a, I: IntoIterator<Item = &'a BigInt>>(values: I) -> BigInt {
    values.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}
