//! The integer scalar abstraction every exact computation in this crate is
//! generic over.
//!
//! [`BigInt`](num_bigint::BigInt) is the default (see the aliases at the crate
//! root). Fixed-width types are supported for small, bounded workloads such as
//! subgroup enumeration, where every intermediate value is reduced modulo a
//! small level; callers choosing them accept the overflow risk in Smith
//! reduction of large matrices.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// An exact signed integer type.
pub trait Int:
    Integer
    + Signed
    + Clone
    + Debug
    + Display
    + Hash
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_usize_lossless(value: usize) -> Self {
        Self::from_usize(value).expect("usize fits the scalar type")
    }

    fn from_i64_lossless(value: i64) -> Self {
        Self::from_i64(value).expect("i64 fits the scalar type")
    }

    /// Least nonnegative residue modulo `n > 0`.
    fn residue(&self, n: &Self) -> Self {
        self.mod_floor(n)
    }

    /// `self^exp` by repeated squaring.
    fn pow_u32(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }
}

impl<T> Int for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + Hash
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Trial-division primality test.
pub fn is_prime<T: Int>(p: &T) -> bool {
    let two = T::from_i64_lossless(2);
    if *p < two {
        return false;
    }
    let mut d = two;
    while d.clone() * d.clone() <= *p {
        if p.is_multiple_of(&d) {
            return false;
        }
        d = d + T::one();
    }
    true
}

/// The exponent of the largest power of `p` dividing `value`; `None` for zero.
pub fn valuation<T: Int>(value: &T, p: &T) -> Option<u32> {
    if value.is_zero() {
        return None;
    }
    let mut v = value.abs();
    let mut k = 0;
    while v.is_multiple_of(p) {
        v = v / p.clone();
        k += 1;
    }
    Some(k)
}
