//! The integer scalar abstraction shared by the lattice, Smith normal form
//! and ledger code.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// An exact signed integer type usable as matrix entries and ledger values.
///
/// Implemented for `i64`, `i128` and `num_bigint::BigInt`. Fixed-width types
/// panic on overflow in builds with overflow checks; `BigInt` never overflows.
pub trait Scalar:
    Integer + Signed + Clone + Debug + Display + Hash + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn of(value: i64) -> Self {
        Self::from_i64(value).expect("i64 value representable in every scalar type")
    }
}

impl<T> Scalar for T where
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

/// Converts between scalar types, failing if the value does not fit.
pub fn cast<A: Scalar, B: Scalar>(value: &A) -> Option<B> {
    if let Some(v) = value.to_i64() {
        return B::from_i64(v);
    }
    if let Some(v) = value.to_i128() {
        return B::from_i128(v);
    }
    // Values outside i128 only round-trip through a decimal string.
    B::from_str_radix(&value.to_string(), 10).ok()
}
