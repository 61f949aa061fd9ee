use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Scalar used inside the completion engine.
///
/// Every arithmetic operation is checked; `None` means the fixed-width
/// representation overflowed and the caller must retry with [`BigInt`].
pub(crate) trait Entry: Clone + Ord + Eq + Hash + Debug + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn add(&self, other: &Self) -> Option<Self>;
    fn sub(&self, other: &Self) -> Option<Self>;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn abs(&self) -> Option<Self>;
    /// Truncating division of nonnegative values.
    fn div(&self, other: &Self) -> Self;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Entry for i64 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_pos(&self) -> bool {
        *self > 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn add(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        self.checked_sub(*other)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn abs(&self) -> Option<Self> {
        self.checked_abs()
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Entry for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn abs(&self) -> Option<Self> {
        Some(Signed::abs(self))
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}
