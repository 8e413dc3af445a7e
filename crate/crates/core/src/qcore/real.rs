//! Floating-point abstraction shared by double and double-double arithmetic.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub use qd::Quad;

/// Scalar type every computation in the crate is generic over.
///
/// Implemented for `f64` and for [`Quad`] (about 31 significant digits).
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Significant decimal digits carried by the type.
    const DIGITS: u32;
    const NAME: &'static str;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn epsilon() -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }
    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        if self < Self::zero() {
            -Self::one()
        } else {
            Self::one()
        }
    }
}

impl Real for f64 {
    const DIGITS: u32 = 15;
    const NAME: &'static str = "double";

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

impl Real for Quad {
    const DIGITS: u32 = 31;
    const NAME: &'static str = "extended";

    fn from_f64(x: f64) -> Self {
        Quad::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        self.0 + self.1
    }
    fn epsilon() -> Self {
        Quad::EPSILON
    }
    fn sqrt(self) -> Self {
        if self.0 == 0.0 {
            return Quad::ZERO;
        }
        Quad::sqrt(self)
    }
    fn exp(self) -> Self {
        Quad::exp(self)
    }
    fn ln(self) -> Self {
        Quad::ln(self)
    }
    fn abs(self) -> Self {
        Quad::abs(self)
    }
    fn is_finite(self) -> bool {
        Quad::is_finite(self)
    }
}

/// Sum helper usable on any iterator of `Real`s.
pub fn sum<T: Real, I: IntoIterator<Item = T>>(it: I) -> T {
    it.into_iter().fold(T::zero(), |a, b| a + b)
}

