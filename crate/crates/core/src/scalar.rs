//! The numeric abstraction shared by the float fast path and the interval path.
//!
//! Geometry, separation bounds, and the estimator are written once against
//! [`Real`]. With `f64` they give the round-to-nearest screening values used
//! by the hybrid driver; with [`Interval`] every result is a certified
//! enclosure. Guards (divisor floor, safe square root) behave identically in
//! both instantiations so the two paths take the same branches.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::Fault;
use crate::interval::{Interval, DIVISOR_FLOOR};

pub trait Real:
    Copy + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// Whether comparisons on this type are certified.
    const RIGOROUS: bool;

    /// Exact embedding of a double.
    fn exact(x: f64) -> Self;
    fn ratio(num: i64, den: i64) -> Self;
    fn div(self, rhs: Self) -> Result<Self, Fault>;
    fn sqrt(self) -> Result<Self, Fault>;
    fn safe_sqrt(self) -> Result<Self, Fault>;
    fn square(self) -> Self;
    fn max(self, other: Self) -> Self;
    fn min(self, other: Self) -> Self;
    /// Certified lower endpoint (the value itself for `f64`).
    fn lo(self) -> f64;
    /// Certified upper endpoint (the value itself for `f64`).
    fn hi(self) -> f64;
    /// A double not above the real result of the rounded operation that produced `x`.
    fn down(x: f64) -> f64;
    /// A double not below the real result of the rounded operation that produced `x`.
    fn up(x: f64) -> f64;

    fn zero() -> Self {
        Self::exact(0.0)
    }

    fn one() -> Self {
        Self::exact(1.0)
    }

    fn int(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    fn recip(self) -> Result<Self, Fault> {
        Self::one().div(self)
    }

    /// Encloses `max(x, 0)`.
    fn clamp_below_zero(self) -> Self {
        self.max(Self::zero())
    }
}

impl Real for f64 {
    const RIGOROUS: bool = false;

    #[inline]
    fn exact(x: f64) -> Self {
        x
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    #[inline]
    fn div(self, rhs: Self) -> Result<Self, Fault> {
        if rhs.abs() < DIVISOR_FLOOR {
            return Err(Fault::DivisionGuard { lo: rhs, hi: rhs });
        }
        Ok(self / rhs)
    }

    #[inline]
    fn sqrt(self) -> Result<Self, Fault> {
        if self < 0.0 {
            return Err(Fault::NegativeSqrt { lo: self });
        }
        Ok(f64::sqrt(self))
    }

    #[inline]
    fn safe_sqrt(self) -> Result<Self, Fault> {
        if self < 1.0 / 1024.0 {
            Ok(1.0 / 32.0)
        } else {
            Ok(f64::sqrt(self))
        }
    }

    #[inline]
    fn square(self) -> Self {
        self * self
    }

    #[inline]
    fn max(self, other: Self) -> Self {
        f64::max(self, other)
    }

    #[inline]
    fn min(self, other: Self) -> Self {
        f64::min(self, other)
    }

    #[inline]
    fn lo(self) -> f64 {
        self
    }

    #[inline]
    fn hi(self) -> f64 {
        self
    }

    #[inline]
    fn down(x: f64) -> f64 {
        x
    }

    #[inline]
    fn up(x: f64) -> f64 {
        x
    }
}

impl Real for Interval {
    const RIGOROUS: bool = true;

    #[inline]
    fn exact(x: f64) -> Self {
        Interval::point(x)
    }

    fn ratio(num: i64, den: i64) -> Self {
        Interval::from_ratio(num, den)
    }

    #[inline]
    fn div(self, rhs: Self) -> Result<Self, Fault> {
        self.checked_div(rhs)
    }

    #[inline]
    fn sqrt(self) -> Result<Self, Fault> {
        Interval::sqrt(self)
    }

    #[inline]
    fn safe_sqrt(self) -> Result<Self, Fault> {
        Interval::safe_sqrt(self)
    }

    #[inline]
    fn square(self) -> Self {
        Interval::square(self)
    }

    #[inline]
    fn max(self, other: Self) -> Self {
        Interval::max(self, other)
    }

    #[inline]
    fn min(self, other: Self) -> Self {
        Interval::min(self, other)
    }

    #[inline]
    fn lo(self) -> f64 {
        Interval::lo(&self)
    }

    #[inline]
    fn hi(self) -> f64 {
        Interval::hi(&self)
    }

    #[inline]
    fn down(x: f64) -> f64 {
        crate::interval::next_down(x)
    }

    #[inline]
    fn up(x: f64) -> f64 {
        crate::interval::next_up(x)
    }
}
