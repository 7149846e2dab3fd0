//! Outward-rounded interval arithmetic over IEEE binary64.
//!
//! Every operation is evaluated on the endpoints in round-to-nearest and the
//! result is widened by one representable step on each side. No rounding-mode
//! switching takes place, so values are freely shareable across threads.
//!
//! All magnitudes are expected to stay inside `|x| <= 2^30`; the only guards
//! against singular inputs are the `2^-11` divisor floor and [`Interval::safe_sqrt`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::Fault;

/// Upper bound on the magnitude of every value handled by the engine.
pub const RANGE_LIMIT: f64 = 1_073_741_824.0; // 2^30

/// Smallest divisor magnitude accepted by [`Interval::checked_div`].
pub const DIVISOR_FLOOR: f64 = 1.0 / 2048.0; // 2^-11

const SAFE_SQRT_CUTOFF: f64 = 1.0 / 1024.0; // 2^-10
const SAFE_SQRT_VALUE: f64 = 1.0 / 32.0; // 2^-5

const SIGN_BIT: u64 = 1 << 63;
const MAGNITUDE_MASK: u64 = !SIGN_BIT;

/// Next double toward +inf, computed on the raw bit pattern.
///
/// Non-negative doubles are ordered like their 63 trailing bits read as an
/// integer; non-positive doubles are ordered in reverse. Incrementing a
/// positive double adds one to that integer, incrementing a negative one
/// subtracts one, and `-0.0` is treated as `+0.0`.
#[inline]
pub fn next_up(x: f64) -> f64 {
    let bits = x.to_bits();
    let mag = bits & MAGNITUDE_MASK;
    if mag == 0 {
        return f64::from_bits(1);
    }
    if bits & SIGN_BIT == 0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    }
}

/// Next double toward -inf; mirror image of [`next_up`].
#[inline]
pub fn next_down(x: f64) -> f64 {
    let bits = x.to_bits();
    let mag = bits & MAGNITUDE_MASK;
    if mag == 0 {
        return f64::from_bits(SIGN_BIT | 1);
    }
    if bits & SIGN_BIT == 0 {
        f64::from_bits(bits - 1)
    } else {
        f64::from_bits(bits + 1)
    }
}

#[inline]
fn in_range(x: f64) -> bool {
    x.is_finite() && x.abs() <= RANGE_LIMIT
}

fn check_range(x: f64) -> Result<f64, Fault> {
    if in_range(x) {
        Ok(x)
    } else {
        Err(Fault::Range(x))
    }
}

/// Checked increment: the adjacent double above `x`.
pub fn increment(x: f64) -> Result<f64, Fault> {
    check_range(x)?;
    check_range(next_up(x))
}

/// Checked decrement: the adjacent double below `x`.
pub fn decrement(x: f64) -> Result<f64, Fault> {
    check_range(x)?;
    check_range(next_down(x))
}

/// Number of representable doubles stepped over going from `a` up to `b`.
pub fn ulp_steps(a: f64, b: f64) -> u64 {
    fn ordinal(x: f64) -> i64 {
        let bits = x.to_bits();
        let mag = (bits & MAGNITUDE_MASK) as i64;
        if bits & SIGN_BIT == 0 {
            mag
        } else {
            -mag
        }
    }
    (ordinal(b) - ordinal(a)).unsigned_abs()
}

/// A closed interval `[lo, hi]` of doubles with `lo <= hi`.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Builds `[lo, hi]`; panics if the endpoints are unordered or not finite.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo.is_finite() && hi.is_finite(), "non-finite interval endpoint");
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        debug_assert!(in_range(lo) && in_range(hi), "interval outside 2^30 range");
        Interval { lo, hi }
    }

    /// The degenerate interval holding exactly `x`.
    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    /// Enclosure of `num / den` for integers that fit exactly in a double.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0);
        let n = num as f64;
        let d = den as f64;
        assert!(n as i64 == num && d as i64 == den, "ratio operands must be exact doubles");
        let q = n / d;
        // exact quotient: skip widening
        if q.mul_add(d, -n) == 0.0 {
            Interval::point(q)
        } else {
            Interval::round_out_raw(q, q)
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Width counted in representable doubles.
    pub fn width_ulps(&self) -> u64 {
        ulp_steps(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Intersection, or `None` if the intervals are disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then(|| Interval::new(lo, hi))
    }

    /// `[x, y]_o = [x_-, y_+]`.
    pub fn round_out(&self) -> Result<Interval, Fault> {
        Ok(Interval {
            lo: decrement(self.lo)?,
            hi: increment(self.hi)?,
        })
    }

    #[inline]
    fn round_out_raw(lo: f64, hi: f64) -> Interval {
        let out = Interval {
            lo: next_down(lo),
            hi: next_up(hi),
        };
        debug_assert!(out.in_range(), "interval left the 2^30 working range: {out:?}");
        out
    }

    /// True when both endpoints are finite and inside `|x| <= 2^30`.
    pub fn in_range(&self) -> bool {
        in_range(self.lo) && in_range(self.hi)
    }

    /// Release-mode range audit.
    pub fn audit(&self) -> Result<Interval, Fault> {
        check_range(self.lo)?;
        check_range(self.hi)?;
        Ok(*self)
    }

    /// Quotient with the divisor-magnitude guard.
    pub fn checked_div(self, rhs: Interval) -> Result<Interval, Fault> {
        if !(rhs.lo >= DIVISOR_FLOOR || rhs.hi <= -DIVISOR_FLOOR) {
            return Err(Fault::DivisionGuard { lo: rhs.lo, hi: rhs.hi });
        }
        let q = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let (lo, hi) = min_max4(q);
        Ok(Interval::round_out_raw(lo, hi))
    }

    pub fn sqrt(self) -> Result<Interval, Fault> {
        if self.lo < 0.0 {
            return Err(Fault::NegativeSqrt { lo: self.lo });
        }
        Ok(Interval::round_out_raw(self.lo.sqrt(), self.hi.sqrt()))
    }

    /// `sigma`: returns the point `2^-5` when `hi < 2^-10`, otherwise [`Interval::sqrt`].
    ///
    /// The result always dominates the true square root from above, which is
    /// the only direction the separation bounds consume.
    pub fn safe_sqrt(self) -> Result<Interval, Fault> {
        if self.hi < SAFE_SQRT_CUTOFF {
            return Ok(Interval::point(SAFE_SQRT_VALUE));
        }
        if self.lo < 0.0 {
            return Err(Fault::SafeSqrtGuard { lo: self.lo, hi: self.hi });
        }
        self.sqrt()
    }

    /// `x * x`, evaluated as a product but aware that both factors coincide.
    pub fn square(self) -> Interval {
        let a = self.lo * self.lo;
        let b = self.hi * self.hi;
        if self.lo >= 0.0 {
            Interval::round_out_raw(a, b)
        } else if self.hi <= 0.0 {
            Interval::round_out_raw(b, a)
        } else {
            Interval {
                lo: 0.0,
                hi: next_up(a.max(b)),
            }
        }
    }

    /// Elementwise maximum: encloses `max(x, y)` for `x` in self, `y` in other.
    pub fn max(self, other: Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    pub fn min(self, other: Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    /// Encloses `|x|`.
    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval::new(0.0, (-self.lo).max(self.hi))
        }
    }

    /// Convex hull of two intervals.
    pub fn hull(self, other: Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// `self < other` holds for every pair of members.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    /// `self > other` holds for every pair of members.
    pub fn certainly_gt(&self, other: &Interval) -> bool {
        self.lo > other.hi
    }
}

#[inline]
fn min_max4(v: [f64; 4]) -> (f64, f64) {
    let mut lo = v[0];
    let mut hi = v[0];
    for &x in &v[1..] {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    (lo, hi)
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval::round_out_raw(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval::round_out_raw(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let (lo, hi) = min_max4([
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ]);
        Interval::round_out_raw(lo, hi)
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            crate::hexfloat::format(self.lo),
            crate::hexfloat::format(self.hi)
        )
    }
}
