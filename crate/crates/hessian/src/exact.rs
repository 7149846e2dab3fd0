//! Exact arithmetic in `Q(√3)` and certified conversion to intervals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use tbp_core::interval::{next_down, next_up};
use tbp_core::Interval;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The exact value of a double.
pub fn rat_of(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite double")
}

/// Largest double not above `q`.
pub fn down_f64(q: &BigRational) -> f64 {
    let mut x = q.to_f64().expect("rational in double range");
    while rat_of(x) > *q {
        x = next_down(x);
    }
    x
}

/// Smallest double not below `q`.
pub fn up_f64(q: &BigRational) -> f64 {
    let mut x = q.to_f64().expect("rational in double range");
    while rat_of(x) < *q {
        x = next_up(x);
    }
    x
}

/// Tightest double interval around a rational.
pub fn rat_interval(q: &BigRational) -> Interval {
    Interval::new(down_f64(q), up_f64(q))
}

/// Certified enclosure of `√3`.
pub fn sqrt3_interval() -> Interval {
    let mut lo = 3f64.sqrt();
    let three = rat_int(3);
    while rat_of(lo) * rat_of(lo) > three {
        lo = next_down(lo);
    }
    let mut hi = lo;
    while rat_of(hi) * rat_of(hi) < three {
        hi = next_up(hi);
    }
    Interval::new(lo, hi)
}

/// `a + b√3` with rational `a`, `b`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSqrt3 {
    pub a: BigRational,
    pub b: BigRational,
}

impl QSqrt3 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt3 { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        QSqrt3 { a, b: BigRational::zero() }
    }

    pub fn zero() -> Self {
        QSqrt3::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        QSqrt3::rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Sign of `a + b√3`, decided exactly.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal || sa == sb {
            return if sa == Ordering::Equal { sb } else { sa };
        }
        if sa == Ordering::Equal {
            return sb;
        }
        // opposite signs: compare a² with 3b²
        let a2 = &self.a * &self.a;
        let b2 = &self.b * &self.b * rat_int(3);
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn abs(&self) -> QSqrt3 {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn cmp_value(&self, other: &QSqrt3) -> Ordering {
        (self.clone() - other.clone()).signum()
    }

    /// `None` for zero.
    pub fn recip(&self) -> Option<QSqrt3> {
        let norm = &self.a * &self.a - &self.b * &self.b * rat_int(3);
        if norm.is_zero() {
            return None;
        }
        Some(QSqrt3 {
            a: &self.a / &norm,
            b: -&self.b / &norm,
        })
    }

    pub fn to_interval(&self) -> Interval {
        rat_interval(&self.a) + rat_interval(&self.b) * sqrt3_interval()
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap() + self.b.to_f64().unwrap() * 3f64.sqrt()
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> BigInt {
        let mut n = BigInt::from(self.to_f64().ceil() as i64);
        let at = |n: &BigInt| QSqrt3::rational(BigRational::from_integer(n.clone()));
        while self.cmp_value(&at(&n)) == Ordering::Greater {
            n += 1;
        }
        while self.cmp_value(&at(&(&n - 1))) != Ordering::Greater {
            n -= 1;
        }
        n
    }
}

impl Default for QSqrt3 {
    fn default() -> Self {
        QSqrt3::zero()
    }
}

impl fmt::Debug for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}√3", self.a, self.b)
    }
}

impl fmt::Display for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "({})√3", self.b)
        } else {
            write!(f, "{} + ({})√3", self.a, self.b)
        }
    }
}

impl Add for QSqrt3 {
    type Output = QSqrt3;
    fn add(self, o: QSqrt3) -> QSqrt3 {
        QSqrt3 {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

impl Sub for QSqrt3 {
    type Output = QSqrt3;
    fn sub(self, o: QSqrt3) -> QSqrt3 {
        QSqrt3 {
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }
}

impl Mul for QSqrt3 {
    type Output = QSqrt3;
    fn mul(self, o: QSqrt3) -> QSqrt3 {
        QSqrt3 {
            a: &self.a * &o.a + &self.b * &o.b * rat_int(3),
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl Neg for QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        QSqrt3 { a: -self.a, b: -self.b }
    }
}

/// Exact rational power of a rational, for small exponents.
pub fn pow_rat(x: &BigRational, n: u32) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..n {
        out *= x;
    }
    out
}

pub fn abs_rat(x: &BigRational) -> BigRational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> QSqrt3 {
        QSqrt3::new(rat_int(a), rat_int(b))
    }

    #[test]
    fn signs() {
        assert_eq!(q(2, -1).signum(), Ordering::Greater); // 2 > √3
        assert_eq!(q(1, -1).signum(), Ordering::Less);
        assert_eq!(q(-7, 4).signum(), Ordering::Less); // 49 > 48
        assert_eq!(q(0, 0).signum(), Ordering::Equal);
        assert_eq!(q(0, -3).signum(), Ordering::Less);
    }

    #[test]
    fn ring_and_inverse() {
        let x = q(2, 1);
        let y = x.recip().unwrap();
        assert_eq!(x.clone() * y, QSqrt3::one());
        assert_eq!(q(0, 1) * q(0, 1), q(3, 0));
        assert!(q(0, 0).recip().is_none());
    }

    #[test]
    fn ceilings() {
        assert_eq!(q(0, 1).ceil(), BigInt::from(2));
        assert_eq!(q(5, 0).ceil(), BigInt::from(5));
        assert_eq!(q(-1, 1).ceil(), BigInt::from(1));
        assert_eq!(q(100, -57).ceil(), BigInt::from(2)); // 100 - 98.727
    }

    #[test]
    fn enclosures() {
        let s = sqrt3_interval();
        assert!(s.lo() < 3f64.sqrt() + 1e-15 && s.hi() >= s.lo());
        assert!(s.width_ulps() <= 1);
        let third = rat_interval(&rat(1, 3));
        assert!(third.contains(1.0 / 3.0));
        assert!(q(1, 2).to_interval().contains(1.0 + 2.0 * 3f64.sqrt()));
    }
}
