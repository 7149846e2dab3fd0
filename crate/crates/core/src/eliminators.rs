//! Confinement, the tetrahedral eliminator and the redundancy eliminator.
//!
//! Each test is generic over [`Real`]. With `Interval` the comparisons are
//! certified; with `f64` they are screening tests made conservative by
//! `slack`, to be confirmed in interval arithmetic.

use crate::dyadic::{unscale, DyadicBox};
use crate::estimator::BoxAnalysis;
use crate::geometry::{energy_from_dist_sq, half_sqrt3, tbp_energy, tetra_energy, Exponent};
use crate::scalar::Real;

/// Outcome of examining one box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Confined,
    Tetra,
    Redundant(u8),
    Energy,
    Subdivide(usize),
}

impl Verdict {
    pub fn tag(&self) -> String {
        match self {
            Verdict::Confined => "confined".into(),
            Verdict::Tetra => "tetra".into(),
            Verdict::Redundant(p) => format!("redundant{p}"),
            Verdict::Energy => "energy".into(),
            Verdict::Subdivide(k) => format!("split{k}"),
        }
    }

    pub fn from_tag(s: &str) -> Option<Verdict> {
        match s {
            "confined" => Some(Verdict::Confined),
            "tetra" => Some(Verdict::Tetra),
            "energy" => Some(Verdict::Energy),
            _ => {
                if let Some(p) = s.strip_prefix("redundant") {
                    p.parse().ok().filter(|p| (1..=3).contains(p)).map(Verdict::Redundant)
                } else if let Some(k) = s.strip_prefix("split") {
                    k.parse().ok().filter(|k| *k < 4).map(Verdict::Subdivide)
                } else {
                    None
                }
            }
        }
    }
}

/// Confinement side `2^-p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Eps {
    pub log2_inv: u32,
}

impl Eps {
    pub fn new(log2_inv: u32) -> Option<Eps> {
        (log2_inv <= 24).then_some(Eps { log2_inv })
    }

    pub fn value(&self) -> f64 {
        1.0 / (1u64 << self.log2_inv) as f64
    }
}

/// `lo > t - h` and `hi < t + h` for every `t` in the enclosure `target`.
fn inside_open<T: Real>(lo: i64, hi: i64, target: T, h: f64, slack: f64) -> bool {
    let h = T::exact(h);
    unscale(lo) > (target - h).hi() + slack && unscale(hi) < (target + h).lo() - slack
}

/// Every factor lies in the open square of side `eps` centered at the polar
/// bi-pyramid `(1, e^{-2πi/3}, 0, e^{2πi/3})`.
pub fn is_confined<T: Real>(b: &DyadicBox, eps: Eps, slack: f64) -> bool {
    let h = eps.value() / 2.0;
    let s = half_sqrt3::<T>();
    let half = T::ratio(1, 2);
    let (a, c) = b.q0.bounds();
    if !inside_open(a, c, T::one(), h, slack) {
        return false;
    }
    let targets = [(-half, -s), (T::zero(), T::zero()), (-half, s)];
    b.squares.iter().zip(targets).all(|(q, (tx, ty))| {
        let (x0, x1) = q.x_bounds();
        let (y0, y1) = q.y_bounds();
        inside_open(x0, x1, tx, h, slack) && inside_open(y0, y1, ty, h, slack)
    })
}

/// `M_E - T_E`.
pub fn tetra_threshold<T: Real>(e: Exponent) -> T {
    tbp_energy::<T>(e) - tetra_energy::<T>(e)
}

/// Lower bound on `E(d)` for every `d <= d_hi`.
fn energy_at_most<T: Real>(d_hi: f64, e: Exponent) -> T {
    if d_hi <= 0.125 {
        return T::int(if e == Exponent::One { 8 } else { 64 });
    }
    energy_from_dist_sq(T::exact(d_hi).square(), e).expect("distance above 1/8")
}

/// Some point's four pair energies already exceed `M_E - T_E`.
pub fn tetra_eliminate<T: Real>(a: &BoxAnalysis<T>, e: Exponent) -> bool {
    let threshold = tetra_threshold::<T>(e).hi();
    (0..5).any(|i| {
        let mut sum = T::zero();
        for j in 0..5 {
            if j != i {
                sum = sum + energy_at_most::<T>(a.pairs.get(i, j).psi_max, e);
            }
        }
        sum.lo() > threshold
    })
}

/// The property (1, 2 or 3) that excludes the box from the good set, if any.
pub fn redundancy_eliminate<T: Real>(b: &DyadicBox, a: &BoxAnalysis<T>, slack: f64) -> Option<u8> {
    let closest = a.pairs.get(0, 4).psi_min;
    for i in 0..5 {
        for j in (i + 1)..5 {
            if (i, j) != (0, 4) && a.pairs.get(i, j).psi_max + slack < closest {
                return Some(1);
            }
        }
    }
    if b.q0.bounds().1 < 1 << crate::dyadic::SCALE_BITS {
        return Some(1);
    }

    let (y1_lo, y1_hi) = b.squares[0].y_bounds();
    let (y2_lo, y2_hi) = b.squares[1].y_bounds();
    let (y3_lo, y3_hi) = b.squares[2].y_bounds();
    if y1_lo >= y2_hi || y2_lo >= y3_hi || y2_hi <= 0 || y1_lo >= 0 {
        return Some(2);
    }

    let bound = (T::one() - T::int(2).sqrt().expect("constant")).lo();
    let x2_hi = unscale(b.squares[1].x_bounds().1);
    if y1_hi < 0 && y3_lo > 0 && x2_hi + slack < bound {
        return Some(3);
    }
    None
}
