//! High-precision reference energy and its central differences.
//!
//! Coordinates are taken as exact rationals and the energy is returned in
//! fixed point with [`SCALE_BITS`] fractional bits, so differences at tiny
//! steps are free of cancellation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use tbp_core::geometry::Exponent;

use crate::exact::{rat_int, rat_of};

pub const SCALE_BITS: u32 = 300;

fn point(c: &[BigRational; 7], i: usize) -> Option<(BigRational, BigRational)> {
    match i {
        0 => Some((c[0].clone(), rat_int(0))),
        1..=3 => Some((c[2 * i - 1].clone(), c[2 * i].clone())),
        _ => None,
    }
}

/// `1 / d²` for the chordal distance `d`.
fn inverse_dist_sq(z: &Option<(BigRational, BigRational)>, w: &Option<(BigRational, BigRational)>) -> BigRational {
    let n = |p: &(BigRational, BigRational)| BigRational::one() + &p.0 * &p.0 + &p.1 * &p.1;
    match (z, w) {
        (Some(a), Some(b)) => {
            let dx = &a.0 - &b.0;
            let dy = &a.1 - &b.1;
            n(a) * n(b) / (rat_int(4) * (&dx * &dx + &dy * &dy))
        }
        (Some(a), None) | (None, Some(a)) => n(a) / rat_int(4),
        (None, None) => panic!("two points at infinity"),
    }
}

/// `2^SCALE_BITS` times the energy, within a few units.
pub fn energy_fixed(c: &[BigRational; 7], e: Exponent) -> BigInt {
    let pts: Vec<_> = (0..5).map(|i| point(c, i)).collect();
    let mut total = BigInt::from(0);
    for i in 0..5 {
        for j in (i + 1)..5 {
            let u = inverse_dist_sq(&pts[i], &pts[j]);
            total += match e {
                Exponent::Two => (u * BigRational::from_integer(BigInt::one() << SCALE_BITS)).floor().to_integer(),
                Exponent::One => (u * BigRational::from_integer(BigInt::one() << (2 * SCALE_BITS)))
                    .floor()
                    .to_integer()
                    .sqrt(),
            };
        }
    }
    total
}

fn shifted(x: &[f64; 7], moves: &[(usize, i64)], h: f64) -> [BigRational; 7] {
    let mut c = x.map(rat_of);
    let h = rat_of(h);
    for &(i, s) in moves {
        c[i] += &h * rat_int(s);
    }
    c
}

fn to_f64(n: BigInt, denom: &BigRational) -> f64 {
    (BigRational::from_integer(n) / (denom * BigRational::from_integer(BigInt::one() << SCALE_BITS)))
        .to_f64()
        .expect("finite difference in range")
}

/// Central-difference gradient with step `h`.
pub fn gradient_fd(x: &[f64; 7], e: Exponent, h: f64) -> [f64; 7] {
    let denom = rat_of(2.0 * h);
    std::array::from_fn(|i| {
        let p = energy_fixed(&shifted(x, &[(i, 1)], h), e);
        let m = energy_fixed(&shifted(x, &[(i, -1)], h), e);
        to_f64(p - m, &denom)
    })
}

/// Central-difference Hessian with step `h`.
pub fn hessian_fd(x: &[f64; 7], e: Exponent, h: f64) -> [[f64; 7]; 7] {
    let f = |moves: &[(usize, i64)]| energy_fixed(&shifted(x, moves, h), e);
    let center = f(&[]);
    let mut out = [[0.0; 7]; 7];
    for i in 0..7 {
        let d = f(&[(i, 1)]) - BigInt::from(2) * &center + f(&[(i, -1)]);
        out[i][i] = to_f64(d, &rat_of(h * h));
        for j in 0..i {
            let d = f(&[(i, 1), (j, 1)]) - f(&[(i, 1), (j, -1)]) - f(&[(i, -1), (j, 1)]) + f(&[(i, -1), (j, -1)]);
            out[i][j] = to_f64(d, &rat_of(4.0 * h * h));
            out[j][i] = out[i][j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tbp_core::geometry::{tbp_energy, tbp_reference, TbpKind};
    use tbp_core::Interval;

    #[test]
    fn bipyramid_energy() {
        let c = tbp_reference::<f64>(TbpKind::Polar).coords;
        // the f64 coordinates are off by an ulp, the energy is stationary there
        for e in [Exponent::One, Exponent::Two] {
            let v = to_f64(energy_fixed(&c.map(rat_of), e), &rat_int(1));
            let iv: Interval = tbp_energy(e);
            assert!((v - iv.midpoint()).abs() < 1e-15, "{v} vs {iv:?}");
        }
    }

    #[test]
    fn gradient_vanishes_at_the_bipyramid() {
        let c = tbp_reference::<f64>(TbpKind::Polar).coords;
        for g in gradient_fd(&c, Exponent::Two, 1.0 / (1u64 << 20) as f64) {
            assert!(g.abs() < 1e-9);
        }
    }
}
