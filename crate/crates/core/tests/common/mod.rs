//! Exact rational helpers and random generators shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use tbp_core::dyadic::{unscale, DyadicBox, Patch, SCALE_BITS};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite double")
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `Σ⁻¹(x, y)` with exact rationals.
pub fn sphere(x: &BigRational, y: &BigRational) -> [BigRational; 3] {
    let n = x * x + y * y;
    let d = BigRational::one() + &n;
    [int(2) * x / &d, int(2) * y / &d, (n - BigRational::one()) / d]
}

pub fn north() -> [BigRational; 3] {
    [BigRational::zero(), BigRational::zero(), BigRational::one()]
}

pub fn dist_sq(p: &[BigRational; 3], q: &[BigRational; 3]) -> BigRational {
    let mut s = BigRational::zero();
    for k in 0..3 {
        let d = &p[k] - &q[k];
        s += &d * &d;
    }
    s
}

/// Sphere image of a sampled plane point; `None` is the north pole.
pub fn sphere_of(p: Option<(f64, f64)>) -> [BigRational; 3] {
    match p {
        Some((x, y)) => sphere(&rat(x), &rat(y)),
        None => north(),
    }
}

/// A uniformly random grid point of the patch (exact in `f64`), or `None` for `∞`.
pub fn sample_in_patch(r: &mut impl Rng, q: &Patch) -> Option<(f64, f64)> {
    let (a, b, c, d) = q.scaled_bounds()?;
    let x = r.gen_range(a..=b);
    let y = if c == d { c } else { r.gen_range(c..=d) };
    Some((unscale(x), unscale(y)))
}

/// Coordinates of the polar bi-pyramid in `(x0, x1, y1, x2, y2, x3, y3)` order.
pub fn polar() -> [f64; 7] {
    let s = 3f64.sqrt() / 2.0;
    [1.0, -0.5, -s, 0.0, 0.0, -0.5, s]
}

/// A random box of the given depth around a point within `spread` of the
/// bi-pyramid, clamped into the root box.
pub fn box_near_target(r: &mut impl Rng, depth: u8, spread: f64) -> DyadicBox {
    let mut c = polar();
    for v in c.iter_mut() {
        *v += r.gen_range(-spread..spread);
    }
    c[0] = c[0].clamp(0.0, 4.0 - 1e-9);
    DyadicBox::containing(c, depth)
}

/// A uniformly random box of the given depth.
pub fn random_box(r: &mut impl Rng, depth: u8) -> DyadicBox {
    let mut c = [0.0; 7];
    c[0] = r.gen_range(0.0..4.0);
    for v in c.iter_mut().skip(1) {
        *v = r.gen_range(-2.0..2.0);
    }
    DyadicBox::containing(c, depth)
}

pub const ONE: i64 = 1 << SCALE_BITS;

/// A uniformly random grid point of the patch in scaled integers.
pub fn sample_scaled(r: &mut impl Rng, q: &Patch) -> Option<(i64, i64)> {
    let (a, b, c, d) = q.scaled_bounds()?;
    let x = r.gen_range(a..=b);
    let y = if c == d { c } else { r.gen_range(c..=d) };
    Some((x, y))
}

/// Exact squared chordal distance `n / d` between scaled plane points
/// (`None` is `∞`), using `|Σ⁻¹z - Σ⁻¹w|² = 4|z-w|² / ((1+|z|²)(1+|w|²))`.
pub fn chord_sq_scaled(z: Option<(i64, i64)>, w: Option<(i64, i64)>) -> (BigInt, BigInt) {
    let s = BigInt::from(1u64) << (2 * SCALE_BITS);
    let norm = |p: (i64, i64)| BigInt::from(p.0) * p.0 + BigInt::from(p.1) * p.1;
    match (z, w) {
        (None, None) => (BigInt::from(0), BigInt::from(1)),
        (Some(p), None) | (None, Some(p)) => (BigInt::from(4) * &s, &s + norm(p)),
        (Some(p), Some(q)) => {
            let diff = norm((p.0 - q.0, p.1 - q.1));
            (BigInt::from(4) * diff * &s, (&s + norm(p)) * (&s + norm(q)))
        }
    }
}

/// Orders `x²` against the positive fraction `n / d` exactly.
pub fn cmp_sq(x: f64, n: &BigInt, d: &BigInt) -> std::cmp::Ordering {
    let q = rat(x);
    let lhs = q.numer() * q.numer() * d;
    let rhs = q.denom() * q.denom() * n;
    lhs.cmp(&rhs)
}

pub fn scaled_to_f64(p: Option<(i64, i64)>) -> Option<(f64, f64)> {
    p.map(|(x, y)| (unscale(x), unscale(y)))
}
