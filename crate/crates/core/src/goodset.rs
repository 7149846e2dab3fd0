//! The set of good configurations and the moves that reach it.
//!
//! A normalized configuration `(z0, z1, z2, z3, ∞)` is good when
//!
//! 1. `(0, 4)` is a closest pair and `x0 >= 1`;
//! 2. `y1 <= 0 <= y2 <= y3`;
//! 3. if `y1 < 0 < y3` then `x2 >= 1 - sqrt 2`.
//!
//! Every configuration can be moved into the good set without raising any
//! power-law energy. [`to_good_set`] performs the moves in floating point;
//! it serves as the completeness oracle for the redundancy eliminator.

use crate::error::Fault;
use crate::geometry::{normalize_configuration, sphere_points, stereo, Configuration, PlanePoint};

/// A failed good-set predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    NotClosest(usize, usize),
    XZeroBelowOne,
    YOneAboveZero,
    YTwoBelowZero,
    OrdinatesUnsorted,
    XTwoLeftOfBound,
}

fn dist(p: [f64; 3], q: [f64; 3]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

/// All predicates that fail by more than `tol`.
pub fn violations(c: &Configuration<f64>, tol: f64) -> Vec<Violation> {
    let [x0, _, y1, x2, y2, _, y3] = c.coords;
    let pts = sphere_points(c);
    let mut out = Vec::new();
    let d04 = dist(pts[0], pts[4]);
    for i in 0..5 {
        for j in (i + 1)..5 {
            if (i, j) != (0, 4) && dist(pts[i], pts[j]) < d04 - tol {
                out.push(Violation::NotClosest(i, j));
            }
        }
    }
    if x0 < 1.0 - tol {
        out.push(Violation::XZeroBelowOne);
    }
    if y1 > tol {
        out.push(Violation::YOneAboveZero);
    }
    if y2 < -tol {
        out.push(Violation::YTwoBelowZero);
    }
    if y1 > y2 + tol || y2 > y3 + tol {
        out.push(Violation::OrdinatesUnsorted);
    }
    if y1 < -tol && y3 > tol && x2 < 1.0 - std::f64::consts::SQRT_2 - tol {
        out.push(Violation::XTwoLeftOfBound);
    }
    out
}

fn finite(c: &Configuration<f64>, i: usize) -> (f64, f64) {
    (c.coords[2 * i - 1], c.coords[2 * i])
}

fn set(c: &mut Configuration<f64>, i: usize, (x, y): (f64, f64)) {
    c.coords[2 * i - 1] = x;
    c.coords[2 * i] = y;
}

fn sort_by_ordinate(c: &mut Configuration<f64>) {
    let mut z = [finite(c, 1), finite(c, 2), finite(c, 3)];
    z.sort_by(|a, b| a.1.total_cmp(&b.1));
    for (k, p) in z.into_iter().enumerate() {
        set(c, k + 1, p);
    }
}

/// The isometry of the sphere exchanging `p0` and the north pole, in the
/// plane a reflection that fixes `z0` and preserves the sign of each ordinate.
fn swap_zero_and_infinity(c: &Configuration<f64>) -> Result<Configuration<f64>, Fault> {
    let pts = sphere_points(c);
    let n = [pts[0][0], pts[0][1], pts[0][2] - 1.0];
    let len = dist(pts[0], [0.0, 0.0, 1.0]);
    if len < 1e-12 {
        return Err(Fault::Coincident);
    }
    let n = n.map(|v| v / len);
    let reflect = |v: [f64; 3]| {
        let t = 2.0 * (v[0] * n[0] + v[1] * n[1] + v[2] * n[2]);
        [v[0] - t * n[0], v[1] - t * n[1], v[2] - t * n[2]]
    };
    let mut out = *c;
    for i in 1..4 {
        match stereo(reflect(pts[i])) {
            PlanePoint::Finite { x, y } => set(&mut out, i, (x, y)),
            PlanePoint::Infinity => return Err(Fault::Coincident),
        }
    }
    Ok(out)
}

/// Moves five distinct sphere points to a good configuration with no larger energy.
pub fn to_good_set(points: &[[f64; 3]; 5]) -> Result<Configuration<f64>, Fault> {
    let mut c = normalize_configuration(points)?;
    sort_by_ordinate(&mut c);
    if c.coords[4] < 0.0 {
        for k in [2, 4, 6] {
            c.coords[k] = -c.coords[k];
        }
        sort_by_ordinate(&mut c);
    }
    if c.coords[2] > 0.0 {
        // reflecting one point across the real circle only moves it away
        // from the others, which all lie on the same side
        c.coords[2] = -c.coords[2];
    }
    let [_, _, y1, x2, _, _, y3] = c.coords;
    if y1 < 0.0 && y3 > 0.0 && x2 < 1.0 - std::f64::consts::SQRT_2 {
        c = swap_zero_and_infinity(&c)?;
        if c.coords[4] > c.coords[6] {
            let (z2, z3) = (finite(&c, 2), finite(&c, 3));
            set(&mut c, 2, z3);
            set(&mut c, 3, z2);
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{config_energy, tbp_reference, Exponent, TbpKind};

    #[test]
    fn polar_bipyramid_is_good() {
        let c = tbp_reference::<f64>(TbpKind::Polar);
        assert!(violations(&c, 1e-12).is_empty());
    }

    #[test]
    fn equatorial_bipyramid_moves_to_polar_form() {
        let c = tbp_reference::<f64>(TbpKind::Equatorial);
        assert!(violations(&c, 1e-12).contains(&Violation::XTwoLeftOfBound));
        let g = to_good_set(&sphere_points(&c)).unwrap();
        assert!(violations(&g, 1e-9).is_empty(), "{:?}", g.coords);
        for e in [Exponent::One, Exponent::Two] {
            let a = config_energy::<f64>(&c, e).unwrap();
            let b = config_energy::<f64>(&g, e).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_conjugation_lowers_energy() {
        let mut c = tbp_reference::<f64>(TbpKind::Polar);
        c.coords[2] = 0.3;
        let g = to_good_set(&sphere_points(&c)).unwrap();
        assert!(violations(&g, 1e-9).is_empty());
        let e = Exponent::One;
        assert!(config_energy::<f64>(&g, e).unwrap() <= config_energy::<f64>(&c, e).unwrap() + 1e-12);
    }
}
