//! Certified lower and upper bounds on the chordal distance between two
//! spherical patches.

use crate::dyadic::{Patch, PatchQuantities};
use crate::error::Fault;
use crate::geometry::{chordal_dist, chordal_dist_sq};
use crate::scalar::Real;

/// `psi_min <= |p1 - p2| <= psi_max` for `p1`, `p2` in the patches (the
/// lower bound also holds on convex hulls). Both are certified endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationBounds {
    pub psi_min: f64,
    pub psi_max: f64,
}

impl SeparationBounds {
    /// No information: `[0, 2]`.
    pub const TRIVIAL: SeparationBounds = SeparationBounds {
        psi_min: 0.0,
        psi_max: 2.0,
    };
}

/// Center distance `D` and the combined size `δ = (δ1 τ1 + δ2 τ2) / 4`.
pub fn center_data<T: Real>(
    q1: &Patch,
    q2: &Patch,
    pq1: &PatchQuantities<T>,
    pq2: &PatchQuantities<T>,
) -> Result<(T, T), Fault> {
    let d = chordal_dist(&q1.center(), &q2.center())?;
    let delta = (pq1.delta * pq1.tau + pq2.delta * pq2.tau) * T::ratio(1, 4);
    Ok((d, delta))
}

/// Rational form of the separation lemma:
/// `D(1 - δ²/2) - σ(4 - D²) δ <= |p1 - p2| <= D + σ(4 - D²) δ`.
/// Returned unclamped as `(lower, upper)` enclosures.
pub fn fine_bounds<T: Real>(d: T, delta: T) -> Result<(T, T), Fault> {
    let d = d.min(T::int(2));
    let root = (T::int(4) - d.square()).safe_sqrt()?;
    let spread = root * delta;
    let lower = d * (T::one() - delta.square() * T::ratio(1, 2)) - spread;
    let upper = d + spread;
    Ok((lower, upper))
}

/// Vertex bounds for a normal finite patch against `{∞}`: the extreme
/// distances to the north pole are attained at vertices.
pub fn perfect_bounds<T: Real>(q1: &Patch) -> Result<SeparationBounds, Fault> {
    assert!(q1.is_normal(), "perfect bound requires a normal finite patch");
    let mut psi_min = f64::INFINITY;
    let mut psi_max = f64::NEG_INFINITY;
    for &v in q1.vertices::<T>().iter() {
        let d = chordal_dist_sq(&v, &crate::geometry::PlanePoint::Infinity)?.sqrt()?;
        psi_min = psi_min.min(d.lo());
        psi_max = psi_max.max(d.hi());
    }
    Ok(SeparationBounds { psi_min, psi_max })
}

/// The best of the applicable bounds, clamped to `[0, 2]`.
pub fn separation<T: Real>(
    q1: &Patch,
    q2: &Patch,
    pq1: &PatchQuantities<T>,
    pq2: &PatchQuantities<T>,
) -> Result<SeparationBounds, Fault> {
    let (d, delta) = center_data(q1, q2, pq1, pq2)?;
    let (lower, upper) = fine_bounds(d, delta)?;
    let mut psi_min = lower.lo().max(0.0);
    let mut psi_max = upper.hi().min(2.0);
    let perfect = match (q1, q2) {
        (p, Patch::Infinity) | (Patch::Infinity, p) if p.is_normal() => Some(perfect_bounds::<T>(p)?),
        _ => None,
    };
    if let Some(pb) = perfect {
        psi_min = psi_min.max(pb.psi_min);
        psi_max = psi_max.min(pb.psi_max);
    }
    Ok(SeparationBounds { psi_min, psi_max })
}

/// Separation bounds for all ten factor pairs of a block, indexed `[i][j]`
/// with `i != j`; the diagonal is unused.
#[derive(Debug, Clone, Copy)]
pub struct PairTable {
    pub seps: [[SeparationBounds; 5]; 5],
}

impl PairTable {
    pub fn build<T: Real>(patches: &[Patch; 5], pq: &[PatchQuantities<T>; 5]) -> Result<PairTable, Fault> {
        let mut seps = [[SeparationBounds::TRIVIAL; 5]; 5];
        for i in 0..5 {
            for j in (i + 1)..5 {
                let s = separation(&patches[i], &patches[j], &pq[i], &pq[j])?;
                seps[i][j] = s;
                seps[j][i] = s;
            }
        }
        Ok(PairTable { seps })
    }

    pub fn get(&self, i: usize, j: usize) -> SeparationBounds {
        debug_assert!(i != j);
        self.seps[i][j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{DyadicSegment, DyadicSquare, SCALE_BITS};
    use crate::interval::Interval;

    const ONE: i64 = 1 << SCALE_BITS;

    fn square(depth: u8, x0: i64, y0: i64) -> Patch {
        let h = (1i64 << 26) >> depth;
        Patch::Square(DyadicSquare { depth, cx: x0 + h, cy: y0 + h })
    }

    #[test]
    fn degenerate_patches_give_exact_distance() {
        let (lo, hi) = fine_bounds(Interval::point(2f64.sqrt()), Interval::point(0.0)).unwrap();
        assert!(lo.contains(2f64.sqrt()) && hi.contains(2f64.sqrt()));
    }

    #[test]
    fn zero_distance_clamps() {
        let (lo, hi) = fine_bounds(Interval::point(0.0), Interval::point(0.25)).unwrap();
        assert!(lo.hi() <= 0.0);
        assert!(hi.contains(0.0) || hi.hi() >= 0.0);
        assert!(hi.hi() < 2.0 * 0.25 + 1e-9);
    }

    #[test]
    fn center_data_with_infinity() {
        let q = square(2, 0, 0);
        let pq: PatchQuantities<Interval> = q.quantities();
        let pi: PatchQuantities<Interval> = Patch::Infinity.quantities();
        let (_, delta) = center_data(&q, &Patch::Infinity, &pq, &pi).unwrap();
        assert!(delta.contains(2.0 * 2f64.sqrt() / 4.0));
    }

    #[test]
    fn perfect_square_example() {
        let q = square(3, ONE, 0);
        let pb = perfect_bounds::<Interval>(&q).unwrap();
        assert!(pb.psi_max >= 2f64.sqrt() && pb.psi_max - 2f64.sqrt() < 1e-15);
        let expect_min = 2.0 / 3.5f64.sqrt();
        assert!(pb.psi_min <= expect_min && expect_min - pb.psi_min < 1e-15);
    }

    #[test]
    fn perfect_segment_example() {
        let s = Patch::Segment(DyadicSegment { depth: 1, center: 3 * ONE });
        let pb = perfect_bounds::<Interval>(&s).unwrap();
        assert!((pb.psi_max - 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((pb.psi_min - 2.0 / 17f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn symmetric_for_finite_pairs() {
        let a = square(3, ONE, 0);
        let b = square(4, -ONE, ONE / 2);
        let pa: PatchQuantities<Interval> = a.quantities();
        let pb: PatchQuantities<Interval> = b.quantities();
        assert_eq!(separation(&a, &b, &pa, &pb).unwrap(), separation(&b, &a, &pb, &pa).unwrap());
    }

    #[test]
    fn root_pairs_are_uninformative() {
        let q = Patch::Square(DyadicSquare::root());
        let pq: PatchQuantities<Interval> = q.quantities();
        let s = separation(&q, &q, &pq, &pq).unwrap();
        assert_eq!(s, SeparationBounds::TRIVIAL);
    }
}
