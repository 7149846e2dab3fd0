//! Stereographic projection, chordal distances, power-law energies and the
//! reference bi-pyramid configurations.

use crate::error::Fault;
use crate::scalar::Real;

/// Power-law exponent of the energy `E(r) = r^-e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    One,
    Two,
}

impl Exponent {
    pub fn value(self) -> i64 {
        match self {
            Exponent::One => 1,
            Exponent::Two => 2,
        }
    }

    pub fn from_int(e: i64) -> Option<Exponent> {
        match e {
            1 => Some(Exponent::One),
            2 => Some(Exponent::Two),
            _ => None,
        }
    }
}

/// A point of `C ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanePoint<T> {
    Finite { x: T, y: T },
    Infinity,
}

impl<T: Real> PlanePoint<T> {
    pub fn new(x: T, y: T) -> Self {
        PlanePoint::Finite { x, y }
    }

    /// `|z|^2`, or `None` at infinity.
    pub fn norm_sq(&self) -> Option<T> {
        match *self {
            PlanePoint::Finite { x, y } => Some(x.square() + y.square()),
            PlanePoint::Infinity => None,
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            PlanePoint::Finite { x, y } => PlanePoint::Finite { x, y: -y },
            PlanePoint::Infinity => PlanePoint::Infinity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> SpherePoint<T> {
    pub fn dist_sq(&self, other: &SpherePoint<T>) -> T {
        (self.x - other.x).square() + (self.y - other.y).square() + (self.z - other.z).square()
    }

    pub fn norm_sq(&self) -> T {
        self.x.square() + self.y.square() + self.z.square()
    }
}

/// Inverse stereographic projection; `∞` goes to the north pole `(0,0,1)`.
pub fn stereo_inv<T: Real>(p: &PlanePoint<T>) -> Result<SpherePoint<T>, Fault> {
    match *p {
        PlanePoint::Infinity => Ok(SpherePoint {
            x: T::zero(),
            y: T::zero(),
            z: T::one(),
        }),
        PlanePoint::Finite { x, y } => {
            let s = T::one() + x.square() + y.square();
            let two = T::int(2);
            Ok(SpherePoint {
                x: (two * x).div(s)?,
                y: (two * y).div(s)?,
                z: T::one() - two.div(s)?,
            })
        }
    }
}

/// Stereographic projection `(x, y, z) -> (x + iy) / (1 - z)` for unit vectors.
pub fn stereo(p: [f64; 3]) -> PlanePoint<f64> {
    let d = 1.0 - p[2];
    if d <= 0.0 {
        PlanePoint::Infinity
    } else {
        PlanePoint::Finite {
            x: p[0] / d,
            y: p[1] / d,
        }
    }
}

/// Squared chordal distance `||Σ^-1(z) - Σ^-1(w)||^2`.
///
/// Finite pairs use `4|z-w|^2 / ((1+|z|^2)(1+|w|^2))`, pairs with `∞`
/// use `4 / (1+|z|^2)`. No square roots are taken.
pub fn chordal_dist_sq<T: Real>(z: &PlanePoint<T>, w: &PlanePoint<T>) -> Result<T, Fault> {
    let four = T::int(4);
    let d2 = match (z, w) {
        (PlanePoint::Infinity, PlanePoint::Infinity) => T::zero(),
        (PlanePoint::Finite { x, y }, PlanePoint::Infinity)
        | (PlanePoint::Infinity, PlanePoint::Finite { x, y }) => {
            four.div(T::one() + x.square() + y.square())?
        }
        (PlanePoint::Finite { x: x1, y: y1 }, PlanePoint::Finite { x: x2, y: y2 }) => {
            let num = (*x1 - *x2).square() + (*y1 - *y2).square();
            let den = (T::one() + x1.square() + y1.square()) * (T::one() + x2.square() + y2.square());
            (four * num).div(den)?
        }
    };
    Ok(d2.clamp_below_zero())
}

/// Chordal distance between the sphere images of two plane points.
pub fn chordal_dist<T: Real>(z: &PlanePoint<T>, w: &PlanePoint<T>) -> Result<T, Fault> {
    chordal_dist_sq(z, w)?.sqrt()
}

/// `r^-e` from the squared distance `r^2`.
///
/// `e = 2` is a single reciprocal; `e = 1` takes one square root first.
/// A distance too small for the divisor guard is reported as coincident.
pub fn energy_from_dist_sq<T: Real>(d2: T, e: Exponent) -> Result<T, Fault> {
    let denom = match e {
        Exponent::Two => d2,
        Exponent::One => d2.sqrt()?,
    };
    denom.recip().map_err(|f| match f {
        Fault::DivisionGuard { .. } => Fault::Coincident,
        other => other,
    })
}

/// `E(r)` for `r = sqrt(num/den)`, evaluated with a single rounding step
/// (plus one square root when `e = 1`).
pub fn energy_from_ratio<T: Real>(num: i64, den: i64, e: Exponent) -> Result<T, Fault> {
    let inv = T::ratio(den, num);
    match e {
        Exponent::Two => Ok(inv),
        Exponent::One => inv.sqrt(),
    }
}

pub fn pair_energy<T: Real>(z: &PlanePoint<T>, w: &PlanePoint<T>, e: Exponent) -> Result<T, Fault> {
    energy_from_dist_sq(chordal_dist_sq(z, w)?, e)
}

/// A normalized five-point configuration: `z4 = ∞`, `z0` on the non-negative
/// real axis, stored as `(x0, x1, y1, x2, y2, x3, y3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Configuration<T> {
    pub coords: [T; 7],
}

impl<T: Real> Configuration<T> {
    pub fn new(coords: [T; 7]) -> Self {
        Configuration { coords }
    }

    /// The `i`-th point, `i` in `0..5`.
    pub fn point(&self, i: usize) -> PlanePoint<T> {
        match i {
            0 => PlanePoint::Finite {
                x: self.coords[0],
                y: T::zero(),
            },
            1..=3 => PlanePoint::Finite {
                x: self.coords[2 * i - 1],
                y: self.coords[2 * i],
            },
            4 => PlanePoint::Infinity,
            _ => panic!("configuration index {i} out of range"),
        }
    }

    pub fn points(&self) -> [PlanePoint<T>; 5] {
        [0, 1, 2, 3, 4].map(|i| self.point(i))
    }
}

/// Sum of the ten pairwise energies.
pub fn config_energy<T: Real>(c: &Configuration<T>, e: Exponent) -> Result<T, Fault> {
    let pts = c.points();
    let mut total = T::zero();
    for i in 0..5 {
        for j in (i + 1)..5 {
            total = total + pair_energy(&pts[i], &pts[j], e)?;
        }
    }
    Ok(total)
}

/// Energy of the triangular bi-pyramid: one pair at distance 2, three at
/// `sqrt 3`, six at `sqrt 2`.
pub fn tbp_energy<T: Real>(e: Exponent) -> T {
    let far = energy_from_ratio::<T>(4, 1, e).expect("constant");
    let equatorial = energy_from_ratio::<T>(3, 1, e).expect("constant");
    let polar = energy_from_ratio::<T>(2, 1, e).expect("constant");
    T::int(6) * polar + (T::int(3) * equatorial + far)
}

/// Energy of the regular tetrahedron: six pairs at distance `sqrt(8/3)`.
pub fn tetra_energy<T: Real>(e: Exponent) -> T {
    T::int(6) * energy_from_ratio::<T>(8, 3, e).expect("constant")
}

/// `sqrt(3)/2` as a minimal enclosure.
pub fn half_sqrt3<T: Real>() -> T {
    T::ratio(3, 4).sqrt().expect("constant")
}

/// `1/sqrt(3)` as a minimal enclosure.
pub fn inv_sqrt3<T: Real>() -> T {
    T::ratio(1, 3).sqrt().expect("constant")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbpKind {
    /// `z4` is a pole: `(1, e^{-2πi/3}, 0, e^{2πi/3})`.
    Polar,
    /// `z4` is on the equator: `(1, -i/sqrt3, -1, i/sqrt3)`.
    Equatorial,
}

pub fn tbp_reference<T: Real>(kind: TbpKind) -> Configuration<T> {
    let half = T::ratio(1, 2);
    match kind {
        TbpKind::Polar => {
            let s = half_sqrt3::<T>();
            Configuration::new([T::one(), -half, -s, T::zero(), T::zero(), -half, s])
        }
        TbpKind::Equatorial => {
            let s = inv_sqrt3::<T>();
            Configuration::new([T::one(), T::zero(), -s, -T::one(), T::zero(), T::zero(), s])
        }
    }
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Rodrigues rotation of `v` about the unit `axis` by `angle`.
pub fn rotate(v: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let kxv = cross3(axis, v);
    let kv = dot3(axis, v);
    [
        v[0] * c + kxv[0] * s + axis[0] * kv * (1.0 - c),
        v[1] * c + kxv[1] * s + axis[1] * kv * (1.0 - c),
        v[2] * c + kxv[2] * s + axis[2] * kv * (1.0 - c),
    ]
}

/// Rotation sending the unit vector `u` to the north pole, as a closure.
pub fn rotation_to_north(u: [f64; 3]) -> impl Fn([f64; 3]) -> [f64; 3] {
    let north = [0.0, 0.0, 1.0];
    let axis = cross3(u, north);
    let s = dot3(axis, axis).sqrt();
    let c = dot3(u, north);
    let (axis, angle) = if s < 1e-15 {
        if c > 0.0 {
            ([1.0, 0.0, 0.0], 0.0)
        } else {
            ([1.0, 0.0, 0.0], std::f64::consts::PI)
        }
    } else {
        ([axis[0] / s, axis[1] / s, axis[2] / s], s.atan2(c))
    };
    move |v| rotate(v, axis, angle)
}

/// Closest pair `(a, b)` with `a < b`.
///
/// Pairs within `1e-12` of each other count as ties; `(0, 4)` wins ties, then
/// the lexicographically first pair, so normalized input maps to itself.
pub fn closest_pair(points: &[[f64; 3]; 5]) -> (usize, usize) {
    let dist = |a: usize, b: usize| {
        let d = sub3(points[a], points[b]);
        dot3(d, d).sqrt()
    };
    let mut best = (0, 4);
    let mut best_d = dist(0, 4);
    for a in 0..5 {
        for b in (a + 1)..5 {
            let d = dist(a, b);
            if d < best_d - 1e-12 {
                best_d = d;
                best = (a, b);
            }
        }
    }
    best
}

/// Rotates five sphere points into normal form.
///
/// The closest pair `(a, b)` becomes `(p0, p4)`, `p4` is moved to the north
/// pole and `p0` is spun onto the non-negative real axis; the remaining
/// points keep their relative order as `z1, z2, z3`.
pub fn normalize_configuration(points: &[[f64; 3]; 5]) -> Result<Configuration<f64>, Fault> {
    let (a, b) = closest_pair(points);
    let d = sub3(points[a], points[b]);
    if dot3(d, d) < 1e-24 {
        return Err(Fault::Coincident);
    }
    let to_north = rotation_to_north(points[b]);
    let p0 = to_north(points[a]);
    let spin = -p0[1].atan2(p0[0]);
    let z_axis = [0.0, 0.0, 1.0];
    let place = |v: [f64; 3]| rotate(to_north(v), z_axis, spin);

    let rest: Vec<usize> = (0..5).filter(|&i| i != a && i != b).collect();
    let mut coords = [0.0; 7];
    match stereo(place(points[a])) {
        PlanePoint::Finite { x, .. } => coords[0] = x.max(0.0),
        PlanePoint::Infinity => return Err(Fault::Coincident),
    }
    for (k, &i) in rest.iter().enumerate() {
        match stereo(place(points[i])) {
            PlanePoint::Finite { x, y } => {
                coords[2 * k + 1] = x;
                coords[2 * k + 2] = y;
            }
            PlanePoint::Infinity => return Err(Fault::Coincident),
        }
    }
    Ok(Configuration::new(coords))
}

/// Sphere images of a configuration, in `f64`.
pub fn sphere_points(c: &Configuration<f64>) -> [[f64; 3]; 5] {
    c.points().map(|p| {
        let s = stereo_inv(&p).expect("finite configuration");
        [s.x, s.y, s.z]
    })
}

/// Sorted multiset of the ten pairwise chordal distances.
pub fn distance_multiset(points: &[[f64; 3]; 5]) -> Vec<f64> {
    let mut out = Vec::with_capacity(10);
    for a in 0..5 {
        for b in (a + 1)..5 {
            let d = sub3(points[a], points[b]);
            out.push(dot3(d, d).sqrt());
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    fn fin(x: f64, y: f64) -> PlanePoint<Interval> {
        PlanePoint::new(Interval::point(x), Interval::point(y))
    }

    #[test]
    fn stereo_inverse_examples() {
        let s = stereo_inv(&fin(0.0, 0.0)).unwrap();
        assert!(s.x.contains(0.0) && s.y.contains(0.0) && s.z.contains(-1.0));
        let s = stereo_inv(&fin(1.0, 0.0)).unwrap();
        assert!(s.x.contains(1.0) && s.y.contains(0.0) && s.z.contains(0.0));
        let s = stereo_inv::<Interval>(&PlanePoint::Infinity).unwrap();
        assert_eq!((s.x.lo(), s.y.lo(), s.z.lo()), (0.0, 0.0, 1.0));
    }

    #[test]
    fn chordal_examples() {
        let d = chordal_dist(&fin(0.6, 0.8), &PlanePoint::Infinity).unwrap();
        assert!(d.contains(2f64.sqrt()) || d.intersects(&Interval::point(2.0).sqrt().unwrap()));
        let d = chordal_dist(&fin(0.0, 0.0), &PlanePoint::Infinity).unwrap();
        assert!(d.contains(2.0));
        let c = tbp_reference::<Interval>(TbpKind::Polar);
        let d2 = chordal_dist_sq(&c.point(0), &c.point(3)).unwrap();
        assert!(d2.contains(3.0));
    }

    #[test]
    fn pair_energy_examples() {
        let e1 = pair_energy(&fin(0.0, 0.0), &PlanePoint::Infinity, Exponent::One).unwrap();
        assert!(e1.contains(0.5));
        let e2 = pair_energy(&fin(0.0, 0.0), &PlanePoint::Infinity, Exponent::Two).unwrap();
        assert!(e2.contains(0.25));
        let c = tbp_reference::<Interval>(TbpKind::Polar);
        let e = pair_energy(&c.point(0), &c.point(3), Exponent::Two).unwrap();
        assert!(e.contains(1.0 / 3.0));
        assert_eq!(
            pair_energy(&fin(0.5, 0.5), &fin(0.5, 0.5), Exponent::Two),
            Err(Fault::Coincident)
        );
    }

    #[test]
    fn constants_two() {
        let m: Interval = tbp_energy(Exponent::Two);
        assert!(m.contains(4.25));
        assert!(m.width_ulps() <= 4, "{m:?} width {}", m.width_ulps());
        let t: Interval = tetra_energy(Exponent::Two);
        assert!(t.contains(2.25));
        assert!(t.width_ulps() <= 4, "{t:?} width {}", t.width_ulps());
    }

    #[test]
    fn reference_energies_agree() {
        for e in [Exponent::One, Exponent::Two] {
            let m: Interval = tbp_energy(e);
            let a = config_energy(&tbp_reference::<Interval>(TbpKind::Polar), e).unwrap();
            let b = config_energy(&tbp_reference::<Interval>(TbpKind::Equatorial), e).unwrap();
            assert!(a.intersects(&m) && b.intersects(&m) && a.intersects(&b));
        }
    }

    #[test]
    fn reference_coordinates() {
        let p = tbp_reference::<f64>(TbpKind::Polar);
        assert_eq!(p.coords[3], 0.0);
        assert_eq!(p.coords[4], 0.0);
        assert_eq!(p.coords[1], -0.5);
        let q = tbp_reference::<f64>(TbpKind::Equatorial);
        assert_eq!(q.coords[3], -1.0);
    }

    #[test]
    fn normalize_is_identity_on_normal_form() {
        let c = tbp_reference::<f64>(TbpKind::Polar);
        let pts = sphere_points(&c);
        let n = normalize_configuration(&pts).unwrap();
        for (a, b) in n.coords.iter().zip(c.coords.iter()) {
            assert!((a - b).abs() < 1e-12, "{n:?}");
        }
    }
}
