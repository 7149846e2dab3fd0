//! Dyadic segments, squares and boxes with exact integer-scaled centers.
//!
//! Coordinates are stored multiplied by `2^25`. A factor at depth `k` has
//! half-side `2^(1-k)`, i.e. `2^(26-k)` in scaled units, so every center and
//! corner stays an integer down to depth 24.

use std::fmt;
use std::str::FromStr;

use crate::error::Fault;
use crate::geometry::PlanePoint;
use crate::scalar::Real;

pub const SCALE_BITS: u32 = 25;
pub const MAX_DEPTH: u8 = 24;
const ROOT_HALF: i64 = 1 << 26;

/// Scaled integer to double; exact for every value the boxes produce.
#[inline]
pub fn unscale(n: i64) -> f64 {
    n as f64 * (1.0 / (1u64 << SCALE_BITS) as f64)
}

#[inline]
fn half_scaled(depth: u8) -> i64 {
    ROOT_HALF >> depth
}

/// A sub-segment of `[0, 4]` obtained by repeated halving.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicSegment {
    pub depth: u8,
    pub center: i64,
}

impl DyadicSegment {
    pub fn root() -> Self {
        DyadicSegment {
            depth: 0,
            center: 2 << SCALE_BITS,
        }
    }

    pub fn half(&self) -> i64 {
        half_scaled(self.depth)
    }

    /// Scaled endpoints `(lo, hi)`.
    pub fn bounds(&self) -> (i64, i64) {
        (self.center - self.half(), self.center + self.half())
    }

    pub fn children(&self) -> Result<[DyadicSegment; 2], Fault> {
        if self.depth >= MAX_DEPTH {
            return Err(Fault::DepthExhausted { factor: 0 });
        }
        let q = self.half() / 2;
        let depth = self.depth + 1;
        Ok([
            DyadicSegment { depth, center: self.center - q },
            DyadicSegment { depth, center: self.center + q },
        ])
    }

    fn valid(&self) -> bool {
        if self.depth > MAX_DEPTH {
            return false;
        }
        let (lo, hi) = self.bounds();
        lo >= 0 && hi <= 4 << SCALE_BITS && lo % (2 * self.half()) == 0
    }
}

/// A sub-square of `[-2, 2]^2` obtained by repeated quartering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicSquare {
    pub depth: u8,
    pub cx: i64,
    pub cy: i64,
}

impl DyadicSquare {
    pub fn root() -> Self {
        DyadicSquare { depth: 0, cx: 0, cy: 0 }
    }

    pub fn half(&self) -> i64 {
        half_scaled(self.depth)
    }

    pub fn x_bounds(&self) -> (i64, i64) {
        (self.cx - self.half(), self.cx + self.half())
    }

    pub fn y_bounds(&self) -> (i64, i64) {
        (self.cy - self.half(), self.cy + self.half())
    }

    /// Does not cross either coordinate axis; touching is allowed.
    pub fn is_normal(&self) -> bool {
        let (x0, x1) = self.x_bounds();
        let (y0, y1) = self.y_bounds();
        !(x0 < 0 && x1 > 0) && !(y0 < 0 && y1 > 0)
    }

    /// Children ordered lower-left, lower-right, upper-right, upper-left.
    pub fn children(&self, factor: usize) -> Result<[DyadicSquare; 4], Fault> {
        if self.depth >= MAX_DEPTH {
            return Err(Fault::DepthExhausted { factor });
        }
        let q = self.half() / 2;
        let depth = self.depth + 1;
        let at = |sx: i64, sy: i64| DyadicSquare {
            depth,
            cx: self.cx + sx * q,
            cy: self.cy + sy * q,
        };
        Ok([at(-1, -1), at(1, -1), at(1, 1), at(-1, 1)])
    }

    fn valid(&self) -> bool {
        if self.depth > MAX_DEPTH {
            return false;
        }
        let lim = 2 << SCALE_BITS;
        let side = 2 * self.half();
        let (x0, x1) = self.x_bounds();
        let (y0, y1) = self.y_bounds();
        x0 >= -lim && x1 <= lim && y0 >= -lim && y1 <= lim && (x0 + lim) % side == 0 && (y0 + lim) % side == 0
    }
}

/// One factor of a block: a segment, a square, or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Patch {
    Segment(DyadicSegment),
    Square(DyadicSquare),
    Infinity,
}

/// Extents of `|x|` and `|y|` over a patch, with the derived `δ` and `τ`.
#[derive(Debug, Clone, Copy)]
pub struct PatchQuantities<T> {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub delta: T,
    pub tau: T,
}

fn abs_extent(lo: i64, hi: i64) -> (i64, i64) {
    if lo >= 0 {
        (lo, hi)
    } else if hi <= 0 {
        (-hi, -lo)
    } else {
        (0, hi.max(-lo))
    }
}

impl Patch {
    pub fn is_finite(&self) -> bool {
        !matches!(self, Patch::Infinity)
    }

    /// Segments always qualify; squares must not cross the axes.
    pub fn is_normal(&self) -> bool {
        match self {
            Patch::Segment(_) => true,
            Patch::Square(q) => q.is_normal(),
            Patch::Infinity => false,
        }
    }

    /// Scaled `(x_lo, x_hi, y_lo, y_hi)` of a finite patch.
    pub fn scaled_bounds(&self) -> Option<(i64, i64, i64, i64)> {
        match self {
            Patch::Segment(s) => {
                let (a, b) = s.bounds();
                Some((a, b, 0, 0))
            }
            Patch::Square(q) => {
                let (a, b) = q.x_bounds();
                let (c, d) = q.y_bounds();
                Some((a, b, c, d))
            }
            Patch::Infinity => None,
        }
    }

    pub fn quantities<T: Real>(&self) -> PatchQuantities<T> {
        let Some((x0, x1, y0, y1)) = self.scaled_bounds() else {
            return PatchQuantities {
                x_min: 0.0,
                x_max: 0.0,
                y_min: 0.0,
                y_max: 0.0,
                delta: T::zero(),
                tau: T::zero(),
            };
        };
        let (ax0, ax1) = abs_extent(x0, x1);
        let (ay0, ay1) = abs_extent(y0, y1);
        let (x_min, x_max, y_min, y_max) = (unscale(ax0), unscale(ax1), unscale(ay0), unscale(ay1));
        let side = T::exact(unscale(x1 - x0));
        let denom = T::one() + T::exact(x_min).square() + T::exact(y_min).square();
        let delta = (T::int(2) * side).div(denom).expect("denominator at least 1");
        let tau = match self {
            Patch::Segment(_) => T::one(),
            _ => T::int(2).sqrt().expect("constant"),
        };
        PatchQuantities {
            x_min,
            x_max,
            y_min,
            y_max,
            delta,
            tau,
        }
    }

    /// Vertices: two for a segment, four for a square in the order
    /// `Q00, Q10, Q11, Q01`; infinity has the single vertex `∞`.
    pub fn vertices<T: Real>(&self) -> Vertices<T> {
        let p = |x: i64, y: i64| PlanePoint::new(T::exact(unscale(x)), T::exact(unscale(y)));
        let mut pts = [PlanePoint::Infinity; 4];
        let n = match self {
            Patch::Segment(s) => {
                let (a, b) = s.bounds();
                pts[0] = p(a, 0);
                pts[1] = p(b, 0);
                2
            }
            Patch::Square(q) => {
                let (a, b) = q.x_bounds();
                let (c, d) = q.y_bounds();
                pts = [p(a, c), p(b, c), p(b, d), p(a, d)];
                4
            }
            Patch::Infinity => 1,
        };
        Vertices { pts, n }
    }

    pub fn center<T: Real>(&self) -> PlanePoint<T> {
        match self {
            Patch::Segment(s) => PlanePoint::new(T::exact(unscale(s.center)), T::zero()),
            Patch::Square(q) => PlanePoint::new(T::exact(unscale(q.cx)), T::exact(unscale(q.cy))),
            Patch::Infinity => PlanePoint::Infinity,
        }
    }
}

/// Up to four vertices of a patch, stored inline.
#[derive(Debug, Clone, Copy)]
pub struct Vertices<T> {
    pts: [PlanePoint<T>; 4],
    n: usize,
}

impl<T> Vertices<T> {
    pub fn as_slice(&self) -> &[PlanePoint<T>] {
        &self.pts[..self.n]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PlanePoint<T>> {
        self.as_slice().iter()
    }
}

/// `Q0 × Q1 × Q2 × Q3 × {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicBox {
    pub q0: DyadicSegment,
    pub squares: [DyadicSquare; 3],
}

impl DyadicBox {
    /// The whole space `[0,4] × ([-2,2]^2)^3`.
    pub fn root() -> Self {
        DyadicBox {
            q0: DyadicSegment::root(),
            squares: [DyadicSquare::root(); 3],
        }
    }

    /// The box of uniform depth whose factors contain the given coordinates
    /// `(x0, x1, y1, x2, y2, x3, y3)`; points on a grid line go to the upper
    /// cell. Coordinates are clamped into the root box.
    pub fn containing(c: [f64; 7], depth: u8) -> DyadicBox {
        assert!(depth <= MAX_DEPTH);
        let h = half_scaled(depth);
        let side = 2 * h;
        let snap = |v: f64, lo: i64, hi: i64| -> i64 {
            let n = ((v * (1u64 << SCALE_BITS) as f64).floor() as i64).clamp(lo, hi - 1);
            lo + (n - lo).div_euclid(side) * side + h
        };
        let lim = 2i64 << SCALE_BITS;
        let sq = |x: f64, y: f64| DyadicSquare {
            depth,
            cx: snap(x, -lim, lim),
            cy: snap(y, -lim, lim),
        };
        DyadicBox {
            q0: DyadicSegment {
                depth,
                center: snap(c[0], 0, 2 * lim),
            },
            squares: [sq(c[1], c[2]), sq(c[3], c[4]), sq(c[5], c[6])],
        }
    }

    /// Scaled `(lo, hi)` of coordinate `k` in `(x0, x1, y1, x2, y2, x3, y3)` order.
    pub fn coord_bounds(&self, k: usize) -> (i64, i64) {
        match k {
            0 => self.q0.bounds(),
            1..=6 => {
                let q = &self.squares[(k - 1) / 2];
                if k % 2 == 1 {
                    q.x_bounds()
                } else {
                    q.y_bounds()
                }
            }
            _ => panic!("coordinate index {k} out of range"),
        }
    }

    /// Whether `other` is a sub-box of `self`.
    pub fn contains(&self, other: &DyadicBox) -> bool {
        (0..7).all(|k| {
            let (a, b) = self.coord_bounds(k);
            let (c, d) = other.coord_bounds(k);
            a <= c && d <= b
        })
    }

    /// Factor `i` for `i` in `0..5`; factor 4 is `{∞}`.
    pub fn patch(&self, i: usize) -> Patch {
        match i {
            0 => Patch::Segment(self.q0),
            1..=3 => Patch::Square(self.squares[i - 1]),
            4 => Patch::Infinity,
            _ => panic!("factor index {i} out of range"),
        }
    }

    pub fn patches(&self) -> [Patch; 5] {
        [0, 1, 2, 3, 4].map(|i| self.patch(i))
    }

    pub fn depths(&self) -> [u8; 4] {
        [self.q0.depth, self.squares[0].depth, self.squares[1].depth, self.squares[2].depth]
    }

    /// The `k`-th subdivision: two children for `k = 0`, four otherwise.
    pub fn subdivide(&self, k: usize) -> Result<Vec<DyadicBox>, Fault> {
        match k {
            0 => Ok(self
                .q0
                .children()?
                .iter()
                .map(|&q0| DyadicBox { q0, ..*self })
                .collect()),
            1..=3 => Ok(self.squares[k - 1]
                .children(k)?
                .iter()
                .map(|&s| {
                    let mut b = *self;
                    b.squares[k - 1] = s;
                    b
                })
                .collect()),
            _ => panic!("subdivision index {k} out of range"),
        }
    }

    /// Canonical key: `depth:center` per factor, e.g. `0:67108864|0:0,0|0:0,0|0:0,0`.
    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DyadicBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.q0.depth, self.q0.center)?;
        for s in &self.squares {
            write!(f, "|{}:{},{}", s.depth, s.cx, s.cy)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed box key `{0}`")]
pub struct BoxKeyError(pub String);

impl FromStr for DyadicBox {
    type Err = BoxKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BoxKeyError(s.to_string());
        let parts: Vec<&str> = s.trim().split('|').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let (d, c) = parts[0].split_once(':').ok_or_else(bad)?;
        let q0 = DyadicSegment {
            depth: d.parse().map_err(|_| bad())?,
            center: c.parse().map_err(|_| bad())?,
        };
        if !q0.valid() {
            return Err(bad());
        }
        let mut squares = [DyadicSquare::root(); 3];
        for (slot, part) in squares.iter_mut().zip(&parts[1..]) {
            let (d, c) = part.split_once(':').ok_or_else(bad)?;
            let (x, y) = c.split_once(',').ok_or_else(bad)?;
            let q = DyadicSquare {
                depth: d.parse().map_err(|_| bad())?,
                cx: x.parse().map_err(|_| bad())?,
                cy: y.parse().map_err(|_| bad())?,
            };
            if !q.valid() {
                return Err(bad());
            }
            *slot = q;
        }
        Ok(DyadicBox { q0, squares })
    }
}
