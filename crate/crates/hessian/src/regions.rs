//! The ten energy terms near the bi-pyramid and the coordinates they see.
//!
//! Coordinates are `(x0, x1, y1, x2, y2, x3, y3)` with the bi-pyramid at
//! `z0 = 1`, `z1 = e^{-2πi/3}`, `z2 = 0`, `z3 = e^{2πi/3}` and `z4 = ∞`.
//! Terms `0..4` are `F` on `z0..z3` (the pair with infinity); terms `4..10`
//! are `G` on the pairs `(0,1), (0,2), (0,3), (1,2), (1,3), (2,3)`.

use num_rational::BigRational;
use num_traits::Zero;
use tbp_core::{Interval, Real};

use crate::exact::{rat, QSqrt3};
use crate::poly::{f_function, g_function, Monomial, PartialTable};

/// Side of each point square of the neighborhood.
pub const SIDE_LOG2: u32 = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    /// `F` of one finite point.
    F(usize),
    /// `G` of two finite points.
    G(usize, usize),
}

pub const TERMS: [Term; 10] = [
    Term::F(0),
    Term::F(1),
    Term::F(2),
    Term::F(3),
    Term::G(0, 1),
    Term::G(0, 2),
    Term::G(0, 3),
    Term::G(1, 2),
    Term::G(1, 3),
    Term::G(2, 3),
];

impl Term {
    pub fn points(self) -> Vec<usize> {
        match self {
            Term::F(p) => vec![p],
            Term::G(p, q) => vec![p, q],
        }
    }

    pub fn is_pair(self) -> bool {
        matches!(self, Term::G(..))
    }
}

/// Coordinate index of axis `a` (0 = x, 1 = y) of finite point `p`.
/// `y0` is pinned to zero and has none.
pub fn coordinate(p: usize, a: usize) -> Option<usize> {
    match (p, a) {
        (0, 0) => Some(0),
        (0, _) => None,
        (1..=3, 0 | 1) => Some(2 * p - 1 + a),
        _ => None,
    }
}

/// The variable of the term's function moved by coordinate `i`.
pub fn local_var(t: Term, i: usize) -> Option<usize> {
    t.points()
        .iter()
        .enumerate()
        .find_map(|(slot, &p)| (0..2).find(|&a| coordinate(p, a) == Some(i)).map(|a| 2 * slot + a))
}

/// Whether moving coordinate `i` moves an argument of term `m`.
pub fn related(m: usize, i: usize) -> bool {
    local_var(TERMS[m], i).is_some()
}

/// The coordinates related to each term.
pub fn related_table() -> [[bool; 10]; 7] {
    let mut t = [[false; 10]; 7];
    for (i, row) in t.iter_mut().enumerate() {
        for (m, cell) in row.iter_mut().enumerate() {
            *cell = related(m, i);
        }
    }
    t
}

/// Exact bi-pyramid point `p` in `Q(√3)`.
pub fn center(p: usize) -> [QSqrt3; 2] {
    let r = |n, d| QSqrt3::rational(rat(n, d));
    let s = |n, d| QSqrt3::new(BigRational::zero(), rat(n, d));
    match p {
        0 => [r(1, 1), r(0, 1)],
        1 => [r(-1, 2), s(-1, 2)],
        2 => [r(0, 1), r(0, 1)],
        3 => [r(-1, 2), s(1, 2)],
        _ => panic!("point index {p} out of range"),
    }
}

/// The center of the term's region as an argument of its function.
pub fn term_center(t: Term) -> [QSqrt3; 4] {
    let pts = t.points();
    let a = center(pts[0]);
    let b = pts.get(1).map(|&q| center(q)).unwrap_or_else(|| [QSqrt3::zero(), QSqrt3::zero()]);
    let [x1, y1] = a;
    let [x2, y2] = b;
    [x1, y1, x2, y2]
}

/// Square of side `2^-11` about point `p`, as enclosures of `x` and `y`.
/// For `z0` the ordinate is the single value zero.
pub fn point_box(p: usize) -> [Interval; 2] {
    let h = 1.0 / (1u64 << (SIDE_LOG2 + 1)) as f64;
    let c = center(p);
    let widen = |v: &QSqrt3| {
        let e = v.to_interval();
        Interval::new(e.lo() - h, e.hi() + h).round_out().expect("small values")
    };
    if p == 0 {
        [widen(&c[0]), Interval::zero()]
    } else {
        [widen(&c[0]), widen(&c[1])]
    }
}

/// The term's region as an argument box of its function.
pub fn term_box(t: Term) -> [Interval; 4] {
    let pts = t.points();
    let [x1, y1] = point_box(pts[0]);
    let [x2, y2] = pts.get(1).map(|&q| point_box(q)).unwrap_or([Interval::zero(), Interval::zero()]);
    [x1, y1, x2, y2]
}

/// Symbolic partials of `F` and `G`.
pub struct Tables {
    pub f: PartialTable,
    pub g: PartialTable,
}

impl Tables {
    /// `F` to order 3 and `G` to order `g_order`.
    pub fn new(g_order: u8) -> Tables {
        Tables {
            f: PartialTable::new(f_function(), 3),
            g: PartialTable::new(g_function(), g_order),
        }
    }

    pub fn table(&self, t: Term) -> &PartialTable {
        if t.is_pair() {
            &self.g
        } else {
            &self.f
        }
    }

    /// Exact value at the region center of the partial of term `m` along
    /// the coordinates `coords`; zero when some coordinate is unrelated.
    pub fn at_center(&self, m: usize, coords: &[usize]) -> QSqrt3 {
        let t = TERMS[m];
        let mut idx: Monomial = [0; 4];
        for &i in coords {
            match local_var(t, i) {
                Some(v) => idx[v] += 1,
                None => return QSqrt3::zero(),
            }
        }
        let tab = self.table(t);
        if !t.is_pair() && idx.iter().map(|&e| e as u32).sum::<u32>() > 3 {
            return QSqrt3::zero();
        }
        tab.get(&idx).eval_exact(&term_center(t), tab.q())
    }
}
