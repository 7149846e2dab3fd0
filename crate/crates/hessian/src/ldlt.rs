//! Symmetric interval matrices and the `L D Lᵀ` positivity certificate.

use num_rational::BigRational;
use tbp_core::Interval;

use crate::exact::rat_interval;

pub const DIM: usize = 7;

/// A symmetric 7×7 interval matrix stored as its lower triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix7 {
    lower: [Interval; DIM * (DIM + 1) / 2],
}

fn slot(i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    i * (i + 1) / 2 + j
}

impl SymMatrix7 {
    pub fn zero() -> Self {
        SymMatrix7 {
            lower: [Interval::point(0.0); DIM * (DIM + 1) / 2],
        }
    }

    pub fn identity() -> Self {
        let mut m = SymMatrix7::zero();
        for i in 0..DIM {
            m.set(i, i, Interval::point(1.0));
        }
        m
    }

    /// The lower triangle of `rows`; the upper one is ignored.
    pub fn from_rows(rows: &[[Interval; DIM]; DIM]) -> Self {
        let mut m = SymMatrix7::zero();
        for i in 0..DIM {
            for j in 0..=i {
                m.set(i, j, rows[i][j]);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.lower[slot(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        self.lower[slot(i, j)] = v;
    }

    pub fn rows(&self) -> [[Interval; DIM]; DIM] {
        let mut r = [[Interval::point(0.0); DIM]; DIM];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.get(i, j);
            }
        }
        r
    }

    /// Entrywise intersection; `None` if some pair of entries is disjoint.
    pub fn intersect(&self, o: &SymMatrix7) -> Option<SymMatrix7> {
        let mut out = *self;
        for (a, b) in out.lower.iter_mut().zip(o.lower.iter()) {
            *a = a.intersect(b)?;
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ldlt {
    /// Pivot enclosures, in order; shorter than seven if one failed.
    pub pivots: Vec<Interval>,
    /// Every pivot has a positive lower endpoint.
    pub valid: bool,
}

/// Factors `M - shift·I = L D Lᵀ` in interval arithmetic. When every pivot
/// is positive, every symmetric real matrix inside `M` has all eigenvalues
/// above `shift`.
pub fn ldlt_certify(m: &SymMatrix7, shift: &BigRational) -> Ldlt {
    let s = rat_interval(shift);
    let mut l = [[Interval::point(0.0); DIM]; DIM];
    let mut d: Vec<Interval> = Vec::with_capacity(DIM);
    for j in 0..DIM {
        let mut p = m.get(j, j) - s;
        for k in 0..j {
            p = p - l[j][k].square() * d[k];
        }
        d.push(p);
        if p.lo() <= 0.0 {
            return Ldlt { pivots: d, valid: false };
        }
        for i in (j + 1)..DIM {
            let mut v = m.get(i, j);
            for k in 0..j {
                v = v - l[i][k] * l[j][k] * d[k];
            }
            l[i][j] = match v.checked_div(p) {
                Ok(x) => x,
                Err(_) => return Ldlt { pivots: d, valid: false },
            };
        }
    }
    Ldlt { pivots: d, valid: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    #[test]
    fn identity_pivots() {
        let r = ldlt_certify(&SymMatrix7::identity(), &rat(1, 10));
        assert!(r.valid);
        assert_eq!(r.pivots.len(), 7);
        for p in r.pivots {
            assert!(p.contains(0.9) && p.width() < 1e-14, "{p:?}");
        }
        let r = ldlt_certify(&SymMatrix7::identity(), &rat_int(10));
        assert!(!r.valid);
    }

    #[test]
    fn indefinite_matrix_fails() {
        let mut m = SymMatrix7::identity();
        m.set(1, 0, Interval::point(2.0));
        assert!(!ldlt_certify(&m, &rat(0, 1)).valid);
    }

    #[test]
    fn coupled_matrix() {
        // tridiagonal 2, -1: eigenvalues 2 - 2cos(kπ/8) >= 0.152
        let mut m = SymMatrix7::zero();
        for i in 0..7 {
            m.set(i, i, Interval::point(2.0));
            if i > 0 {
                m.set(i, i - 1, Interval::point(-1.0));
            }
        }
        assert!(ldlt_certify(&m, &rat(1, 10)).valid);
        assert!(!ldlt_certify(&m, &rat(2, 10)).valid);
        assert_eq!(m.get(2, 3), m.get(3, 2));
    }
}
