//! Lower bounds on the energy of every configuration in a box: the minimum
//! over vertex configurations minus an explicit error budget.

use crate::bounds::PairTable;
use crate::dyadic::{DyadicBox, Patch, PatchQuantities};
use crate::error::Fault;
use crate::geometry::{pair_energy, Exponent, PlanePoint};
use crate::scalar::Real;

/// Separations at or below this radius give an infinite `ε`.
///
/// Below `1/4` no elimination by energy is attempted; above it every
/// reciprocal in the `Λ` terms stays far from the divisor floor and every
/// vertex pair is at squared distance at least `1/16`.
pub const R_FLOOR: f64 = 0.25;

/// Upper bound on `ε(Q, Q̂)`, or the infinite sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Finite(f64),
    Infinite,
}

/// Lower bound on the energy over a box, or the `-∞` sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LowerBound {
    Finite(f64),
    NegInfinity,
}

impl LowerBound {
    pub fn exceeds(&self, threshold: f64) -> bool {
        matches!(*self, LowerBound::Finite(v) if v > threshold)
    }
}

fn powi<T: Real>(x: T, n: u32) -> T {
    let mut out = x;
    for _ in 1..n {
        out = out * x;
    }
    out
}

/// `(E'(R), E''(R))` for `E(r) = r^-e`.
fn derivatives<T: Real>(r: T, e: Exponent) -> Result<(T, T), Fault> {
    let inv = r.recip()?;
    let k = e.value();
    let k32 = k as u32;
    let d1 = -(T::int(k) * powi(inv, k32 + 1));
    let d2 = T::int(k * (k + 1)) * powi(inv, k32 + 2);
    Ok((d1, d2))
}

/// `(Λ1, Λ2)` for a patch `q` at separation `r`, from the general forms in
/// `E'` and `E''`:
///
/// * segment: `Λ1 = R E'/32 + (1/8 - R²/32) E''`, `Λ2 = -E'/8`;
/// * square: `Λ1 = R E'/16 + (1/4 - R²/16) E''`,
///   `Λ2 = -E'/7.98 (sqrt(1+x̄²) + sqrt(1+ȳ²))`.
pub fn lambdas<T: Real>(q: &Patch, x_max: f64, y_max: f64, r: T, e: Exponent) -> Result<(T, T), Fault> {
    let (d1, d2) = derivatives(r, e)?;
    match q {
        Patch::Segment(_) => {
            let l1 = r * d1 * T::ratio(1, 32) + (T::ratio(1, 8) - r.square() * T::ratio(1, 32)) * d2;
            let l2 = -d1 * T::ratio(1, 8);
            Ok((l1, l2))
        }
        Patch::Square(_) => {
            let l1 = r * d1 * T::ratio(1, 16) + (T::ratio(1, 4) - r.square() * T::ratio(1, 16)) * d2;
            let rx = (T::one() + T::exact(x_max).square()).sqrt()?;
            let ry = (T::one() + T::exact(y_max).square()).sqrt()?;
            let l2 = -d1 * T::ratio(50, 399) * (rx + ry);
            Ok((l1, l2))
        }
        Patch::Infinity => panic!("no lambda terms for the point at infinity"),
    }
}

/// `ε = max(0, Λ1) + Λ2` at `R = r_lo`, or infinite when `r_lo <= 1/4`.
///
/// Both `Λ` terms decrease in `R` on `(0, 2]`, so evaluating at the certified
/// lower endpoint bounds `ε` at the true separation from above.
pub fn epsilon_pair<T: Real>(q: &Patch, pq: &PatchQuantities<T>, r_lo: f64, e: Exponent) -> Result<Epsilon, Fault> {
    if r_lo <= R_FLOOR {
        return Ok(Epsilon::Infinite);
    }
    let (l1, l2) = lambdas(q, pq.x_max, pq.y_max, T::exact(r_lo), e)?;
    Ok(Epsilon::Finite((l1.clamp_below_zero() + l2).hi()))
}

/// Upper bound on `ε` at `R = r_lo` by one-sided rounding, agreeing with
/// [`epsilon_pair`] up to rounding. `c_hi` is `(50/399)(sqrt(1+x̄²) + sqrt(1+ȳ²))`
/// rounded up, unused for segments.
fn epsilon_fast<T: Real>(q: &Patch, c_hi: f64, r_lo: f64, e: Exponent) -> Option<f64> {
    if r_lo <= R_FLOOR {
        return None;
    }
    let k = e.value() as f64;
    let inv_hi = T::up(1.0 / r_lo);
    let inv_lo = T::down(1.0 / r_lo);
    let (mut p_hi, mut p_lo) = (inv_hi, inv_lo);
    for _ in 0..e.value() {
        p_hi = T::up(p_hi * inv_hi);
        p_lo = T::down(p_lo * inv_lo);
    }
    let d1_hi = T::up(k * p_hi);
    let d1_lo = T::down(k * p_lo);
    let d2_hi = T::up(k * (k + 1.0) * T::up(p_hi * inv_hi));
    let r2_lo = T::down(r_lo * r_lo);
    let rd1_lo = T::down(r_lo * d1_lo);
    let (l1, l2) = match q {
        Patch::Segment(_) => {
            let w = T::up(0.125 - r2_lo / 32.0);
            (T::up(T::up(w * d2_hi) - rd1_lo / 32.0), d1_hi / 8.0)
        }
        Patch::Square(_) => {
            let w = T::up(0.25 - r2_lo / 16.0);
            (T::up(T::up(w * d2_hi) - rd1_lo / 16.0), T::up(d1_hi * c_hi))
        }
        Patch::Infinity => panic!("no lambda terms for the point at infinity"),
    };
    Some(T::up(l1.max(0.0) + l2))
}

/// Per-factor error terms `err(i) = Σ_{j != i} ε_ij δ_i²` as upper bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget {
    /// `None` marks an infinite term.
    pub err: [Option<f64>; 4],
    pub total: Option<f64>,
    /// Upper endpoints of `δ_i`, used to rank infinite terms.
    pub delta: [f64; 4],
}

impl ErrorBudget {
    pub fn is_finite(&self) -> bool {
        self.total.is_some()
    }
}

/// Everything the tests need about one box, computed once.
#[derive(Debug, Clone)]
pub struct BoxAnalysis<T> {
    pub patches: [Patch; 5],
    pub quantities: [PatchQuantities<T>; 5],
    pub pairs: PairTable,
}

impl<T: Real> BoxAnalysis<T> {
    pub fn new(b: &DyadicBox) -> Result<Self, Fault> {
        let patches = b.patches();
        let quantities = patches.map(|p| p.quantities::<T>());
        let pairs = PairTable::build(&patches, &quantities)?;
        Ok(BoxAnalysis {
            patches,
            quantities,
            pairs,
        })
    }

    pub fn error_budget(&self, e: Exponent) -> Result<ErrorBudget, Fault> {
        let mut err = [None; 4];
        let mut delta = [0.0; 4];
        let mut total = Some(0.0);
        for i in 0..4 {
            let pq = &self.quantities[i];
            delta[i] = pq.delta.hi();
            let d2 = T::up(delta[i] * delta[i]);
            let c_hi = match self.patches[i] {
                Patch::Square(_) => {
                    let rx = (T::one() + T::exact(pq.x_max).square()).sqrt()?;
                    let ry = (T::one() + T::exact(pq.y_max).square()).sqrt()?;
                    (T::ratio(50, 399) * (rx + ry)).hi()
                }
                _ => 0.0,
            };
            let mut sum = Some(0.0);
            for j in 0..5 {
                if j == i {
                    continue;
                }
                let r = self.pairs.get(i, j).psi_min;
                sum = match (sum, epsilon_fast::<T>(&self.patches[i], c_hi, r, e)) {
                    (Some(s), Some(eps)) => Some(T::up(s + T::up(eps * d2))),
                    _ => None,
                };
            }
            err[i] = sum;
            total = match (total, sum) {
                (Some(t), Some(s)) => Some(T::up(t + s)),
                _ => None,
            };
        }
        Ok(ErrorBudget { err, total, delta })
    }

    /// Minimum energy over the 128 vertex configurations, as an enclosure of
    /// that minimum.
    pub fn vertex_energy_min(&self, e: Exponent) -> Result<T, Fault> {
        let verts: Vec<Vec<PlanePoint<T>>> = (0..4).map(|i| self.patches[i].vertices::<T>().as_slice().to_vec()).collect();
        let inf = PlanePoint::Infinity;
        let to_inf = |i: usize| -> Result<Vec<T>, Fault> {
            verts[i].iter().map(|v| pair_energy(v, &inf, e)).collect()
        };
        let between = |i: usize, j: usize| -> Result<Vec<Vec<T>>, Fault> {
            verts[i]
                .iter()
                .map(|a| verts[j].iter().map(|b| pair_energy(a, b, e)).collect())
                .collect()
        };
        let (e04, e14, e24, e34) = (to_inf(0)?, to_inf(1)?, to_inf(2)?, to_inf(3)?);
        let (e01, e02, e03) = (between(0, 1)?, between(0, 2)?, between(0, 3)?);
        let (e12, e13, e23) = (between(1, 2)?, between(1, 3)?, between(2, 3)?);

        let mut best: Option<T> = None;
        for a in 0..verts[0].len() {
            for b in 0..verts[1].len() {
                let s1 = e04[a] + e14[b] + e01[a][b];
                for c in 0..verts[2].len() {
                    let s2 = s1 + e24[c] + e02[a][c] + e12[b][c];
                    for d in 0..verts[3].len() {
                        let s3 = s2 + e34[d] + e03[a][d] + e13[b][d] + e23[c][d];
                        best = Some(match best {
                            Some(m) => m.min(s3),
                            None => s3,
                        });
                    }
                }
            }
        }
        Ok(best.expect("at least one vertex configuration"))
    }

    /// `ℰ'(b) - Σ err(i)`, or `-∞` when any `ε` is infinite.
    pub fn energy_lower_bound(&self, e: Exponent) -> Result<LowerBound, Fault> {
        let budget = self.error_budget(e)?;
        self.lower_bound_with(&budget, e)
    }

    pub fn lower_bound_with(&self, budget: &ErrorBudget, e: Exponent) -> Result<LowerBound, Fault> {
        let Some(total) = budget.total else {
            return Ok(LowerBound::NegInfinity);
        };
        let vmin = vertex_energy_min_lo::<T>(&self.patches, e)?;
        Ok(LowerBound::Finite((T::exact(vmin) - T::exact(total)).lo()))
    }
}

/// Vertices of one finite factor with `1 + |v|^2` bracketed from both sides.
struct VertexData {
    n: usize,
    x: [f64; 4],
    y: [f64; 4],
    s_lo: [f64; 4],
}

impl VertexData {
    fn new<T: Real>(p: &Patch) -> Self {
        let mut d = VertexData {
            n: 0,
            x: [0.0; 4],
            y: [0.0; 4],
            s_lo: [0.0; 4],
        };
        for &v in p.vertices::<f64>().iter() {
            let PlanePoint::Finite { x, y } = v else { unreachable!("finite factor") };
            let k = d.n;
            d.x[k] = x;
            d.y[k] = y;
            d.s_lo[k] = T::down(1.0 + T::down(T::down(x * x) + T::down(y * y)));
            d.n += 1;
        }
        d
    }
}

/// Lower endpoint of `E` for a pair of vertices, from
/// `1/d^2 = (1+|v|^2)(1+|w|^2) / (4|v-w|^2)`.
///
/// Differences of box vertices are exact in binary64, so only the squares,
/// sums, products and the quotient round; each is pushed the safe way.
#[inline]
fn vertex_pair_lo<T: Real>(a: &VertexData, i: usize, b: &VertexData, j: usize, e: Exponent) -> Result<f64, Fault> {
    let dx = a.x[i] - b.x[j];
    let dy = a.y[i] - b.y[j];
    let n_hi = T::up(T::up(dx * dx) + T::up(dy * dy));
    let n_lo = T::down(T::down(dx * dx) + T::down(dy * dy));
    if 4.0 * n_lo < crate::interval::DIVISOR_FLOOR {
        return Err(Fault::Coincident);
    }
    let inv_d2 = T::down(T::down(a.s_lo[i] * b.s_lo[j]) / (4.0 * n_hi));
    Ok(match e {
        Exponent::Two => inv_d2,
        Exponent::One => T::down(inv_d2.sqrt()),
    })
}

/// `E` from a finite vertex to `∞`: `1/d^2 = (1+|v|^2)/4`.
#[inline]
fn vertex_inf_lo<T: Real>(a: &VertexData, i: usize, e: Exponent) -> f64 {
    let inv_d2 = a.s_lo[i] * 0.25;
    match e {
        Exponent::Two => inv_d2,
        Exponent::One => T::down(inv_d2.sqrt()),
    }
}

/// Certified lower bound on the minimum energy over the vertex
/// configurations of a block (the value itself in `f64`).
pub fn vertex_energy_min_lo<T: Real>(patches: &[Patch; 5], e: Exponent) -> Result<f64, Fault> {
    let v: [VertexData; 4] = [0, 1, 2, 3].map(|i| VertexData::new::<T>(&patches[i]));
    let inf: [[f64; 4]; 4] = [0, 1, 2, 3].map(|i| {
        let mut r = [0.0; 4];
        for (k, slot) in r.iter_mut().enumerate().take(v[i].n) {
            *slot = vertex_inf_lo::<T>(&v[i], k, e);
        }
        r
    });
    let mut pair = [[[[0.0f64; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in (i + 1)..4 {
            for a in 0..v[i].n {
                for b in 0..v[j].n {
                    pair[i][j][a][b] = vertex_pair_lo::<T>(&v[i], a, &v[j], b, e)?;
                }
            }
        }
    }
    let add = |s: f64, t: f64| T::down(s + t);
    let mut best = f64::INFINITY;
    for a in 0..v[0].n {
        for b in 0..v[1].n {
            let s1 = add(add(inf[0][a], inf[1][b]), pair[0][1][a][b]);
            for c in 0..v[2].n {
                let s2 = add(add(add(s1, inf[2][c]), pair[0][2][a][c]), pair[1][2][b][c]);
                for d in 0..v[3].n {
                    let s3 = add(
                        add(add(add(s2, inf[3][d]), pair[0][3][a][d]), pair[1][3][b][d]),
                        pair[2][3][c][d],
                    );
                    best = best.min(s3);
                }
            }
        }
    }
    Ok(best)
}

/// Factor to split next: the largest `err(i)`. Infinite terms outrank finite
/// ones; among infinite terms the largest `δ_i` wins; remaining ties go to the
/// lowest index.
pub fn subdivision_index(budget: &ErrorBudget) -> usize {
    let rank = |i: usize| -> (bool, f64) {
        match budget.err[i] {
            None => (true, budget.delta[i]),
            Some(v) => (false, v),
        }
    };
    let mut best = 0;
    for i in 1..4 {
        let (inf_i, v_i) = rank(i);
        let (inf_b, v_b) = rank(best);
        if (inf_i && !inf_b) || (inf_i == inf_b && v_i > v_b) {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{DyadicSegment, DyadicSquare};
    use crate::interval::Interval;

    fn seg() -> Patch {
        Patch::Segment(DyadicSegment::root())
    }

    fn sq() -> Patch {
        Patch::Square(DyadicSquare::root())
    }

    fn close(a: Interval, x: f64) -> bool {
        a.lo() - 1e-14 <= x && x <= a.hi() + 1e-14
    }

    #[test]
    fn segment_lambdas_match_power_law() {
        for (e, l1, l2) in [(Exponent::One, 5.0 / 32.0, 1.0 / 8.0), (Exponent::Two, 0.5, 0.25)] {
            let (a, b) = lambdas(&seg(), 0.0, 0.0, Interval::point(1.0), e).unwrap();
            assert!(a.contains(l1) && b.contains(l2), "{a:?} {b:?}");
        }
    }

    #[test]
    fn square_lambdas_match_power_law() {
        for e in [Exponent::One, Exponent::Two] {
            for r in [0.3, 0.7, 1.0, 1.5, 2.0] {
                let k = e.value() as f64;
                let (a, b) = lambdas(&sq(), 0.5, 1.25, Interval::point(r), e).unwrap();
                let l1 = k * (k + 1.0) / (4.0 * r.powf(k + 2.0)) - k * (k + 2.0) / (16.0 * r.powf(k));
                let l2 = k / (7.98 * r.powf(k + 1.0)) * ((1.0f64 + 0.25).sqrt() + (1.0f64 + 1.5625).sqrt());
                assert!(close(a, l1) && close(b, l2), "r={r} {a:?} {l1} {b:?} {l2}");
            }
        }
        let (_, b) = lambdas(&sq(), 0.0, 0.0, Interval::point(1.0), Exponent::One).unwrap();
        assert!(close(b, 2.0 / 7.98));
    }

    #[test]
    fn epsilon_floor_is_infinite() {
        let pq: PatchQuantities<Interval> = seg().quantities();
        assert_eq!(epsilon_pair(&seg(), &pq, 0.0, Exponent::Two).unwrap(), Epsilon::Infinite);
        assert_eq!(epsilon_pair(&seg(), &pq, 0.25, Exponent::Two).unwrap(), Epsilon::Infinite);
        assert!(matches!(epsilon_pair(&seg(), &pq, 1.0, Exponent::Two).unwrap(), Epsilon::Finite(_)));
    }

    #[test]
    fn subdivision_index_rules() {
        let b = |err: [Option<f64>; 4], delta: [f64; 4]| ErrorBudget { err, total: None, delta };
        assert_eq!(subdivision_index(&b([Some(1.0), Some(0.0), Some(0.0), Some(0.0)], [0.0; 4])), 0);
        assert_eq!(subdivision_index(&b([Some(1.0); 4], [0.0; 4])), 0);
        assert_eq!(subdivision_index(&b([Some(1.0), Some(3.0), Some(2.0), Some(3.0)], [0.0; 4])), 1);
        assert_eq!(subdivision_index(&b([Some(9.0), None, Some(2.0), None], [1.0, 1.0, 1.0, 2.0])), 3);
    }

    #[test]
    fn fast_vertex_minimum_agrees() {
        let c = [1.1, -0.4, -0.8, 0.1, 0.05, -0.5, 0.9];
        let b = DyadicBox::containing(c, 5);
        let a = BoxAnalysis::<Interval>::new(&b).unwrap();
        for e in [Exponent::One, Exponent::Two] {
            let slow = a.vertex_energy_min(e).unwrap();
            let fast = vertex_energy_min_lo::<Interval>(&a.patches, e).unwrap();
            let float = vertex_energy_min_lo::<f64>(&a.patches, e).unwrap();
            assert!(fast <= slow.hi() && slow.lo() - fast < 1e-12, "{slow:?} {fast}");
            assert!(fast <= float && float - fast < 1e-12);
        }
    }

    #[test]
    fn fast_epsilon_dominates_generic() {
        for e in [Exponent::One, Exponent::Two] {
            for q in [seg(), sq()] {
                let pq = q.quantities::<Interval>();
                let c = match q {
                    Patch::Square(_) => {
                        let rx = (Interval::one() + Interval::exact(pq.x_max).square()).sqrt().unwrap();
                        let ry = (Interval::one() + Interval::exact(pq.y_max).square()).sqrt().unwrap();
                        (Interval::ratio(50, 399) * (rx + ry)).hi()
                    }
                    _ => 0.0,
                };
                for r in [0.26, 0.5, 1.0, 1.2345, 1.7, 2.0] {
                    let Epsilon::Finite(slow) = epsilon_pair(&q, &pq, r, e).unwrap() else {
                        panic!("finite expected")
                    };
                    let fast = epsilon_fast::<Interval>(&q, c, r, e).unwrap();
                    assert!(fast >= slow * (1.0 - 1e-15), "{fast} < {slow}");
                    assert!(fast <= slow * (1.0 + 1e-12) + 1e-300, "{fast} >> {slow}");
                }
                assert_eq!(epsilon_fast::<Interval>(&q, c, 0.25, e), None);
            }
        }
    }

    #[test]
    fn root_budget_is_infinite() {
        let a = BoxAnalysis::<Interval>::new(&DyadicBox::root()).unwrap();
        let budget = a.error_budget(Exponent::Two).unwrap();
        assert!(!budget.is_finite());
        assert_eq!(a.energy_lower_bound(Exponent::Two).unwrap(), LowerBound::NegInfinity);
        assert_eq!(subdivision_index(&budget), 0);
    }
}
