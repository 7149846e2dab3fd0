//! Bounds on the third derivatives of the energy over the neighborhood of
//! the bi-pyramid in which every finite point stays in a square of side
//! `s = 2^-11` about its bi-pyramid position.
//!
//! Each energy term is `φ(U)` with `φ(x) = x^{e/2}` and `U` one of `F`, `G`.
//! Derivatives of `U` at the region centers are computed exactly; over the
//! regions they are bounded by integrating from the center, seeded by a
//! crude bound on the sixth partials of `G`. The chain rule then bounds the
//! third derivatives of the energy by a tensor whose norm is a quadratic
//! form in the suprema `c_k` of `|φ^(k)|`.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use tbp_core::geometry::Exponent;
use tbp_core::Interval;

use crate::exact::{down_f64, pow_rat, rat, rat_int, rat_interval, rat_of, up_f64, QSqrt3};
use crate::poly::{multi_indices, partial_shape, Monomial, PartialShape};
use crate::regions::{term_box, term_center, Tables, TERMS};

/// Coefficients of `Υ²` as printed, in the order
/// `c1², c1c2, c2², c1c3, c2c3, c3²`.
pub const PRINTED_UPSILON: [i64; 6] = [19336, 19036, 4922, 1474, 772, 31];

/// Claimed maxima of `|D_k G|` at the pair centers, `k = 1..5`.
pub const CENTER_CLAIMS: [i64; 5] = [1, 4, 18, 96, 600];

/// Bound on the sixth partials of `G` over a pair region.
pub const PHI6_CLAIM: i64 = 5_000_000;

/// `B = 1 + 2^-8`, the claimed bound on `|z1|`, `|z2|` and `1/|z1 - z2|`.
pub fn sup_bound() -> BigRational {
    rat(257, 256)
}

/// Offsets `v` for orders 1, 2, 3: `F` terms, then `G` terms.
pub fn offsets(pair: bool) -> [BigRational; 3] {
    if pair {
        [rat(1, 200), rat(1, 50), rat(1, 10)]
    } else {
        [rat(1, 1000), BigRational::zero(), BigRational::zero()]
    }
}

/// `|φ^(k)|` is monotone on `I`, so its supremum sits at `x = 1/4`.
pub fn chain_constants(e: Exponent) -> [BigRational; 3] {
    match e {
        // φ = √x, φ^(k)(1/4) = (1/2)(-1/2)...(3/2 - k) 2^{2k-1}
        Exponent::One => {
            let mut out = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
            let mut falling = BigRational::one();
            for k in 1..=3i64 {
                falling *= rat(3 - 2 * k, 2);
                out[k as usize - 1] = falling.abs() * rat_int(1 << (2 * k - 1));
            }
            out
        }
        Exponent::Two => [rat_int(1), rat_int(0), rat_int(0)],
    }
}

/// The interval `I = [1/4, 1/2 + 2^-9]` that contains every term's range.
pub fn range_interval() -> (BigRational, BigRational) {
    (rat(1, 4), rat(1, 2) + rat(1, 512))
}

/// Exact center partials of one term, keyed by local multi-index.
pub struct CenterValues {
    values: Vec<HashMap<Monomial, QSqrt3>>,
}

impl CenterValues {
    /// Absolute values of all partials up to `max_order` at each center.
    pub fn new(tabs: &Tables, max_order: u8) -> CenterValues {
        let values = TERMS
            .iter()
            .map(|&t| {
                let tab = tabs.table(t);
                let c = term_center(t);
                let mut map = HashMap::new();
                let top = if t.is_pair() { max_order } else { max_order.min(3) };
                for k in 1..=top {
                    for m in multi_indices(4, k) {
                        if !t.is_pair() && (m[2] > 0 || m[3] > 0) {
                            continue;
                        }
                        map.insert(m, tab.get(&m).eval_exact(&c, tab.q()).abs());
                    }
                }
                map
            })
            .collect();
        CenterValues { values }
    }

    /// `a(coords; m)`, zero when a coordinate is unrelated to `m`.
    pub fn a(&self, m: usize, coords: &[usize]) -> QSqrt3 {
        let mut idx: Monomial = [0; 4];
        for &i in coords {
            match crate::regions::local_var(TERMS[m], i) {
                Some(v) => idx[v] += 1,
                None => return QSqrt3::zero(),
            }
        }
        self.values[m].get(&idx).cloned().unwrap_or_else(QSqrt3::zero)
    }

    /// `b = a + v`, the bound valid over the whole region.
    pub fn b(&self, m: usize, coords: &[usize]) -> QSqrt3 {
        let v = &offsets(TERMS[m].is_pair())[coords.len() - 1];
        self.a(m, coords) + QSqrt3::rational(v.clone())
    }

    /// Largest `|D_k G|` over all order-`k` partials at the six pair centers.
    pub fn max_pair(&self, k: u8) -> QSqrt3 {
        let mut best = QSqrt3::zero();
        for (m, t) in TERMS.iter().enumerate() {
            if !t.is_pair() {
                continue;
            }
            for idx in multi_indices(4, k) {
                let v = &self.values[m][&idx];
                if v.cmp_value(&best) == Ordering::Greater {
                    best = v.clone();
                }
            }
        }
        best
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CenterAudit {
    /// Exact maxima `a_1..a_5` rendered as `a + b√3`.
    pub maxima: Vec<String>,
    pub approx: Vec<f64>,
    pub claims: Vec<i64>,
    pub holds: bool,
}

pub fn center_audit(cv: &CenterValues) -> (Vec<QSqrt3>, CenterAudit) {
    let maxima: Vec<QSqrt3> = (1..=5).map(|k| cv.max_pair(k)).collect();
    let holds = maxima
        .iter()
        .zip(CENTER_CLAIMS)
        .all(|(a, c)| a.cmp_value(&QSqrt3::rational(rat_int(c))) != Ordering::Greater);
    let audit = CenterAudit {
        maxima: maxima.iter().map(|a| a.to_string()).collect(),
        approx: maxima.iter().map(|a| a.to_f64()).collect(),
        claims: CENTER_CLAIMS.to_vec(),
        holds,
    };
    (maxima, audit)
}

#[derive(Debug, Clone, Serialize)]
pub struct SixthPartials {
    pub count: usize,
    pub max_coefficient_sum: String,
    pub max_degree: u32,
    /// Power of `q = |z1 - z2|²` in the denominator.
    pub denominator_power: u32,
    pub reduced: bool,
    /// `B` certified over every pair region.
    pub sup_bound: String,
    pub sup_bound_holds: bool,
    /// Exponent of `B` in the bound: degree plus twice the power of `q`.
    pub exponent: u32,
    pub phi6_bound: f64,
    pub phi6_claim: i64,
    pub holds: bool,
}

/// Whether `max(|z1|, |z2|, 1/|z1 - z2|) <= B` over every pair region.
pub fn certify_sup_bound() -> bool {
    let b = sup_bound();
    let b2 = rat_interval(&(&b * &b));
    let inv_b2 = rat_interval(&(rat_int(1) / (&b * &b)));
    TERMS.iter().filter(|t| t.is_pair()).all(|&t| {
        let [x1, y1, x2, y2] = term_box(t);
        let n1 = x1.square() + y1.square();
        let n2 = x2.square() + y2.square();
        let q = (x1 - x2).square() + (y1 - y2).square();
        n1.hi() <= b2.lo() && n2.hi() <= b2.lo() && q.lo() >= inv_b2.hi()
    })
}

pub fn sixth_partials(shape: &PartialShape) -> (BigRational, SixthPartials) {
    let b = sup_bound();
    let sup_bound_holds = certify_sup_bound();
    let exponent = shape.max_degree + 2 * shape.pow;
    let bound = &shape.max_coefficient_sum * pow_rat(&b, exponent);
    let holds = sup_bound_holds && shape.reduced && bound < rat_int(PHI6_CLAIM);
    let report = SixthPartials {
        count: shape.count,
        max_coefficient_sum: shape.max_coefficient_sum.to_string(),
        max_degree: shape.max_degree,
        denominator_power: shape.pow,
        reduced: shape.reduced,
        sup_bound: b.to_string(),
        sup_bound_holds,
        exponent,
        phi6_bound: bound.to_f64().unwrap_or(f64::INFINITY),
        phi6_claim: PHI6_CLAIM,
        holds,
    };
    (bound, report)
}

#[derive(Debug, Clone, Serialize)]
pub struct BootstrapStep {
    pub order: u8,
    /// `a_k + 2^-10 Φ_{k+1}`.
    pub bound: f64,
    pub claim: String,
    pub holds: bool,
}

/// The descending chain `Φ_k < a_k + 2^-10 Φ_{k+1}`, each step seeded by the
/// previous claimed bound, plus the offset checks `2^-10 Φ_{k+1} < v_k`.
pub fn bootstrap(maxima: &[QSqrt3], phi6_ok: bool) -> (Vec<BootstrapStep>, bool) {
    let claims = [
        rat_int(1) + rat(1, 200),
        rat(402, 100),
        rat(181, 10),
        rat_int(102),
        rat_int(5483),
    ];
    let v = offsets(true);
    let step = rat(1, 1024);
    let mut prev = rat_int(PHI6_CLAIM);
    let mut steps = Vec::new();
    let mut ok = phi6_ok;
    for k in (1..=5u8).rev() {
        let a = &maxima[k as usize - 1];
        let drift = &prev * &step;
        let bound = a.clone() + QSqrt3::rational(drift.clone());
        let claim = &claims[k as usize - 1];
        let mut holds = bound.cmp_value(&QSqrt3::rational(claim.clone())) == Ordering::Less;
        if k <= 3 {
            holds &= drift < v[k as usize - 1];
        }
        ok &= holds;
        steps.push(BootstrapStep {
            order: k,
            bound: bound.to_f64(),
            claim: claim.to_string(),
            holds,
        });
        prev = claim.clone();
    }
    (steps, ok)
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeCheck {
    pub term: usize,
    pub lo: String,
    pub hi: String,
    pub inside: bool,
}

/// Images of every term over its region, checked against `I`. `F` is
/// monotone in `x² + y²`, so its bounds come from exact endpoint values.
pub fn range_containment() -> (Vec<RangeCheck>, bool) {
    let (lo, hi) = range_interval();
    let quarter = rat(1, 4);
    let mut all = true;
    let checks = TERMS
        .iter()
        .enumerate()
        .map(|(m, &t)| {
            let [x1, y1, x2, y2] = term_box(t);
            let s1 = x1.square() + y1.square();
            let (u_lo, u_hi) = if t.is_pair() {
                let n1 = Interval::from_ratio(1, 1) + s1;
                let n2 = Interval::from_ratio(1, 1) + (x2.square() + y2.square());
                let q = (x1 - x2).square() + (y1 - y2).square();
                let u = (n1 * n2 * Interval::from_ratio(1, 4)).checked_div(q).expect("separated points");
                (rat_of(u.lo()), rat_of(u.hi()))
            } else {
                (
                    (rat_int(1) + rat_of(s1.lo().max(0.0))) * &quarter,
                    (rat_int(1) + rat_of(s1.hi())) * &quarter,
                )
            };
            let inside = u_lo >= lo && u_hi <= hi;
            all &= inside;
            RangeCheck {
                term: m + 1,
                lo: tbp_core::hexfloat::format(down_f64(&u_lo)),
                hi: tbp_core::hexfloat::format(up_f64(&u_hi)),
                inside,
            }
        })
        .collect();
    (checks, all)
}

/// Entry `(i, j)` of the aggregated third-derivative bound, as the
/// coefficients of `c1`, `c2`, `c3`.
pub fn tensor(cv: &CenterValues) -> [[[QSqrt3; 3]; 7]; 7] {
    let mut t: [[[QSqrt3; 3]; 7]; 7] = Default::default();
    for (i, row) in t.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for m in 0..10 {
                for k in 0..7 {
                    if ![i, j, k].iter().all(|&c| crate::regions::related(m, c)) {
                        continue;
                    }
                    let b = |c: &[usize]| cv.b(m, c);
                    cell[0] = cell[0].clone() + b(&[i, j, k]);
                    cell[1] = cell[1].clone()
                        + b(&[i, j]) * b(&[k])
                        + b(&[j, k]) * b(&[i])
                        + b(&[k, i]) * b(&[j]);
                    cell[2] = cell[2].clone() + b(&[i]) * b(&[j]) * b(&[k]);
                }
            }
        }
    }
    t
}

/// Exact coefficients of the squared norm of the tensor, in the order of
/// [`PRINTED_UPSILON`].
pub fn norm_squared(t: &[[[QSqrt3; 3]; 7]; 7]) -> [QSqrt3; 6] {
    let mut out: [QSqrt3; 6] = Default::default();
    let two = QSqrt3::rational(rat_int(2));
    for row in t {
        for [a, b, c] in row {
            out[0] = out[0].clone() + a.clone() * a.clone();
            out[1] = out[1].clone() + two.clone() * a.clone() * b.clone();
            out[2] = out[2].clone() + b.clone() * b.clone();
            out[3] = out[3].clone() + two.clone() * a.clone() * c.clone();
            out[4] = out[4].clone() + two.clone() * b.clone() * c.clone();
            out[5] = out[5].clone() + c.clone() * c.clone();
        }
    }
    out
}

/// `Υ²` from integer coefficients and chain constants.
pub fn upsilon_squared(coef: &[BigInt; 6], c: &[BigRational; 3]) -> BigRational {
    let [c1, c2, c3] = c;
    let mono = [c1 * c1, c1 * c2, c2 * c2, c1 * c3, c2 * c3, c3 * c3];
    coef.iter()
        .zip(mono)
        .map(|(k, m)| BigRational::from_integer(k.clone()) * m)
        .sum()
}

/// Everything the variation bound needs, computed once for both exponents.
pub struct VariationData {
    pub centers: Vec<QSqrt3>,
    pub center_audit: CenterAudit,
    pub sixth: SixthPartials,
    pub bootstrap: Vec<BootstrapStep>,
    pub bootstrap_holds: bool,
    pub ranges: Vec<RangeCheck>,
    pub ranges_hold: bool,
    /// Exact coefficients of `‖T‖²`.
    pub exact_coefficients: [QSqrt3; 6],
    /// Their ceilings.
    pub coefficients: [BigInt; 6],
}

impl VariationData {
    pub fn compute() -> VariationData {
        VariationData::compute_with(&Tables::new(6))
    }

    /// `tabs` must hold the partials of `G` to order 6.
    pub fn compute_with(tabs: &Tables) -> VariationData {
        let cv = CenterValues::new(tabs, 5);
        let (maxima, center_audit) = center_audit(&cv);
        let (_, sixth) = sixth_partials(&partial_shape(&tabs.g, 6));
        let (bootstrap, bootstrap_holds) = bootstrap(&maxima, sixth.holds && center_audit.holds);
        let (ranges, ranges_hold) = range_containment();
        let exact_coefficients = norm_squared(&tensor(&cv));
        let coefficients = exact_coefficients.clone().map(|q| q.ceil());
        VariationData {
            centers: maxima,
            center_audit,
            sixth,
            bootstrap,
            bootstrap_holds,
            ranges,
            ranges_hold,
            exact_coefficients,
            coefficients,
        }
    }

    /// Whether every ceiled coefficient is at most the printed one.
    pub fn dominated_by_printed(&self) -> bool {
        self.coefficients
            .iter()
            .zip(PRINTED_UPSILON)
            .all(|(c, p)| *c <= BigInt::from(p))
    }

    pub fn upsilon(&self, e: Exponent) -> Upsilon {
        let c = chain_constants(e);
        let sq = upsilon_squared(&self.coefficients, &c);
        let threshold = match e {
            Exponent::One => 345,
            Exponent::Two => 140,
        };
        let below_threshold = sq < rat_int(threshold * threshold);
        // drift over a special path is at most Υ / 2^12, which must stay below 1/10
        let drift_ok = rat_int(100) * &sq < rat_int(4096 * 4096);
        let enclosure = rat_interval(&sq).sqrt().expect("nonnegative");
        Upsilon {
            c: c.iter().map(|v| v.to_string()).collect(),
            squared: sq.to_string(),
            lo: tbp_core::hexfloat::format(enclosure.lo()),
            hi: tbp_core::hexfloat::format(enclosure.hi()),
            approx: enclosure.hi(),
            threshold,
            below_threshold,
            drift_ok,
        }
    }

    pub fn holds(&self) -> bool {
        self.center_audit.holds && self.sixth.holds && self.bootstrap_holds && self.ranges_hold
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Upsilon {
    pub c: Vec<String>,
    pub squared: String,
    pub lo: String,
    pub hi: String,
    pub approx: f64,
    pub threshold: i64,
    pub below_threshold: bool,
    pub drift_ok: bool,
}
