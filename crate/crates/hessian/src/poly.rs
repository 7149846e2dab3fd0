//! Polynomials in `(x1, y1, x2, y2)` and the symbolic partials of the
//! two pair-energy building blocks
//!
//! ```text
//! F(z)      = (1 + x² + y²) / 4
//! G(z1, z2) = (1 + |z1|²)(1 + |z2|²) / (4 q),   q = (x1 - x2)² + (y1 - y2)²
//! ```
//!
//! `F` is the inverse squared chordal distance from `z` to infinity and `G`
//! the inverse squared chordal distance between two finite points.
//! Partials of `G` are kept as `P / q^p` with exact rational coefficients.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use tbp_core::Interval;

use crate::exact::{rat, rat_int, rat_interval, QSqrt3};

/// Exponents of `(x1, y1, x2, y2)`.
pub type Monomial = [u8; 4];

/// A ring in which polynomials can be evaluated.
pub trait Scalar: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn from_rational(q: &BigRational) -> Self;
}

fn scalar_zero<S: Scalar>() -> S {
    S::from_rational(&BigRational::zero())
}

impl Scalar for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
}

impl Scalar for QSqrt3 {
    fn from_rational(q: &BigRational) -> Self {
        QSqrt3::rational(q.clone())
    }
}

impl Scalar for Interval {
    fn from_rational(q: &BigRational) -> Self {
        rat_interval(q)
    }
}

/// `a + b i` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gaussian {
    pub re: BigRational,
    pub im: BigRational,
}

impl Add for Gaussian {
    type Output = Gaussian;
    fn add(self, o: Gaussian) -> Gaussian {
        Gaussian {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Gaussian {
    type Output = Gaussian;
    fn sub(self, o: Gaussian) -> Gaussian {
        Gaussian {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for Gaussian {
    type Output = Gaussian;
    fn mul(self, o: Gaussian) -> Gaussian {
        Gaussian {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Scalar for Gaussian {
    fn from_rational(q: &BigRational) -> Self {
        Gaussian {
            re: q.clone(),
            im: BigRational::zero(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Poly {
        Poly::zero().plus_term([0; 4], c)
    }

    /// The variable with index `v` in `(x1, y1, x2, y2)`.
    pub fn var(v: usize) -> Poly {
        let mut m = [0; 4];
        m[v] = 1;
        Poly::zero().plus_term(m, rat_int(1))
    }

    fn plus_term(mut self, m: Monomial, c: BigRational) -> Poly {
        if c.is_zero() {
            return self;
        }
        let e = self.terms.entry(m).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Sum of the absolute values of the coefficients.
    pub fn coefficient_sum(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |s, c| s + c.abs())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn partial(&self, v: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m[v] > 0 {
                let mut n = *m;
                n[v] -= 1;
                out = out.plus_term(n, c * rat_int(m[v] as i64));
            }
        }
        out
    }

    pub fn eval<S: Scalar>(&self, point: &[S; 4]) -> S {
        let deg = self.terms.keys().flat_map(|m| m.iter()).copied().max().unwrap_or(0) as usize;
        let powers: Vec<Vec<S>> = point
            .iter()
            .map(|x| {
                let mut p = vec![S::from_rational(&rat_int(1))];
                for k in 1..=deg {
                    p.push(p[k - 1].clone() * x.clone());
                }
                p
            })
            .collect();
        let mut acc = scalar_zero::<S>();
        for (m, c) in &self.terms {
            let mut t = S::from_rational(c);
            for v in 0..4 {
                if m[v] > 0 {
                    t = t * powers[v][m[v] as usize].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out = out.plus_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out = out.plus_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let m = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                out = out.plus_term(m, ca * cb);
            }
        }
        out
    }
}

/// `q = (x1 - x2)² + (y1 - y2)²`.
pub fn q_poly() -> Poly {
    let dx = &Poly::var(0) - &Poly::var(2);
    let dy = &Poly::var(1) - &Poly::var(3);
    &(&dx * &dx) + &(&dy * &dy)
}

/// `P / q^pow`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    pub num: Poly,
    pub pow: u32,
}

impl RatFn {
    /// Quotient rule against the fixed base `q`.
    pub fn partial(&self, v: usize, q: &Poly) -> RatFn {
        if self.pow == 0 {
            return RatFn {
                num: self.num.partial(v),
                pow: 0,
            };
        }
        let a = &self.num.partial(v) * q;
        let b = (&self.num * &q.partial(v)).scale(&rat_int(self.pow as i64));
        RatFn {
            num: &a - &b,
            pow: self.pow + 1,
        }
    }

    /// Value at a point where `q` is invertible.
    pub fn eval_exact(&self, point: &[QSqrt3; 4], q: &Poly) -> QSqrt3 {
        let n = self.num.eval(point);
        if self.pow == 0 {
            return n;
        }
        let qv = q.eval(point);
        let mut d = QSqrt3::one();
        for _ in 0..self.pow {
            d = d * qv.clone();
        }
        n * d.recip().expect("q vanishes at the evaluation point")
    }

    pub fn eval_rational(&self, point: &[BigRational; 4], q: &Poly) -> BigRational {
        let n = self.num.eval(point);
        if self.pow == 0 {
            return n;
        }
        n / q.eval(point).pow(self.pow as i32)
    }
}

/// `(1 + x1² + y1²) / 4`, as a function of the first point only.
pub fn f_function() -> RatFn {
    let x = Poly::var(0);
    let y = Poly::var(1);
    let s = &(&Poly::constant(rat_int(1)) + &(&x * &x)) + &(&y * &y);
    RatFn {
        num: s.scale(&rat(1, 4)),
        pow: 0,
    }
}

/// `(1 + |z1|²)(1 + |z2|²) / (4 q)`.
pub fn g_function() -> RatFn {
    let one = Poly::constant(rat_int(1));
    let sq = |v: usize| &Poly::var(v) * &Poly::var(v);
    let a = &(&one + &sq(0)) + &sq(1);
    let b = &(&one + &sq(2)) + &sq(3);
    RatFn {
        num: (&a * &b).scale(&rat(1, 4)),
        pow: 1,
    }
}

/// Multi-indices of total order `k` over `n` variables, lexicographic.
pub fn multi_indices(n: usize, k: u8) -> Vec<Monomial> {
    fn rec(n: usize, v: usize, left: u8, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if v + 1 == n {
            cur[v] = left;
            out.push(*cur);
            cur[v] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[v] = e;
            rec(n, v + 1, left - e, cur, out);
        }
        cur[v] = 0;
    }
    let mut out = Vec::new();
    rec(n, 0, k, &mut [0; 4], &mut out);
    out
}

/// All partials of one function up to a fixed order, memoized by multi-index.
pub struct PartialTable {
    q: Poly,
    table: HashMap<Monomial, RatFn>,
}

impl PartialTable {
    pub fn new(f: RatFn, max_order: u8) -> PartialTable {
        let q = q_poly();
        let mut table = HashMap::new();
        table.insert([0; 4], f);
        for k in 1..=max_order {
            for m in multi_indices(4, k) {
                let v = (0..4).find(|&v| m[v] > 0).expect("nonzero order");
                let mut parent = m;
                parent[v] -= 1;
                let d = table[&parent].partial(v, &q);
                table.insert(m, d);
            }
        }
        PartialTable { q, table }
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn get(&self, m: &Monomial) -> &RatFn {
        &self.table[m]
    }

    /// The partial along a list of variable indices.
    pub fn along(&self, vars: &[usize]) -> &RatFn {
        let mut m = [0u8; 4];
        for &v in vars {
            m[v] += 1;
        }
        self.get(&m)
    }
}

/// Shape of the `k`-th partials of `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialShape {
    pub order: u8,
    pub count: usize,
    pub max_coefficient_sum: BigRational,
    pub max_degree: u32,
    pub pow: u32,
    /// Every numerator is nonzero on the complex zero set of `q`, so no
    /// factor of `q` cancels.
    pub reduced: bool,
}

/// A point with `x1 = x2 + i (y1 - y2)`, on which `q` vanishes.
fn zero_of_q() -> [Gaussian; 4] {
    let (y1, x2, y2) = (rat(3, 7), rat(-2, 5), rat(-5, 11));
    let g = |re: BigRational| Gaussian::from_rational(&re);
    [
        Gaussian {
            re: x2.clone(),
            im: &y1 - &y2,
        },
        g(y1),
        g(x2),
        g(y2),
    ]
}

pub fn partial_shape(t: &PartialTable, order: u8) -> PartialShape {
    let zq = zero_of_q();
    let mut shape = PartialShape {
        order,
        count: 0,
        max_coefficient_sum: BigRational::zero(),
        max_degree: 0,
        pow: 0,
        reduced: true,
    };
    for m in multi_indices(4, order) {
        let r = t.get(&m);
        shape.count += 1;
        shape.max_coefficient_sum = shape.max_coefficient_sum.clone().max(r.num.coefficient_sum());
        shape.max_degree = shape.max_degree.max(r.num.degree());
        shape.pow = shape.pow.max(r.pow);
        if r.pow > 0 && r.num.eval(&zq) == scalar_zero::<Gaussian>() {
            shape.reduced = false;
        }
    }
    shape
}
