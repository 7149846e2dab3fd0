//! Second-order forward jets in the seven configuration coordinates.

use tbp_core::geometry::{Configuration, Exponent};
use tbp_core::{Fault, Real};

pub const N: usize = 7;

/// A value with its gradient and Hessian.
#[derive(Debug, Clone, Copy)]
pub struct Jet<T> {
    pub v: T,
    pub g: [T; N],
    pub h: [[T; N]; N],
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        Jet {
            v,
            g: [T::zero(); N],
            h: [[T::zero(); N]; N],
        }
    }

    pub fn variable(i: usize, v: T) -> Self {
        let mut j = Jet::constant(v);
        j.g[i] = T::one();
        j
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = *self;
        out.v = self.v + o.v;
        for i in 0..N {
            out.g[i] = self.g[i] + o.g[i];
            for k in 0..N {
                out.h[i][k] = self.h[i][k] + o.h[i][k];
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-T::one()))
    }

    pub fn scale(&self, c: T) -> Self {
        let mut out = *self;
        out.v = self.v * c;
        for i in 0..N {
            out.g[i] = self.g[i] * c;
            for k in 0..N {
                out.h[i][k] = self.h[i][k] * c;
            }
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Jet::constant(self.v * o.v);
        for i in 0..N {
            out.g[i] = self.g[i] * o.v + self.v * o.g[i];
            for k in 0..N {
                out.h[i][k] =
                    self.h[i][k] * o.v + self.v * o.h[i][k] + (self.g[i] * o.g[k] + self.g[k] * o.g[i]);
            }
        }
        out
    }

    /// `f(self)` given `f`, `f'`, `f''` at the value.
    pub fn unary(&self, f0: T, f1: T, f2: T) -> Self {
        let mut out = Jet::constant(f0);
        for i in 0..N {
            out.g[i] = f1 * self.g[i];
            for k in 0..N {
                out.h[i][k] = f1 * self.h[i][k] + f2 * (self.g[i] * self.g[k]);
            }
        }
        out
    }

    /// `u^{-e/2}`, the energy of a pair at squared distance `u`.
    pub fn energy_of_dist_sq(&self, e: Exponent) -> Result<Self, Fault> {
        let u = self.v;
        match e {
            Exponent::Two => {
                let r = u.recip()?;
                let r2 = r * r;
                Ok(self.unary(r, -r2, T::int(2) * r2 * r))
            }
            Exponent::One => {
                let s = u.sqrt()?;
                let r = s.recip()?;
                let r3 = r * r * r;
                Ok(self.unary(r, -(T::ratio(1, 2) * r3), T::ratio(3, 4) * r3 * r * r))
            }
        }
    }

    pub fn recip(&self) -> Result<Self, Fault> {
        let r = self.v.recip()?;
        let r2 = r * r;
        Ok(self.unary(r, -r2, T::int(2) * r2 * r))
    }
}

/// The five points as jets; `None` is infinity.
fn points<T: Real>(c: &Configuration<T>) -> [Option<(Jet<T>, Jet<T>)>; 5] {
    let x = |i: usize| Jet::variable(i, c.coords[i]);
    [
        Some((x(0), Jet::constant(T::zero()))),
        Some((x(1), x(2))),
        Some((x(3), x(4))),
        Some((x(5), x(6))),
        None,
    ]
}

/// Squared chordal distance between two points.
fn dist_sq<T: Real>(z: &Option<(Jet<T>, Jet<T>)>, w: &Option<(Jet<T>, Jet<T>)>) -> Result<Jet<T>, Fault> {
    let one = Jet::constant(T::one());
    let four = T::int(4);
    let n = |p: &(Jet<T>, Jet<T>)| one.add(&p.0.mul(&p.0)).add(&p.1.mul(&p.1));
    match (z, w) {
        (Some(a), Some(b)) => {
            let dx = a.0.sub(&b.0);
            let dy = a.1.sub(&b.1);
            let num = dx.mul(&dx).add(&dy.mul(&dy)).scale(four);
            Ok(num.mul(&n(a).mul(&n(b)).recip()?))
        }
        (Some(a), None) | (None, Some(a)) => Ok(n(a).recip()?.scale(four)),
        (None, None) => Err(Fault::Coincident),
    }
}

/// Energy of a normalized configuration with its gradient and Hessian.
pub fn energy_jet<T: Real>(c: &Configuration<T>, e: Exponent) -> Result<Jet<T>, Fault> {
    let pts = points(c);
    let mut total = Jet::constant(T::zero());
    for i in 0..5 {
        for j in (i + 1)..5 {
            total = total.add(&dist_sq(&pts[i], &pts[j])?.energy_of_dist_sq(e)?);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tbp_core::geometry::{config_energy, tbp_reference, TbpKind};
    use tbp_core::Interval;

    #[test]
    fn value_matches_the_energy() {
        let c = Configuration::new([1.1, -0.4, -0.9, 0.05, 0.02, -0.6, 0.8]);
        for e in [Exponent::One, Exponent::Two] {
            let j = energy_jet::<f64>(&c, e).unwrap();
            let v = config_energy::<f64>(&c, e).unwrap();
            assert!((j.v - v).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_simple_differences() {
        let c = Configuration::new([1.1, -0.4, -0.9, 0.05, 0.02, -0.6, 0.8]);
        let e = Exponent::One;
        let j = energy_jet::<f64>(&c, e).unwrap();
        let h = 1e-6;
        for i in 0..N {
            let mut p = c;
            let mut m = c;
            p.coords[i] += h;
            m.coords[i] -= h;
            let fd = (config_energy::<f64>(&p, e).unwrap() - config_energy::<f64>(&m, e).unwrap()) / (2.0 * h);
            assert!((fd - j.g[i]).abs() < 1e-6, "{i}: {fd} vs {}", j.g[i]);
        }
    }

    #[test]
    fn hessian_is_symmetric_and_encloses_the_float_one() {
        let e = Exponent::Two;
        let f = energy_jet::<f64>(&tbp_reference(TbpKind::Polar), e).unwrap();
        let iv = energy_jet::<Interval>(&tbp_reference(TbpKind::Polar), e).unwrap();
        for i in 0..N {
            assert!(iv.g[i].contains(0.0));
            for k in 0..N {
                assert_eq!(f.h[i][k], f.h[k][i]);
                assert!(iv.h[i][k].width() < 1e-12);
                assert!((iv.h[i][k].midpoint() - f.h[i][k]).abs() < 1e-12);
            }
        }
    }
}
