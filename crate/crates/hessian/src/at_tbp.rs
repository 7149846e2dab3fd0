//! Gradient and Hessian of the energy at the bi-pyramid.
//!
//! Two independent evaluations are intersected. The first sums
//! `φ'(U) D²U + φ''(U) DU DUᵀ` over the ten terms with the derivatives of
//! `U` exact in `Q(√3)`; only `φ'` and `φ''` are taken in intervals. The
//! second runs interval jets through the chordal distance formula.

use tbp_core::geometry::{tbp_reference, Exponent, TbpKind};
use tbp_core::{Fault, Interval};

use crate::exact::QSqrt3;
use crate::jet::energy_jet;
use crate::ldlt::{SymMatrix7, DIM};
use crate::regions::{Tables, TERMS};

#[derive(Debug, Clone, Copy)]
pub struct Derivatives {
    pub gradient: [Interval; DIM],
    pub hessian: SymMatrix7,
}

/// `φ'(u)` and `φ''(u)` for `φ(x) = x^{e/2}`.
fn phi_derivatives(u: Interval, e: Exponent) -> Result<(Interval, Interval), Fault> {
    match e {
        Exponent::Two => Ok((Interval::point(1.0), Interval::point(0.0))),
        Exponent::One => {
            let s = u.sqrt()?;
            let d1 = Interval::from_ratio(1, 2).checked_div(s)?;
            let d2 = -(Interval::from_ratio(1, 4).checked_div(s * u)?);
            Ok((d1, d2))
        }
    }
}

/// The exact-derivative path.
pub fn derivatives_exact(tabs: &Tables, e: Exponent) -> Result<Derivatives, Fault> {
    let mut grad = [Interval::point(0.0); DIM];
    let mut hess = SymMatrix7::zero();
    for m in 0..TERMS.len() {
        let u = tabs.at_center(m, &[]);
        let (d1, d2) = phi_derivatives(u.to_interval(), e)?;
        let du: Vec<QSqrt3> = (0..DIM).map(|i| tabs.at_center(m, &[i])).collect();
        for i in 0..DIM {
            if !du[i].is_zero() {
                grad[i] = grad[i] + d1 * du[i].to_interval();
            }
            for j in 0..=i {
                let dij = tabs.at_center(m, &[i, j]);
                let prod = du[i].clone() * du[j].clone();
                if dij.is_zero() && prod.is_zero() {
                    continue;
                }
                let term = d1 * dij.to_interval() + d2 * prod.to_interval();
                hess.set(i, j, hess.get(i, j) + term);
            }
        }
    }
    Ok(Derivatives { gradient: grad, hessian: hess })
}

/// The interval jet path.
pub fn derivatives_jet(e: Exponent) -> Result<Derivatives, Fault> {
    let j = energy_jet::<Interval>(&tbp_reference(TbpKind::Polar), e)?;
    Ok(Derivatives {
        gradient: j.g,
        hessian: SymMatrix7::from_rows(&j.h),
    })
}

#[derive(Debug, thiserror::Error)]
pub enum HessianError {
    #[error(transparent)]
    Fault(#[from] Fault),
    #[error("the exact and jet evaluations of the {0} disagree")]
    PathsDisagree(&'static str),
}

/// Intersection of the two paths; an error if they disagree anywhere.
pub fn derivatives_at_tbp(tabs: &Tables, e: Exponent) -> Result<Derivatives, HessianError> {
    let a = derivatives_exact(tabs, e)?;
    let b = derivatives_jet(e)?;
    let mut gradient = a.gradient;
    for (g, h) in gradient.iter_mut().zip(b.gradient.iter()) {
        *g = g.intersect(h).ok_or(HessianError::PathsDisagree("gradient"))?;
    }
    let hessian = a
        .hessian
        .intersect(&b.hessian)
        .ok_or(HessianError::PathsDisagree("Hessian"))?;
    Ok(Derivatives { gradient, hessian })
}

/// Whether every gradient enclosure contains zero.
pub fn gradient_vanishes(d: &Derivatives) -> bool {
    d.gradient.iter().all(|g| g.contains(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::ldlt::ldlt_certify;

    #[test]
    fn both_paths_agree_and_certify() {
        let tabs = Tables::new(2);
        for e in [Exponent::One, Exponent::Two] {
            let a = derivatives_exact(&tabs, e).unwrap();
            let b = derivatives_jet(e).unwrap();
            let d = derivatives_at_tbp(&tabs, e).unwrap();
            assert!(gradient_vanishes(&a) && gradient_vanishes(&b) && gradient_vanishes(&d));
            for i in 0..DIM {
                for j in 0..DIM {
                    assert!(d.hessian.get(i, j).width() < 1e-12);
                    assert!(a.hessian.get(i, j).intersects(&b.hessian.get(i, j)));
                }
            }
            let r = ldlt_certify(&d.hessian, &rat(1, 10));
            assert!(r.valid, "{e:?}: {:?}", r.pivots);
        }
    }
}
