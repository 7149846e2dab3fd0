//! The combined local-minimum certificate.
//!
//! The Hessian at the bi-pyramid minus `I/10` has an `L D Lᵀ` factorization
//! with positive pivots, so its least eigenvalue exceeds `1/10`. Along a
//! path of seven coordinate segments of length at most `2^-12` the Hessian
//! moves by at most `Υ / 2^12` in the Frobenius norm, which stays below
//! `1/10`. The Hessian is therefore positive definite on the whole
//! neighborhood, and the energy is strictly convex there.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use tbp_core::geometry::Exponent;
use tbp_core::hexfloat;
use tbp_core::Interval;

use crate::at_tbp::{derivatives_at_tbp, gradient_vanishes, HessianError};
use crate::exact::rat;
use crate::ldlt::{ldlt_certify, DIM};
use crate::regions::{Tables, SIDE_LOG2};
use crate::variation::{
    BootstrapStep, CenterAudit, RangeCheck, SixthPartials, Upsilon, VariationData, PRINTED_UPSILON,
};

pub const CERTIFICATE_VERSION: &str = "tbp-hessian v1";

fn hex(i: &Interval) -> [String; 2] {
    [hexfloat::format(i.lo()), hexfloat::format(i.hi())]
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub format: String,
    pub exponent: i64,
    pub side_log2: u32,
    pub shift: String,
    pub gradient: Vec<[String; 2]>,
    pub gradient_vanishes: bool,
    pub hessian: Vec<Vec<[String; 2]>>,
    pub pivots: Vec<[String; 2]>,
    pub pivots_positive: bool,
    pub center_audit: CenterAudit,
    pub sixth_partials: SixthPartials,
    pub bootstrap: Vec<BootstrapStep>,
    pub bootstrap_holds: bool,
    pub ranges: Vec<RangeCheck>,
    pub ranges_hold: bool,
    /// Ceilings of the exact coefficients of `Υ²`, in the order
    /// `c1², c1c2, c2², c1c3, c2c3, c3²`.
    pub upsilon_coefficients: Vec<String>,
    pub upsilon_coefficients_exact: Vec<String>,
    pub printed_coefficients: Vec<i64>,
    pub coefficients_dominated: bool,
    pub upsilon: Upsilon,
    pub valid: bool,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Certificate with an arbitrary eigenvalue margin `shift`.
pub fn certify_with(
    e: Exponent,
    shift: &BigRational,
    tabs: &Tables,
    data: &VariationData,
) -> Result<Certificate, HessianError> {
    let d = derivatives_at_tbp(tabs, e)?;
    let ldlt = ldlt_certify(&d.hessian, shift);
    let upsilon = data.upsilon(e);
    let grad_ok = gradient_vanishes(&d);
    // the drift bound closes the argument only for the margin 1/10
    let margin_ok = *shift >= rat(1, 10);
    let valid = ldlt.valid && grad_ok && data.holds() && upsilon.drift_ok && margin_ok;
    Ok(Certificate {
        format: CERTIFICATE_VERSION.to_string(),
        exponent: e.value(),
        side_log2: SIDE_LOG2,
        shift: shift.to_string(),
        gradient: d.gradient.iter().map(hex).collect(),
        gradient_vanishes: grad_ok,
        hessian: (0..DIM).map(|i| (0..DIM).map(|j| hex(&d.hessian.get(i, j))).collect()).collect(),
        pivots: ldlt.pivots.iter().map(hex).collect(),
        pivots_positive: ldlt.valid,
        center_audit: data.center_audit.clone(),
        sixth_partials: data.sixth.clone(),
        bootstrap: data.bootstrap.clone(),
        bootstrap_holds: data.bootstrap_holds,
        ranges: data.ranges.clone(),
        ranges_hold: data.ranges_hold,
        upsilon_coefficients: data.coefficients.iter().map(BigInt::to_string).collect(),
        upsilon_coefficients_exact: data.exact_coefficients.iter().map(|q| q.to_string()).collect(),
        printed_coefficients: PRINTED_UPSILON.to_vec(),
        coefficients_dominated: data.dominated_by_printed(),
        upsilon,
        valid,
    })
}

/// The certificate with margin `1/10`, computing everything from scratch.
pub fn certify_local_minimum(e: Exponent) -> Result<Certificate, HessianError> {
    let tabs = Tables::new(6);
    let data = VariationData::compute_with(&tabs);
    certify_with(e, &rat(1, 10), &tabs, &data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;

    #[test]
    fn both_exponents_certify_and_a_large_shift_fails() {
        let tabs = Tables::new(6);
        let data = VariationData::compute_with(&tabs);
        for e in [Exponent::One, Exponent::Two] {
            let c = certify_with(e, &rat(1, 10), &tabs, &data).unwrap();
            assert!(c.valid, "{}", c.to_json());
            assert_eq!(c.pivots.len(), 7);
            let bad = certify_with(e, &rat_int(10), &tabs, &data).unwrap();
            assert!(!bad.valid && !bad.pivots_positive);
        }
    }
}
