use num_bigint::BigInt;
use tbp_core::geometry::Exponent;
use tbp_core::hexfloat;
use tbp_hessian::exact::rat;
use tbp_hessian::regions::Tables;
use tbp_hessian::variation::{VariationData, PRINTED_UPSILON};
use tbp_hessian::certify_with;

#[test]
fn certificates_for_both_exponents() {
    let tabs = Tables::new(6);
    let data = VariationData::compute_with(&tabs);

    assert!(data.center_audit.holds);
    assert_eq!(data.sixth.count, 84);
    assert_eq!(data.sixth.max_degree, 10);
    assert_eq!(data.sixth.denominator_power, 7);
    assert!(data.sixth.phi6_bound < 5_000_000.0);
    assert!(data.bootstrap_holds);
    assert!(data.ranges_hold);
    for (c, p) in data.coefficients.iter().zip(PRINTED_UPSILON) {
        assert!(*c <= BigInt::from(p));
    }

    for (e, limit) in [(Exponent::One, 345.0), (Exponent::Two, 140.0)] {
        let cert = certify_with(e, &rat(1, 10), &tabs, &data).unwrap();
        assert!(cert.valid);
        assert!(cert.upsilon.below_threshold && cert.upsilon.approx < limit);
        for [lo, _] in &cert.pivots {
            assert!(hexfloat::parse(lo).unwrap() > 0.0);
        }
        let json: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
        assert_eq!(json["exponent"], e.value());
        assert_eq!(json["pivots"].as_array().unwrap().len(), 7);
        assert_eq!(json["hessian"].as_array().unwrap().len(), 7);
        assert_eq!(json["valid"], true);
    }
}
