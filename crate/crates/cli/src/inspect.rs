//! Text reports for `constants` and `inspect-box`. Every number is a
//! hexadecimal float; intervals print as `[lo, hi]`.

use std::fmt::Write;

use tbp_core::dyadic::{unscale, DyadicBox, DyadicSegment, DyadicSquare, Patch};
use tbp_core::eliminators::{is_confined, redundancy_eliminate, tetra_eliminate, tetra_threshold, Eps};
use tbp_core::estimator::{lambdas, subdivision_index, BoxAnalysis, LowerBound, R_FLOOR};
use tbp_core::geometry::{tbp_energy, tetra_energy, Exponent};
use tbp_core::search::audit::{near_target, TARGET_SIDE_LOG2};
use tbp_core::search::{examine, Mode, SearchConfig, Thresholds};
use tbp_core::{hexfloat, Fault, Interval, Real};

fn hex(x: f64) -> String {
    hexfloat::format(x)
}

fn iv(x: Interval) -> String {
    format!("[{}, {}]", hex(x.lo()), hex(x.hi()))
}

/// Separations at which the Λ table is printed: `R = k/8`, `k = 3..=16`.
pub fn table_separations() -> impl Iterator<Item = Interval> {
    (3..=16).map(|k| Interval::from_ratio(k, 8))
}

pub fn constants(e: Exponent) -> String {
    let mut s = String::new();
    let m: Interval = tbp_energy(e);
    let t: Interval = tetra_energy(e);
    let d: Interval = tetra_threshold(e);
    writeln!(s, "e={}", e.value()).unwrap();
    writeln!(s, "M_e={}", iv(m)).unwrap();
    writeln!(s, "T_e={}", iv(t)).unwrap();
    writeln!(s, "M_e-T_e={}", iv(d)).unwrap();
    writeln!(s, "r_floor={}", hex(R_FLOOR)).unwrap();
    writeln!(s, "# R lambda1_segment lambda2_segment lambda1_square lambda2_square(xbar=ybar=0)").unwrap();
    let seg = Patch::Segment(DyadicSegment::root());
    let sq = Patch::Square(DyadicSquare::root());
    for r in table_separations() {
        let (a1, a2) = lambdas(&seg, 0.0, 0.0, r, e).expect("separation away from zero");
        let (b1, b2) = lambdas(&sq, 0.0, 0.0, r, e).expect("separation away from zero");
        writeln!(s, "{} {} {} {} {}", hex(r.lo()), iv(a1), iv(a2), iv(b1), iv(b2)).unwrap();
    }
    s
}

fn describe_patch(p: &Patch) -> String {
    match p.scaled_bounds() {
        None => "infinity".to_string(),
        Some((a, b, c, d)) => format!(
            "x={} y={}",
            iv(Interval::new(unscale(a), unscale(b))),
            iv(Interval::new(unscale(c), unscale(d)))
        ),
    }
}

fn lower_bound(lb: LowerBound) -> String {
    match lb {
        LowerBound::Finite(v) => hex(v),
        LowerBound::NegInfinity => "-inf".to_string(),
    }
}

/// Every certified quantity the search computes for `b`, then the verdict
/// of an interval-mode examination.
pub fn inspect_box(b: &DyadicBox, e: Exponent, eps: Eps) -> Result<String, Fault> {
    let mut s = String::new();
    let th = Thresholds::new(e);
    writeln!(s, "box={b}").unwrap();
    let depths = b.depths();
    writeln!(s, "depths={},{},{},{}", depths[0], depths[1], depths[2], depths[3]).unwrap();
    writeln!(s, "e={} eps=2^-{}", e.value(), eps.log2_inv).unwrap();

    let a = BoxAnalysis::<Interval>::new(b)?;
    for (i, (p, q)) in a.patches.iter().zip(a.quantities.iter()).enumerate() {
        write!(s, "factor{i} {}", describe_patch(p)).unwrap();
        if p.is_finite() {
            write!(s, " delta={} tau={} normal={}", iv(q.delta), iv(q.tau), p.is_normal()).unwrap();
        }
        s.push('\n');
    }

    writeln!(s, "confined={}", is_confined::<Interval>(b, eps, 0.0)).unwrap();
    writeln!(s, "near_target(2^-{TARGET_SIDE_LOG2})={}", near_target(b, TARGET_SIDE_LOG2)).unwrap();

    for i in 0..5 {
        for j in (i + 1)..5 {
            let p = a.pairs.get(i, j);
            writeln!(s, "sep{i}{j} psi_min={} psi_max={}", hex(p.psi_min), hex(p.psi_max)).unwrap();
        }
    }

    writeln!(s, "tetra_threshold={}", iv(th.tetra)).unwrap();
    writeln!(s, "tetra={}", tetra_eliminate(&a, e)).unwrap();
    match redundancy_eliminate(b, &a, 0.0) {
        Some(p) => writeln!(s, "redundant=property{p}").unwrap(),
        None => writeln!(s, "redundant=none").unwrap(),
    }

    let budget = a.error_budget(e)?;
    for i in 0..4 {
        let err = budget.err[i].map_or_else(|| "inf".to_string(), hex);
        writeln!(s, "err{i}={err} delta_hi={}", hex(budget.delta[i])).unwrap();
    }
    writeln!(s, "err_total={}", budget.total.map_or_else(|| "inf".to_string(), hex)).unwrap();
    // vertex configurations of coarse boxes may contain coincident points;
    // the search only evaluates them when every error term is finite
    if budget.is_finite() {
        writeln!(s, "vertex_energy_min={}", iv(a.vertex_energy_min(e)?)).unwrap();
    } else {
        writeln!(s, "vertex_energy_min=skipped").unwrap();
    }
    writeln!(s, "energy_lower_bound={}", lower_bound(a.lower_bound_with(&budget, e)?)).unwrap();
    writeln!(s, "energy_threshold={}", hex(th.energy.hi())).unwrap();
    writeln!(s, "split_index={}", subdivision_index(&budget)).unwrap();

    let ex = examine(b, &SearchConfig::new(e, eps, Mode::Interval), &th)?;
    write!(s, "verdict={}", ex.verdict.tag()).unwrap();
    for (k, v) in &ex.evidence {
        write!(s, " {k}={v}").unwrap();
    }
    s.push('\n');
    Ok(s)
}
