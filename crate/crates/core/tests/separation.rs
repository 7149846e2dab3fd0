mod common;

use common::*;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use std::cmp::Ordering::{Greater, Less};
use tbp_core::bounds::separation;
use tbp_core::Interval;

fn hull_point(r: &mut impl Rng, pts: &[[BigRational; 3]]) -> [BigRational; 3] {
    let w: Vec<i64> = pts.iter().map(|_| r.gen_range(0..16)).collect();
    let total: i64 = w.iter().sum::<i64>().max(1);
    let mut out = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
    for (p, &wi) in pts.iter().zip(&w) {
        for k in 0..3 {
            out[k] += &p[k] * int(wi) / int(total);
        }
    }
    if w.iter().all(|&x| x == 0) {
        return pts[0].clone();
    }
    out
}

#[test]
fn sampled_distances_respect_the_bounds() {
    let mut r = rng(0x5e9);
    let mut violations = 0;
    let mut pairs = 0;
    while pairs < 200 {
        let depth = r.gen_range(1..=12);
        let b = if r.gen_bool(0.5) {
            random_box(&mut r, depth)
        } else {
            box_near_target(&mut r, depth, 0.3)
        };
        let i = r.gen_range(0..5);
        let j = (i + r.gen_range(1..5)) % 5;
        let (p, q) = (b.patch(i), b.patch(j));
        let Ok(s) = separation::<Interval>(&p, &q, &p.quantities(), &q.quantities()) else {
            continue;
        };
        pairs += 1;
        let lo2 = rat(s.psi_min) * rat(s.psi_min);
        let mut hull_p = Vec::new();
        let mut hull_q = Vec::new();
        for _ in 0..1000 {
            let a = sample_scaled(&mut r, &p);
            let c = sample_scaled(&mut r, &q);
            let (n, d) = chord_sq_scaled(a, c);
            if cmp_sq(s.psi_min, &n, &d) == Greater || cmp_sq(s.psi_max, &n, &d) == Less {
                violations += 1;
            }
            if hull_p.len() < 4 {
                hull_p.push(sphere_of(scaled_to_f64(a)));
                hull_q.push(sphere_of(scaled_to_f64(c)));
            }
        }
        for _ in 0..30 {
            let d2 = dist_sq(&hull_point(&mut r, &hull_p), &hull_point(&mut r, &hull_q));
            if d2 < lo2 {
                violations += 1;
            }
        }
    }
    assert_eq!(violations, 0);
}
