mod common;

use common::*;
use num_rational::BigRational;
use num_traits::Signed;
use rand::Rng;
use tbp_core::Interval;

fn random_double(r: &mut impl Rng) -> f64 {
    let m: f64 = r.gen_range(1.0..2.0);
    let e: i32 = r.gen_range(-30..12);
    let s = if r.gen_bool(0.5) { -1.0 } else { 1.0 };
    match r.gen_range(0..20) {
        0 => 0.0,
        1 => s * (r.gen_range(-64..64) as f64) / 8.0,
        _ => s * m * 2f64.powi(e),
    }
}

fn random_interval(r: &mut impl Rng) -> Interval {
    let a = random_double(r);
    let b = if r.gen_bool(0.2) { a } else { random_double(r) };
    Interval::new(a.min(b), a.max(b))
}

fn members(r: &mut impl Rng, x: Interval) -> Vec<f64> {
    let mut v = vec![x.lo(), x.hi()];
    v.push(r.gen_range(x.lo()..=x.hi()));
    v
}

fn inside(x: Interval, v: &BigRational) -> bool {
    rat(x.lo()) <= *v && *v <= rat(x.hi())
}

#[test]
fn operations_contain_exact_results() {
    let mut r = rng(0x1a7e);
    let mut checked = 0u64;
    for case in 0..20_000 {
        let x = random_interval(&mut r);
        let y = random_interval(&mut r);
        let op = case % 6;
        let z = match op {
            0 => Some(x + y),
            1 => Some(x - y),
            2 => Some(x * y),
            3 => x.checked_div(y).ok(),
            4 => Some(x.square()),
            _ => x.abs().sqrt().ok(),
        };
        let Some(z) = z else { continue };
        for a in members(&mut r, x) {
            for b in members(&mut r, y) {
                let (ra, rb) = (rat(a), rat(b));
                let ok = match op {
                    0 => inside(z, &(&ra + &rb)),
                    1 => inside(z, &(&ra - &rb)),
                    2 => inside(z, &(&ra * &rb)),
                    3 => inside(z, &(&ra / &rb)),
                    4 => inside(z, &(&ra * &ra)),
                    _ => {
                        let v = ra.abs();
                        let below = z.lo() <= 0.0 || rat(z.lo()) * rat(z.lo()) <= v;
                        below && z.hi() >= 0.0 && v <= rat(z.hi()) * rat(z.hi())
                    }
                };
                assert!(ok, "op {op}: {x:?} {y:?} -> {z:?} at ({a:e}, {b:e})");
                checked += 1;
            }
        }
    }
    assert!(checked > 100_000);
}

#[test]
fn ratios_contain_exact_quotients() {
    let mut r = rng(7);
    for _ in 0..10_000 {
        let n: i64 = r.gen_range(-1_000_000..1_000_000);
        let d: i64 = r.gen_range(1..1_000_000);
        let z = Interval::from_ratio(n, d);
        assert!(inside(z, &(int(n) / int(d))));
        assert!(z.width_ulps() <= 2);
    }
}
