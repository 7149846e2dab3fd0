#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tbp_core::geometry::{tbp_reference, Configuration, Exponent, TbpKind};
use tbp_hessian::jet::energy_jet;
use tbp_hessian::poly::{g_function, multi_indices, PartialTable};
use tbp_hessian::reference::{gradient_fd, hessian_fd};

const STEP: f64 = 1.0 / (1u64 << 20) as f64;

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn interior_points(seed: u64, n: usize) -> Vec<[f64; 7]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = tbp_reference::<f64>(TbpKind::Polar).coords;
    (0..n)
        .map(|_| base.map(|c| c + rng.gen_range(-0.2..0.2)))
        .collect()
}

#[test]
fn analytic_partials_match_central_differences() {
    let mut worst = 0.0f64;
    for e in [Exponent::One, Exponent::Two] {
        for x in interior_points(9, 10) {
            let j = energy_jet::<f64>(&Configuration::new(x), e).unwrap();
            let g = gradient_fd(&x, e, STEP);
            let h = hessian_fd(&x, e, STEP);
            for i in 0..7 {
                worst = worst.max(relative(g[i], j.g[i]));
                for k in 0..7 {
                    worst = worst.max(relative(h[i][k], j.h[i][k]));
                }
            }
        }
    }
    assert!(worst <= 1e-6, "worst relative error {worst:e}");
}

fn rational_point(rng: &mut ChaCha8Rng) -> [BigRational; 4] {
    std::array::from_fn(|_| BigRational::new(BigInt::from(rng.gen_range(-1000..1000)), BigInt::from(997)))
}

#[test]
fn symbolic_partials_match_differences_of_lower_ones() {
    let t = PartialTable::new(g_function(), 3);
    let h = BigRational::new(BigInt::from(1), BigInt::from(1u64 << 20));
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 10 {
        let p = rational_point(&mut rng);
        let dx = &p[0] - &p[2];
        let dy = &p[1] - &p[3];
        if (&dx * &dx + &dy * &dy).to_f64().unwrap() < 0.04 {
            continue;
        }
        checked += 1;
        for k in 1..=3u8 {
            for m in multi_indices(4, k) {
                let v = (0..4).find(|&v| m[v] > 0).unwrap();
                let mut lower = m;
                lower[v] -= 1;
                let f = t.get(&lower);
                let mut plus = p.clone();
                plus[v] += &h;
                let mut minus = p.clone();
                minus[v] -= &h;
                let fd = (f.eval_rational(&plus, t.q()) - f.eval_rational(&minus, t.q())) / (&h * BigInt::from(2));
                let exact = t.get(&m).eval_rational(&p, t.q());
                let err = (&fd - &exact).abs();
                let scale = exact.abs().to_f64().unwrap().max(1e-300);
                assert!(err.to_f64().unwrap() / scale <= 1e-6, "order {k} {m:?} at {p:?}");
            }
        }
    }
}
