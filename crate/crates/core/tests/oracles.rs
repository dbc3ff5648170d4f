//! End-to-end oracle tests through the public API.

use std::f64::consts::PI;

use num_complex::Complex64;
use pairgf::coulomb_gf::{gc_closed, gc_pw_sum, GfConfig, GfKind, Parity};
use pairgf::ldos::{rho_point, LdosConfig};
use pairgf::pair_gf::{classify_args, pair_gf, pair_gf_channel, PairArgs, PairConfig, SpinChannel};
use pairgf::special::{rgamma, whittaker_pair, WhittakerIndex};
use pairgf::Vec3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn random_vec(rng: &mut ChaCha8Rng, scale: f64) -> Vec3 {
    Vec3::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

fn random_regular(rng: &mut ChaCha8Rng) -> PairArgs {
    loop {
        let p = PairArgs::new(
            random_vec(rng, 2.0),
            random_vec(rng, 2.0),
            random_vec(rng, 2.0),
            random_vec(rng, 2.0),
        );
        if classify_args(&p).is_regular() {
            return p;
        }
    }
}

#[test]
fn wronskian_is_constant_over_the_sweep() {
    let mut worst = 0.0f64;
    for k in log_grid(0.1, 10.0, 20) {
        for r in log_grid(0.05, 20.0, 20) {
            let idx = WhittakerIndex::coulomb(Complex64::new(0.0, -1.0 / k), 0);
            let e = whittaker_pair(&idx, Complex64::new(0.0, -2.0 * k * r)).unwrap();
            let residual = (e.w * e.m_prime - e.m * e.w_prime - rgamma(idx.a())).norm();
            assert!((residual - e.wronskian_residual).abs() <= 1e-12 * residual.max(1.0));
            worst = worst.max(residual);
        }
    }
    assert!(worst < 1e-8, "max residual {worst:e}");
}

#[test]
fn closed_form_reduces_to_free_propagator() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (a, b) = (random_vec(&mut rng, 3.0), random_vec(&mut rng, 3.0));
        let energy: f64 = rng.gen_range(0.05..9.0);
        let d = (a - b).norm();
        let k = energy.sqrt();
        let expected = -Complex64::new(0.0, k * d).exp() / (4.0 * PI * d);
        let g = gc_closed(&a, &b, energy, &GfConfig::free()).unwrap();
        assert!(rel(g.value, expected) < 1e-8, "E = {energy}, d = {d}");
    }
}

#[test]
fn partial_waves_reproduce_closed_form() {
    let samples: [(f64, f64, f64, f64); 10] = [
        (1.0, 2.2, 1.0, 1.0),
        (0.5, 1.0, 0.3, 4.0),
        (2.0, 0.8, -0.5, 1.0),
        (1.5, 3.0, 0.0, 4.0),
        (0.5, 1.5, 0.8, 1.0),
        (3.0, 1.2, -0.9, 1.0),
        (0.7, 2.0, 0.6, 4.0),
        (1.0, 2.5, -0.2, 4.0),
        (4.0, 1.5, 0.45, 1.0),
        (5.0, 2.0, -1.0, 4.0),
    ];
    let cfg = GfConfig::default();
    for (r1, r2, cos, energy) in samples {
        let sin = (1.0 - cos * cos).max(0.0).sqrt();
        let closed = gc_closed(
            &Vec3::new(0.0, 0.0, r1),
            &Vec3::new(r2 * sin, 0.0, r2 * cos),
            energy,
            &cfg,
        )
        .unwrap()
        .value;
        let all = gc_pw_sum(r1, r2, cos, energy, 40, Parity::All, &cfg).unwrap();
        let even = gc_pw_sum(r1, r2, cos, energy, 40, Parity::EvenL, &cfg).unwrap();
        let odd = gc_pw_sum(r1, r2, cos, energy, 40, Parity::OddL, &cfg).unwrap();
        assert!(rel(all, closed) < 1e-6, "({r1}, {r2}, {cos}, {energy})");
        assert!(rel(even + odd, all) < 1e-14);
    }
}

#[test]
fn no_poles_below_threshold() {
    let (a, b) = (Vec3::new(0.4, -0.2, 0.9), Vec3::new(-1.0, 0.3, 0.1));
    for energy in log_grid(1e-3, 20.0, 200).into_iter().map(|e| -e) {
        let g = gc_closed(&a, &b, energy, &GfConfig::strict()).unwrap();
        assert_eq!(g.kind, GfKind::NegativeEnergyReal);
        assert!(g.value.re.is_finite() && g.value.re < 0.0, "E = {energy}");
        assert!(g.value.im.abs() <= 1e-12 * g.value.re.abs());
    }
}

#[test]
fn pair_function_is_real_below_the_band() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cfg = PairConfig::default();
    for _ in 0..10 {
        let p = random_regular(&mut rng);
        let g = pair_gf(&p, -1.0, &cfg).unwrap();
        assert!(g.re.is_finite() && g.re != 0.0);
        assert!(g.im.abs() <= cfg.quad.abs_tol.max(cfg.quad.rel_tol * g.norm()));
    }
}

#[test]
fn channels_sum_to_the_full_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let cfg = PairConfig::default();
    for energy in [0.8, -0.4] {
        let p = random_regular(&mut rng);
        let even = pair_gf_channel(&p, energy, SpinChannel::Singlet, &cfg).unwrap();
        let odd = pair_gf_channel(&p, energy, SpinChannel::Triplet, &cfg).unwrap();
        let full = pair_gf(&p, energy, &cfg).unwrap();
        let exchanged = pair_gf(&p.exchanged(), energy, &cfg).unwrap();
        assert!((even + odd - full).norm() <= 1e-14 * full.norm());
        assert!((even - odd - exchanged).norm() <= 1e-14 * full.norm().max(exchanged.norm()));
    }
}

#[test]
fn ldos_channel_identities() {
    let cfg = LdosConfig::default();
    for r in [0.05, 0.7, 3.0] {
        let p = rho_point(r, 2.0, &cfg).unwrap();
        assert!(((p.rho_even + p.rho_odd) - p.rho_plus).abs() <= 1e-15 * p.rho_plus);
        assert!((p.rho_total - (p.rho_even + 3.0 * p.rho_odd)).abs() <= 1e-14 * p.rho_total);
        assert!(p.rho_even > 0.0 && p.rho_odd >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wronskian_holds_for_random_arguments(k in 0.1f64..10.0, r in 0.05f64..20.0, l in 0u32..4) {
        let idx = WhittakerIndex::coulomb(Complex64::new(0.0, -1.0 / k), l);
        let e = whittaker_pair(&idx, Complex64::new(0.0, -2.0 * k * r)).unwrap();
        let target = rgamma(idx.a());
        let residual = (e.w * e.m_prime - e.m * e.w_prime - target).norm();
        prop_assert!(residual <= 1e-8 * target.norm().max(1.0), "residual {:e}", residual);
    }

    #[test]
    fn closed_form_is_symmetric(x1 in -3.0f64..3.0, y1 in -3.0f64..3.0, x2 in -3.0f64..3.0, z2 in -3.0f64..3.0, energy in 0.1f64..6.0) {
        let (a, b) = (Vec3::new(x1, y1, 0.3), Vec3::new(x2, 0.2, z2));
        prop_assume!((a - b).norm() > 1e-3);
        let ab = gc_closed(&a, &b, energy, &GfConfig::default()).unwrap().value;
        let ba = gc_closed(&b, &a, energy, &GfConfig::default()).unwrap().value;
        prop_assert!((ab - ba).norm() <= 1e-10 * ab.norm());
    }
}
