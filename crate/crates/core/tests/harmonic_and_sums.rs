use std::f64::consts::PI;

use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use piatetski::arith::{rho, RealExponent};
use piatetski::dd::Dd;
use piatetski::expsum::{eval_exp_sum, eval_u, h_sum, vdc_audit_2, weyl_shift_check, wz_vz_audit, PhaseSpec, WContext, Weight};
use piatetski::harmonic::{cup_value, CupSystem, VaalerSystem};
use piatetski::sieve::primes_between;
use piatetski::sum::with_shards;
use piatetski::vaughan::prime_vs_lambda_gap;
use piatetski::{Cups32, Vaaler32};

#[test]
fn cup_fourier_reconstruction() {
    let cups = CupSystem::<f64>::new(8, 6, 4000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let t: f64 = rng.gen();
        let err = (cups.g(t) - cups.g_fourier(t)).abs();
        assert!(err <= cups.tail_bound() + 1e-12, "t = {t}: {err}");
    }
}

#[test]
fn cup_is_even_and_bounded() {
    let cups = CupSystem::<f64>::new(16, 11, 1000).unwrap();
    for i in 0..1000 {
        let t = i as f64 / 1000.0;
        let g = cups.g(t);
        assert!((0.0..=1.0).contains(&g));
        assert!((g - cups.g(-t)).abs() < 1e-15);
        assert!((cups.beta(i) - cups.beta(-i)).abs() == 0.0);
        if t.min(1.0 - t) >= 1.0 / 32.0 {
            assert_eq!(g, 0.0, "support leak at {t}");
        }
    }
    assert!((cup_value(16, 11, 0.0f64) - 1.0).abs() < 1e-15);
}

#[test]
fn beta_zero_is_cup_mass() {
    // ∫ g = 1/(2Z) since the cups partition unity
    for z in [4u32, 8, 32] {
        let cups = CupSystem::<f64>::new(z, 6, 0).unwrap();
        assert!((cups.beta(0) - 1.0 / (2.0 * z as f64)).abs() < 1e-15);
    }
}

#[test]
fn single_precision_kernels() {
    let v = Vaaler32::new(10).unwrap();
    let c = Cups32::new(8, 6, 0).unwrap();
    for i in 0..100 {
        let t = i as f32 / 100.0;
        assert!((rho(t) - v.rho_approx(t)).abs() <= v.rho_majorant(t) + 1e-5);
    }
    assert!(c.partition_check(&[0.1f32, 0.3, 0.77]) < 1e-5);
}

#[test]
fn vaaler_fast_majorant_matches_direct() {
    let v = VaalerSystem::<f64>::new(50).unwrap();
    for i in 0..5000 {
        let t = i as f64 / 5000.0 + 1e-7;
        let (a, b) = (v.rho_majorant(t), v.rho_majorant_fast(t));
        assert!((a - b).abs() < 1e-11, "t = {t}: {a} vs {b}");
    }
    assert!((v.majorant_total() - 0.5 / 51.0 * 101.0).abs() < 1.0);
}

#[test]
fn vaaler_coefficients_decay() {
    for h in [10usize, 100, 1000] {
        let v = VaalerSystem::<f64>::new(h).unwrap();
        for k in 1..=h as i64 {
            assert!(v.c(k).norm() * k as f64 <= 1.0 / (2.0 * PI) + 1e-15);
            assert!(v.d(k) <= 1.0 / (2.0 * h as f64 + 2.0) + 1e-15);
        }
    }
}

fn oracle_h(p: u64, n: u64, c: f64) -> Complex<f64> {
    const PREC: usize = 192;
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().unwrap();
    let cb = BigFloat::from_f64(c, PREC);
    let nb = BigFloat::from_u64(n, PREC);
    let mut acc = Complex::new(0.0, 0.0);
    for k in p + 1..=2 * p {
        let x = nb.mul(&BigFloat::from_u64(k, PREC).pow(&cb, PREC, rm, &mut cc), PREC, rm);
        // reduce mod 1 by subtracting the largest integer below
        let mut lo = 0u64;
        let mut hi = 1u64 << 40;
        while lo < hi {
            let mid = lo + (hi - lo + 1) / 2;
            if BigFloat::from_u64(mid, PREC).cmp(&x).unwrap() <= 0 {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let frac = x.sub(&BigFloat::from_u64(lo, PREC), PREC, rm);
        let f: f64 = frac.to_string().parse().unwrap();
        acc += Complex::from_polar(1.0, 2.0 * PI * f);
    }
    acc
}

#[test]
fn h_sum_matches_high_precision() {
    for (p, n) in [(500u64, 1u64), (500, 37), (2000, 5)] {
        let ours = h_sum(p, n as f64, 1.01).unwrap();
        let oracle = oracle_h(p, n, 1.01);
        assert!((ours - oracle).norm() < 1e-9 * p as f64, "P = {p}, n = {n}");
    }
}

#[test]
fn u_matches_direct_prime_sum() {
    let exp = RealExponent::new(1.01).unwrap();
    let (p, t) = (3000u64, 1e5);
    let ours = eval_u(t, 2, 1, 3, p, &exp).unwrap();
    let g = exp.gamma_f64();
    let mut direct = Complex::new(0.0, 0.0);
    for q in primes_between(p, 2 * p).unwrap().primes {
        let x = (q as f64).powf(1.01);
        // long double is unavailable: split the large phase into integer and fraction
        let phase = (2.0 * x).fract() + ((t - x).powf(g) / 3.0).fract();
        direct += Complex::from_polar((q as f64).ln(), 2.0 * PI * phase);
    }
    // f64 phases lose ~1e-10 per term at this size
    assert!((ours - direct).norm() < 1e-6 * 3000.0, "{ours} vs {direct}");
}

#[test]
fn phase_derivatives_match_finite_differences() {
    let exp = RealExponent::new(1.01).unwrap();
    let phases = [PhaseSpec::power(0.7, 1.01).unwrap(), PhaseSpec::combined(3, 2, 7, 2e5, &exp).unwrap()];
    for ph in &phases {
        for t in [1500.0, 4000.0, 9000.0] {
            let [d1, d2, d3] = ph.derivatives(t).unwrap();
            let f = |x: f64| ph.value_f64(x);
            let h = 1e-2;
            let fd1 = (f(t + h) - f(t - h)) / (2.0 * h);
            let fd1b = |x: f64| ph.derivatives(x).unwrap()[0];
            let fd2 = (fd1b(t + h) - fd1b(t - h)) / (2.0 * h);
            let fd2b = |x: f64| ph.derivatives(x).unwrap()[1];
            let fd3 = (fd2b(t + h) - fd2b(t - h)) / (2.0 * h);
            assert!((d1 - fd1).abs() <= 1e-6 * d1.abs().max(1e-3), "{d1} vs {fd1}");
            assert!((d2 - fd2).abs() <= 1e-5 * d2.abs().max(1e-12), "{d2} vs {fd2}");
            assert!((d3 - fd3).abs() <= 1e-4 * d3.abs().max(1e-15), "{d3} vs {fd3}");
        }
    }
}

#[test]
fn weyl_shift_inequality_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for len in [10usize, 100, 700] {
        for q in [1usize, 4, 16] {
            let xi: Vec<Complex<f64>> =
                (0..len).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let (lhs, rhs) = weyl_shift_check(&xi, q).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12, "L = {len}, Q = {q}: {lhs} > {rhs}");
        }
    }
}

#[test]
fn vdc_bound_doubling() {
    let ns: Vec<u64> = (1..=50).collect();
    let a = vdc_audit_2(20_000, 1.01, &ns).unwrap().constant;
    let b = vdc_audit_2(40_000, 1.01, &ns).unwrap().constant;
    assert!(b / a < 4.0 && a / b < 4.0, "{a} vs {b}");
}

#[test]
fn w_is_reproducible_across_shards() {
    let exp = RealExponent::new(1.01).unwrap();
    let ctx = WContext::new(100_000, 1, &exp, 20_000).unwrap();
    let cups = CupSystem::<f64>::new(16, 11, 2000).unwrap();
    let v = Dd::ratio(2, 7);
    let run = |k| with_shards(k, || (ctx.eval_w(v), ctx.eval_wz(v, 3, &cups).unwrap()));
    let base = run(1);
    for k in [3, 8] {
        let other = run(k);
        assert_eq!(base.0.re.to_bits(), other.0.re.to_bits());
        assert_eq!(base.0.im.to_bits(), other.0.im.to_bits());
        assert_eq!(base.1.re.to_bits(), other.1.re.to_bits());
        assert_eq!(base.1.im.to_bits(), other.1.im.to_bits());
    }
}

#[test]
fn shifted_sum_constant_is_moderate() {
    let exp = RealExponent::new(1.01).unwrap();
    let ctx = WContext::new(100_000, 0, &exp, 20_000).unwrap();
    let cups = CupSystem::<f64>::for_modulus(16, 100_000).unwrap();
    let rows = wz_vz_audit(&ctx, 1.0 / 3.0, &cups).unwrap();
    let worst = rows.iter().map(|r| r.fitted).fold(0.0, f64::max);
    assert!(worst <= 10.0, "{worst}");
}

#[test]
fn prime_power_gap_below_bound() {
    let exp = RealExponent::new(1.01).unwrap();
    for p in [1000u64, 10_000, 100_000] {
        for ph in [PhaseSpec::Zero, PhaseSpec::combined(1, 1, 3, 3.0 * p as f64, &exp).unwrap()] {
            let g = prime_vs_lambda_gap(p, &ph).unwrap();
            assert!(g.gap <= g.bound, "P = {p}");
        }
    }
}

#[test]
fn exp_sum_bounded_by_weight() {
    let ph = PhaseSpec::power(0.5, 1.05).unwrap();
    for w in [Weight::Unit, Weight::LogpPrimes, Weight::VonMangoldt] {
        let r = eval_exp_sum(1000, 5000, &ph, w).unwrap();
        assert!(r.value.norm() <= r.weight_total + 1e-9);
    }
    let z = eval_exp_sum(1000, 5000, &PhaseSpec::Zero, Weight::Unit).unwrap();
    assert_eq!(z.value, Complex::new(4000.0, 0.0));
}
