//! Vaughan's identity with `u = v = P^{1/3}` applied to Σ_{P<n<=2P} Λ(n) e(φ(n)).
//!
//! For every `n > u`,
//! `Λ(n) = Σ_{ml=n, m<=u} μ(m) log l - Σ_{ml=n, m<=u²} c(m) - Σ_{ml=n, m,l>u} a(m)Λ(l)`,
//! which splits the sum into U₁ - U₂ - U₃ - U₄ exactly.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::PhaseSpec;
use crate::sieve::{primes_between, von_mangoldt_between, FactorTable};
use crate::sum::{blocked_sum, complex_blocked_sum, ComplexSum, Neumaier};

/// Largest P accepted by [`build_coeffs`].
pub const MAX_P: u64 = 10_000_000;

fn icbrt(n: u64) -> u64 {
    let mut r = (n as f64).cbrt() as u64;
    while r.pow(3) > n {
        r -= 1;
    }
    while (r + 1).pow(3) <= n {
        r += 1;
    }
    r
}

#[derive(Debug, Clone)]
pub struct VaughanCoeffs {
    pub p: u64,
    /// u = [P^{1/3}]
    pub u: u64,
    /// [P^{2/3}]
    pub u2: u64,
    /// c(m), index m, for m <= [P^{2/3}]
    pub c: Vec<f64>,
    /// a(m), index m, for m <= 2P/u
    pub a: Vec<i64>,
    /// μ(m) for m <= u
    pub mu: Vec<i8>,
}

pub fn build_coeffs(p: u64) -> Result<VaughanCoeffs> {
    if p > MAX_P {
        return Err(Error::TableTooLarge { size: p, limit: MAX_P });
    }
    if p < 1 {
        return Err(Error::InvalidArgument("P >= 1 required".into()));
    }
    let u = icbrt(p).max(1);
    let u2 = icbrt(p * p);
    let table = FactorTable::new(u.max(2))?;
    let mu: Vec<i8> = (0..=u).map(|m| if m == 0 { 0 } else { table.moebius(m).unwrap() }).collect();
    let lam: Vec<f64> = (0..=u).map(|m| if m == 0 { 0.0 } else { table.von_mangoldt(m).unwrap() }).collect();
    let mut c = vec![0.0; u2 as usize + 1];
    for d in 1..=u {
        if mu[d as usize] == 0 {
            continue;
        }
        for e in 2..=u {
            let m = d * e;
            if m > u2 {
                break;
            }
            c[m as usize] += mu[d as usize] as f64 * lam[e as usize];
        }
    }
    let amax = 2 * p / u;
    let mut a = vec![0i64; amax as usize + 1];
    for d in 1..=u {
        let s = mu[d as usize] as i64;
        if s == 0 {
            continue;
        }
        let mut m = d;
        while m <= amax {
            a[m as usize] += s;
            m += d;
        }
    }
    Ok(VaughanCoeffs { p, u, u2, c, a, mu })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VaughanSplit {
    pub u1: Complex<f64>,
    pub u2: Complex<f64>,
    pub u3: Complex<f64>,
    pub u4: Complex<f64>,
    /// Σ_{P<n<=2P} Λ(n) e(φ(n)) evaluated directly.
    pub direct: Complex<f64>,
    /// Σ_{P<n<=2P} Λ(n)
    pub lambda_mass: f64,
    /// |direct - (U₁ - U₂ - U₃ - U₄)|
    pub residual: f64,
}

impl VaughanSplit {
    pub fn combined(&self) -> Complex<f64> {
        self.u1 - self.u2 - self.u3 - self.u4
    }

    pub fn relative_residual(&self) -> f64 {
        self.residual / self.lambda_mass
    }
}

/// e(φ(n)) for n in (P, 2P], index n - P - 1.
fn phase_table(p: u64, phase: &PhaseSpec) -> Result<Vec<Complex<f64>>> {
    phase.check_domain(2 * p)?;
    (p + 1..=2 * p).into_par_iter().map(|n| phase.e(n)).collect()
}

/// Σ_{l in (P/m, 2P/m]} w(l) e(φ(ml)).
fn inner(p: u64, m: u64, e: &[Complex<f64>], w: impl Fn(u64) -> f64, acc: &mut ComplexSum<f64>) {
    for l in p / m + 1..=2 * p / m {
        acc.add(e[(m * l - p - 1) as usize] * w(l));
    }
}

/// Sum over m in `ms`, merged in a fixed order.
fn outer(ms: &[u64], f: impl Fn(u64, &mut ComplexSum<f64>) + Sync) -> Complex<f64> {
    blocked_sum(ms.len(), ComplexSum::new, |acc, r| {
        for &m in &ms[r] {
            f(m, acc);
        }
    })
    .value()
}

pub fn vaughan_split(coeffs: &VaughanCoeffs, phase: &PhaseSpec) -> Result<VaughanSplit> {
    let p = coeffs.p;
    let u = coeffs.u;
    let e = phase_table(p, phase)?;
    let small: Vec<u64> = (1..=u).collect();
    let u1 = outer(&small, |m, acc| {
        let s = coeffs.mu[m as usize] as f64;
        if s != 0.0 {
            inner(p, m, &e, |l| s * (l as f64).ln(), acc);
        }
    });
    let u2 = outer(&small, |m, acc| {
        let s = coeffs.c[m as usize];
        if s != 0.0 {
            inner(p, m, &e, |_| s, acc);
        }
    });
    let mid: Vec<u64> = (u + 1..=coeffs.u2).collect();
    let u3 = outer(&mid, |m, acc| {
        let s = coeffs.c[m as usize];
        if s != 0.0 {
            inner(p, m, &e, |_| s, acc);
        }
    });
    // type II: m, l > u
    let lmax = 2 * p / (u + 1);
    let lam = von_mangoldt_between(0, lmax)?;
    let big: Vec<u64> = (u + 1..=2 * p / (u + 1)).collect();
    let u4 = outer(&big, |m, acc| {
        let s = coeffs.a[m as usize] as f64;
        if s == 0.0 {
            return;
        }
        for l in (p / m + 1).max(u + 1)..=2 * p / m {
            let w = lam[(l - 1) as usize];
            if w != 0.0 {
                acc.add(e[(m * l - p - 1) as usize] * (s * w));
            }
        }
    });
    let lam_range = von_mangoldt_between(p, 2 * p)?;
    let direct = complex_blocked_sum(e.len(), |i| e[i] * lam_range[i]);
    let lambda_mass = Neumaier::<f64>::sum_iter(lam_range.iter().copied());
    let residual = (direct - (u1 - u2 - u3 - u4)).norm();
    Ok(VaughanSplit { u1, u2, u3, u4, direct, lambda_mass, residual })
}

/// U₁ computed directly and by partial summation (removing the log l weight).
pub fn u1_abel_check(coeffs: &VaughanCoeffs, phase: &PhaseSpec) -> Result<(Complex<f64>, Complex<f64>)> {
    let p = coeffs.p;
    let e = phase_table(p, phase)?;
    let small: Vec<u64> = (1..=coeffs.u).filter(|&m| coeffs.mu[m as usize] != 0).collect();
    let direct = outer(&small, |m, acc| {
        let s = coeffs.mu[m as usize] as f64;
        inner(p, m, &e, |l| s * (l as f64).ln(), acc);
    });
    let abel = outer(&small, |m, acc| {
        let s = coeffs.mu[m as usize] as f64;
        let (a, b) = (p / m, 2 * p / m);
        // Σ_{a<l<=b} log l x_l = log b S(b) - Σ_{a<l<b} S(l)(log(l+1) - log l)
        let mut partial = ComplexSum::<f64>::new();
        for l in a + 1..=b {
            partial.add(e[(m * l - p - 1) as usize]);
            let w = if l == b { (b as f64).ln() } else { -((l + 1) as f64 / l as f64).ln() };
            acc.add(partial.value() * (s * w));
        }
    });
    Ok((direct, abel))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaGap {
    pub gap: f64,
    /// 2 P^{1/2} log(2P)
    pub bound: f64,
}

/// |Σ_{P<p<=2P} log p e(φ(p)) - Σ_{P<n<=2P} Λ(n) e(φ(n))|.
pub fn prime_vs_lambda_gap(p: u64, phase: &PhaseSpec) -> Result<LambdaGap> {
    if p > MAX_P {
        return Err(Error::TableTooLarge { size: p, limit: MAX_P });
    }
    let e = phase_table(p, phase)?;
    let lam = von_mangoldt_between(p, 2 * p)?;
    let mut is_prime = vec![false; e.len()];
    for q in primes_between(p, 2 * p)?.primes {
        is_prime[(q - p - 1) as usize] = true;
    }
    // only the prime powers with exponent >= 2 survive the difference
    let diff = complex_blocked_sum(e.len(), |i| if is_prime[i] { Complex::new(0.0, 0.0) } else { e[i] * lam[i] });
    let bound = 2.0 * (p as f64).sqrt() * (2.0 * p as f64).ln();
    Ok(LambdaGap { gap: diff.norm(), bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::RealExponent;

    #[test]
    fn coefficient_examples() {
        let k = build_coeffs(100_000).unwrap();
        assert_eq!(k.u, 46);
        assert_eq!(k.c[1], 0.0);
        assert_eq!(k.a[1], 1);
        for p in [2u64, 3, 5, 7, 11, 43] {
            assert_eq!(k.c[p as usize], (p as f64).ln());
        }
        let t = FactorTable::new(k.a.len() as u64).unwrap();
        for m in 1..k.a.len() as u64 {
            assert!(k.a[m as usize].unsigned_abs() <= t.divisor_count(m).unwrap());
        }
        for m in 2..k.c.len() {
            assert!(k.c[m].abs() <= (m as f64).ln() + 1e-12);
        }
    }

    #[test]
    fn c_matches_divisor_loop() {
        let k = build_coeffs(1_000_000).unwrap();
        let t = FactorTable::new(10_000).unwrap();
        for m in 1..k.c.len() as u64 {
            let mut s = 0.0;
            for e in 1..=m {
                if m % e == 0 && e <= k.u && m / e <= k.u {
                    s += t.von_mangoldt(e).unwrap() * t.moebius(m / e).unwrap() as f64;
                }
            }
            assert!((s - k.c[m as usize]).abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn zero_phase_identity() {
        let k = build_coeffs(1000).unwrap();
        let s = vaughan_split(&k, &PhaseSpec::Zero).unwrap();
        assert!(s.residual <= 1e-9 * s.lambda_mass, "{}", s.residual);
    }

    #[test]
    fn smallest_type_two_range() {
        let k = build_coeffs(8).unwrap();
        assert_eq!(k.u, 2);
        let s = vaughan_split(&k, &PhaseSpec::power(0.37, 1.01).unwrap()).unwrap();
        assert!(s.residual <= 1e-12);
    }

    #[test]
    fn abel_form_agrees() {
        let c = RealExponent::new(1.01).unwrap();
        let k = build_coeffs(5000).unwrap();
        let ph = PhaseSpec::combined(2, 1, 3, 1e5, &c).unwrap();
        let (d, a) = u1_abel_check(&k, &ph).unwrap();
        assert!((d - a).norm() < 1e-8 * d.norm().max(1.0));
    }

    #[test]
    fn zero_phase_gap_is_prime_power_mass() {
        let g = prime_vs_lambda_gap(1000, &PhaseSpec::Zero).unwrap();
        // prime powers in (1000, 2000]: 1024, 1331, 1369, 1681, 1849
        let expect = 2f64.ln() + 11f64.ln() + 37f64.ln() + 41f64.ln() + 43f64.ln();
        assert!((g.gap - expect).abs() < 1e-12);
        assert!(g.gap <= g.bound);
    }
}
