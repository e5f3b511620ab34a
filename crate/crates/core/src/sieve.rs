//! Segmented prime sieve and multiplicative-function tables.

use rayon::prelude::*;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::sum::Neumaier;

/// Largest table the smallest-prime-factor sieve will build.
pub const MAX_TABLE: u64 = 100_000_000;
/// Largest upper end accepted by [`primes_between`].
pub const MAX_SEGMENTED: u64 = 1_000_000_000_000;
/// Segment length of the segmented sieve.
pub const SEGMENT: u64 = 1 << 20;

/// Smallest-prime-factor table for `2..=limit`.
#[derive(Debug, Clone)]
pub struct FactorTable {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u64>,
}

impl FactorTable {
    pub fn new(limit: u64) -> Result<Self> {
        if limit > MAX_TABLE {
            return Err(Error::RangeTooLarge { lo: 0, hi: limit, limit: MAX_TABLE });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        // linear sieve: each composite is written once, by its smallest prime
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
            }
            let si = spf[i] as u64;
            for &p in &primes {
                if p > si || p as usize * i > n {
                    break;
                }
                spf[p as usize * i] = p as u32;
            }
        }
        Ok(Self { limit, spf, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    fn check(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit.max(1) {
            Err(Error::OutOfTableRange { n, limit: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn spf(&self, n: u64) -> Result<u64> {
        self.check(n)?;
        if n < 2 {
            return Err(Error::OutOfTableRange { n, limit: self.limit });
        }
        Ok(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        if n < 2 {
            return Ok(false);
        }
        Ok(self.spf(n)? == n)
    }

    /// Prime factorisation `[(p, k)]`, ascending. Beyond the table, trial
    /// division by the tabulated primes (valid while `n <= limit^2`).
    pub fn factorize(&self, mut n: u64) -> Result<Vec<(u64, u32)>> {
        if n == 0 {
            return Err(Error::OutOfTableRange { n, limit: self.limit });
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.last_mut() {
            Some((q, k)) if *q == p => *k += 1,
            _ => out.push((p, 1)),
        };
        if n > self.limit {
            if (self.limit as u128) * (self.limit as u128) < n as u128 {
                return Err(Error::OutOfTableRange { n, limit: self.limit });
            }
            for &p in &self.primes {
                if p * p > n {
                    break;
                }
                while n % p == 0 {
                    push(p, &mut out);
                    n /= p;
                }
                if n <= self.limit {
                    break;
                }
            }
            if n > self.limit {
                push(n, &mut out);
                return Ok(out);
            }
        }
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            push(p, &mut out);
            n /= p;
        }
        Ok(out)
    }

    pub fn moebius(&self, n: u64) -> Result<i8> {
        self.check(n)?;
        let f = self.factorize(n)?;
        if f.iter().any(|&(_, k)| k > 1) {
            Ok(0)
        } else if f.len() % 2 == 0 {
            Ok(1)
        } else {
            Ok(-1)
        }
    }

    pub fn von_mangoldt(&self, n: u64) -> Result<f64> {
        self.check(n)?;
        let f = self.factorize(n)?;
        Ok(if f.len() == 1 { (f[0].0 as f64).ln() } else { 0.0 })
    }

    pub fn divisor_count(&self, n: u64) -> Result<u64> {
        self.check(n)?;
        Ok(self.factorize(n)?.iter().map(|&(_, k)| k as u64 + 1).product())
    }

    /// Ω(n): prime factors counted with multiplicity.
    pub fn big_omega(&self, n: u64) -> Result<u32> {
        Ok(self.factorize(n)?.iter().map(|&(_, k)| k).sum())
    }

    /// Π_{p<z} (1 - 1/p), accumulated in double-double.
    pub fn mertens_product(&self, z: u64) -> Result<f64> {
        if z < 2 || z > self.limit.max(2) {
            return Err(Error::OutOfTableRange { n: z, limit: self.limit });
        }
        let mut prod = Dd::ONE;
        for &p in self.primes.iter().take_while(|&&p| p < z) {
            prod = prod * (Dd::ONE - Dd::ratio(1, p as i64));
        }
        Ok(prod.to_f64())
    }
}

/// The primes in `(lo, hi]`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSegment {
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<u64>,
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Plain sieve of Eratosthenes up to `n`.
pub fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Segmented sieve for `(lo, hi]`; memory O(√hi + segment).
pub fn primes_between(lo: u64, hi: u64) -> Result<PrimeSegment> {
    if hi > MAX_SEGMENTED {
        return Err(Error::RangeTooLarge { lo, hi, limit: MAX_SEGMENTED });
    }
    if lo >= hi {
        return Ok(PrimeSegment { lo, hi, primes: Vec::new() });
    }
    let base = small_primes(isqrt(hi));
    let start = lo + 1;
    let segments = (hi - start + 1).div_ceil(SEGMENT);
    let primes: Vec<u64> = (0..segments)
        .into_par_iter()
        .map(|s| {
            let a = start + s * SEGMENT;
            let b = (a + SEGMENT - 1).min(hi);
            let mut composite = vec![false; (b - a + 1) as usize];
            for &p in &base {
                let first = (p * p).max(a.div_ceil(p) * p);
                let mut m = first;
                while m <= b {
                    composite[(m - a) as usize] = true;
                    m += p;
                }
            }
            (a..=b)
                .filter(|&n| n >= 2 && !composite[(n - a) as usize])
                .collect::<Vec<u64>>()
        })
        .flatten()
        .collect();
    Ok(PrimeSegment { lo, hi, primes })
}

/// θ(hi) - θ(lo) = Σ_{lo < p <= hi} log p.
pub fn chebyshev_theta(lo: u64, hi: u64) -> Result<f64> {
    let seg = primes_between(lo, hi)?;
    Ok(Neumaier::<f64>::sum_iter(seg.primes.iter().map(|&p| (p as f64).ln())))
}

/// Λ(n) for n in `(lo, hi]`, index `n - lo - 1`.
pub fn von_mangoldt_between(lo: u64, hi: u64) -> Result<Vec<f64>> {
    let seg = primes_between(lo, hi)?;
    let mut out = vec![0.0; hi.saturating_sub(lo) as usize];
    for &p in &seg.primes {
        out[(p - lo - 1) as usize] = (p as f64).ln();
    }
    for p in small_primes(isqrt(hi)) {
        let lp = (p as f64).ln();
        let mut q = p * p;
        loop {
            if q > lo {
                out[(q - lo - 1) as usize] = lp;
            }
            match q.checked_mul(p) {
                Some(next) if next <= hi => q = next,
                _ => break,
            }
        }
    }
    Ok(out)
}
