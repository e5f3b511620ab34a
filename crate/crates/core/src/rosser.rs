//! Lower-bound Rosser weights of level D on the divisors of B_z = Π_{p<z} p,
//! the linear-sieve lower function f(s), and the Γ₀ main term.
//!
//! A squarefree `d = p₁p₂⋯p_k` with `z > p₁ > p₂ > ⋯ > p_k` carries
//! `λ(d) = μ(d)` when `d <= D` and `p₁⋯p_{2l-1}·p_{2l}³ <= D` for every even
//! index `2l <= k`; otherwise `λ(d) = 0`. Truncating only at even depth keeps
//! `Σ_{d|k} λ(d) <= Σ_{d|k} μ(d)` for all k.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sieve::{small_primes, FactorTable};
use crate::sum::Neumaier;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Largest support [`build_lower_rosser`] will materialise.
pub const SUPPORT_LIMIT: usize = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveConfig {
    /// N, when the configuration was derived from exponents.
    pub n: Option<u64>,
    pub alpha: f64,
    pub delta: f64,
    pub z: u64,
    /// Sieve level D.
    pub level: u64,
    /// s = log D / log z.
    pub s: f64,
    pub theorem_mode: bool,
}

impl SieveConfig {
    /// z = N^α, D = N^δ (both floored, z at least 2).
    pub fn from_exponents(n: u64, alpha: f64, delta: f64, theorem_mode: bool) -> Result<Self> {
        if !(alpha > 0.0 && delta > 0.0) {
            return Err(Error::InvalidArgument("alpha and delta must be positive".into()));
        }
        let nf = n as f64;
        let z = (nf.powf(alpha).floor() as u64).max(2);
        let level = nf.powf(delta).floor() as u64;
        let cfg = Self { n: Some(n), alpha, delta, z, level, s: delta / alpha, theorem_mode };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration given directly by z and D.
    pub fn explicit(z: u64, level: u64) -> Result<Self> {
        let s = if z > 1 { (level as f64).ln() / (z as f64).ln() } else { f64::INFINITY };
        let cfg = Self { n: None, alpha: f64::NAN, delta: f64::NAN, z, level, s, theorem_mode: false };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.z < 2 {
            return Err(Error::ConstraintViolation(format!("z >= 2 (z = {})", self.z)));
        }
        if self.level < self.z {
            return Err(Error::ConstraintViolation(format!("D >= z (D = {}, z = {})", self.level, self.z)));
        }
        if self.theorem_mode && !(self.s > 2.0 && self.s < 3.0) {
            return Err(Error::ConstraintViolation(format!("2 < delta/alpha < 3 (s = {})", self.s)));
        }
        Ok(())
    }
}

/// Nonzero weights, ascending in d.
#[derive(Debug, Clone, PartialEq)]
pub struct RosserWeights {
    level: u64,
    z: u64,
    weights: Vec<(u64, i8)>,
}

impl RosserWeights {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn z(&self) -> u64 {
        self.z
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// λ(d); zero off the support.
    pub fn get(&self, d: u64) -> i8 {
        self.weights
            .binary_search_by_key(&d, |&(k, _)| k)
            .map(|i| self.weights[i].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, i8)> + '_ {
        self.weights.iter().copied()
    }

    /// Keep only λ(1) = 1.
    pub fn trivial(z: u64, level: u64) -> Self {
        Self { level, z, weights: vec![(1, 1)] }
    }

    /// `d,lambda` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "d,lambda")?;
        for (d, l) in self.iter() {
            writeln!(w, "{d},{l}")?;
        }
        Ok(())
    }
}

/// Depth-first walk over the support, primes strictly decreasing.
fn walk(primes: &[u64], level: u64, mut visit: impl FnMut(u64, i8) -> Result<()>) -> Result<()> {
    fn rec(
        primes: &[u64],
        level: u64,
        d: u64,
        depth: u32,
        upto: usize,
        visit: &mut dyn FnMut(u64, i8) -> Result<()>,
    ) -> Result<()> {
        let depth = depth + 1;
        let sign: i8 = if depth % 2 == 0 { 1 } else { -1 };
        for (i, &q) in primes[..upto].iter().enumerate() {
            let admissible = if depth % 2 == 0 {
                (d as u128) * (q as u128).pow(3) <= level as u128
            } else {
                (d as u128) * (q as u128) <= level as u128
            };
            if !admissible {
                break;
            }
            let nd = d * q;
            visit(nd, sign)?;
            rec(primes, level, nd, depth, i, visit)?;
        }
        Ok(())
    }
    visit(1, 1)?;
    rec(primes, level, 1, 0, primes.len(), &mut visit)
}

fn primes_below(z: u64) -> Vec<u64> {
    small_primes(z.saturating_sub(1))
}

pub fn build_lower_rosser(cfg: &SieveConfig) -> Result<RosserWeights> {
    if cfg.z > 1_000_000 {
        return Err(Error::InvalidArgument(format!("z = {} above 10^6", cfg.z)));
    }
    let primes = primes_below(cfg.z);
    let mut weights = Vec::new();
    walk(&primes, cfg.level, |d, l| {
        if weights.len() >= SUPPORT_LIMIT {
            return Err(Error::SupportTooLarge { limit: SUPPORT_LIMIT });
        }
        weights.push((d, l));
        Ok(())
    })?;
    weights.sort_unstable_by_key(|&(d, _)| d);
    Ok(RosserWeights { level: cfg.level, z: cfg.z, weights })
}

/// Σ λ(d)/d over the support without materialising it.
pub fn streaming_density(cfg: &SieveConfig) -> Result<(f64, u64)> {
    let primes = primes_below(cfg.z);
    let mut acc = Neumaier::<f64>::new();
    let mut count = 0u64;
    walk(&primes, cfg.level, |d, l| {
        acc.add(l as f64 / d as f64);
        count += 1;
        Ok(())
    })?;
    Ok((acc.value(), count))
}

/// (Σ_{d|(k,B_z)} μ(d), Σ_{d|k} λ(d)).
pub fn fundamental_sides(weights: &RosserWeights, table: &FactorTable, k: u64) -> Result<(i64, i64)> {
    let small: Vec<u64> = table
        .factorize(k)?
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| p < weights.z)
        .collect();
    let lhs = if small.is_empty() { 1 } else { 0 };
    let mut rhs = 0i64;
    for mask in 0u32..(1 << small.len()) {
        let d: u64 = small
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .product();
        rhs += weights.get(d) as i64;
    }
    Ok((lhs, rhs))
}

/// Σ_{d|(k,B_z)} μ(d) >= Σ_{d|k} λ(d).
pub fn verify_fundamental(weights: &RosserWeights, table: &FactorTable, k: u64) -> Result<bool> {
    let (lhs, rhs) = fundamental_sides(weights, table, k)?;
    Ok(lhs >= rhs)
}

/// Lower function of the linear sieve on (0, 3).
pub fn f_linear(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 3.0) {
        return Err(Error::DomainError(format!("f(s) is given only for 0 < s < 3, got {s}")));
    }
    if s <= 2.0 {
        return Ok(0.0);
    }
    Ok(2.0 * EULER_GAMMA.exp() * (s - 1.0).ln() / s)
}

/// Σ λ(d)/d in ascending d.
pub fn weighted_density(weights: &RosserWeights) -> f64 {
    Neumaier::<f64>::sum_iter(weights.iter().map(|(d, l)| l as f64 / d as f64))
}

/// Weighted density next to its predicted lower bound V(z)·f(s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityReport {
    pub density: f64,
    pub mertens: f64,
    pub f_s: f64,
    /// density / (mertens · f_s); infinite when f(s) = 0.
    pub ratio: f64,
}

pub fn density_report(density: f64, cfg: &SieveConfig, table: &FactorTable) -> Result<DensityReport> {
    let mertens = table.mertens_product(cfg.z)?;
    let f_s = f_linear(cfg.s)?;
    let ratio = if f_s > 0.0 { density / (mertens * f_s) } else { f64::INFINITY };
    Ok(DensityReport { density, mertens, f_s, ratio })
}

/// Γ₀ = A(N) · Σ λ(d)/d.
pub fn gamma0_lower(weights: &RosserWeights, a_n: f64) -> f64 {
    a_n * weighted_density(weights)
}

/// Σ_{d|B_z, d<=D} μ(d)²/d, an upper envelope for the weighted density.
pub fn squarefree_envelope(z: u64, level: u64) -> f64 {
    fn rec(primes: &[u64], level: u64, d: u64, upto: usize, acc: &mut Neumaier<f64>) {
        for (i, &q) in primes[..upto].iter().enumerate() {
            if d as u128 * q as u128 > level as u128 {
                break;
            }
            acc.add(1.0 / (d * q) as f64);
            rec(primes, level, d * q, i, acc);
        }
    }
    let primes = primes_below(z);
    let mut acc = Neumaier::new();
    acc.add(1.0);
    rec(&primes, level, 1, primes.len(), &mut acc);
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_from_construction() {
        let cfg = SieveConfig::explicit(50, 10_000).unwrap();
        let w = build_lower_rosser(&cfg).unwrap();
        assert_eq!(w.get(1), 1);
        for p in small_primes(49) {
            assert_eq!(w.get(p), -1, "p = {p}");
        }
        assert!(w.iter().all(|(d, _)| d <= cfg.level));
        assert_eq!(w.get(cfg.level + 1), 0);
        assert_eq!(w.get(4), 0);
    }

    #[test]
    fn even_depth_truncation() {
        // D = 1000: 47*43 = 2021 > D, 13*11^3 = 17303 > D, 7*5^3 = 875 <= D
        let w = build_lower_rosser(&SieveConfig::explicit(50, 1000).unwrap()).unwrap();
        assert_eq!(w.get(47 * 43), 0);
        assert_eq!(w.get(13 * 11), 0);
        assert_eq!(w.get(7 * 5), 1);
        assert_eq!(w.get(7 * 5 * 3), -1);
        // 7*5*3*2: depth 4 needs 7*5*3*2^3 = 840 <= 1000
        assert_eq!(w.get(210), 1);
    }

    #[test]
    fn fundamental_inequality_small_case() {
        let cfg = SieveConfig::explicit(10, 10).unwrap();
        let w = build_lower_rosser(&cfg).unwrap();
        let t = FactorTable::new(1000).unwrap();
        assert_eq!(fundamental_sides(&w, &t, 1).unwrap(), (1, 1));
        let (l, r) = fundamental_sides(&w, &t, 6).unwrap();
        assert_eq!(l, 0);
        assert!(r <= 0);
        for k in 1..=1000 {
            assert!(verify_fundamental(&w, &t, k).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn f_linear_values() {
        assert_eq!(f_linear(1.5).unwrap(), 0.0);
        assert_eq!(f_linear(2.0).unwrap(), 0.0);
        let expect = 2.0 * 0.5772156649f64.exp() * 1.5f64.ln() / 2.5;
        assert!((f_linear(2.5).unwrap() - expect).abs() < 1e-9);
        assert!((f_linear(2.5).unwrap() - 0.5778).abs() < 1e-4);
        assert!(matches!(f_linear(3.0), Err(Error::DomainError(_))));
        assert!(f_linear(0.0).is_err());
        assert!(f_linear(2.0 + 1e-12).unwrap() < 1e-10);
        let grid: Vec<f64> = (1..100).map(|i| f_linear(2.0 + i as f64 / 100.0).unwrap()).collect();
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn density_trivial_and_positive() {
        let w = build_lower_rosser(&SieveConfig::explicit(2, 2).unwrap()).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(weighted_density(&w), 1.0);
        let cfg = SieveConfig::explicit(100, 100_000).unwrap();
        let w = build_lower_rosser(&cfg).unwrap();
        let dens = weighted_density(&w);
        assert!(dens > 0.0);
        assert!(dens <= squarefree_envelope(100, 100_000));
        let (stream, count) = streaming_density(&cfg).unwrap();
        assert_eq!(count as usize, w.len());
        assert!((stream - dens).abs() < 1e-14);
    }

    #[test]
    fn gamma0_of_trivial_weights() {
        let w = RosserWeights::trivial(2, 2);
        assert_eq!(gamma0_lower(&w, 123.5), 123.5);
    }

    #[test]
    fn config_constraints() {
        assert!(SieveConfig::explicit(1, 10).is_err());
        assert!(SieveConfig::explicit(100, 50).is_err());
        let c = SieveConfig::from_exponents(1_000_000, 0.2, 0.5, true).unwrap();
        assert_eq!(c.z, 15);
        assert_eq!(c.level, 1000);
        assert!(SieveConfig::from_exponents(1_000_000, 0.2, 0.7, true).is_err());
        assert!(SieveConfig::from_exponents(1_000_000, 0.2, 0.7, false).is_ok());
    }

    #[test]
    fn csv_export() {
        let w = build_lower_rosser(&SieveConfig::explicit(5, 10).unwrap()).unwrap();
        let mut out = Vec::new();
        w.write_csv(&mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("d,lambda\n1,1\n2,-1\n3,-1\n"));
    }
}
