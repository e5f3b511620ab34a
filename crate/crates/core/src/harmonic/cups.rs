//! Periodic smooth cups and their shifted partition of unity.
//!
//! The cup `g` is the indicator of `[-a, a]`, `a = 1/(4Z)`, convolved `r`
//! times with the uniform density of width `w = Δ/r`, `Δ = 1/(2Z)`. Its
//! support is `|t| <= 1/(2Z)`, `g(0) = 1`, and the shifts by multiples of
//! `1/(2Z)` sum to one. Values come from the spline form; the Fourier data
//! `β_n = sin(2πna)/(πn) · (sin(πnw)/(πnw))^r` is kept separately.

use std::io::{self, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Field, Real};

/// Distribution function of the sum of `r` independent uniforms on [0, 1].
///
/// Uses `F(u) = Σ_{i=0}^{⌊u⌋} M_{r+1}(f + i)`, `f = {u}`, with the cardinal
/// B-spline `M_{r+1}` evaluated by the positive Cox–de Boor recursion, and the
/// reflection `F(u) = 1 - F(r - u)` on the upper half.
pub fn irwin_hall_cdf<F: Field>(r: u32, u: F) -> F {
    let rf = F::from_i64(r as i64);
    if u <= F::zero() {
        return F::zero();
    }
    if u >= rf {
        return F::one();
    }
    let two = F::from_i64(2);
    if u.clone() * two > rf {
        return F::one() - irwin_hall_cdf(r, rf - u);
    }
    let fl = u.floor_i64();
    let f = u - F::from_i64(fl);
    let k_max = r as usize + 1;
    // b[i] = M_k(f + i), i = 0..k-1
    let mut b = vec![F::zero(); k_max];
    b[0] = F::one();
    for k in 2..=k_max {
        let kf = F::from_i64(k as i64);
        let inv = F::from_i64(k as i64 - 1);
        for i in (0..k).rev() {
            let x = f.clone() + F::from_i64(i as i64);
            let left = if i < k - 1 { x.clone() * b[i].clone() } else { F::zero() };
            let right = if i > 0 { (kf.clone() - x) * b[i - 1].clone() } else { F::zero() };
            b[i] = (left + right) / inv.clone();
        }
    }
    let mut acc = F::zero();
    for v in b.iter().take(fl as usize + 1) {
        acc = acc + v.clone();
    }
    acc
}

/// Exact value of the cup with parameters (Z, r) at `t`, in any field.
pub fn cup_value<F: Field>(z: u32, r: u32, t: F) -> F {
    // reduce to [-1/2, 1/2)
    let half = F::from_ratio(1, 2);
    let shifted = t.clone() + half.clone();
    let t = t - F::from_i64(shifted.floor_i64());
    let y = if t < F::zero() { F::zero() - t } else { t };
    let zz = F::from_i64(2 * z as i64);
    if y.clone() * zz >= F::one() {
        return F::zero();
    }
    // a = 1/(4Z), w = 1/(2Zr); F_X(s) = F_S(s/w + r/2)
    let a = F::from_ratio(1, 4 * z as i64);
    let inv_w = F::from_i64(2 * z as i64 * r as i64);
    let mid = F::from_ratio(r as i64, 2);
    let upper = (y.clone() + a.clone()) * inv_w.clone() + mid.clone();
    let lower = (y - a) * inv_w + mid;
    irwin_hall_cdf(r, upper) - irwin_hall_cdf(r, lower)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CupSystem<T: Real> {
    z: u32,
    r: u32,
    cutoff: usize,
    /// β_n for n = 0..=cutoff; β_{-n} = β_n.
    beta: Vec<T>,
}

impl<T: Real + Field> CupSystem<T> {
    pub fn new(z: u32, r: u32, cutoff: usize) -> Result<Self> {
        if z < 2 {
            return Err(Error::InvalidArgument(format!("Z >= 2 required, got {z}")));
        }
        if r < 1 {
            return Err(Error::InvalidArgument("r >= 1 required".into()));
        }
        let zf = <T as Real>::lit(z as f64);
        let rf = <T as Real>::lit(r as f64);
        let a = T::one() / (zf * <T as Real>::lit(4.0));
        let w = T::one() / (zf * rf * <T as Real>::lit(2.0));
        let pi = T::PI();
        let mut beta = Vec::with_capacity(cutoff + 1);
        beta.push(T::one() / (zf + zf));
        for n in 1..=cutoff {
            let nf = <T as Real>::lit(n as f64);
            let base = (T::TAU() * nf * a).sin() / (pi * nf);
            let x = pi * nf * w;
            beta.push(base * (x.sin() / x).powi(r as i32));
        }
        Ok(Self { z, r, cutoff, beta })
    }

    /// Cutoff `Z·(log N)^4` and `r = [log N]`.
    pub fn for_modulus(z: u32, n: u64) -> Result<Self> {
        let l = (n as f64).ln();
        let r = (l.floor() as u32).max(1);
        Self::new(z, r, (z as f64 * l.powi(4)).ceil() as usize)
    }

    pub fn z(&self) -> u32 {
        self.z
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Δ = 1/(2Z).
    pub fn width(&self) -> T {
        T::one() / <T as Real>::lit(2.0 * self.z as f64)
    }

    pub fn beta(&self, n: i64) -> T {
        self.beta[n.unsigned_abs() as usize]
    }

    /// β_n e(-zn/(2Z)), the coefficients of g_z.
    pub fn beta_shifted(&self, n: i64, z_index: u32) -> Complex<T> {
        let k = (z_index as i64 * n).rem_euclid(2 * self.z as i64);
        let ang = -T::TAU() * <T as Real>::lit(k as f64) / <T as Real>::lit(2.0 * self.z as f64);
        Complex::from_polar(self.beta(n), ang)
    }

    /// Upper bound on Σ_{|n|>cutoff} |β_n| from `|β_n| <= (1/(πn))(2Zr/(πn))^r`.
    pub fn tail_bound(&self) -> T {
        let pi = std::f64::consts::PI;
        let k = self.cutoff.max(1) as f64;
        let r = self.r as f64;
        let q = 2.0 * self.z as f64 * r / (pi * k);
        let log = (2.0 / pi).ln() + r * q.ln() - r.ln();
        <T as Real>::lit(log.exp())
    }

    /// The pointwise bound on |β_n| quoted with the construction.
    pub fn beta_envelope(&self, n: i64) -> T {
        let half_z = T::one() / <T as Real>::lit(2.0 * self.z as f64);
        if n == 0 {
            return half_z;
        }
        let nf = n.unsigned_abs() as f64;
        let pi = std::f64::consts::PI;
        let r = self.r as f64;
        let log = -nf.ln() + r * (2.0 * self.z as f64 * r / (pi * nf)).ln();
        half_z.min(<T as Real>::lit(log.exp()))
    }

    /// g(t), from the spline form.
    pub fn g(&self, t: T) -> T {
        cup_value(self.z, self.r, t)
    }

    pub fn g_z(&self, z_index: u32, t: T) -> Result<T> {
        self.check_index(z_index)?;
        Ok(self.g(t - <T as Real>::lit(z_index as f64) * self.width()))
    }

    /// Truncated Fourier series of g.
    pub fn g_fourier(&self, t: T) -> T {
        let mut acc = crate::sum::Neumaier::new();
        acc.add(self.beta[0]);
        for (n, &b) in self.beta.iter().enumerate().skip(1) {
            acc.add((b + b) * (T::TAU() * <T as Real>::lit(n as f64) * t).cos());
        }
        acc.value()
    }

    fn check_index(&self, z_index: u32) -> Result<()> {
        if z_index >= 2 * self.z {
            return Err(Error::InvalidArgument(format!(
                "z index {z_index} outside 0..{}",
                2 * self.z
            )));
        }
        Ok(())
    }

    /// max |Σ_z g_z(t) - 1| over the samples.
    pub fn partition_check(&self, samples: &[T]) -> T {
        samples
            .iter()
            .map(|&t| {
                let mut acc = crate::sum::Neumaier::new();
                for zi in 0..2 * self.z {
                    acc.add(self.g(t - <T as Real>::lit(zi as f64) * self.width()));
                }
                (acc.value() - T::one()).abs()
            })
            .fold(T::zero(), T::max)
    }

    /// max |g(t) + g(t - 1/(2Z)) - 1| over samples mapped into [0, 1/(2Z)].
    pub fn complement_check(&self, samples: &[T]) -> T {
        let w = self.width();
        samples
            .iter()
            .map(|&s| {
                let t = (s - s.floor()) * w;
                (self.g(t) + self.g(t - w) - T::one()).abs()
            })
            .fold(T::zero(), T::max)
    }

    /// Rows `n,beta` for n = 0..=cutoff.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,beta")?;
        for (n, b) in self.beta.iter().enumerate() {
            writeln!(w, "{n},{:e}", b.to_f64().unwrap())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(a: i64, b: i64) -> BigRational {
        <BigRational as Field>::from_ratio(a, b)
    }

    #[test]
    fn cup_examples() {
        let c = CupSystem::<f64>::new(2, 6, 100).unwrap();
        assert_eq!(c.g(0.0), 1.0);
        assert_eq!(c.g(0.4), 0.0);
        assert_eq!(c.g(0.25), 0.0);
        assert!(c.g(0.1) > 0.0 && c.g(0.1) < 1.0);
        assert_eq!(c.beta(0), 0.25);
        assert_eq!(c.g_z(0, 0.13).unwrap(), c.g(0.13));
        assert!((c.g_z(3, 0.75).unwrap() - 1.0).abs() < 1e-15);
        assert!(c.g_z(4, 0.0).is_err());
    }

    #[test]
    fn irwin_hall_small_cases() {
        assert_eq!(irwin_hall_cdf(1, 0.3f64), 0.3);
        assert!((irwin_hall_cdf(2, 0.5f64) - 0.125).abs() < 1e-16);
        assert!((irwin_hall_cdf(2, 1.5f64) - 0.875).abs() < 1e-16);
        assert_eq!(irwin_hall_cdf(3, q(3, 2)), q(1, 2));
        // F_3(1) = 1/6
        assert_eq!(irwin_hall_cdf(3, q(1, 1)), q(1, 6));
    }

    #[test]
    fn rational_partition_is_exact() {
        let (z, r) = (3u32, 5u32);
        for k in 0..37 {
            let t = q(k, 37);
            let mut s = q(0, 1);
            for zi in 0..2 * z as i64 {
                s = s + cup_value(z, r, t.clone() - q(zi, 2 * z as i64));
            }
            assert_eq!(s, q(1, 1), "t = {k}/37");
        }
    }

    #[test]
    fn evenness_and_envelope() {
        let c = CupSystem::<f64>::new(8, 14, 2000).unwrap();
        for i in 0..200 {
            let t = i as f64 / 400.0;
            assert_eq!(c.g(t), c.g(-t));
        }
        for n in -2000..=2000i64 {
            assert!(c.beta(n).abs() <= c.beta_envelope(n) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn shifted_coefficients_keep_modulus() {
        let c = CupSystem::<f64>::new(4, 6, 50).unwrap();
        for n in -50..=50i64 {
            for zi in 0..8 {
                assert!((c.beta_shifted(n, zi).norm() - c.beta(n).abs()).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn fourier_reconstruction() {
        let c = CupSystem::<f64>::new(4, 6, 4000).unwrap();
        let tail = c.tail_bound();
        for i in 0..100 {
            let t = i as f64 / 100.0 - 0.5;
            assert!((c.g(t) - c.g_fourier(t)).abs() <= tail + 1e-10, "t = {t}");
        }
    }

    #[test]
    fn f32_cups() {
        let c = CupSystem::<f32>::new(4, 6, 10).unwrap();
        let samples: Vec<f32> = (0..100).map(|i| i as f32 / 100.0).collect();
        assert!(c.partition_check(&samples) < 1e-5);
    }
}
