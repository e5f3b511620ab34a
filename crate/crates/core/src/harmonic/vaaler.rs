//! Vaaler's trigonometric approximation of the sawtooth ρ(t) = 1/2 - {t}.
//!
//! With `u = |h|/(H+1)` and `ψ(u) = πu(1-u)cot(πu) + u`, the coefficients are
//! `c_h = ψ(u)/(2πih)`, and the error is dominated by the Fejér kernel
//! `Σ_{|h|<=H} d_h e(ht)` with `d_h = (1 - u)/(2H+2)`.

use std::io::{self, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sum::Neumaier;

#[derive(Debug, Clone, PartialEq)]
pub struct VaalerSystem<T: Real> {
    h: usize,
    /// ψ(h/(H+1)) for h = 0..=H (index 0 unused).
    psi: Vec<T>,
    /// d_h for h = 0..=H; d_{-h} = d_h.
    d: Vec<T>,
}

fn psi<T: Real>(u: T) -> T {
    let pi = T::PI();
    let x = pi * u;
    x * (T::one() - u) / x.tan() + u
}

impl<T: Real> VaalerSystem<T> {
    pub fn new(h: usize) -> Result<Self> {
        if h < 2 {
            return Err(Error::InvalidArgument(format!("H >= 2 required, got {h}")));
        }
        let hp1 = T::from_usize(h + 1).unwrap();
        let mut ps = vec![T::zero(); h + 1];
        let mut d = vec![T::zero(); h + 1];
        for k in 0..=h {
            let u = T::from_usize(k).unwrap() / hp1;
            if k > 0 {
                ps[k] = psi(u);
            }
            d[k] = (T::one() - u) / (hp1 + hp1);
        }
        Ok(Self { h, psi: ps, d })
    }

    pub fn order(&self) -> usize {
        self.h
    }

    /// c_h for 0 < |h| <= H.
    pub fn c(&self, h: i64) -> Complex<T> {
        let k = h.unsigned_abs() as usize;
        assert!(k >= 1 && k <= self.h, "c_h defined for 0 < |h| <= H");
        let two_pi_h = T::TAU() * T::from_i64(h).unwrap();
        Complex::new(T::zero(), -self.psi[k] / two_pi_h)
    }

    /// d_h for |h| <= H.
    pub fn d(&self, h: i64) -> T {
        let k = h.unsigned_abs() as usize;
        assert!(k <= self.h, "d_h defined for |h| <= H");
        self.d[k]
    }

    /// Σ_{0<|h|<=H} c_h e(ht).
    pub fn rho_approx(&self, t: T) -> T {
        let mut acc = Neumaier::new();
        let pi = T::PI();
        for k in 1..=self.h {
            let kf = T::from_usize(k).unwrap();
            acc.add(self.psi[k] * (T::TAU() * kf * t).sin() / (pi * kf));
        }
        acc.value()
    }

    /// Σ_{|h|<=H} d_h e(ht) by direct summation.
    pub fn rho_majorant(&self, t: T) -> T {
        let mut acc = Neumaier::new();
        acc.add(self.d[0]);
        for k in 1..=self.h {
            let kf = T::from_usize(k).unwrap();
            acc.add((self.d[k] + self.d[k]) * (T::TAU() * kf * t).cos());
        }
        acc.value()
    }

    /// The majorant through the closed Fejér form
    /// `(sin(π(H+1)t)/sin(πt))² / (2(H+1)²)`.
    pub fn rho_majorant_fast(&self, t: T) -> T {
        let t = t - t.round();
        let s = (T::PI() * t).sin();
        if s.abs() < T::lit(1e-4) {
            return self.rho_majorant(t);
        }
        let hp1 = T::from_usize(self.h + 1).unwrap();
        let q = (T::PI() * hp1 * t).sin() / s;
        q * q / (hp1 * hp1 * T::lit(2.0))
    }

    /// Σ_{|h|<=H} d_h, the sup of the majorant.
    pub fn majorant_total(&self) -> T {
        let mut acc = Neumaier::new();
        acc.add(self.d[0]);
        for k in 1..=self.h {
            acc.add(self.d[k] + self.d[k]);
        }
        acc.value()
    }

    /// Smallest C with |c_h| <= C/|h| for all h.
    pub fn c_constant(&self) -> T {
        (1..=self.h)
            .map(|k| self.c(k as i64).norm() * T::from_usize(k).unwrap())
            .fold(T::zero(), T::max)
    }

    /// Smallest C with d_h <= C/H for all h.
    pub fn d_constant(&self) -> T {
        let hf = T::from_usize(self.h).unwrap();
        self.d.iter().fold(T::zero(), |m, &x| m.max(x * hf))
    }

    /// Rows `h,re_c,im_c,d` for -H..=H (c_0 reported as 0).
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "h,re_c,im_c,d")?;
        let hh = self.h as i64;
        for h in -hh..=hh {
            let c = if h == 0 { Complex::new(T::zero(), T::zero()) } else { self.c(h) };
            writeln!(w, "{h},{:e},{:e},{:e}", c.re.to_f64().unwrap(), c.im.to_f64().unwrap(), self.d(h).to_f64().unwrap())?;
        }
        Ok(())
    }
}
