//! Direct evaluation of the exponential sums over primes and integers.
//!
//! Phases are formed in double-double and reduced modulo one before the
//! trigonometric evaluation. All sums use the deterministic blocked reduction
//! from [`crate::sum`].

use num_complex::Complex;
use serde::Serialize;

use crate::arith::{power_value, Dyadic, Exponent, RealExponent, DEFAULT_LIMIT};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::harmonic::CupSystem;
use crate::sieve::{primes_between, von_mangoldt_between};
use crate::sum::{complex_blocked_sum, real_blocked_sum};

/// Largest range length accepted by [`eval_exp_sum`].
pub const MAX_RANGE: u64 = 1_000_000_000;

/// e(x) = exp(2πix) for x given modulo one.
#[inline]
pub fn e_frac(f: f64) -> Complex<f64> {
    let (s, c) = (std::f64::consts::TAU * f).sin_cos();
    Complex::new(c, s)
}

/// e(x) for a double-double argument.
#[inline]
pub fn e_dd(x: Dd) -> Complex<f64> {
    e_frac(x.frac().to_f64())
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSpec {
    Zero,
    /// θ(t) = coeff · t^c
    Power { coeff: Dd, c: Exponent },
    /// φ(t) = r t^c + v (T - t^c)^γ
    Combined { r: i64, v: Dd, t_big: Dd, c: Exponent, gamma: Exponent },
}

impl PhaseSpec {
    pub fn power(coeff: f64, c: f64) -> Result<Self> {
        Ok(Self::Power { coeff: Dd::from_f64(coeff), c: Exponent::from_f64(c)? })
    }

    /// Combined phase with `v = v_num / v_den`.
    pub fn combined(r: i64, v_num: i64, v_den: i64, t_big: f64, c: &RealExponent) -> Result<Self> {
        if v_den <= 0 || v_num <= 0 {
            return Err(Error::InvalidArgument("v must be a positive fraction".into()));
        }
        Ok(Self::Combined {
            r,
            v: Dd::ratio(v_num, v_den),
            t_big: Dd::from_f64(t_big),
            c: c.c().clone(),
            gamma: c.gamma().clone(),
        })
    }

    /// φ(t) in double-double.
    pub fn value(&self, t: u64) -> Result<Dd> {
        match self {
            Self::Zero => Ok(Dd::ZERO),
            Self::Power { coeff, c } => Ok(*coeff * Dd::from_u64(t).powr(c.to_dd())),
            Self::Combined { r, v, t_big, c, gamma } => {
                let tc = Dd::from_u64(t).powr(c.to_dd());
                let x = *t_big - tc;
                if !(x.hi > 0.0) {
                    return Err(Error::PhaseDomainError { t: t as f64, reason: "T - t^c <= 0".into() });
                }
                Ok(tc.mul_f64(*r as f64) + *v * x.powr(gamma.to_dd()))
            }
        }
    }

    /// e(φ(t)).
    pub fn e(&self, t: u64) -> Result<Complex<f64>> {
        Ok(e_dd(self.value(t)?))
    }

    /// Fails unless the phase is defined up to `hi`.
    pub fn check_domain(&self, hi: u64) -> Result<()> {
        if let Self::Combined { t_big, c, .. } = self {
            let tc = Dd::from_u64(hi).powr(c.to_dd());
            if !((*t_big - tc).hi > 0.0) {
                return Err(Error::PhaseDomainError { t: hi as f64, reason: "T - t^c <= 0".into() });
            }
        }
        Ok(())
    }

    /// (φ', φ'', φ''') at real `t > 0`, in closed form.
    pub fn derivatives(&self, t: f64) -> Result<[f64; 3]> {
        if !(t > 0.0) {
            return Err(Error::PhaseDomainError { t, reason: "t must be positive".into() });
        }
        match self {
            Self::Zero => Ok([0.0; 3]),
            Self::Power { coeff, c } => {
                let (a, c) = (coeff.to_f64(), c.to_f64());
                Ok([
                    a * c * t.powf(c - 1.0),
                    a * c * (c - 1.0) * t.powf(c - 2.0),
                    a * c * (c - 1.0) * (c - 2.0) * t.powf(c - 3.0),
                ])
            }
            Self::Combined { r, v, t_big, c, gamma } => {
                let (r, v, tb, c, g) = (*r as f64, v.to_f64(), t_big.to_f64(), c.to_f64(), gamma.to_f64());
                let tc = t.powf(c);
                let x = tb - tc;
                if !(x > 0.0) {
                    return Err(Error::PhaseDomainError { t, reason: "T - t^c <= 0".into() });
                }
                let d1 = t.powf(c - 1.0) * (r * c - v * x.powf(g - 1.0));
                let d2 = (c - 1.0) * t.powf(c - 2.0) * (r * c - v * tb * x.powf(g - 2.0));
                let d3 = r * c * (c - 1.0) * (c - 2.0) * t.powf(c - 3.0)
                    + v * (c - 1.0) * tb * x.powf(g - 3.0) * t.powf(c - 3.0) * ((2.0 - c) * tb - (c + 1.0) * tc);
                Ok([d1, d2, d3])
            }
        }
    }

    /// φ(t) at real t in plain f64 (for difference quotients).
    pub fn value_f64(&self, t: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Power { coeff, c } => coeff.to_f64() * t.powf(c.to_f64()),
            Self::Combined { r, v, t_big, c, gamma } => {
                let tc = t.powf(c.to_f64());
                *r as f64 * tc + v.to_f64() * (t_big.to_f64() - tc).powf(gamma.to_f64())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    Unit,
    LogpPrimes,
    VonMangoldt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpSumResult {
    pub value: Complex<f64>,
    pub terms: u64,
    /// Σ of the weights; |value| never exceeds it.
    pub weight_total: f64,
    pub compensated: bool,
}

/// Σ_{a<n<=b} w(n) e(φ(n)).
pub fn eval_exp_sum(a: u64, b: u64, phase: &PhaseSpec, weight: Weight) -> Result<ExpSumResult> {
    if b <= a {
        return Ok(ExpSumResult { value: Complex::new(0.0, 0.0), terms: 0, weight_total: 0.0, compensated: true });
    }
    if b - a > MAX_RANGE {
        return Err(Error::RangeTooLarge { lo: a, hi: b, limit: MAX_RANGE });
    }
    phase.check_domain(b)?;
    let (points, weights): (Vec<u64>, Vec<f64>) = match weight {
        Weight::Unit => ((a + 1..=b).collect(), vec![]),
        Weight::LogpPrimes => {
            let ps = primes_between(a, b)?.primes;
            let ws = ps.iter().map(|&p| (p as f64).ln()).collect();
            (ps, ws)
        }
        Weight::VonMangoldt => von_mangoldt_between(a, b)?
            .into_iter()
            .enumerate()
            .filter(|&(_, l)| l > 0.0)
            .map(|(i, l)| (a + 1 + i as u64, l))
            .unzip(),
    };
    let values: Vec<Complex<f64>> = {
        use rayon::prelude::*;
        points.par_iter().map(|&n| phase.e(n)).collect::<Result<_>>()?
    };
    let w = |i: usize| if weights.is_empty() { 1.0 } else { weights[i] };
    let value = complex_blocked_sum(values.len(), |i| values[i] * w(i));
    let weight_total = real_blocked_sum(values.len(), w);
    Ok(ExpSumResult { value, terms: points.len() as u64, weight_total, compensated: true })
}

/// H_n = Σ_{P<k<=2P} e(n k^c).
pub fn h_sum(p: u64, n: f64, c: f64) -> Result<Complex<f64>> {
    Ok(eval_exp_sum(p, 2 * p, &PhaseSpec::power(n, c)?, Weight::Unit)?.value)
}

/// U(T, r, v) = Σ_{P<p<=2P} (log p) e(r p^c + v (T - p^c)^γ).
pub fn eval_u(t_big: f64, r: i64, v_num: i64, v_den: i64, p: u64, c: &RealExponent) -> Result<Complex<f64>> {
    let phase = if v_num == 0 {
        if r == 0 {
            PhaseSpec::Zero
        } else {
            PhaseSpec::Power { coeff: Dd::from_i64(r), c: c.c().clone() }
        }
    } else {
        PhaseSpec::combined(r, v_num, v_den, t_big, c)?
    };
    if let PhaseSpec::Zero | PhaseSpec::Power { .. } = phase {
        if !(t_big - (2.0 * p as f64).powf(c.c_f64()) > 0.0) {
            return Err(Error::PhaseDomainError { t: 2.0 * p as f64, reason: "T - (2P)^c <= 0".into() });
        }
    }
    Ok(eval_exp_sum(p, 2 * p, &phase, Weight::LogpPrimes)?.value)
}

/// The primes of (P, 2P] with `[p^c]`, `{p^c}` and `y_p = (N + j - [p^c])^γ`,
/// shared by every evaluation of W, W_z and V_z.
#[derive(Debug, Clone)]
pub struct WContext {
    pub n: u64,
    pub j: u32,
    pub p: u64,
    pub exp: RealExponent,
    pub primes: Vec<u64>,
    pub logs: Vec<f64>,
    pub floors: Vec<u64>,
    pub fracs: Vec<f64>,
    pub y: Vec<Dd>,
}

impl WContext {
    pub fn new(n: u64, j: u32, exp: &RealExponent, p: u64) -> Result<Self> {
        if j > 1 {
            return Err(Error::InvalidArgument("j must be 0 or 1".into()));
        }
        use rayon::prelude::*;
        let primes = primes_between(p, 2 * p)?.primes;
        let vals: Vec<(u64, f64)> = primes
            .par_iter()
            .map(|&q| {
                let v = power_value(&Dyadic::from_u64(q), exp.c(), 1, true, DEFAULT_LIMIT)?;
                Ok((v.floor, v.frac))
            })
            .collect::<Result<_>>()?;
        let g = exp.gamma().to_dd();
        let mut y = Vec::with_capacity(vals.len());
        for &(f, _) in &vals {
            if f >= n + j as u64 {
                return Err(Error::ConstraintViolation(format!("[p^c] = {f} >= N + j")));
            }
            y.push(Dd::from_u64(n + j as u64 - f).powr(g));
        }
        Ok(Self {
            n,
            j,
            p,
            exp: exp.clone(),
            logs: primes.iter().map(|&q| (q as f64).ln()).collect(),
            floors: vals.iter().map(|v| v.0).collect(),
            fracs: vals.iter().map(|v| v.1).collect(),
            primes,
            y,
        })
    }

    /// W(v) = Σ (log p) e(v y_p).
    pub fn eval_w(&self, v: Dd) -> Complex<f64> {
        complex_blocked_sum(self.primes.len(), |i| e_dd(v * self.y[i]) * self.logs[i])
    }

    /// Σ (log p) g_z(p^c) e(v y_p).
    pub fn eval_wz(&self, v: Dd, z_index: u32, cups: &CupSystem<f64>) -> Result<Complex<f64>> {
        let g = self.cup_weights(z_index, cups)?;
        Ok(complex_blocked_sum(self.primes.len(), |i| {
            if g[i] == 0.0 {
                Complex::new(0.0, 0.0)
            } else {
                e_dd(v * self.y[i]) * (self.logs[i] * g[i])
            }
        }))
    }

    /// Σ (log p) g_z(p^c) e(v (N + j - p^c + z/(2Z))^γ).
    pub fn eval_vz(&self, v: Dd, z_index: u32, cups: &CupSystem<f64>) -> Result<Complex<f64>> {
        let g = self.cup_weights(z_index, cups)?;
        let gd = self.exp.gamma().to_dd();
        let shift = Dd::ratio(z_index as i64, 2 * cups.z() as i64);
        let base = self.n + self.j as u64;
        Ok(complex_blocked_sum(self.primes.len(), |i| {
            if g[i] == 0.0 {
                return Complex::new(0.0, 0.0);
            }
            let x = Dd::from_u64(base - self.floors[i]).add_f64(-self.fracs[i]) + shift;
            e_dd(v * x.powr(gd)) * (self.logs[i] * g[i])
        }))
    }

    /// g_z(p^c) for every prime, from the spline form.
    pub fn cup_weights(&self, z_index: u32, cups: &CupSystem<f64>) -> Result<Vec<f64>> {
        self.fracs.iter().map(|&f| cups.g_z(z_index, f)).collect()
    }

    /// Σ (log p) g_z(p^c).
    pub fn cup_mass(&self, z_index: u32, cups: &CupSystem<f64>) -> Result<f64> {
        let g = self.cup_weights(z_index, cups)?;
        Ok(real_blocked_sum(g.len(), |i| self.logs[i] * g[i]))
    }

    /// W(0) = θ(2P) - θ(P).
    pub fn theta(&self) -> f64 {
        real_blocked_sum(self.logs.len(), |i| self.logs[i])
    }
}

/// One row of a Van der Corput audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VdcRow {
    pub p: u64,
    pub n: u64,
    pub abs_h: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VdcAudit {
    pub constant: f64,
    pub worst: Option<VdcRow>,
    pub rows: Vec<VdcRow>,
}

/// max_n |H_n| / (P^{c/2} n^{1/2}) over the given n.
pub fn vdc_audit_2(p: u64, c: f64, ns: &[u64]) -> Result<VdcAudit> {
    if p > 1_000_000 {
        return Err(Error::RangeTooLarge { lo: p, hi: 2 * p, limit: 1_000_000 });
    }
    use rayon::prelude::*;
    let cd = Exponent::from_f64(c)?.to_dd();
    let powers: Vec<Dd> = (p + 1..=2 * p).into_par_iter().map(|k| Dd::from_u64(k).powr(cd)).collect();
    let scale = (p as f64).powf(c / 2.0);
    let rows: Vec<VdcRow> = ns
        .iter()
        .map(|&n| {
            let nd = Dd::from_u64(n);
            let h = complex_blocked_sum(powers.len(), |i| e_dd(nd * powers[i]));
            let bound = scale * (n as f64).sqrt();
            VdcRow { p, n, abs_h: h.norm(), bound, ratio: h.norm() / bound }
        })
        .collect();
    let worst = rows.iter().copied().max_by(|a, b| a.ratio.total_cmp(&b.ratio));
    Ok(VdcAudit { constant: worst.map_or(0.0, |w| w.ratio), worst, rows })
}

/// (|Σ ξ|², ((L+Q)/Q) Σ_{|q|<Q} (1 - |q|/Q) Σ_m ξ(m+q) conj(ξ(m))).
pub fn weyl_shift_check(xi: &[Complex<f64>], q: usize) -> Result<(f64, f64)> {
    if xi.is_empty() || q == 0 {
        return Err(Error::InvalidArgument("need a nonempty sequence and Q >= 1".into()));
    }
    let len = xi.len();
    let total = complex_blocked_sum(len, |i| xi[i]);
    let lhs = total.norm_sqr();
    let qf = q as f64;
    let mut acc = crate::sum::Neumaier::<f64>::new();
    for shift in -(q as i64 - 1)..=(q as i64 - 1) {
        let s = shift.unsigned_abs() as usize;
        if s >= len {
            continue;
        }
        let corr = complex_blocked_sum(len - s, |i| {
            let (a, b) = if shift >= 0 { (i + s, i) } else { (i, i + s) };
            xi[a] * xi[b].conj()
        });
        acc.add((1.0 - s as f64 / qf) * corr.re);
    }
    let rhs = (len as f64 + qf) / qf * acc.value();
    Ok((lhs, rhs))
}

/// Sign regime of f''_ll at one point of the combined phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeRow {
    pub r: i64,
    /// |r| / (v N^{γ-1})
    pub r_scaled: f64,
    pub pi1: f64,
    pub pi2: f64,
    pub f_ll: f64,
}

/// f''_ll(m, l) = π₁ - π₂ across a list of r values.
pub fn regime_scan(
    rs: &[i64],
    v: f64,
    t_big: f64,
    n: u64,
    m: u64,
    l: u64,
    exp: &RealExponent,
) -> Result<Vec<RegimeRow>> {
    let c = exp.c_f64();
    let g = exp.gamma_f64();
    let t = (m * l) as f64;
    let x = t_big - t.powf(c);
    if !(x > 0.0) {
        return Err(Error::PhaseDomainError { t, reason: "T - (ml)^c <= 0".into() });
    }
    let m2 = (m * m) as f64;
    let pi2 = m2 * v * (c - 1.0) * t_big * t.powf(c - 2.0) * x.powf(g - 2.0);
    let unit = v * (n as f64).powf(g - 1.0);
    Ok(rs
        .iter()
        .map(|&r| {
            let pi1 = m2 * r as f64 * c * (c - 1.0) * t.powf(c - 2.0);
            RegimeRow { r, r_scaled: (r as f64).abs() / unit, pi1, pi2, f_ll: pi1 - pi2 }
        })
        .collect())
}

/// Audit row for |W_z - V_z| against (v N^{γ-1}/Z) Σ (log p) g_z(p^c).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftAudit {
    pub z_index: u32,
    pub diff: f64,
    pub scale: f64,
    /// diff / scale, or 0 when the cup misses every prime.
    pub fitted: f64,
}

pub fn wz_vz_audit(ctx: &WContext, v: f64, cups: &CupSystem<f64>) -> Result<Vec<ShiftAudit>> {
    let vd = Dd::from_f64(v);
    let unit = v * (ctx.n as f64).powf(ctx.exp.gamma_f64() - 1.0) / cups.z() as f64;
    (0..2 * cups.z())
        .map(|z| {
            let diff = (ctx.eval_wz(vd, z, cups)? - ctx.eval_vz(vd, z, cups)?).norm();
            let scale = unit * ctx.cup_mass(z, cups)?;
            let fitted = if scale > 0.0 { diff / scale } else { 0.0 };
            Ok(ShiftAudit { z_index: z, diff, scale, fitted })
        })
        .collect()
}
