//! Certified real-exponent arithmetic: exact `[n^c]`, `{n^c}`, `ρ(t)` and
//! exact counts of `m` with `lo <= m^(1/γ) < hi`.
//!
//! Exponents are exact positive rationals. A value `base^(a/b) / d` is
//! resolved in three stages:
//!
//! 1. exact arithmetic when the power is rational (`base` a perfect `b`-th power);
//! 2. a double-double screen with a budgeted relative error of 2^-75;
//! 3. a ladder of directed-rounding enclosures at 64, 128, ..., 1024
//!    fractional bits, stopping once no integer lies inside the enclosure.

mod enclosure;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default magnitude limit for integer parts: 2^63 - 1.
pub const DEFAULT_LIMIT: u64 = i64::MAX as u64;
/// First rung of the interval ladder (fractional bits).
pub const BASE_BITS: u32 = 64;
/// Last rung of the interval ladder.
pub const MAX_BITS: u32 = 1024;
/// Absolute error promised by [`frac_pow`].
pub const FRAC_ERROR: f64 = 8.881_784_197_001_252e-16; // 2^-50

const DD_REL_ERR: f64 = 2.646_977_960_169_689e-23; // 2^-75

/// Nonnegative dyadic rational `mant * 2^exp2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dyadic {
    pub mant: u64,
    pub exp2: i32,
}

impl Dyadic {
    pub fn from_u64(n: u64) -> Self {
        Self { mant: n, exp2: 0 }.normalized()
    }

    /// Exact conversion of a finite nonnegative f64.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::InvalidArgument(format!("base must be finite and >= 0, got {x}")));
        }
        let (m, e, _) = x.integer_decode();
        Ok(Self { mant: m, exp2: e as i32 }.normalized())
    }

    fn normalized(self) -> Self {
        if self.mant == 0 {
            return Self { mant: 0, exp2: 0 };
        }
        let tz = self.mant.trailing_zeros();
        Self { mant: self.mant >> tz, exp2: self.exp2 + tz as i32 }
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0
    }

    fn to_dd(self) -> Dd {
        Dd::from_u64(self.mant).ldexp(self.exp2)
    }
}

/// An exact positive rational exponent `num / den` in lowest terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Exponent {
    pub(crate) num: BigUint,
    pub(crate) den: BigUint,
    dd: Dd,
}

impl Exponent {
    pub fn from_ratio(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidArgument("exponent must be a positive ratio".into()));
        }
        Ok(Self::from_big(BigUint::from(num), BigUint::from(den)))
    }

    /// The exact value of a positive finite f64.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::InvalidArgument(format!("exponent must be positive and finite, got {x}")));
        }
        let (m, e, _) = x.integer_decode();
        let m = BigUint::from(m);
        Ok(if e >= 0 {
            Self::from_big(m << e as u32, BigUint::one())
        } else {
            Self::from_big(m, BigUint::one() << (-e) as u32)
        })
    }

    fn from_big(num: BigUint, den: BigUint) -> Self {
        let g = num.gcd(&den);
        let num = num / &g;
        let den = den / &g;
        let r = BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()));
        let hi = r.to_f64().unwrap_or(f64::NAN);
        let lo = BigRational::from_float(hi)
            .map(|h| (&r - h).to_f64().unwrap_or(0.0))
            .unwrap_or(0.0);
        Self { num, den, dd: Dd::new(hi, lo) }
    }

    pub fn recip(&self) -> Self {
        Self::from_big(self.den.clone(), self.num.clone())
    }

    pub fn to_f64(&self) -> f64 {
        self.dd.to_f64()
    }

    pub fn to_dd(&self) -> Dd {
        self.dd
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    fn check_range(&self) -> Result<()> {
        let v = self.dd.hi;
        if v > 0.0 && v < 3.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("exponent {v} outside (0, 3)")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExponentMode {
    /// 1 < c < 29/28, the range covered by the representation theorem.
    Theorem,
    /// 29/28 <= c < 3/2, experiments only.
    General,
}

/// The Piatetski-Shapiro exponent `c` together with `γ = 1/c`, both exact.
#[derive(Debug, Clone, PartialEq)]
pub struct RealExponent {
    c: Exponent,
    gamma: Exponent,
    mode: ExponentMode,
}

impl RealExponent {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 1.0 && c < 1.5) {
            return Err(Error::InvalidArgument(format!("c must lie in (1, 3/2), got {c}")));
        }
        let ce = Exponent::from_f64(c)?;
        let mode = if 28.0 * c < 29.0 { ExponentMode::Theorem } else { ExponentMode::General };
        Ok(Self { gamma: ce.recip(), c: ce, mode })
    }

    pub fn c(&self) -> &Exponent {
        &self.c
    }

    pub fn gamma(&self) -> &Exponent {
        &self.gamma
    }

    pub fn c_f64(&self) -> f64 {
        self.c.to_f64()
    }

    pub fn gamma_f64(&self) -> f64 {
        self.gamma.to_f64()
    }

    pub fn mode(&self) -> ExponentMode {
        self.mode
    }
}

/// `[n^c]` with a proof that the enclosing interval excludes the next integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CertifiedFloor {
    pub value: u64,
    /// 0 for exact rational evaluation, 106 for the double-double screen,
    /// otherwise the fractional bits of the interval rung that succeeded.
    pub precision_bits_used: u32,
    pub certified: bool,
}

/// `{n^c}` with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FracPow {
    pub value: f64,
    pub error_bound: f64,
}

/// A resolved value `x = base^exp / divisor`: its integer part, an
/// approximation of the fractional part, and whether `x` is an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerValue {
    pub floor: u64,
    pub frac: f64,
    pub frac_err: f64,
    /// True iff `x` is exactly an integer (only possible on the exact route).
    pub integral: bool,
    pub bits: u32,
}

impl PowerValue {
    pub fn ceil(&self) -> u64 {
        if self.integral {
            self.floor
        } else {
            self.floor + 1
        }
    }

    /// Approximation of `x` itself.
    pub fn approx(&self) -> f64 {
        self.floor as f64 + self.frac
    }

    /// `ρ(-x) = 1/2 - {-x}`, using the certified integer part.
    pub fn rho_neg(&self) -> f64 {
        if self.integral {
            0.5
        } else {
            self.frac - 0.5
        }
    }
}

fn integer_root(b: u64, k: u32) -> Option<u64> {
    if k == 1 {
        return Some(b);
    }
    let guess = (b as f64).powf(1.0 / k as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| r.checked_pow(k) == Some(b))
}

/// Exact value of `base^exp` when it is rational.
fn exact_power(base: &Dyadic, exp: &Exponent) -> Option<BigRational> {
    if base.mant == 1 {
        // a power of two: rational iff den divides exp2 * num
        let t = BigInt::from(base.exp2) * BigInt::from(exp.num.clone());
        let (q, r) = t.div_rem(&BigInt::from(exp.den.clone()));
        if !r.is_zero() {
            return None;
        }
        let e = q.to_i32()?;
        let two = BigRational::from_integer(BigInt::from(2));
        return Some(num_traits::pow::Pow::pow(two, e));
    }
    let b = exp.den.to_u32().filter(|&b| b <= 64)?;
    let a = exp.num.to_u32()?;
    if base.exp2 % b as i32 != 0 {
        return None;
    }
    let root = integer_root(base.mant, b)?;
    let e2 = base.exp2 / b as i32 * a as i32;
    let mut v = BigRational::from_integer(num_traits::pow(BigInt::from(root), a as usize));
    if e2 >= 0 {
        v *= BigRational::from_integer(BigInt::one() << e2 as u32);
    } else {
        v /= BigRational::from_integer(BigInt::one() << (-e2) as u32);
    }
    Some(v)
}

fn overflow(what: impl Into<String>, limit: u64) -> Error {
    Error::OverflowBeyondLimit { what: what.into(), limit }
}

/// Resolve `base^exp / divisor`.
///
/// With `need_frac`, the fractional part is also returned to within
/// [`FRAC_ERROR`]; otherwise only the integer part is certified.
pub fn power_value(
    base: &Dyadic,
    exp: &Exponent,
    divisor: u64,
    need_frac: bool,
    limit: u64,
) -> Result<PowerValue> {
    exp.check_range()?;
    if divisor == 0 {
        return Err(Error::InvalidArgument("divisor must be >= 1".into()));
    }
    if base.is_zero() {
        return Ok(PowerValue { floor: 0, frac: 0.0, frac_err: 0.0, integral: true, bits: 0 });
    }
    let label = || format!("{}*2^{}^{} / {}", base.mant, base.exp2, exp.to_f64(), divisor);

    if let Some(v) = exact_power(base, exp) {
        let v = v / BigRational::from_integer(BigInt::from(divisor));
        let fl = v.floor().to_integer();
        let floor = fl.to_u64().filter(|&f| f <= limit).ok_or_else(|| overflow(label(), limit))?;
        let fr = v - BigRational::from_integer(fl);
        let integral = fr.is_zero();
        return Ok(PowerValue {
            floor,
            frac: fr.to_f64().unwrap_or(0.0),
            frac_err: if integral { 0.0 } else { f64::EPSILON },
            integral,
            bits: 0,
        });
    }

    // double-double screen
    let v = base.to_dd().powr(exp.to_dd()) / Dd::from_u64(divisor);
    if v.is_finite() {
        let err = v.hi.abs() * DD_REL_ERR + 1e-300;
        let lo = v.add_f64(-err);
        let hi = v.add_f64(err);
        if lo.hi > limit as f64 * 1.01 {
            return Err(overflow(label(), limit));
        }
        let fl = lo.floor();
        if fl == hi.floor() && lo > fl && (!need_frac || err <= FRAC_ERROR / 4.0) && fl.hi < limit as f64 {
            let floor = fl.hi as i128 + fl.lo as i128;
            if floor >= 0 && floor as u128 <= limit as u128 {
                let frac = (v - fl).to_f64();
                return Ok(PowerValue {
                    floor: floor as u64,
                    frac,
                    frac_err: err + f64::EPSILON,
                    integral: false,
                    bits: 106,
                });
            }
        }
    }

    // interval ladder
    let mut bits = BASE_BITS;
    while bits <= MAX_BITS {
        let (lo, hi) = enclosure::pow_enclosure(base, exp, divisor, bits);
        let (lo_int, lo_frac) = enclosure::split_scaled(&lo, bits);
        let hi_int = enclosure::shr_floor(&hi, bits);
        let lim = BigInt::from(limit);
        if lo_int > lim {
            return Err(overflow(label(), limit));
        }
        let width_ok = !need_frac || {
            let width = &hi - &lo;
            width.bits() + 52 <= bits as u64
        };
        if lo_int == hi_int && !lo_frac.is_zero() && width_ok {
            let floor = lo_int.to_u64().expect("checked against limit");
            let mid = (&lo + &hi) >> 1u32;
            let (_, mid_frac) = enclosure::split_scaled(&mid, bits);
            let frac = big_frac_to_f64(&mid_frac, bits);
            return Ok(PowerValue { floor, frac, frac_err: FRAC_ERROR / 2.0, integral: false, bits });
        }
        bits *= 2;
    }
    Err(Error::PrecisionExhausted { what: label(), bits: MAX_BITS })
}

fn big_frac_to_f64(frac: &BigUint, bits: u32) -> f64 {
    let keep = 64u32.min(bits);
    let top = (frac >> (bits - keep)).to_u64().unwrap_or(0);
    top as f64 / 2f64.powi(keep as i32)
}

fn check_base(n: u64) -> Result<Dyadic> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    Ok(Dyadic::from_u64(n))
}

/// Exact integer part of `n^exp`.
pub fn floor_pow(n: u64, exp: &Exponent) -> Result<CertifiedFloor> {
    floor_pow_with_limit(n, exp, DEFAULT_LIMIT)
}

pub fn floor_pow_with_limit(n: u64, exp: &Exponent, limit: u64) -> Result<CertifiedFloor> {
    let v = power_value(&check_base(n)?, exp, 1, false, limit)?;
    Ok(CertifiedFloor { value: v.floor, precision_bits_used: v.bits, certified: true })
}

/// Convenience wrapper taking a raw exponent.
pub fn floor_pow_f64(n: u64, exp: f64) -> Result<CertifiedFloor> {
    floor_pow(n, &Exponent::from_f64(exp)?)
}

/// `{n^exp}` with absolute error at most 2^-50.
pub fn frac_pow(n: u64, exp: &Exponent) -> Result<FracPow> {
    let v = power_value(&check_base(n)?, exp, 1, true, DEFAULT_LIMIT)?;
    Ok(FracPow { value: v.frac, error_bound: v.frac_err.min(FRAC_ERROR) })
}

pub fn frac_pow_f64(n: u64, exp: f64) -> Result<FracPow> {
    frac_pow(n, &Exponent::from_f64(exp)?)
}

/// `ρ(t) = 1/2 - {t}`.
pub fn rho<T: Real>(t: T) -> T {
    T::lit(0.5) - (t - t.floor())
}

/// Number of `m >= 1` with `d | m` and `lo <= m^(1/gamma) < hi`.
///
/// Equivalent to counting multiples of `d` in `[lo^gamma, hi^gamma)`, which is
/// `⌈hi^γ/d⌉ - max(⌈lo^γ/d⌉, 1)` with both ceilings certified.
pub fn count_in_power_interval(d: u64, lo: f64, hi: f64, gamma: &Exponent) -> Result<u64> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be >= 1".into()));
    }
    if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 <= lo < hi, got lo = {lo}, hi = {hi}")));
    }
    let a = power_value(&Dyadic::from_f64(lo)?, gamma, d, false, DEFAULT_LIMIT)?.ceil().max(1);
    let b = power_value(&Dyadic::from_f64(hi)?, gamma, d, false, DEFAULT_LIMIT)?.ceil();
    Ok(b.saturating_sub(a))
}

/// The unique `m` with `[m^c] = k`, if any, using `m = ⌈k^γ⌉`.
pub fn root_of_floor(k: u64, exp: &RealExponent) -> Result<Option<u64>> {
    if k == 0 {
        return Ok(None);
    }
    let count = count_in_power_interval(1, k as f64, (k + 1) as f64, exp.gamma())?;
    if count == 0 {
        return Ok(None);
    }
    let m = power_value(&Dyadic::from_u64(k), exp.gamma(), 1, false, DEFAULT_LIMIT)?.ceil();
    Ok(Some(m))
}

/// `[m^c]` for `m = 0..=upto`, evaluated in parallel.
pub fn floor_table(exp: &Exponent, upto: u64) -> Result<Vec<u64>> {
    (0..=upto)
        .into_par_iter()
        .map(|m| if m == 0 { Ok(0) } else { floor_pow(m, exp).map(|f| f.value) })
        .collect()
}
