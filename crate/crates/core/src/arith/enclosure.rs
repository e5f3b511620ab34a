//! Directed-rounding fixed-point enclosures of `base^(num/den)`.
//!
//! A quantity at scale `w` is an integer `v` standing for `v / 2^w`. Every
//! routine returns a lower and an upper bound, each rounded outward, so the
//! true value always lies between them.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Dyadic, Exponent};

/// Scale at which ln 2 is cached; must exceed every working scale.
const LN2_SCALE: u32 = 1600;

/// Guard bits added to the requested output precision.
const GUARD: u32 = 128;

#[inline]
pub(crate) fn shr_floor(a: &BigInt, k: u32) -> BigInt {
    a >> k
}

#[inline]
pub(crate) fn shr_ceil(a: &BigInt, k: u32) -> BigInt {
    -((-a) >> k)
}

#[inline]
fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Bounds on atanh(a/b) for 0 <= a/b <= 1/3, at scale `w`.
fn atanh_bounds(a: &BigInt, b: &BigInt, w: u32) -> (BigInt, BigInt) {
    let a2 = a * a;
    let b2 = b * b;
    let scaled = a << w;
    let mut t_lo = scaled.div_floor(b);
    let mut t_hi = div_ceil(&scaled, b);
    let mut lo = t_lo.clone();
    let mut hi = t_hi.clone();
    let mut k: u64 = 1;
    loop {
        t_lo = (&t_lo * &a2).div_floor(&b2);
        t_hi = div_ceil(&(&t_hi * &a2), &b2);
        if t_hi <= BigInt::one() {
            // remaining tail <= t_hi / (1 - q^2) <= 9/8 ulp
            hi += 2;
            break;
        }
        let denom = BigInt::from(2 * k + 1);
        lo += t_lo.div_floor(&denom);
        hi += div_ceil(&t_hi, &denom);
        k += 1;
    }
    (lo, hi)
}

fn ln2_cached() -> &'static (BigInt, BigInt) {
    static LN2: OnceLock<(BigInt, BigInt)> = OnceLock::new();
    LN2.get_or_init(|| {
        let (lo, hi) = atanh_bounds(&BigInt::one(), &BigInt::from(3), LN2_SCALE + 2);
        // ln 2 = 2 atanh(1/3)
        (shr_floor(&(lo << 1), 2), shr_ceil(&(hi << 1), 2))
    })
}

fn ln2_bounds(w: u32) -> (BigInt, BigInt) {
    assert!(w <= LN2_SCALE, "working scale {w} above cached ln 2 scale");
    let (lo, hi) = ln2_cached();
    (shr_floor(lo, LN2_SCALE - w), shr_ceil(hi, LN2_SCALE - w))
}

/// Bounds on ln(mant * 2^exp2) at scale `w`, for `mant >= 1`.
pub(crate) fn ln_bounds(x: &Dyadic, w: u32) -> (BigInt, BigInt) {
    debug_assert!(x.mant > 0);
    let j = 63 - x.mant.leading_zeros();
    let m = BigInt::from(x.mant);
    let pj = BigInt::one() << j;
    let (at_lo, at_hi) = atanh_bounds(&(&m - &pj), &(&m + &pj), w);
    let k = j as i64 + x.exp2 as i64;
    let (l2_lo, l2_hi) = ln2_bounds(w);
    let kb = BigInt::from(k);
    if k >= 0 {
        ((at_lo << 1) + &kb * l2_lo, (at_hi << 1) + &kb * l2_hi)
    } else {
        ((at_lo << 1) + &kb * l2_hi, (at_hi << 1) + &kb * l2_lo)
    }
}

/// Lower (`upper = false`) or upper bound on exp(x / 2^w), at scale `w`.
pub(crate) fn exp_bound(x: &BigInt, w: u32, upper: bool) -> BigInt {
    if x.is_negative() {
        let e = exp_bound(&(-x), w, !upper);
        let num = BigInt::one() << (2 * w);
        return if upper { div_ceil(&num, &e) } else { num.div_floor(&e) };
    }
    // reduce to r = x / 2^s < 2^-12, then square s times
    let int_bits = (x.bits() as i64 - w as i64).max(0) as u32;
    let s = int_bits + 12;
    let extra = 16 + s;
    let big_w = w + extra;
    let r = x << (extra - s);
    let one = BigInt::one() << big_w;
    let mut sum = one.clone();
    let mut term = one;
    let mut k: u64 = 1;
    loop {
        let num = &term * &r;
        let den = BigInt::from(k) << big_w;
        term = if upper { div_ceil(&num, &den) } else { num.div_floor(&den) };
        if term.is_zero() {
            break;
        }
        sum += &term;
        if upper && term <= BigInt::one() {
            sum += 1;
            break;
        }
        k += 1;
    }
    for _ in 0..s {
        let sq = &sum * &sum;
        sum = if upper { shr_ceil(&sq, big_w) } else { shr_floor(&sq, big_w) };
    }
    if upper {
        shr_ceil(&sum, extra)
    } else {
        shr_floor(&sum, extra)
    }
}

/// Enclosure `[lo, hi] / 2^p` of `base^exp / divisor`.
pub(crate) fn pow_enclosure(base: &Dyadic, exp: &Exponent, divisor: u64, p: u32) -> (BigInt, BigInt) {
    let w = p + GUARD;
    let (ln_lo, ln_hi) = ln_bounds(base, w);
    let num = BigInt::from(exp.num.clone());
    let den = BigInt::from(exp.den.clone());
    let x_lo = (ln_lo * &num).div_floor(&den);
    let x_hi = div_ceil(&(ln_hi * &num), &den);
    let v_lo = exp_bound(&x_lo, w, false);
    let v_hi = exp_bound(&x_hi, w, true);
    let d = BigInt::from(divisor);
    let v_lo = v_lo.div_floor(&d);
    let v_hi = div_ceil(&v_hi, &d);
    (shr_floor(&v_lo, GUARD), shr_ceil(&v_hi, GUARD))
}

/// Integer part and the fraction bits of a nonnegative scaled value.
pub(crate) fn split_scaled(v: &BigInt, p: u32) -> (BigInt, BigUint) {
    let int = shr_floor(v, p);
    let frac = v - (&int << p);
    (int, frac.to_biguint().unwrap_or_default())
}
