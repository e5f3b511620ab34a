//! Compensated accumulation and a deterministic blocked reduction.
//!
//! Every long sum in the crate goes through [`Neumaier`] or [`ComplexSum`].
//! Parallel sums split the index range into fixed-size blocks, sum each block
//! sequentially and merge the block results with a fixed pairwise tree, so the
//! result does not depend on how many worker threads ran.

use num_complex::Complex;
use rayon::prelude::*;

use crate::scalar::Real;

/// Block length used by [`blocked_sum`]. The reduction tree depends only on this.
pub const BLOCK: usize = 4096;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier<T: Real> {
    sum: T,
    comp: T,
}

impl<T: Real> Neumaier<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }

    pub fn sum_iter<I: IntoIterator<Item = T>>(iter: I) -> T {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc.value()
    }
}

/// Compensated complex accumulator (independent Neumaier sums per component).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum<T: Real> {
    re: Neumaier<T>,
    im: Neumaier<T>,
}

impl<T: Real> ComplexSum<T> {
    pub fn new() -> Self {
        Self { re: Neumaier::new(), im: Neumaier::new() }
    }

    #[inline]
    pub fn add(&mut self, z: Complex<T>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &Self) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re.value(), self.im.value())
    }
}

/// Anything that can be merged in a reduction tree.
pub trait Accumulator: Send + Sized {
    fn merge_from(&mut self, other: &Self);
}

impl<T: Real> Accumulator for Neumaier<T> {
    fn merge_from(&mut self, other: &Self) {
        self.merge(other);
    }
}

impl<T: Real> Accumulator for ComplexSum<T> {
    fn merge_from(&mut self, other: &Self) {
        self.merge(other);
    }
}

/// Merge partial accumulators pairwise: (0,1), (2,3), ... until one remains.
pub fn pairwise_merge<A: Accumulator>(mut parts: Vec<A>) -> Option<A> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.merge_from(&b);
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop()
}

/// Deterministic parallel reduction over `0..len`.
///
/// `fold` receives a fresh accumulator and a block range; blocks are merged
/// pairwise in index order.
pub fn blocked_sum<A, F>(len: usize, init: impl Fn() -> A + Sync, fold: F) -> A
where
    A: Accumulator,
    F: Fn(&mut A, std::ops::Range<usize>) + Sync,
{
    let blocks = len.div_ceil(BLOCK);
    let parts: Vec<A> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = init();
            fold(&mut acc, b * BLOCK..((b + 1) * BLOCK).min(len));
            acc
        })
        .collect();
    pairwise_merge(parts).unwrap_or_else(init)
}

/// Compensated complex sum of `term(i)` for `i` in `0..len`, deterministic
/// regardless of the worker count.
pub fn complex_blocked_sum<F>(len: usize, term: F) -> Complex<f64>
where
    F: Fn(usize) -> Complex<f64> + Sync,
{
    blocked_sum(len, ComplexSum::<f64>::new, |acc, r| {
        for i in r {
            acc.add(term(i));
        }
    })
    .value()
}

/// Real counterpart of [`complex_blocked_sum`].
pub fn real_blocked_sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    blocked_sum(len, Neumaier::<f64>::new, |acc, r| {
        for i in r {
            acc.add(term(i));
        }
    })
    .value()
}

/// Run `f` on a pool of `shards` threads (0 means the global pool).
pub fn with_shards<R: Send>(shards: usize, f: impl FnOnce() -> R + Send) -> R {
    if shards == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(shards)
        .build()
        .expect("thread pool")
        .install(f)
}
