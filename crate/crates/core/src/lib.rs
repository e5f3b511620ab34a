//! Numerical laboratory for the equation `[p^c] + [m^c] = N` with `p` prime
//! and `m` almost prime.
//!
//! The kernels that only need floating-point or field arithmetic are generic
//! over [`scalar::Real`] / [`scalar::Field`]; the aliases below fix `f64`.

pub mod arith;
pub mod dd;
pub mod error;
pub mod expsum;
pub mod harmonic;
pub mod rosser;
pub mod scalar;
pub mod sieve;
pub mod solver;
pub mod sum;
pub mod vaughan;

pub use arith::{floor_pow, frac_pow, rho, CertifiedFloor, Exponent, ExponentMode, FracPow, RealExponent};
pub use dd::Dd;
pub use error::{Error, Result};
pub use harmonic::{CupSystem, VaalerSystem};
pub use rosser::{RosserWeights, SieveConfig};
pub use scalar::{Field, Real};
pub use sieve::{FactorTable, PrimeSegment};
pub use solver::{PipelineParams, RepresentationResult};

pub type Vaaler = VaalerSystem<f64>;
pub type Cups = CupSystem<f64>;
pub type Vaaler32 = VaalerSystem<f32>;
pub type Cups32 = CupSystem<f32>;
pub type Sum = sum::Neumaier<f64>;
pub type CSum = sum::ComplexSum<f64>;

/// Library version, echoed in output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
