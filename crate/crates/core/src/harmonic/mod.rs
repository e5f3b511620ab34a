//! Trigonometric approximation of the sawtooth and smooth cup partitions.

pub mod cups;
pub mod vaaler;

pub use cups::{cup_value, irwin_hall_cdf, CupSystem};
pub use vaaler::VaalerSystem;
