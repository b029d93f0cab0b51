//! Thermometry of a bosonic mode through a cross-Kerr coupled probe.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupler;
pub mod envelopes;
pub mod error;
pub mod estimation;
pub mod numerics;
pub mod physics;
pub mod stochastic;

pub use error::{Result, ThermoError};
