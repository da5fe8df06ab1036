//! Downlink coverage probability of a UAV aerial-base-station network.
//!
//! UAVs form a homogeneous 2D Poisson point process at a common altitude and a
//! ground user at the origin associates with the nearest one. The crate
//! provides
//!
//! * [`channel`]: the height-dependent SUI path-loss exponent, path gain and
//!   unit-mean fading samplers,
//! * [`analytic`]: Rayleigh-fading coverage by quadrature and its closed forms,
//! * [`montecarlo`]: a seeded, parallel simulator used as ground truth, plus a
//!   semi-analytic Nakagami-m estimator,
//! * [`optimize`]: optimal UAV density and optimal altitude solvers.
//!
//! All quantities are SI and linear (meters, UAVs per square meter, power
//! ratios). Conversions from dB and km⁻² live in [`units`].

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
mod error;
pub mod montecarlo;
pub mod optimize;
pub mod quadrature;
pub mod units;

pub use error::{Error, Result};
