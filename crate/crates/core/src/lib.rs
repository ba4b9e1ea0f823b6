//! Half Pound Filter family for hiding animation-clip discontinuities.
//!
//! * [`filter`]: per-sample kernels (Half Pound Filter, stacked variants,
//!   1 Euro Filter).
//! * [`tuning`]: parameter estimation from clip data and the Gain Blend
//!   schedule.
//! * [`policy`]: derivative-bound triggering and recovery around any
//!   smoother.
//! * [`baselines`]: cross-fade, dead blending and quintic inertialization.
//! * [`metrics`]: windowed MSE and NPSS.
//! * [`anim_io`]: BVH, clip joining, the synthetic benchmark and CSV.
//! * [`bench`]: the end-to-end comparison used by the CLI.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar for the common cases.

// `!(x > 0)` style checks are used on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anim_io;
pub mod baselines;
pub mod bench;
pub mod channel;
pub mod error;
pub mod filter;
pub mod kinematics;
pub mod metrics;
pub mod params_file;
pub mod policy;
pub mod scalar;
pub mod spectrum;
pub mod tuning;

pub use channel::Channel;
pub use error::{Error, Result};
pub use scalar::Real;

pub type Channel64 = Channel<f64>;
pub type Channel32 = Channel<f32>;
pub type HpfParams64 = filter::HpfParams<f64>;
pub type HpfParams32 = filter::HpfParams<f32>;
pub type HpfState64 = filter::HpfState<f64>;
pub type HpfState32 = filter::HpfState<f32>;
