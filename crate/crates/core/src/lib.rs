//! Exponential-smoothing probability estimation for binary sequences.
//!
//! The estimator keeps a single distribution over `{0, 1}`. After every
//! letter both probabilities are scaled by the current smoothing rate
//! `alpha_k` and the observed letter receives the remaining `1 - alpha_k`.
//! Around that core the crate provides:
//!
//! * [`schedule`]: fixed, decaying and count-smoothing rate sequences,
//! * [`bounds`]: closed-form redundancy bounds against empirical entropy and
//!   piecewise-stationary competitors, plus exhaustive oracles,
//! * [`experiment`]: a seeded worst-case redundancy study over an instance class,
//! * [`codec`]: a range coder and file container driven by the estimator.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`, which is what the codec and the
//! experiment harness use.

pub mod bitseq;
pub mod bounds;
pub mod codec;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod real;
pub mod schedule;

pub use bitseq::{BitSequence, Partition};
pub use error::{Error, Result};
pub use real::Real;

/// Double-precision smoothing schedule.
pub type Schedule = schedule::Schedule<f64>;
/// Single-precision smoothing schedule.
pub type Schedule32 = schedule::Schedule<f32>;
/// Double-precision schedule cursor.
pub type ScheduleCursor = schedule::ScheduleCursor<f64>;
/// Double-precision estimator.
pub type Estimator = estimator::EspEstimator<f64>;
/// Single-precision estimator.
pub type Estimator32 = estimator::EspEstimator<f32>;
/// Double-precision smoothed-count predictor.
pub type SmoothedCountPredictor = estimator::SmoothedCountPredictor<f64>;
/// Double-precision table of log rate products.
pub type BetaTable = bounds::BetaTable<f64>;
