//! Smoothing-rate schedules `alpha_1, alpha_2, ...` and their running
//! products `beta_i = alpha_1 * ... * alpha_i`.
//!
//! Three schedules are provided:
//!
//! * [`Schedule::Fixed`]: `alpha_k = alpha` for every `k`,
//! * [`Schedule::Decaying`]: `alpha_k = exp(-pi / sqrt(12 (k + 1)))`, which
//!   approaches 1 slowly and needs no knowledge of the input length,
//! * [`Schedule::Count`]: the rates implied by multiplying letter counts by
//!   `lambda` before every increment, `alpha_k = (t_k - 1) / t_k` with
//!   `t_k = lambda t_{k-1} + 1` and `t_0 = 1 + lambda + ... + lambda^(m-1)`.
//!
//! The redundancy guarantees in [`crate::bounds`] assume every rate exceeds
//! 1/2. Schedules that break this are still usable; [`Schedule::violates_assumption`]
//! reports it so front ends can warn.

use std::fmt;

use crate::error::{Error, Result};
use crate::real::{KahanSum, Real};

/// Above this many steps a fixed-rate cursor derives `beta` from its log.
const FIXED_LOG_SPACE_AFTER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule<T> {
    Fixed { alpha: T },
    Decaying,
    Count { lambda: T, m: u32 },
}

/// Wire identifier used by the container header and config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum ScheduleKind {
    Fixed = 0,
    Decaying = 1,
    Count = 2,
}

impl ScheduleKind {
    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(Self::Fixed),
            1 => Ok(Self::Decaying),
            2 => Ok(Self::Count),
            other => Err(Error::UnknownSchedule(other)),
        }
    }

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Fixed => "fixed",
            Self::Decaying => "decaying",
            Self::Count => "count",
        }
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fixed" => Ok(Self::Fixed),
            "decaying" => Ok(Self::Decaying),
            "count" => Ok(Self::Count),
            other => Err(Error::InvalidParameter(format!("unknown schedule {other:?}"))),
        }
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Flat parameter record: variant id plus up to two parameters.
///
/// `param1` is `alpha` (fixed) or `lambda` (count), `param2` is `m` (count);
/// unused fields are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams {
    pub kind: ScheduleKind,
    pub param1: f64,
    pub param2: u32,
}

fn check_open_unit<T: Real>(name: &str, v: T) -> Result<T> {
    if v > T::zero() && v < T::one() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must lie in (0, 1)")))
    }
}

impl<T: Real> Schedule<T> {
    pub fn fixed(alpha: T) -> Result<Self> {
        Ok(Self::Fixed {
            alpha: check_open_unit("alpha", alpha)?,
        })
    }

    pub fn decaying() -> Self {
        Self::Decaying
    }

    pub fn count(lambda: T, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        Ok(Self::Count {
            lambda: check_open_unit("lambda", lambda)?,
            m,
        })
    }

    pub fn kind(&self) -> ScheduleKind {
        match self {
            Self::Fixed { .. } => ScheduleKind::Fixed,
            Self::Decaying => ScheduleKind::Decaying,
            Self::Count { .. } => ScheduleKind::Count,
        }
    }

    /// Smoothing rate `alpha_k` for `k >= 1`.
    pub fn rate_at(&self, k: usize) -> Result<T> {
        if k == 0 {
            return Err(Error::ZeroRateIndex);
        }
        Ok(match *self {
            Self::Fixed { alpha } => alpha,
            Self::Decaying => decaying_log_rate::<T>(k).exp(),
            Self::Count { lambda, m } => {
                // (t_k - 1) / t_k with t_k = (1 - lambda^(k+m)) / (1 - lambda)
                let top = lambda.powf(T::from_count(k) + T::lit(f64::from(m)));
                lambda * (T::one() - top / lambda) / (T::one() - top)
            }
        })
    }

    /// Count smoothing's initial total `t_0 = (1 - lambda^m) / (1 - lambda)`;
    /// `None` for the other schedules.
    pub fn initial_total(&self) -> Option<T> {
        match *self {
            Self::Count { lambda, m } => Some(geometric_total(lambda, m)),
            _ => None,
        }
    }

    /// Every schedule here has non-decreasing rates, so the first rate
    /// decides whether all rates exceed 1/2.
    pub fn violates_assumption(&self) -> bool {
        self.rate_at(1).map(|a| a <= T::lit(0.5)).unwrap_or(true)
    }

    pub fn cursor(&self) -> ScheduleCursor<T> {
        ScheduleCursor::new(*self)
    }

    /// `beta_0, ..., beta_{n-1}`.
    pub fn betas(&self, n: usize) -> Vec<T> {
        let mut cursor = self.cursor();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(cursor.beta());
            cursor.advance();
        }
        out
    }

    pub fn params(&self) -> ScheduleParams {
        let (param1, param2) = match *self {
            Self::Fixed { alpha } => (alpha.to_f64_lossy(), 0),
            Self::Decaying => (0.0, 0),
            Self::Count { lambda, m } => (lambda.to_f64_lossy(), m),
        };
        ScheduleParams {
            kind: self.kind(),
            param1,
            param2,
        }
    }

    pub fn from_params(p: &ScheduleParams) -> Result<Self> {
        match p.kind {
            ScheduleKind::Fixed => Self::fixed(T::lit(p.param1)),
            ScheduleKind::Decaying => Ok(Self::Decaying),
            ScheduleKind::Count => Self::count(T::lit(p.param1), p.param2),
        }
    }
}

impl<T: Real> fmt::Display for Schedule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed { alpha } => write!(f, "fixed(alpha={alpha})"),
            Self::Decaying => f.write_str("decaying"),
            Self::Count { lambda, m } => write!(f, "count(lambda={lambda}, m={m})"),
        }
    }
}

#[inline]
fn decaying_log_rate<T: Real>(k: usize) -> T {
    -T::PI() / (T::lit(12.0) * T::from_count(k + 1)).sqrt()
}

fn geometric_total<T: Real>(lambda: T, m: u32) -> T {
    (T::one() - lambda.powi(m as i32)) / (T::one() - lambda)
}

/// Closed form `beta_i = (1 - lambda^m) lambda^i / (1 - lambda^(m+i))` of the
/// count-smoothing rate product.
pub fn count_beta_closed_form<T: Real>(lambda: T, m: u32, i: usize) -> T {
    let lm = lambda.powi(m as i32);
    let li = lambda.powf(T::from_count(i));
    (T::one() - lm) * li / (T::one() - lm * li)
}

/// Sequential position in a schedule: step `k`, `beta_k` and (count
/// smoothing only) the smoothed total `t_k`.
#[derive(Debug, Clone)]
pub struct ScheduleCursor<T> {
    schedule: Schedule<T>,
    k: usize,
    beta: T,
    ln_beta: KahanSum<T>,
    total: T,
}

impl<T: Real> ScheduleCursor<T> {
    pub fn new(schedule: Schedule<T>) -> Self {
        Self {
            schedule,
            k: 0,
            beta: T::one(),
            ln_beta: KahanSum::new(),
            total: schedule.initial_total().unwrap_or(T::zero()),
        }
    }

    pub fn schedule(&self) -> &Schedule<T> {
        &self.schedule
    }

    /// Number of rates consumed so far.
    pub fn step(&self) -> usize {
        self.k
    }

    /// `beta_k`.
    pub fn beta(&self) -> T {
        match self.schedule {
            Schedule::Fixed { .. } if self.k > FIXED_LOG_SPACE_AFTER => self.ln_beta().exp(),
            Schedule::Count { .. } => self.ln_beta().exp(),
            _ => self.beta,
        }
    }

    /// `ln beta_k`, which stays finite long after `beta_k` underflows.
    pub fn ln_beta(&self) -> T {
        match self.schedule {
            Schedule::Fixed { alpha } => T::from_count(self.k) * alpha.ln(),
            // alpha_j = lambda t_{j-1} / t_j telescopes to k ln lambda + ln t_0 - ln t_k
            Schedule::Count { lambda, m } => {
                T::from_count(self.k) * lambda.ln() + geometric_total(lambda, m).ln() - self.total.ln()
            }
            Schedule::Decaying => self.ln_beta.value(),
        }
    }

    /// Smoothed total `t_k` (count smoothing only).
    pub fn total(&self) -> Option<T> {
        matches!(self.schedule, Schedule::Count { .. }).then_some(self.total)
    }

    /// Moves to step `k + 1` and returns `alpha_{k+1}`.
    pub fn advance(&mut self) -> T {
        let (alpha, ln_alpha) = match self.schedule {
            Schedule::Fixed { alpha } => (alpha, alpha.ln()),
            Schedule::Decaying => {
                let ln_alpha = decaying_log_rate::<T>(self.k + 1);
                (ln_alpha.exp(), ln_alpha)
            }
            Schedule::Count { lambda, .. } => {
                let prev = self.total;
                self.total = lambda * prev + T::one();
                ((self.total - T::one()) / self.total, (lambda * prev / self.total).ln())
            }
        };
        self.k += 1;
        self.beta = self.beta * alpha;
        self.ln_beta.add(ln_alpha);
        alpha
    }
}

/// A fixed rate minimizing the fixed-rate piecewise-stationary bound for a
/// given length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalAlpha<T> {
    pub alpha: T,
    /// False when `alpha <= 1/2`, which happens for `n < 5`.
    pub satisfies_assumption: bool,
}

/// `exp(-pi / sqrt(6 (n - 1)))` for `n >= 2`.
pub fn optimal_fixed_alpha<T: Real>(n: usize) -> Result<OptimalAlpha<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "optimal fixed rate needs n >= 2, got {n}"
        )));
    }
    let alpha = (-T::PI() / (T::lit(6.0) * T::from_count(n - 1)).sqrt()).exp();
    Ok(OptimalAlpha {
        alpha,
        satisfies_assumption: alpha > T::lit(0.5),
    })
}
