//! The exponential-smoothing estimator and the smoothed-count predictor it
//! generalizes.

use crate::bitseq::BitSequence;
use crate::error::{Error, Result};
use crate::real::{KahanSum, Real};
use crate::schedule::{Schedule, ScheduleCursor};

/// Distribution over `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<T> {
    pub p0: T,
    pub p1: T,
}

impl<T: Real> Prediction<T> {
    pub fn prob(&self, bit: bool) -> T {
        if bit {
            self.p1
        } else {
            self.p0
        }
    }
}

/// Sequential probability assignment by exponential smoothing.
///
/// After letter `x_k` the estimator applies
/// `p(x) <- alpha_k p(x) + (1 - alpha_k)` for the observed letter and
/// `p(x) <- alpha_k p(x)` for the other one.
///
/// Internally only the less likely letter's probability is stored, as a
/// natural log; the other probability is its complement. This keeps both
/// probabilities strictly inside `(0, 1)` and code lengths exact even after
/// long runs of one letter, where a plain `p1` would round to 0 or 1.
#[derive(Debug, Clone)]
pub struct EspEstimator<T> {
    minority: bool,
    ln_minor: T,
    cursor: ScheduleCursor<T>,
    codelen: KahanSum<T>,
}

impl<T: Real> EspEstimator<T> {
    /// Estimator with prior `p(1) = prior_p1`, `p(0) = 1 - prior_p1`.
    pub fn new(schedule: Schedule<T>, prior_p1: T) -> Result<Self> {
        if !(prior_p1 > T::zero() && prior_p1 < T::one()) {
            return Err(Error::InvalidProbability(prior_p1.to_f64_lossy()));
        }
        let (minority, p_minor) = if prior_p1 <= T::lit(0.5) {
            (true, prior_p1)
        } else {
            (false, T::one() - prior_p1)
        };
        Ok(Self {
            minority,
            ln_minor: p_minor.ln(),
            cursor: schedule.cursor(),
            codelen: KahanSum::new(),
        })
    }

    /// Estimator with the uniform prior.
    pub fn uniform(schedule: Schedule<T>) -> Self {
        Self::new(schedule, T::lit(0.5)).expect("uniform prior is valid")
    }

    pub fn schedule(&self) -> &Schedule<T> {
        self.cursor.schedule()
    }

    pub fn cursor(&self) -> &ScheduleCursor<T> {
        &self.cursor
    }

    /// Letters processed so far.
    pub fn steps(&self) -> usize {
        self.cursor.step()
    }

    /// Accumulated ideal code length in bits.
    pub fn code_length(&self) -> T {
        self.codelen.value()
    }

    /// The currently less likely letter (ties report `true`) and the natural
    /// log of its probability.
    pub fn minority(&self) -> (bool, T) {
        (self.minority, self.ln_minor)
    }

    pub fn predict(&self) -> Prediction<T> {
        let minor = self.ln_minor.exp();
        let major = T::one() - minor;
        if self.minority {
            Prediction { p0: major, p1: minor }
        } else {
            Prediction { p0: minor, p1: major }
        }
    }

    /// `p(1)` under the current prediction.
    pub fn p1(&self) -> T {
        self.predict().p1
    }

    /// `-log2 p(bit)` under the current prediction.
    pub fn cost(&self, bit: bool) -> T {
        if bit == self.minority {
            -self.ln_minor * T::LOG2_E()
        } else {
            -(-self.ln_minor.exp()).ln_1p() * T::LOG2_E()
        }
    }

    /// Codes `bit` under the current prediction, then adapts. Returns the
    /// code length contribution in bits.
    pub fn update(&mut self, bit: bool) -> T {
        let cost = self.cost(bit);
        self.codelen.add(cost);
        let alpha = self.cursor.advance();
        if bit == self.minority {
            let p = alpha * self.ln_minor.exp() + (T::one() - alpha);
            if p > T::lit(0.5) {
                // the observed letter becomes the majority; the other one
                // keeps alpha * (its old probability)
                self.ln_minor = alpha.ln() + (-self.ln_minor.exp()).ln_1p();
                self.minority = !self.minority;
            } else {
                self.ln_minor = p.ln();
            }
        } else {
            self.ln_minor = self.ln_minor + alpha.ln();
        }
        cost
    }

    /// Feeds every letter of `x`; returns the code length of this call.
    pub fn process(&mut self, x: &BitSequence) -> T {
        let mut total = KahanSum::new();
        for bit in x {
            total.add(self.update(bit));
        }
        total.value()
    }
}

/// Strategy that multiplies both letter counts by `lambda` and increments
/// the observed one, predicting `p(x) = s_x / t`.
#[derive(Debug, Clone)]
pub struct SmoothedCountPredictor<T> {
    s0: T,
    s1: T,
    total: T,
    lambda: T,
}

impl<T: Real> SmoothedCountPredictor<T> {
    pub fn new(s0: T, s1: T, lambda: T) -> Result<Self> {
        if !(s0 > T::zero() && s1 > T::zero()) {
            return Err(Error::InvalidParameter("smoothed counts must be positive".into()));
        }
        if !(lambda > T::zero() && lambda < T::one()) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must lie in (0, 1)")));
        }
        Ok(Self {
            s0,
            s1,
            total: s0 + s1,
            lambda,
        })
    }

    pub fn counts(&self) -> (T, T) {
        (self.s0, self.s1)
    }

    pub fn total(&self) -> T {
        self.total
    }

    pub fn predict(&self) -> Prediction<T> {
        Prediction {
            p0: self.s0 / self.total,
            p1: self.s1 / self.total,
        }
    }

    /// Returns the prediction made before seeing `bit`, then updates.
    pub fn predict_update(&mut self, bit: bool) -> Prediction<T> {
        let before = self.predict();
        self.s0 = self.lambda * self.s0;
        self.s1 = self.lambda * self.s1;
        if bit {
            self.s1 = self.s1 + T::one();
        } else {
            self.s0 = self.s0 + T::one();
        }
        self.total = self.lambda * self.total + T::one();
        before
    }
}
