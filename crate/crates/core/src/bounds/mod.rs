//! Closed-form redundancy bounds for the exponential-smoothing estimator.
//!
//! All functions report bits. Priors enter through `p_min = min(p(0), p(1))`
//! or `p_major = max(p(0), p(1))`, so either orientation of a prior is handled.
//! The bounds are proven for schedules whose rates all exceed 1/2; callers
//! are expected to check [`Schedule::violates_assumption`] when that matters.

pub mod oracle;

use crate::bitseq::{entropy_from_counts, BitSequence, Partition};
use crate::error::{Error, Result};
use crate::estimator::EspEstimator;
use crate::real::{log2_inv_one_minus, Real};
use crate::schedule::Schedule;

/// `ln beta_0, ..., ln beta_{len-1}` for a schedule.
///
/// Bounds only ever need `beta` inside logarithms and ratios, so the table
/// stores logs and stays usable after `beta` itself underflows.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaTable<T> {
    ln_betas: Vec<T>,
}

impl<T: Real> BetaTable<T> {
    pub fn new(schedule: &Schedule<T>, len: usize) -> Self {
        let mut cursor = schedule.cursor();
        let mut ln_betas = Vec::with_capacity(len);
        for _ in 0..len {
            ln_betas.push(cursor.ln_beta());
            cursor.advance();
        }
        Self { ln_betas }
    }

    /// From plain products `beta_0, beta_1, ...`.
    pub fn from_betas(betas: &[T]) -> Self {
        Self {
            ln_betas: betas.iter().map(|b| b.ln()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ln_betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_betas.is_empty()
    }

    pub fn ln_beta(&self, i: usize) -> T {
        self.ln_betas[i]
    }

    pub fn beta(&self, i: usize) -> T {
        self.ln_betas[i].exp()
    }

    fn require(&self, need: usize) -> Result<()> {
        if self.len() < need {
            return Err(Error::BetaTableTooShort { need, got: self.len() });
        }
        Ok(())
    }
}

/// Shared inputs of the corollary bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInput<T> {
    /// Sequence length.
    pub n: usize,
    /// Number of competitor segments `|S|`.
    pub segments: usize,
    /// `min(p(0), p(1))`, or the class floor when bounding a class of priors.
    pub p_min: T,
}

impl<T: Real> BoundInput<T> {
    pub fn new(n: usize, segments: usize, p_min: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if segments == 0 {
            return Err(Error::InvalidParameter("segment count must be at least 1".into()));
        }
        if !(p_min > T::zero() && p_min <= T::lit(0.5)) {
            return Err(Error::InvalidParameter(format!("p_min = {p_min} must lie in (0, 0.5]")));
        }
        Ok(Self { n, segments, p_min })
    }
}

/// Redundancy bound against the empirical entropy of the whole sequence.
///
/// `p_major` is `max(p(0), p(1))`; `betas` must hold `beta_0..beta_{n-1}`.
/// The deterministic branch is `sum_{i<n} log 1/(1 - p_major beta_i)`, the
/// other branch is `log 1/(p_major beta_{n-1}) + sum_{i<n-1} log 1/(1 - p_major beta_i) - n H(1/n)`.
pub fn theorem1_bound<T: Real>(n: usize, p_major: T, betas: &BetaTable<T>, deterministic: bool) -> Result<T> {
    betas.require(n)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !deterministic && n < 2 {
        return Err(Error::SequenceTooShort { need: 2, got: n });
    }
    let head = |upto: usize| -> T { (0..upto).map(|i| log2_inv_one_minus(p_major * betas.beta(i))).sum() };
    if deterministic {
        Ok(head(n))
    } else {
        let last = -(p_major.ln() + betas.ln_beta(n - 1)) * T::LOG2_E();
        Ok(last + head(n - 1) - entropy_from_counts::<T>(1, n))
    }
}

/// Redundancy bound against a piecewise-stationary competitor with partition
/// `partition`: `|S| log 1/(p_min beta_{n-1}) + sum_{(a,b]} sum_{a<i<b} log 1/(1 - beta_i / beta_a)`.
pub fn theorem3_bound<T: Real>(p_min: T, partition: &Partition, betas: &BetaTable<T>) -> Result<T> {
    let n = partition.n();
    betas.require(n)?;
    let s = T::from_count(partition.segment_count());
    let mut total = s * -(p_min.ln() + betas.ln_beta(n - 1)) * T::LOG2_E();
    for (a, b) in partition.segments() {
        for i in a + 1..b {
            let ratio_ln = betas.ln_beta(i) - betas.ln_beta(a);
            total = total - (-ratio_ln.exp_m1()).ln() * T::LOG2_E();
        }
    }
    Ok(total)
}

/// `(pi log2 e)^2 / (6 log2(1/alpha))`, an upper bound on
/// `sum_{1<=i<=m} log2 1/(1 - alpha^i)` for every `m`.
pub fn logsum_bound<T: Real>(alpha: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let c = T::PI() * T::LOG2_E();
    Ok(c * c / (T::lit(6.0) * -alpha.log2()))
}

/// `sum_{1<=i<=m} log2 1/(1 - alpha^i)`.
pub fn logsum_partial<T: Real>(alpha: T, m: usize) -> T {
    let mut power = T::one();
    let mut sum = T::zero();
    for _ in 0..m {
        power = power * alpha;
        sum = sum + log2_inv_one_minus(power);
    }
    sum
}

/// `2 pi log2(e) / sqrt 6`, the `sqrt n` coefficient of the fixed-rate bound
/// at its optimal rate.
pub fn optimal_sqrt_coefficient<T: Real>() -> T {
    T::lit(2.0) * T::PI() * T::LOG2_E() / T::lit(6.0).sqrt()
}

/// `|S| [2 pi log2(e) / sqrt 6 * sqrt n + log2 1/p_min]`: the fixed-rate
/// corollary at the optimal rate, relaxed from `sqrt(n-1)` to `sqrt n`.
pub fn optimal_fixed_bound<T: Real>(input: &BoundInput<T>) -> T {
    T::from_count(input.segments)
        * (optimal_sqrt_coefficient::<T>() * T::from_count(input.n).sqrt() - input.p_min.log2())
}

/// Closed-form piecewise-stationary bound for one of the three schedules.
///
/// * fixed: `|S| [log 1/p + (pi log e)^2 / (6 log 1/alpha) + (n-1) log 1/alpha]`
/// * decaying: `|S| [log 1/p + 2 pi log e / sqrt 3 * sqrt n]`
/// * count: `|S| [log n/p + (pi log e)^2 / (6 log 1/lambda) + (n-1) log 1/lambda]`
pub fn corollary_bound<T: Real>(schedule: &Schedule<T>, input: &BoundInput<T>) -> Result<T> {
    let s = T::from_count(input.segments);
    let n = T::from_count(input.n);
    let inv_p = -input.p_min.log2();
    let rate_terms = |rate: T| -> Result<T> { Ok(logsum_bound(rate)? + (n - T::one()) * -rate.log2()) };
    Ok(match *schedule {
        Schedule::Fixed { alpha } => s * (inv_p + rate_terms(alpha)?),
        Schedule::Decaying => {
            let c = T::lit(2.0) * T::PI() * T::LOG2_E() / T::lit(3.0).sqrt();
            s * (inv_p + c * n.sqrt())
        }
        Schedule::Count { lambda, .. } => s * (inv_p + n.log2() + rate_terms(lambda)?),
    })
}

/// Redundancy of the two worst-case candidates for a given estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase<T> {
    /// Redundancy of `z^n`, where `z` is the letter with the smaller prior.
    pub deterministic: T,
    /// Redundancy of `z^{n-1}` followed by the other letter.
    pub single_flip: T,
    /// Whichever of the two candidates has the larger redundancy.
    pub argmax: BitSequence,
}

impl<T: Real> WorstCase<T> {
    pub fn max(&self) -> T {
        self.deterministic.max(self.single_flip)
    }
}

/// Evaluates `0^n` and `0^{n-1}1` (letters toggled when `p(0) > p(1)`)
/// by running the estimator.
pub fn worst_case_candidates<T: Real>(schedule: &Schedule<T>, prior_p1: T, n: usize) -> Result<WorstCase<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let z = prior_p1 < T::lit(0.5);
    let redundancy = |x: &BitSequence| -> Result<T> {
        let mut est = EspEstimator::new(*schedule, prior_p1)?;
        Ok(est.process(x) - entropy_from_counts::<T>(x.count_ones(), x.len()))
    };
    let det = BitSequence::repeat(z, n);
    let mut flip = BitSequence::repeat(z, n - 1);
    flip.push(!z);
    let deterministic = redundancy(&det)?;
    let single_flip = redundancy(&flip)?;
    let argmax = if deterministic >= single_flip { det } else { flip };
    Ok(WorstCase {
        deterministic,
        single_flip,
        argmax,
    })
}
