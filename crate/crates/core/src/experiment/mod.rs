//! Approximate worst-case prefix redundancy over a class of estimators.
//!
//! For every combination `(q_0, q_1, ..., q_s)` drawn from the fraction grid
//! the prior is set to `p(0) = q_0`, and `repeats` random sequences are drawn
//! in which segment `i` holds exactly `floor(q_i * len_i)` 1-bits. Each
//! sequence yields a prefix redundancy trace
//! `r(k) = l(x_{1:k}) - sum_{(a,b]} h(x_{a+1:min(k,b)})`, and the curve is
//! the pointwise maximum over all traces.
//!
//! Randomness: the simulation for fractions `(q_0, ..., q_s)` and repeat `r`
//! uses `ChaCha8Rng::seed_from_u64(seed)` on a stream derived from the bit
//! patterns of the fractions and `r` alone. Results do not depend on
//! scheduling or thread count, and enlarging the grid or the repeat count
//! replays every earlier simulation unchanged. Combinations are enumerated
//! mixed radix with `q_0` as the least significant digit.

mod config;

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{q_grid_with_step, ExperimentConfig};

use crate::bitseq::{entropy_from_counts, BitSequence, Partition};
use crate::bounds::{corollary_bound, optimal_sqrt_coefficient, BoundInput};
use crate::error::{Error, Result};
use crate::estimator::EspEstimator;
use crate::real::KahanSum;
use crate::schedule::Schedule;

/// Guards `floor(q * len)` against grid values such as `0.35` that are
/// stored slightly below their decimal value.
const FLOOR_SLACK: f64 = 1e-9;

/// Per-prefix measured maximum redundancy and class bound; index `k - 1`
/// holds prefix length `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyCurve {
    pub r_measured: Vec<f64>,
    pub bound: Vec<f64>,
}

impl RedundancyCurve {
    pub fn len(&self) -> usize {
        self.r_measured.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_measured.is_empty()
    }

    /// `r_measured(k)` for 1-based `k`.
    pub fn measured_at(&self, k: usize) -> f64 {
        self.r_measured[k - 1]
    }

    pub fn bound_at(&self, k: usize) -> f64 {
        self.bound[k - 1]
    }

    /// Prefix lengths where the measured redundancy exceeds the bound.
    pub fn violations(&self) -> Vec<usize> {
        (1..=self.len())
            .filter(|&k| self.measured_at(k) > self.bound_at(k))
            .collect()
    }

    pub fn dominance_holds(&self) -> bool {
        self.violations().is_empty()
    }

    /// Smallest `bound(k) - r_measured(k)` and the `k` attaining it.
    pub fn min_margin(&self) -> (usize, f64) {
        (1..=self.len())
            .map(|k| (k, self.bound_at(k) - self.measured_at(k)))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc })
    }
}

/// Result of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub curve: RedundancyCurve,
    pub simulations: u64,
    pub schedule: Schedule<f64>,
}

/// Draws a sequence whose segment `i` holds exactly `floor(q_i * len_i)`
/// 1-bits at uniformly random positions.
pub fn sample_sequence<R: Rng + ?Sized>(partition: &Partition, fractions: &[f64], rng: &mut R) -> Result<BitSequence> {
    if fractions.len() != partition.segment_count() {
        return Err(Error::InvalidConfig(format!(
            "{} fractions for {} segments",
            fractions.len(),
            partition.segment_count()
        )));
    }
    if let Some(q) = fractions.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::InvalidConfig(format!("fraction {q} outside [0, 1]")));
    }
    let mut out = BitSequence::with_capacity(partition.n());
    let mut segment = Vec::new();
    for ((a, b), &q) in partition.segments().zip(fractions) {
        let len = b - a;
        let ones = ((q * len as f64 + FLOOR_SLACK).floor() as usize).min(len);
        segment.clear();
        segment.resize(len, false);
        segment[..ones].fill(true);
        segment.shuffle(rng);
        segment.iter().for_each(|&bit| out.push(bit));
    }
    Ok(out)
}

/// Prefix redundancy `l(x_{1:k}) - sum h(x_{a+1:min(k,b)})` for `k = 1..=n`,
/// feeding `x` through `est` (expected fresh).
pub fn prefix_redundancy_trace(
    est: &mut EspEstimator<f64>,
    x: &BitSequence,
    partition: &Partition,
) -> Result<Vec<f64>> {
    if partition.n() != x.len() {
        return Err(Error::PartitionLengthMismatch {
            partition: partition.n(),
            sequence: x.len(),
        });
    }
    let mut trace = Vec::with_capacity(x.len());
    trace_into(est, x, partition, |k, r| {
        debug_assert_eq!(k, trace.len() + 1);
        trace.push(r);
    });
    Ok(trace)
}

fn trace_into(est: &mut EspEstimator<f64>, x: &BitSequence, partition: &Partition, mut sink: impl FnMut(usize, f64)) {
    let mut codelen = KahanSum::new();
    let mut closed = 0.0;
    let mut bounds = partition.boundaries()[1..].iter().copied();
    let mut seg_start = 0;
    let mut seg_end = bounds.next().unwrap_or(x.len());
    let mut ones = 0usize;
    for (i, bit) in x.iter().enumerate() {
        codelen.add(est.update(bit));
        ones += usize::from(bit);
        let k = i + 1;
        let open = entropy_from_counts::<f64>(ones, k - seg_start);
        sink(k, codelen.value() - (closed + open));
        if k == seg_end {
            closed += open;
            seg_start = k;
            seg_end = bounds.next().unwrap_or(x.len());
            ones = 0;
        }
    }
}

/// Class bound at prefix length `k`, with `eps` in place of `p(0)`.
///
/// Fixed rate at its optimum for the configured length uses
/// `|S| [2 pi log2(e)/sqrt 6 * sqrt(k-1) + log2 1/eps]`; every other schedule
/// evaluates its closed-form corollary at `n := k`.
pub fn class_bound(schedule: &Schedule<f64>, optimal_fixed: bool, k: usize, segments: usize, eps: f64) -> Result<f64> {
    match schedule {
        Schedule::Fixed { .. } if optimal_fixed => {
            Ok(segments as f64 * (optimal_sqrt_coefficient::<f64>() * ((k - 1) as f64).sqrt() - eps.log2()))
        }
        _ => corollary_bound(schedule, &BoundInput::new(k, segments, eps)?),
    }
}

fn bound_curve(config: &ExperimentConfig, schedule: &Schedule<f64>) -> Result<Vec<f64>> {
    let s = config.partition.segment_count();
    (1..=config.n)
        .map(|k| class_bound(schedule, config.rate.is_none(), k, s, config.eps))
        .collect()
}

fn fractions_for(config: &ExperimentConfig, mut combo: u64, out: &mut [f64]) {
    let g = config.q_grid.len() as u64;
    for slot in out.iter_mut() {
        *slot = config.q_grid[(combo % g) as usize];
        combo /= g;
    }
}

fn simulate_combination(config: &ExperimentConfig, schedule: &Schedule<f64>, combo: u64) -> Vec<f64> {
    let s = config.partition.segment_count();
    let mut qs = vec![0.0; s + 1];
    fractions_for(config, combo, &mut qs);
    let prior_p1 = 1.0 - qs[0];
    let mut best = vec![f64::NEG_INFINITY; config.n];
    for repeat in 0..config.repeats as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(stream_id(&qs, repeat));
        let x = sample_sequence(&config.partition, &qs[1..], &mut rng).expect("validated config");
        let mut est = EspEstimator::new(*schedule, prior_p1).expect("validated prior");
        trace_into(&mut est, &x, &config.partition, |k, r| {
            if r > best[k - 1] {
                best[k - 1] = r;
            }
        });
    }
    best
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream_id(fractions: &[f64], repeat: u64) -> u64 {
    fractions
        .iter()
        .fold(splitmix(repeat), |h, q| splitmix(h ^ q.to_bits()))
}

fn pointwise_max(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x = x.max(y));
    a
}

/// Runs the study. Work is spread over the rayon pool; the curve is
/// identical for any thread count.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let schedule = config.schedule_instance()?;
    let bound = bound_curve(config, &schedule)?;
    let r_measured = (0..config.combinations())
        .into_par_iter()
        .map(|combo| simulate_combination(config, &schedule, combo))
        .reduce(|| vec![f64::NEG_INFINITY; config.n], pointwise_max);
    Ok(RunSummary {
        curve: RedundancyCurve { r_measured, bound },
        simulations: config.simulations(),
        schedule,
    })
}

/// Single-threaded reference for [`run`].
pub fn run_sequential(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let schedule = config.schedule_instance()?;
    let bound = bound_curve(config, &schedule)?;
    let r_measured = (0..config.combinations())
        .map(|combo| simulate_combination(config, &schedule, combo))
        .fold(vec![f64::NEG_INFINITY; config.n], pointwise_max);
    Ok(RunSummary {
        curve: RedundancyCurve { r_measured, bound },
        simulations: config.simulations(),
        schedule,
    })
}

/// `%.9g`-style formatting: 9 significant digits, trailing zeros removed.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-5..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{v:.*}", (8 - exp) as usize))
    }
}

/// CSV text: header `k,r_measured_bits,bound_bits`, one row per `k`, LF endings.
pub fn curve_csv(curve: &RedundancyCurve) -> String {
    let mut s = String::from("k,r_measured_bits,bound_bits\n");
    for k in 1..=curve.len() {
        let _ = writeln!(
            s,
            "{k},{},{}",
            format_sig9(curve.measured_at(k)),
            format_sig9(curve.bound_at(k))
        );
    }
    s
}

pub fn emit_csv(curve: &RedundancyCurve, path: &Path) -> Result<()> {
    std::fs::write(path, curve_csv(curve)).map_err(|e| Error::io(path, e))
}

/// CSV text: header `k,bound_bits`; `bounds[k-1]` holds prefix length `k`.
pub fn bound_csv(bounds: &[f64]) -> String {
    let mut s = String::from("k,bound_bits\n");
    for (i, b) in bounds.iter().enumerate() {
        let _ = writeln!(s, "{},{}", i + 1, format_sig9(*b));
    }
    s
}

pub fn emit_bound_csv(bounds: &[f64], path: &Path) -> Result<()> {
    std::fs::write(path, bound_csv(bounds)).map_err(|e| Error::io(path, e))
}
