//! Exhaustive enumeration of all `2^n` inputs, used to check the bounds.
//!
//! Sequences are walked as a binary tree so every prefix is coded once.
//! The top `PREFIX_BITS` levels are fanned out to worker threads; each worker
//! replays its prefix from a fresh estimator, so every leaf sees the same
//! floating-point operations whether the walk is parallel or not.

use rayon::prelude::*;

use crate::bitseq::{entropy_from_counts, BitSequence, Partition};
use crate::error::{Error, Result};
use crate::estimator::EspEstimator;
use crate::real::Real;
use crate::schedule::Schedule;

/// Hard limit on enumerated lengths.
pub const MAX_EXHAUSTIVE_LEN: usize = 20;

const PREFIX_BITS: usize = 6;

/// A redundancy value and the sequence attaining it, as an LSB-first code
/// (bit `i` of `code` is letter `i`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum<T> {
    pub redundancy: T,
    pub code: u64,
}

impl<T: Real> Extremum<T> {
    pub fn sequence(&self, n: usize) -> BitSequence {
        BitSequence::from_code(self.code, n)
    }

    /// Larger redundancy wins; ties go to the smaller code.
    fn better(self, other: Self) -> Self {
        if other.redundancy > self.redundancy || (other.redundancy == self.redundancy && other.code < self.code) {
            other
        } else {
            self
        }
    }
}

fn merge<T: Real>(a: Option<Extremum<T>>, b: Option<Extremum<T>>) -> Option<Extremum<T>> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.better(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Maxima of `l(x) - sum_{(a,b]} h(x_{a+1:b})` over all `x` of length `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExhaustiveMax<T> {
    pub overall: Extremum<T>,
    /// Over the two constant sequences.
    pub deterministic: Extremum<T>,
    /// Over the non-constant sequences; `None` when `n = 1`.
    pub non_deterministic: Option<Extremum<T>>,
}

impl<T: Real> ExhaustiveMax<T> {
    fn merge(self, other: Self) -> Self {
        Self {
            overall: self.overall.better(other.overall),
            deterministic: self.deterministic.better(other.deterministic),
            non_deterministic: merge(self.non_deterministic, other.non_deterministic),
        }
    }
}

struct Walk<'a> {
    n: usize,
    full: u64,
    segments: &'a [(usize, usize)],
}

impl Walk<'_> {
    fn baseline<T: Real>(&self, code: u64) -> T {
        self.segments
            .iter()
            .map(|&(a, b)| {
                let mask = if b - a == 64 {
                    u64::MAX
                } else {
                    ((1u64 << (b - a)) - 1) << a
                };
                entropy_from_counts::<T>((code & mask).count_ones() as usize, b - a)
            })
            .sum()
    }

    fn leaf<T: Real>(&self, est: &EspEstimator<T>, code: u64) -> ExhaustiveMax<T> {
        let hit = Extremum {
            redundancy: est.code_length() - self.baseline::<T>(code),
            code,
        };
        let det = code == 0 || code == self.full;
        // a constant-only subtree never sees a non-deterministic leaf, and
        // vice versa; -inf placeholders lose every comparison
        let none = Extremum {
            redundancy: T::neg_infinity(),
            code: u64::MAX,
        };
        ExhaustiveMax {
            overall: hit,
            deterministic: if det { hit } else { none },
            non_deterministic: (!det).then_some(hit),
        }
    }

    fn descend<T: Real>(&self, est: EspEstimator<T>, depth: usize, code: u64) -> ExhaustiveMax<T> {
        if depth == self.n {
            return self.leaf(&est, code);
        }
        let mut one = est.clone();
        let mut zero = est;
        zero.update(false);
        one.update(true);
        let left = self.descend(zero, depth + 1, code);
        let right = self.descend(one, depth + 1, code | (1 << depth));
        left.merge(right)
    }
}

/// Exhaustive maximum of `l(x) - pws_baseline(x, partition)` over all
/// `x in {0,1}^n`, `n = partition.n() <= MAX_EXHAUSTIVE_LEN`.
pub fn exhaustive_max<T: Real>(schedule: &Schedule<T>, prior_p1: T, partition: &Partition) -> Result<ExhaustiveMax<T>> {
    let n = partition.n();
    if n > MAX_EXHAUSTIVE_LEN {
        return Err(Error::EnumerationTooLarge(n));
    }
    let root = EspEstimator::new(*schedule, prior_p1)?;
    let segments: Vec<(usize, usize)> = partition.segments().collect();
    let walk = Walk {
        n,
        full: (1u64 << n) - 1,
        segments: &segments,
    };
    let split = n.min(PREFIX_BITS);
    let result = (0..1u64 << split)
        .into_par_iter()
        .map(|prefix| {
            let mut est = root.clone();
            for i in 0..split {
                est.update((prefix >> i) & 1 == 1);
            }
            walk.descend(est, split, prefix)
        })
        .reduce_with(ExhaustiveMax::merge)
        .expect("at least one prefix");
    Ok(result)
}

/// Redundancy `l(x) - pws_baseline(x)` of every sequence of length `n`,
/// indexed by LSB-first code. Sequential; meant for small `n`.
pub fn all_redundancies<T: Real>(schedule: &Schedule<T>, prior_p1: T, partition: &Partition) -> Result<Vec<T>> {
    let n = partition.n();
    if n > MAX_EXHAUSTIVE_LEN {
        return Err(Error::EnumerationTooLarge(n));
    }
    let segments: Vec<(usize, usize)> = partition.segments().collect();
    let walk = Walk {
        n,
        full: (1u64 << n) - 1,
        segments: &segments,
    };
    let mut out = Vec::with_capacity(1 << n);
    for code in 0..1u64 << n {
        let mut est = EspEstimator::new(*schedule, prior_p1)?;
        for i in 0..n {
            est.update((code >> i) & 1 == 1);
        }
        out.push(est.code_length() - walk.baseline::<T>(code));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitseq::pws_baseline;

    #[test]
    fn tree_walk_matches_flat_enumeration() {
        let sched = Schedule::fixed(0.8f64).unwrap();
        let p = Partition::new(vec![0, 3, 9]).unwrap();
        let flat = all_redundancies(&sched, 0.6, &p).unwrap();
        let best = exhaustive_max(&sched, 0.6, &p).unwrap();
        let (code, value) = flat.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (c, &v)| if v > acc.1 { (c, v) } else { acc },
        );
        assert_eq!(best.overall.redundancy, value);
        assert_eq!(best.overall.code, code as u64);

        // and against the public path through BitSequence
        let x = BitSequence::from_code(code as u64, 9);
        let mut est = EspEstimator::new(sched, 0.6).unwrap();
        let direct = est.process(&x) - pws_baseline::<f64>(&x, &p).unwrap();
        assert!((direct - value).abs() < 1e-12);
    }

    #[test]
    fn split_by_determinism() {
        let sched = Schedule::fixed(0.75f64).unwrap();
        let best = exhaustive_max(&sched, 0.5, &Partition::single(1).unwrap()).unwrap();
        assert!(best.non_deterministic.is_none());
        assert_eq!(best.deterministic.redundancy, 1.0);
        let best = exhaustive_max(&sched, 0.5, &Partition::single(8).unwrap()).unwrap();
        assert!(best.non_deterministic.is_some());
        assert!(best.deterministic.code == 0 || best.deterministic.code == 0xFF);
    }

    #[test]
    fn rejects_long_inputs() {
        let sched = Schedule::<f64>::decaying();
        let p = Partition::single(MAX_EXHAUSTIVE_LEN + 1).unwrap();
        assert!(matches!(
            exhaustive_max(&sched, 0.5, &p),
            Err(Error::EnumerationTooLarge(_))
        ));
    }
}
