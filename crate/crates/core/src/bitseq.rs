//! Packed binary sequences, empirical entropy and piecewise-stationary baselines.

use std::fmt;

use crate::error::{Error, Result};
use crate::real::Real;

const WORD_BITS: usize = 64;

/// A sequence of binary letters packed 64 per word.
///
/// Bit `i` lives in word `i / 64` at position `i % 64`. Unused high bits of
/// the last word are kept at zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSequence {
    words: Vec<u64>,
    len: usize,
}

impl BitSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(WORD_BITS)),
            len: 0,
        }
    }

    /// `len` copies of `bit`.
    pub fn repeat(bit: bool, len: usize) -> Self {
        let fill = if bit { u64::MAX } else { 0 };
        let mut words = vec![fill; len.div_ceil(WORD_BITS)];
        if bit && !len.is_multiple_of(WORD_BITS) {
            *words.last_mut().unwrap() = (1u64 << (len % WORD_BITS)) - 1;
        }
        Self { words, len }
    }

    /// Unpacks bytes most-significant bit first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut seq = Self::with_capacity(bytes.len() * 8);
        for &byte in bytes {
            for shift in (0..8).rev() {
                seq.push((byte >> shift) & 1 == 1);
            }
        }
        seq
    }

    /// Packs into bytes most-significant bit first; a partial final byte is
    /// zero padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for (i, bit) in self.iter().enumerate() {
            if bit {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    /// Builds from a least-significant-bit-first integer code: bit `i` of the
    /// sequence is bit `i` of `code`.
    pub fn from_code(code: u64, len: usize) -> Self {
        assert!(len <= WORD_BITS);
        let mask = if len == WORD_BITS { u64::MAX } else { (1u64 << len) - 1 };
        let words = if len == 0 { Vec::new() } else { vec![code & mask] };
        Self { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let (w, b) = (self.len / WORD_BITS, self.len % WORD_BITS);
        if w == self.words.len() {
            self.words.push(0);
        }
        if bit {
            self.words[w] |= 1 << b;
        }
        self.len += 1;
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1)
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { seq: self, pos: 0 }
    }

    /// Number of 1-bits.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Copy of the letters in `start..end` (0-based, half-open).
    pub fn slice(&self, start: usize, end: usize) -> BitSequence {
        assert!(start <= end && end <= self.len, "slice {start}..{end} out of range");
        let mut out = Self::with_capacity(end - start);
        for i in start..end {
            out.push(self.get(i).unwrap());
        }
        out
    }

    /// Number of 1-bits in `start..end`.
    pub fn count_ones_in(&self, start: usize, end: usize) -> usize {
        assert!(start <= end && end <= self.len);
        (start..end).filter(|&i| self.get(i).unwrap()).count()
    }

    pub fn complement(&self) -> BitSequence {
        self.iter().map(|b| !b).collect()
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSequence(\"{self}\")")
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitSequence {
    type Err = Error;

    /// Parses a string of `0`/`1` characters.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!("not a binary letter: {other:?}"))),
            })
            .collect()
    }
}

impl FromIterator<bool> for BitSequence {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut seq = Self::new();
        for bit in iter {
            seq.push(bit);
        }
        seq
    }
}

impl<'a> IntoIterator for &'a BitSequence {
    type Item = bool;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

pub struct Iter<'a> {
    seq: &'a BitSequence,
    pos: usize,
}

impl Iterator for Iter<'_> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        let bit = self.seq.get(self.pos)?;
        self.pos += 1;
        Some(bit)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = self.seq.len - self.pos;
        (rest, Some(rest))
    }
}

impl ExactSizeIterator for Iter<'_> {}

/// Ordered non-overlapping segments `(i_{k-1}, i_k]` covering `(0, n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    boundaries: Vec<usize>,
}

impl Partition {
    /// Validates `0 = i_0 < i_1 < ... < i_s = n` with `s >= 1`.
    pub fn new(boundaries: Vec<usize>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(Error::InvalidPartition("need at least one segment".into()));
        }
        if boundaries[0] != 0 {
            return Err(Error::InvalidPartition(format!(
                "first boundary must be 0, got {}",
                boundaries[0]
            )));
        }
        if let Some(w) = boundaries.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(format!(
                "boundaries must be strictly increasing ({} >= {})",
                w[0], w[1]
            )));
        }
        Ok(Self { boundaries })
    }

    /// The single segment `(0, n]`.
    pub fn single(n: usize) -> Result<Self> {
        Self::new(vec![0, n])
    }

    /// Parses comma separated boundaries such as `0,200,700,1000`.
    pub fn parse(s: &str) -> Result<Self> {
        let boundaries = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidPartition(format!("bad boundary {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(boundaries)
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Covered length `i_s`.
    pub fn n(&self) -> usize {
        *self.boundaries.last().unwrap()
    }

    /// Number of segments `s`.
    pub fn segment_count(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Segments as `(a, b)` pairs meaning `(a, b]` in 1-based letter positions,
    /// equivalently `a..b` in 0-based indices.
    pub fn segments(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.boundaries.windows(2).map(|w| (w[0], w[1]))
    }

    /// Index of the segment holding 0-based letter `i`.
    pub fn segment_of(&self, i: usize) -> Option<usize> {
        if i >= self.n() {
            return None;
        }
        Some(self.boundaries.partition_point(|&b| b <= i) - 1)
    }

    /// Every partition of `(0, n]` into at most `max_segments` segments.
    pub fn enumerate(n: usize, max_segments: usize) -> Vec<Partition> {
        fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if left == 0 {
                return;
            }
            // close with the final segment
            cur.push(n);
            out.push(Partition {
                boundaries: cur.clone(),
            });
            cur.pop();
            for cut in start + 1..n {
                cur.push(cut);
                rec(cut, n, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(0, n, max_segments, &mut vec![0], &mut out);
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.segments().map(|(a, b)| format!("({a},{b}]")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Binary entropy `H(q)` in bits, with `0 log 0 = 0`.
pub fn binary_entropy<T: Real>(q: T) -> T {
    if q <= T::zero() || q >= T::one() {
        return T::zero();
    }
    let r = T::one() - q;
    -(q * q.log2() + r * r.log2())
}

/// `n * H(ones / n)`, the cost of the best fixed code for a sequence with
/// `ones` 1-bits among `n` letters.
pub fn entropy_from_counts<T: Real>(ones: usize, n: usize) -> T {
    if n == 0 || ones == 0 || ones == n {
        return T::zero();
    }
    let nf = T::from_count(n);
    nf * binary_entropy(T::from_count(ones) / nf)
}

/// True iff all letters are equal.
pub fn is_deterministic(x: &BitSequence) -> Result<bool> {
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    let ones = x.count_ones();
    Ok(ones == 0 || ones == x.len())
}

/// Empirical entropy `h(x) = n H(q)` in bits; 0 for the empty sequence.
pub fn empirical_entropy<T: Real>(x: &BitSequence) -> T {
    entropy_from_counts(x.count_ones(), x.len())
}

/// Sum of the empirical entropies of the segments of `x` under `partition`.
pub fn pws_baseline<T: Real>(x: &BitSequence, partition: &Partition) -> Result<T> {
    if partition.n() != x.len() {
        return Err(Error::PartitionLengthMismatch {
            partition: partition.n(),
            sequence: x.len(),
        });
    }
    Ok(partition
        .segments()
        .map(|(a, b)| entropy_from_counts::<T>(x.count_ones_in(a, b), b - a))
        .sum())
}

/// `h(x_{1:n}) - h(x_{2:n})` for a non-deterministic `x` of length at least 2.
pub fn entropy_difference_check<T: Real>(x: &BitSequence) -> Result<T> {
    if x.len() < 2 {
        return Err(Error::SequenceTooShort { need: 2, got: x.len() });
    }
    if is_deterministic(x)? {
        return Err(Error::DeterministicSequence);
    }
    let ones = x.count_ones();
    let tail_ones = ones - usize::from(x.get(0).unwrap());
    Ok(entropy_from_counts::<T>(ones, x.len()) - entropy_from_counts::<T>(tail_ones, x.len() - 1))
}
