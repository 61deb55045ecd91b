//! Range coding driven by the estimator, and the `ESP1` file container.
//!
//! Container layout (all integers big-endian):
//!
//! | offset | size | field                                  |
//! |--------|------|----------------------------------------|
//! | 0      | 4    | magic `ESP1`                           |
//! | 4      | 1    | version (1)                            |
//! | 5      | 1    | schedule id: 0 fixed, 1 decaying, 2 count |
//! | 6      | 8    | `alpha` or `lambda`, IEEE-754 binary64 |
//! | 14     | 4    | `m` (0 when unused)                    |
//! | 18     | 8    | prior `p(1)`, binary64                 |
//! | 26     | 8    | original length in bits                |
//! | 34     | ..   | range coder payload                    |
//!
//! The estimator runs at full precision; only the probability handed to the
//! coder is quantized to 16 bits, identically on both sides.

mod range;

use crate::bitseq::BitSequence;
use crate::error::{Error, Result};
use crate::estimator::EspEstimator;
use crate::schedule::{Schedule, ScheduleKind, ScheduleParams};

pub const MAGIC: [u8; 4] = *b"ESP1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 34;
/// Largest accepted `bit_length` (2^40 bits, 128 GiB).
pub const MAX_BIT_LENGTH: u64 = 1 << 40;

const PROB_ONE: u32 = 1 << range::PROB_BITS;

/// `p(1)` scaled to `[1, 2^16 - 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuantizedProbability(u16);

impl QuantizedProbability {
    pub fn get(self) -> u16 {
        self.0
    }

    /// Scaled probability of 0, `2^16 - p1_q`.
    pub fn p0_scaled(self) -> u32 {
        PROB_ONE - u32::from(self.0)
    }
}

/// `round(p1 * 2^16)` clamped to `[1, 2^16 - 1]`.
pub fn quantize(p1: f64) -> QuantizedProbability {
    let scaled = (p1 * f64::from(PROB_ONE)).round();
    // NaN falls through both comparisons to the midpoint
    let q = if scaled >= f64::from(PROB_ONE - 1) {
        PROB_ONE - 1
    } else if scaled >= 1.0 {
        scaled as u32
    } else if scaled < 1.0 {
        1
    } else {
        PROB_ONE / 2
    };
    QuantizedProbability(q as u16)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainerHeader {
    pub schedule: ScheduleParams,
    pub prior_p1: f64,
    pub bit_length: u64,
}

impl ContainerHeader {
    pub fn new(schedule: &Schedule<f64>, prior_p1: f64, bit_length: u64) -> Self {
        Self {
            schedule: schedule.params(),
            prior_p1,
            bit_length,
        }
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[0..4].copy_from_slice(&MAGIC);
        h[4] = VERSION;
        h[5] = self.schedule.kind.id();
        h[6..14].copy_from_slice(&self.schedule.param1.to_be_bytes());
        h[14..18].copy_from_slice(&self.schedule.param2.to_be_bytes());
        h[18..26].copy_from_slice(&self.prior_p1.to_be_bytes());
        h[26..34].copy_from_slice(&self.bit_length.to_be_bytes());
        h
    }

    /// Validates magic, version and schedule id before anything else.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || bytes[0..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes.len() < 6 {
            return Err(Error::Truncated);
        }
        if bytes[4] != VERSION {
            return Err(Error::UnsupportedVersion(bytes[4]));
        }
        let kind = ScheduleKind::from_id(bytes[5])?;
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated);
        }
        let f64_at = |i: usize| f64::from_be_bytes(bytes[i..i + 8].try_into().unwrap());
        let param2 = u32::from_be_bytes(bytes[14..18].try_into().unwrap());
        let bit_length = u64::from_be_bytes(bytes[26..34].try_into().unwrap());
        if bit_length > MAX_BIT_LENGTH || usize::try_from(bit_length).is_err() {
            return Err(Error::BitLengthOverflow(bit_length));
        }
        Ok(Self {
            schedule: ScheduleParams {
                kind,
                param1: f64_at(6),
                param2,
            },
            prior_p1: f64_at(18),
            bit_length,
        })
    }

    pub fn estimator(&self) -> Result<EspEstimator<f64>> {
        EspEstimator::new(Schedule::from_params(&self.schedule)?, self.prior_p1)
    }
}

/// Output of [`encode_with_stats`].
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub bytes: Vec<u8>,
    /// Ideal code length `l(x)` of the estimator, in bits.
    pub ideal_bits: f64,
}

impl Encoded {
    pub fn payload_bits(&self) -> u64 {
        8 * (self.bytes.len() - HEADER_LEN) as u64
    }
}

/// Encodes `x` with a fresh estimator built from `schedule` and `prior_p1`.
pub fn encode(x: &BitSequence, schedule: &Schedule<f64>, prior_p1: f64) -> Result<Vec<u8>> {
    encode_with_stats(x, schedule, prior_p1).map(|e| e.bytes)
}

pub fn encode_with_stats(x: &BitSequence, schedule: &Schedule<f64>, prior_p1: f64) -> Result<Encoded> {
    let header = ContainerHeader::new(schedule, prior_p1, x.len() as u64);
    let mut est = header.estimator()?;
    let mut out = Vec::with_capacity(HEADER_LEN + x.len() / 8 + 8);
    out.extend_from_slice(&header.to_bytes());
    let mut enc = range::Encoder::new(out);
    for bit in x {
        enc.encode(bit, quantize(est.p1()).p0_scaled());
        est.update(bit);
    }
    Ok(Encoded {
        bytes: enc.finish(),
        ideal_bits: est.code_length(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub header: ContainerHeader,
    pub bits: BitSequence,
}

/// Decodes a container produced by [`encode`].
pub fn decode(bytes: &[u8]) -> Result<Decoded> {
    let header = ContainerHeader::parse(bytes)?;
    let mut est = header.estimator()?;
    let mut dec = range::Decoder::new(&bytes[HEADER_LEN..])?;
    let n = header.bit_length as usize;
    let mut bits = BitSequence::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        let bit = dec.decode(quantize(est.p1()).p0_scaled())?;
        est.update(bit);
        bits.push(bit);
    }
    match dec.remaining() {
        0 => Ok(Decoded { header, bits }),
        extra => Err(Error::TrailingData(extra)),
    }
}

/// Compresses bytes as a flat most-significant-bit-first bit stream.
pub fn compress_bytes(data: &[u8], schedule: &Schedule<f64>, prior_p1: f64) -> Result<Encoded> {
    encode_with_stats(&BitSequence::from_bytes(data), schedule, prior_p1)
}

pub fn decompress_bytes(bytes: &[u8]) -> Result<Vec<u8>> {
    let decoded = decode(bytes)?;
    if decoded.bits.len() % 8 != 0 {
        return Err(Error::InvalidParameter(format!(
            "container holds {} bits, not a whole number of bytes",
            decoded.bits.len()
        )));
    }
    Ok(decoded.bits.to_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize(0.5).get(), 32768);
        assert_eq!(quantize(1e-9).get(), 1);
        // 0.9602 * 65536 = 62927.67
        assert_eq!(quantize(0.9602).get(), 62928);
        assert_eq!(quantize(1.0 - 1e-12).get(), 65535);
        assert_eq!(quantize(f64::NAN).get(), 32768);
    }

    #[test]
    fn empty_input() {
        let s = Schedule::fixed(0.9).unwrap();
        let bytes = encode(&BitSequence::new(), &s, 0.5).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 5);
        let d = decode(&bytes).unwrap();
        assert!(d.bits.is_empty());
    }

    #[test]
    fn header_layout() {
        let s = Schedule::count(0.96, 3).unwrap();
        let h = ContainerHeader::new(&s, 0.25, 77).to_bytes();
        assert_eq!(&h[0..4], b"ESP1");
        assert_eq!(h[4], 1);
        assert_eq!(h[5], 2);
        assert_eq!(&h[6..14], &0.96f64.to_be_bytes());
        assert_eq!(&h[14..18], &[0, 0, 0, 3]);
        assert_eq!(&h[18..26], &0.25f64.to_be_bytes());
        assert_eq!(&h[26..34], &77u64.to_be_bytes());
        assert_eq!(ContainerHeader::parse(&h).unwrap(), ContainerHeader::new(&s, 0.25, 77));
    }

    #[test]
    fn header_errors() {
        let s = Schedule::fixed(0.9).unwrap();
        let good = encode(&"0110".parse().unwrap(), &s, 0.5).unwrap();

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&bad), Err(Error::BadMagic)));
        assert_eq!(Error::BadMagic.to_string(), "not an ESP container");

        let mut bad = good.clone();
        bad[4] = 9;
        assert!(matches!(decode(&bad), Err(Error::UnsupportedVersion(9))));

        let mut bad = good.clone();
        bad[5] = 3;
        assert!(matches!(decode(&bad), Err(Error::UnknownSchedule(3))));

        let mut bad = good.clone();
        bad[26..34].copy_from_slice(&u64::MAX.to_be_bytes());
        assert!(matches!(decode(&bad), Err(Error::BitLengthOverflow(_))));

        assert!(matches!(decode(&good[..20]), Err(Error::Truncated)));
        assert!(matches!(decode(&good[..good.len() - 1]), Err(Error::Truncated)));

        let mut long = good.clone();
        long.push(0);
        assert!(matches!(decode(&long), Err(Error::TrailingData(1))));
    }

    #[test]
    fn bytes_roundtrip() {
        let data = b"exponential smoothing of probabilities\x00\xff\x10".repeat(20);
        let s = Schedule::decaying();
        let enc = compress_bytes(&data, &s, 0.5).unwrap();
        assert_eq!(decompress_bytes(&enc.bytes).unwrap(), data);
        let odd = encode(&"101".parse().unwrap(), &s, 0.5).unwrap();
        assert!(decompress_bytes(&odd).is_err());
    }
}
