use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Longest representable bit string.
pub const MAX_BITS: usize = 64;

/// A binary string of at most [`MAX_BITS`] bits.
///
/// Bits are packed into `value` most-significant-first, so the derived order
/// is the canonical `(length, numeric value)` order used for column indexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString {
    len: u8,
    value: u64,
}

impl BitString {
    pub const EMPTY: BitString = BitString { len: 0, value: 0 };

    /// Builds a string from the low `len` bits of `value`.
    pub fn new(len: usize, value: u64) -> Result<Self> {
        if len > MAX_BITS {
            return Err(Error::TooLong(len));
        }
        let value = if len == MAX_BITS {
            value
        } else {
            value & ((1u64 << len) - 1)
        };
        Ok(Self {
            len: len as u8,
            value,
        })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut s = Self::EMPTY;
        for &b in bits {
            s = s.push_run(b, 1)?;
        }
        Ok(s)
    }

    pub fn len(self) -> usize {
        usize::from(self.len)
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn value(self) -> u64 {
        self.value
    }

    /// Bit `i`, counting from the left.
    pub fn bit(self, i: usize) -> bool {
        debug_assert!(i < self.len());
        (self.value >> (self.len() - 1 - i)) & 1 == 1
    }

    pub fn bits(self) -> impl Iterator<Item = bool> {
        (0..self.len()).map(move |i| self.bit(i))
    }

    /// Appends `count` copies of `bit`.
    pub fn push_run(self, bit: bool, count: usize) -> Result<Self> {
        let len = self.len() + count;
        if len > MAX_BITS {
            return Err(Error::TooLong(len));
        }
        Ok(self.push_run_unchecked(bit, count))
    }

    /// As [`push_run`](Self::push_run) but the caller guarantees the result fits.
    #[inline]
    pub(crate) fn push_run_unchecked(self, bit: bool, count: usize) -> Self {
        if count == 0 {
            return self;
        }
        let shifted = if count >= MAX_BITS {
            0
        } else {
            self.value << count
        };
        let ones = if count >= MAX_BITS {
            u64::MAX
        } else {
            (1u64 << count) - 1
        };
        Self {
            len: (self.len() + count) as u8,
            value: if bit { shifted | ones } else { shifted },
        }
    }

    /// Flips every bit.
    pub fn complement(self) -> Self {
        let mask = if self.len() == MAX_BITS {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        };
        Self {
            len: self.len,
            value: !self.value & mask,
        }
    }

    /// Maximal runs of equal bits as `(bit, run length)`, left to right.
    pub fn runs(self) -> Vec<(bool, usize)> {
        let mut runs: Vec<(bool, usize)> = Vec::new();
        for b in self.bits() {
            match runs.last_mut() {
                Some((last, n)) if *last == b => *n += 1,
                _ => runs.push((b, 1)),
            }
        }
        runs
    }

    pub fn run_count(self) -> usize {
        if self.len == 0 {
            return 0;
        }
        let v = self.value;
        // adjacent positions that differ
        let diff = (v ^ (v >> 1)) & ((1u64 << (self.len() - 1)).wrapping_sub(1));
        diff.count_ones() as usize + 1
    }

    /// All strings of length `len` in numeric order.
    pub fn all_of_len(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < MAX_BITS, "cannot enumerate all strings of length {len}");
        (0..(1u64 << len)).map(move |v| BitString {
            len: len as u8,
            value: v,
        })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ε");
        }
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ε" {
            return Ok(Self::EMPTY);
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "bit strings contain only '0' and '1', found {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

/// Per-bit repetition counts `(r_1, …, r_L)` for one block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RepetitionPattern(pub Vec<u32>);

impl RepetitionPattern {
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&r| u64::from(r)).sum()
    }

    pub fn max_count(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

/// Emits bit `i` of `x` exactly `pattern[i]` times.
pub fn apply_pattern(x: BitString, pattern: &RepetitionPattern) -> Result<BitString> {
    if pattern.0.len() != x.len() {
        return Err(Error::LengthMismatch {
            pattern: pattern.0.len(),
            input: x.len(),
        });
    }
    let total = pattern.total();
    if total > MAX_BITS as u64 {
        return Err(Error::TooLong(total as usize));
    }
    Ok(x.bits()
        .zip(&pattern.0)
        .fold(BitString::EMPTY, |acc, (b, &r)| {
            acc.push_run_unchecked(b, r as usize)
        }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_order() {
        let mut v = vec![bs("10"), bs("ε"), bs("1"), bs("00"), bs("0"), bs("011")];
        v.sort();
        let shown: Vec<String> = v.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["ε", "0", "1", "00", "10", "011"]);
        assert!(bs("ε") < bs("0"));
        assert_ne!(bs("ε"), bs("0"));
        assert_ne!(bs("0"), bs("00"));
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["ε", "0", "1", "0110", "1111111"] {
            assert_eq!(bs(s).to_string(), s);
        }
        assert!("012".parse::<BitString>().is_err());
    }

    #[test]
    fn runs_and_complement() {
        assert_eq!(bs("0011101").runs(), vec![(false, 2), (true, 3), (false, 1), (true, 1)]);
        assert_eq!(bs("0011101").run_count(), 4);
        assert_eq!(bs("1").run_count(), 1);
        assert_eq!(BitString::EMPTY.run_count(), 0);
        assert_eq!(bs("0011").complement(), bs("1100"));
    }

    #[test]
    fn length_limit() {
        let full = BitString::new(64, u64::MAX).unwrap();
        assert_eq!(full.run_count(), 1);
        assert!(full.push_run(true, 1).is_err());
        assert!(BitString::new(65, 0).is_err());
    }

    #[test]
    fn pattern_examples() {
        let x = bs("01");
        let ap = |p: &[u32]| apply_pattern(x, &RepetitionPattern(p.to_vec())).unwrap();
        assert_eq!(ap(&[0, 1]), bs("1"));
        assert_eq!(ap(&[2, 0]), bs("00"));
        assert_eq!(ap(&[1, 1]), bs("01"));
        assert_eq!(ap(&[2, 1]), bs("001"));
        assert_eq!(ap(&[0, 0]), BitString::EMPTY);
        assert!(apply_pattern(x, &RepetitionPattern(vec![1])).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn run_count_matches_runs(len in 0usize..64, v in any::<u64>()) {
                let s = BitString::new(len, v).unwrap();
                prop_assert_eq!(s.run_count(), s.runs().len());
            }

            #[test]
            fn pattern_output_length(counts in proptest::collection::vec(0u32..5, 1..8), v in any::<u64>()) {
                let x = BitString::new(counts.len(), v).unwrap();
                let p = RepetitionPattern(counts);
                let y = apply_pattern(x, &p).unwrap();
                prop_assert_eq!(y.len() as u64, p.total());
                prop_assert!(y.run_count() <= x.len());
            }
        }
    }
}
