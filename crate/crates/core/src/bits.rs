//! Fixed-width bit strings.
//!
//! Bits are ordered most-significant-first: bit 0 is the leftmost bit of the
//! string and, when a string is read as an integer, the most significant one.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An ordered sequence of bits of arbitrary length.
///
/// Storage is packed into `u64` words, leftmost bit in the high end of the
/// first word. Bits past `len` in the last word are always zero, so derived
/// equality and hashing are structural.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self::zeros(len);
        for i in 0..len {
            s.set(i, true);
        }
        s
    }

    /// The low `len` bits of `value`, most significant first.
    ///
    /// Panics if `len > 64`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        if len == 0 {
            return Self::new();
        }
        let masked = if len == 64 { value } else { value & ((1u64 << len) - 1) };
        Self { len, words: vec![masked << (64 - len)] }
    }

    /// Reads the string as a big-endian integer. Panics if longer than 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 supports at most 64 bits");
        if self.len == 0 {
            return 0;
        }
        self.words[0] >> (64 - self.len)
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = Self::new();
        for b in bits {
            s.push(b);
        }
        s
    }

    /// Parses a literal such as `"10110"`. Whitespace and `_` are ignored.
    pub fn from_binary_str(s: &str) -> Result<Self> {
        let mut out = Self::new();
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                '_' | ' ' => {}
                other => return Err(Error::Parse(format!("not a binary digit: {other:?}"))),
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (63 - i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (63 - i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// The first `d` bits.
    pub fn prefix(&self, d: usize) -> Result<BitString> {
        if d > self.len {
            return Err(Error::OutOfRange { index: d, len: self.len });
        }
        Ok(self.slice_unchecked(0, d))
    }

    /// Bits `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<BitString> {
        if start > end || end > self.len {
            return Err(Error::OutOfRange { index: end, len: self.len });
        }
        Ok(self.slice_unchecked(start, end))
    }

    fn slice_unchecked(&self, start: usize, end: usize) -> BitString {
        if start == 0 {
            let mut words: Vec<u64> = self.words[..words_for(end)].to_vec();
            if !end.is_multiple_of(64) {
                let last = words.len() - 1;
                words[last] &= !0u64 << (64 - end % 64);
            }
            return BitString { len: end, words };
        }
        BitString::from_bits((start..end).map(|i| self.get(i)))
    }

    /// Splits into `self[..at]` and `self[at..]`.
    pub fn split_at(&self, at: usize) -> Result<(BitString, BitString)> {
        Ok((self.prefix(at)?, self.slice(at, self.len)?))
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        if self.len.is_multiple_of(64) {
            let mut words = self.words.clone();
            words.extend_from_slice(&other.words);
            return BitString { len: self.len + other.len, words };
        }
        let mut out = self.clone();
        for b in other.iter() {
            out.push(b);
        }
        out
    }

    pub fn concat_all<'a, I: IntoIterator<Item = &'a BitString>>(parts: I) -> BitString {
        parts.into_iter().fold(BitString::new(), |acc, p| acc.concat(p))
    }

    /// Appends `count` zero bits.
    pub fn pad_right(&self, count: usize) -> BitString {
        self.concat(&BitString::zeros(count))
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { expected: self.len, actual: other.len });
        }
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Ok(BitString { len: self.len, words })
    }

    pub fn and(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { expected: self.len, actual: other.len });
        }
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Ok(BitString { len: self.len, words })
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitString) -> Result<bool> {
        Ok(self.and(other)?.count_ones() % 2 == 1)
    }

    pub fn hamming_distance(&self, other: &BitString) -> Result<usize> {
        Ok(self.xor(other)?.count_ones())
    }

    pub fn to_binary_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Length-prefixed hex: `<bits>:<hex>`, last partial nibble zero-padded on the right.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut out = format!("{}:", self.len);
        for k in 0..nibbles {
            let mut v = 0u8;
            for j in 0..4 {
                let i = 4 * k + j;
                v <<= 1;
                if i < self.len && self.get(i) {
                    v |= 1;
                }
            }
            out.push(char::from_digit(u32::from(v), 16).unwrap());
        }
        out
    }

    pub fn from_hex(s: &str) -> Result<BitString> {
        let s = s.trim();
        let (len_part, hex) = s
            .split_once(':')
            .ok_or_else(|| Error::MalformedHex(format!("missing length prefix in {s:?}")))?;
        let len: usize = len_part
            .trim()
            .parse()
            .map_err(|_| Error::MalformedHex(format!("bad length {len_part:?}")))?;
        let hex = hex.trim();
        if hex.len() != len.div_ceil(4) {
            return Err(Error::MalformedHex(format!(
                "{len} bits need {} hex digits, found {}",
                len.div_ceil(4),
                hex.len()
            )));
        }
        let mut out = BitString::zeros(len);
        for (k, c) in hex.chars().enumerate() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::MalformedHex(format!("not a hex digit: {c:?}")))?;
            for j in 0..4 {
                let i = 4 * k + j;
                let bit = (v >> (3 - j)) & 1 == 1;
                if i < len {
                    out.set(i, bit);
                } else if bit {
                    return Err(Error::MalformedHex("nonzero padding bits".into()));
                }
            }
        }
        Ok(out)
    }

    /// Every string of the given length in increasing integer order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "enumeration limited to fewer than 64 bits");
        (0..(1u64 << len)).map(move |v| BitString::from_u64(v, len))
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", self.to_binary_string())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for BitString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BitString::from_hex(s)
    }
}

/// The first `d` bits of `x`.
pub fn prefix(x: &BitString, d: usize) -> Result<BitString> {
    x.prefix(d)
}
