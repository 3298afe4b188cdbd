//! Fixed-length binary strings.
//!
//! Positions are 1-based in every public method, so `get(1)` is the first
//! (leftmost) bit. Text form prints position 1 first. Binary packing puts
//! position `8j + i + 1` in bit `i` of byte `j`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString {
    // Bits past `len` in the last word are always zero.
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self {
            words: vec![u64::MAX; len.div_ceil(WORD)],
            len,
        };
        s.clear_tail();
        s
    }

    /// Builds a string from 0/1 values. Any nonzero byte counts as a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                s.set_bit(i, true);
            }
        }
        s
    }

    /// Uniformly random string of length `len`.
    pub fn random<R: rand::RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut s = Self::zeros(len);
        for w in &mut s.words {
            *w = rng.next_u64();
        }
        s.clear_tail();
        s
    }

    /// Length-`len` string with ones exactly at the given 1-based positions.
    pub fn from_positions(len: usize, positions: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::zeros(len);
        for p in positions {
            if p == 0 || p > len {
                return Err(Error::param(format!("bit position {p} outside 1..={len}")));
            }
            s.set_bit(p - 1, true);
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at 1-based position `pos`. Panics when out of range.
    pub fn get(&self, pos: usize) -> bool {
        assert!(
            pos >= 1 && pos <= self.len,
            "bit position {pos} outside 1..={}",
            self.len
        );
        self.bit(pos - 1)
    }

    pub fn set(&mut self, pos: usize, value: bool) {
        assert!(
            pos >= 1 && pos <= self.len,
            "bit position {pos} outside 1..={}",
            self.len
        );
        self.set_bit(pos - 1, value);
    }

    pub fn flip(&mut self, pos: usize) {
        assert!(
            pos >= 1 && pos <= self.len,
            "bit position {pos} outside 1..={}",
            self.len
        );
        self.words[(pos - 1) / WORD] ^= 1 << ((pos - 1) % WORD);
    }

    #[inline]
    pub(crate) fn bit(&self, i: usize) -> bool {
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_bit(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub(crate) fn toggle_bit(&mut self, i: usize) {
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::dim("xor operand length", self.len, other.len));
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Parity of the bitwise AND. Lengths must already agree.
    #[inline]
    pub(crate) fn dot(&self, other: &BitString) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// `0^pad ∥ self`.
    pub fn zero_pad_prefix(&self, pad: usize) -> BitString {
        let mut out = BitString::zeros(pad + self.len);
        for i in self.one_indices() {
            out.set_bit(pad + i, true);
        }
        out
    }

    /// `self ∥ other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.zero_extend(self.len + other.len);
        for i in other.one_indices() {
            out.set_bit(self.len + i, true);
        }
        out
    }

    fn zero_extend(&self, len: usize) -> BitString {
        let mut words = self.words.clone();
        words.resize(len.div_ceil(WORD), 0);
        BitString { words, len }
    }

    /// The first `len` bits.
    pub fn prefix(&self, len: usize) -> BitString {
        assert!(len <= self.len);
        let mut out = BitString {
            words: self.words[..len.div_ceil(WORD)].to_vec(),
            len,
        };
        out.clear_tail();
        out
    }

    /// The last `len` bits.
    pub fn suffix(&self, len: usize) -> BitString {
        assert!(len <= self.len);
        let start = self.len - len;
        let mut out = BitString::zeros(len);
        for i in self.one_indices().filter(|&i| i >= start) {
            out.set_bit(i - start, true);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    /// 1-based positions of the set bits, ascending.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.one_indices().map(|i| i + 1)
    }

    pub(crate) fn one_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    /// Packed little-endian bytes, `len.div_ceil(8)` of them.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in self.one_indices() {
            out[i / 8] |= 1 << (i % 8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::dim(
                "packed byte count",
                len.div_ceil(8),
                bytes.len(),
            ));
        }
        let mut s = BitString::zeros(len);
        for (j, &byte) in bytes.iter().enumerate() {
            for i in 0..8 {
                if byte >> i & 1 == 1 {
                    let idx = 8 * j + i;
                    if idx >= len {
                        return Err(Error::format("nonzero padding bits in packed string"));
                    }
                    s.set_bit(idx, true);
                }
            }
        }
        Ok(s)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// `‖a ⊕ b‖`.
pub fn hamming_distance(a: &BitString, b: &BitString) -> Result<usize> {
    if a.len != b.len {
        return Err(Error::dim("hamming distance operand length", a.len, b.len));
    }
    Ok(a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum())
}

pub fn xor(a: &BitString, b: &BitString) -> Result<BitString> {
    a.xor(b)
}

pub fn zero_pad_prefix(s: &BitString, pad_len: usize) -> BitString {
    s.zero_pad_prefix(pad_len)
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses `^[01]+$`.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::format("empty bit string"));
        }
        let mut out = BitString::zeros(s.len());
        for (i, ch) in s.bytes().enumerate() {
            match ch {
                b'0' => {}
                b'1' => out.set_bit(i, true),
                _ => {
                    return Err(Error::format(format!(
                        "invalid character {:?} at offset {i} in bit string",
                        ch as char
                    )))
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hamming_distance(&b("0000"), &b("0000")).unwrap(), 0);
        assert_eq!(hamming_distance(&b("1010"), &b("0101")).unwrap(), 4);
        assert_eq!(hamming_distance(&b("1100"), &b("1000")).unwrap(), 1);
    }

    #[test]
    fn xor_examples() {
        assert_eq!(xor(&b("1010"), &b("0000")).unwrap(), b("1010"));
        assert_eq!(xor(&b("1010"), &b("1010")).unwrap(), b("0000"));
        assert_eq!(xor(&b("1100"), &b("0110")).unwrap(), b("1010"));
    }

    #[test]
    fn length_mismatch_is_dimension_error() {
        assert!(matches!(
            hamming_distance(&b("101"), &b("10")),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            xor(&b("1"), &b("10")),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn zero_pad_examples() {
        assert_eq!(zero_pad_prefix(&b("101"), 2), b("00101"));
        assert_eq!(zero_pad_prefix(&b("101"), 0), b("101"));
        assert_eq!(zero_pad_prefix(&BitString::zeros(0), 3), b("000"));
    }

    #[test]
    fn one_based_positions() {
        let s = b("1000");
        assert!(s.get(1));
        assert!(!s.get(4));
        assert_eq!(s.ones_positions().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn byte_packing_layout() {
        // positions 1 and 10 -> bit 0 of byte 0, bit 1 of byte 1
        let s = BitString::from_positions(12, [1, 10]).unwrap();
        assert_eq!(s.to_bytes(), vec![0b0000_0001, 0b0000_0010]);
        assert_eq!(BitString::from_bytes(&s.to_bytes(), 12).unwrap(), s);
        assert!(BitString::from_bytes(&[0, 0b1000_0000], 12).is_err());
    }

    #[test]
    fn rejects_bad_text() {
        assert!("".parse::<BitString>().is_err());
        assert!("10a1".parse::<BitString>().is_err());
        assert!("1 0".parse::<BitString>().is_err());
    }

    #[test]
    fn prefix_suffix_concat_across_words() {
        let s = BitString::from_positions(130, [1, 64, 65, 100, 130]).unwrap();
        let p = s.prefix(70);
        let q = s.suffix(60);
        assert_eq!(p.concat(&q), s);
        assert_eq!(q.ones_positions().collect::<Vec<_>>(), vec![30, 60]);
        assert_eq!(BitString::ones(130).weight(), 130);
    }

    fn pair(len: usize) -> impl Strategy<Value = (Vec<u8>, Vec<u8>, Vec<u8>)> {
        let v = || proptest::collection::vec(0u8..2, len);
        (v(), v(), v())
    }

    proptest! {
        #[test]
        fn distance_is_weight_of_xor((a, b_, c) in (1usize..200).prop_flat_map(pair)) {
            let (a, b_, c) = (BitString::from_bits(&a), BitString::from_bits(&b_), BitString::from_bits(&c));
            let d_ab = hamming_distance(&a, &b_).unwrap();
            prop_assert_eq!(d_ab, a.xor(&b_).unwrap().weight());
            prop_assert_eq!(d_ab, hamming_distance(&b_, &a).unwrap());
            prop_assert_eq!(d_ab == 0, a == b_);
            let d_ac = hamming_distance(&a, &c).unwrap();
            let d_bc = hamming_distance(&b_, &c).unwrap();
            prop_assert!(d_ac <= d_ab + d_bc);
            // associativity
            prop_assert_eq!(a.xor(&b_).unwrap().xor(&c).unwrap(), a.xor(&b_.xor(&c).unwrap()).unwrap());
        }

        #[test]
        fn text_and_bytes_roundtrip(bits in proptest::collection::vec(0u8..2, 1..300), pad in 0usize..70) {
            let s = BitString::from_bits(&bits);
            prop_assert_eq!(s.to_string().parse::<BitString>().unwrap(), s.clone());
            prop_assert_eq!(BitString::from_bytes(&s.to_bytes(), s.len()).unwrap(), s.clone());
            let padded = s.zero_pad_prefix(pad);
            prop_assert_eq!(padded.prefix(pad).weight(), 0);
            prop_assert_eq!(padded.suffix(s.len()), s);
        }
    }
}
