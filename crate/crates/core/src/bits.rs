//! Bit strings, index subsets and packed bit vectors.
//!
//! Bit order convention: position 1 is the leftmost character of a bit
//! string and the most significant bit of its integer value. The same
//! convention maps qubit 1 to the most significant bit of a basis index.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Longest bit string representable by [`BitString`].
pub const MAX_BITS: usize = 64;

/// A bit string of length at most 64, stored as an integer whose most
/// significant used bit is position 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    value: u64,
}

impl BitString {
    pub fn new(len: usize, value: u64) -> Result<Self> {
        if len > MAX_BITS {
            return Err(Error::InvalidParameter("bit strings are limited to 64 bits"));
        }
        if len < MAX_BITS && value >> len != 0 {
            return Err(Error::InvalidParameter("value has bits beyond the string length"));
        }
        Ok(Self { len, value })
    }

    pub fn zeros(len: usize) -> Self {
        Self { len, value: 0 }
    }

    pub fn ones(len: usize) -> Self {
        Self { len, value: low_mask(len) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Bit at 1-based position `pos`.
    pub fn bit(&self, pos: usize) -> bool {
        debug_assert!(pos >= 1 && pos <= self.len);
        (self.value >> (self.len - pos)) & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.value.count_ones()
    }

    pub fn complement(&self) -> Self {
        Self { len: self.len, value: !self.value & low_mask(self.len) }
    }

    /// Flip the bit at 1-based position `pos`.
    pub fn flip(&self, pos: usize) -> Self {
        Self { len: self.len, value: self.value ^ (1u64 << (self.len - pos)) }
    }

    /// Parity of the bitwise AND, i.e. the inner product over GF(2).
    pub fn dot(&self, other: &Self) -> bool {
        (self.value & other.value).count_ones() & 1 == 1
    }
}

pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pos in 1..=self.len {
            f.write_str(if self.bit(pos) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_BITS {
            return Err(Error::Parse("bit string longer than 64 characters"));
        }
        let mut value = 0u64;
        for c in s.chars() {
            value = match c {
                '0' => value << 1,
                '1' => (value << 1) | 1,
                _ => return Err(Error::Parse("bit strings contain only '0' and '1'")),
            };
        }
        Ok(Self { len: s.len(), value })
    }
}

/// Bob's input: a strictly increasing list of 1-based indices into an
/// `n`-bit string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    n: usize,
    indices: Vec<usize>,
}

impl Subset {
    /// Builds a subset, sorting the indices. Duplicates and out-of-range
    /// indices are rejected.
    pub fn new(n: usize, indices: impl Into<Vec<usize>>) -> Result<Self> {
        let mut indices = indices.into();
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSubset("repeated index"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > n) {
            return Err(Error::IndexOutOfRange { index: bad, num_qubits: n });
        }
        Ok(Self { n, indices })
    }

    pub fn full(n: usize) -> Self {
        Self { n, indices: (1..=n).collect() }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Bit mask selecting the subset's positions inside an `n`-bit value.
    pub fn mask(&self) -> u64 {
        self.indices.iter().fold(0, |acc, &i| acc | (1u64 << (self.n - i)))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset{:?}", self.indices)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (j, i) in self.indices.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// A packed, MSB-first bit vector of arbitrary length.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    bytes: Vec<u8>,
}

impl Bits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self { len: 0, bytes: Vec::with_capacity(bits.div_ceil(8)) }
    }

    /// Rebuilds a vector of `len` bits from its zero-padded byte form.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::MalformedPayload("byte count does not match bit length"));
        }
        let pad = bytes.len() * 8 - len;
        if pad > 0 && bytes[bytes.len() - 1] & ((1u8 << pad) - 1) != 0 {
            return Err(Error::MalformedPayload("non-zero padding bits"));
        }
        Ok(Self { len, bytes: bytes.to_vec() })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: usize) {
        for shift in (0..width).rev() {
            self.push((value >> shift) & 1 == 1);
        }
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index out of range");
        self.bytes[index / 8] & (0x80 >> (index % 8)) != 0
    }

    /// Reads `width` bits starting at `start` as an unsigned integer.
    pub fn read_uint(&self, start: usize, width: usize) -> u64 {
        (start..start + width).fold(0, |acc, i| (acc << 1) | self.get(i) as u64)
    }

    /// Byte form, zero-padded at the end.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits[{}]", self.len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn bit_positions_are_msb_first() {
        let x: BitString = "1010".parse().unwrap();
        assert_eq!(x.value(), 0b1010);
        assert!(x.bit(1));
        assert!(!x.bit(2));
        assert!(x.bit(3));
        assert_eq!(alloc::format!("{x}"), "1010");
        assert_eq!(x.complement().to_string(), "0101");
        assert_eq!(x.flip(4).to_string(), "1011");
    }

    #[test]
    fn rejects_bad_strings() {
        assert!("10a".parse::<BitString>().is_err());
        assert!(BitString::new(3, 0b1000).is_err());
    }

    #[test]
    fn subset_validation() {
        let y = Subset::new(4, [3, 1]).unwrap();
        assert_eq!(y.indices(), &[1, 3]);
        assert_eq!(y.mask(), 0b1010);
        assert!(Subset::new(4, [1, 1]).is_err());
        assert!(matches!(Subset::new(4, [5]), Err(Error::IndexOutOfRange { index: 5, .. })));
        assert!(Subset::new(4, [0]).is_err());
    }

    #[test]
    fn packed_bits_pad_with_zeros() {
        let mut b = Bits::new();
        b.push_uint(0b101, 3);
        b.push_uint(0b11111, 5);
        b.push(true);
        assert_eq!(b.len(), 9);
        assert_eq!(b.as_bytes(), &[0b1011_1111, 0b1000_0000]);
        assert_eq!(b.read_uint(0, 3), 0b101);
        assert_eq!(Bits::from_bytes(b.as_bytes(), 9).unwrap(), b);
        assert!(Bits::from_bytes(&[0xff, 0xff], 9).is_err());
        assert!(Bits::from_bytes(&[0xff], 9).is_err());
    }
}
