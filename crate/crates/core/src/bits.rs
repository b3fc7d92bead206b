use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A bit string, most significant bit first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new() -> Self {
        Bits(Vec::new())
    }

    /// Fixed-width big-endian encoding of `value`.
    pub fn from_field(value: u64, width: u32) -> Self {
        let mut b = Bits::new();
        b.push_field(value, width);
        b
    }

    pub fn push_field(&mut self, value: u64, width: u32) {
        debug_assert!(width >= 64 || value < (1u64 << width));
        for i in (0..width).rev() {
            self.0.push((value >> i) & 1 == 1);
        }
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend(&mut self, other: &Bits) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// Interprets the string as an unsigned integer after right-padding with
    /// zeros to `width` bits.
    pub fn padded_value(&self, width: u32) -> Option<u64> {
        if self.0.len() > width as usize || width > 64 {
            return None;
        }
        let mut v = 0u64;
        for &b in &self.0 {
            v = (v << 1) | b as u64;
        }
        Some(v << (width as usize - self.0.len()))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parameter(format!("invalid bit {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

/// Number of bits needed to write one of `alphabet` symbols.
pub fn width_for(alphabet: u64) -> u32 {
    if alphabet <= 1 {
        0
    } else {
        64 - (alphabet - 1).leading_zeros()
    }
}
