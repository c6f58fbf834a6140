use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector over GF(2).
///
/// Position 0 is the first coordinate (`x_1`). When a vector is packed into an
/// integer, position 0 is the most significant bit, which matches the
/// computational-basis labelling `|a_1 a_2 ... a_N>` used by the simulator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector(vec![0; len])
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::validation(format!("bit value {b} is not in {{0,1}}")));
        }
        Ok(BitVector(bits))
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        BitVector(bits.iter().map(|&b| u8::from(b)).collect())
    }

    /// Unpacks `value` into `len` bits, most significant first.
    pub fn from_index(value: u64, len: usize) -> Self {
        debug_assert!(len <= 64);
        BitVector((0..len).map(|k| ((value >> (len - 1 - k)) & 1) as u8).collect())
    }

    /// Packs into an integer, most significant first.
    pub fn to_index(&self) -> u64 {
        debug_assert!(self.0.len() <= 64);
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [u8] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, bit: u8) {
        self.0[i] = bit & 1;
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        if self.len() != other.len() {
            return Err(Error::size(format!("xor of lengths {} and {}", self.len(), other.len())));
        }
        Ok(BitVector(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect()))
    }

    /// Selects the coordinates at the given 0-based positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> BitVector {
        BitVector(positions.iter().map(|&i| self.0[i]).collect())
    }
}

impl Index<usize> for BitVector {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.0[i]
    }
}

impl TryFrom<Vec<u8>> for BitVector {
    type Error = Error;
    fn try_from(bits: Vec<u8>) -> Result<Self> {
        BitVector::from_bits(bits)
    }
}

impl From<BitVector> for Vec<u8> {
    fn from(v: BitVector) -> Self {
        v.0
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}
