//! Classical polar-code machinery.
//!
//! Indices follow the natural (non bit-reversed) order of the u-domain:
//! `u_1 … u_N` map to positions `0 … N-1`. The transform is
//! `x = u G_N` with `G_N = (I_{N/2} ⊗ G_2) R_N (I_2 ⊗ G_{N/2})`, `G_2 = [[1,0],[1,1]]`
//! and `R_N` the reverse shuffle `(1, 3, …, N-1, 2, 4, …, N)`.

mod correctable;
mod design;
mod montecarlo;
mod sc;
mod spec;

pub use correctable::{enumerate_correctable_set, success_probability_exact, CorrectableSet, DEFAULT_ENUMERATION_CAP};
pub use design::{design_frozen_set, genie_error_counts, rate_rule_dimension, DesignReport, Dimension};
pub use montecarlo::{monte_carlo_failure_rate, McEstimate};
pub use sc::{compress, sc_decode_with, sc_syndrome_decode, syndrome_index};
pub use spec::{PolarCodeSpec, MAX_N_EXP};

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// `x = u G_N`, in `O(N log N)`.
pub fn polar_transform(u: &BitVector) -> Result<BitVector> {
    if u.is_empty() || !u.len().is_power_of_two() {
        return Err(Error::size(format!("transform length {} is not a power of two", u.len())));
    }
    let mut bits = u.clone().into_inner();
    transform_in_place(&mut bits);
    Ok(BitVector::from_bits(bits).expect("transform preserves binary values"))
}

/// In-place transform of a power-of-two length slice of 0/1 values.
pub(crate) fn transform_in_place(buf: &mut [u8]) {
    let n = buf.len();
    if n == 1 {
        return;
    }
    // u (I_{N/2} ⊗ G_2): (a, b) -> (a ^ b, b) on adjacent pairs
    for pair in buf.chunks_exact_mut(2) {
        pair[0] ^= pair[1];
    }
    // R_N: odd positions first, then even positions
    let half = n / 2;
    let shuffled: Vec<u8> = (0..half).map(|k| buf[2 * k]).chain((0..half).map(|k| buf[2 * k + 1])).collect();
    buf.copy_from_slice(&shuffled);
    let (lo, hi) = buf.split_at_mut(half);
    transform_in_place(lo);
    transform_in_place(hi);
}

/// Bit-reversal permutation of `[2^n_exp]` (0-based images).
pub fn bit_reversal_permutation(n_exp: u32) -> Vec<usize> {
    let n = 1usize << n_exp;
    (0..n).map(|i| reverse_bits(i, n_exp)).collect()
}

pub(crate) fn reverse_bits(i: usize, width: u32) -> usize {
    if width == 0 {
        return i;
    }
    i.reverse_bits() >> (usize::BITS - width)
}
