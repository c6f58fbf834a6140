use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::messages::{boxdot, boxplus, hard_decision_bit};
use crate::scalar::Probability;

use super::{transform_in_place, PolarCodeSpec};

/// Compressed image of `x`: the frozen coordinates of `u = x G_N`, in increasing index order.
pub fn compress(spec: &PolarCodeSpec, x: &BitVector) -> Result<BitVector> {
    if x.len() != spec.n() {
        return Err(Error::size(format!("pattern length {} for blocklength {}", x.len(), spec.n())));
    }
    let mut u = x.clone().into_inner();
    transform_in_place(&mut u);
    Ok(BitVector::from_bits(spec.frozen_positions().iter().map(|&i| u[i]).collect()).expect("binary"))
}

/// Successive-cancellation syndrome decoder, the decompressor `f`.
///
/// Frozen leaves take the syndrome bits in increasing index order; information
/// leaves take the hard decision of the SC likelihood under i.i.d.
/// Bernoulli(`source_p`) inputs. Returns the pattern `x = û G_N`.
pub fn sc_syndrome_decode<P: Probability>(spec: &PolarCodeSpec, syndrome: &BitVector, source_p: &P) -> Result<BitVector> {
    if syndrome.len() != spec.frozen_count() {
        return Err(Error::size(format!(
            "syndrome length {} but code has {} frozen indices",
            syndrome.len(),
            spec.frozen_count()
        )));
    }
    if !(*source_p > P::zero() && *source_p < P::one()) {
        return Err(Error::param("source probability must lie in (0, 1)"));
    }
    let mask = spec.frozen_mask();
    let mut next_frozen = 0usize;
    let inputs = vec![source_p.clone(); spec.n()];
    let x = sc_decode_with(&inputs, |leaf, q| {
        if mask[leaf] {
            let b = syndrome[next_frozen];
            next_frozen += 1;
            b
        } else {
            hard_decision_bit(q)
        }
    });
    Ok(BitVector::from_bits(x).expect("binary"))
}

/// Runs the SC schedule over `inputs` (probability that each code bit is 1).
///
/// `decide(leaf, q)` is called once per leaf in natural order `0..N` with the
/// leaf's probability of being 1 and returns the bit to commit. Returns the
/// re-encoded code bits `û G_N`.
pub fn sc_decode_with<P: Probability>(inputs: &[P], mut decide: impl FnMut(usize, &P) -> u8) -> Vec<u8> {
    assert!(inputs.len().is_power_of_two(), "SC input length must be a power of two");
    descend(inputs, 0, &mut decide)
}

// Adjacent code bits (c_{2j}, c_{2j+1}) combine into the first-half subproblem as
// c_{2j} ^ c_{2j+1} and into the second-half subproblem as c_{2j+1}.
fn descend<P: Probability>(probs: &[P], first_leaf: usize, decide: &mut impl FnMut(usize, &P) -> u8) -> Vec<u8> {
    let n = probs.len();
    if n == 1 {
        return vec![decide(first_leaf, &probs[0]) & 1];
    }
    let half = n / 2;
    let upper: Vec<P> = probs.chunks_exact(2).map(|c| boxplus(&c[0], &c[1])).collect();
    let a = descend(&upper, first_leaf, decide);
    let one = P::one();
    let lower: Vec<P> = probs
        .chunks_exact(2)
        .zip(&a)
        .map(|(c, &aj)| {
            let partner = if aj == 1 { one.clone() - c[0].clone() } else { c[0].clone() };
            boxdot(&c[1], &partner).unwrap_or_else(P::half).guard()
        })
        .collect();
    let b = descend(&lower, first_leaf + half, decide);
    let mut out = Vec::with_capacity(n);
    for (aj, bj) in a.into_iter().zip(b) {
        out.push(aj ^ bj);
        out.push(bj);
    }
    out
}

/// Row index of a syndrome when syndromes are enumerated as integers (first bit most significant).
pub fn syndrome_index(syndrome: &BitVector) -> usize {
    syndrome.to_index() as usize
}
