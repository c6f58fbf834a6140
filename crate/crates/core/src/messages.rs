//! Conditional messages for lifted successive cancellation.
//!
//! A conditional message `{p_vec, L_F}` holds one probability (that the bit
//! is 1) for every assignment of the frozen qubits listed in `L_F`. Entry `b`
//! corresponds to the assignment whose bits, read most significant first,
//! are the values of `L_F(1), L_F(2), ...`. Frozen labels are 1-based qubit
//! indices, the same labels printed in traces.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Probability;

/// Largest conditioning width accepted by default (2^24 entries).
pub const DEFAULT_MAX_CONDITIONS: usize = 24;

/// Check-node rule: probability that the XOR of two independent bits is 1.
pub fn boxplus<P: Probability>(a: &P, b: &P) -> P {
    let one = P::one();
    a.clone() * (one.clone() - b.clone()) + b.clone() * (one - a.clone())
}

/// Bit-node rule: posterior that a bit is 1 given two independent observations.
///
/// Returns `None` when both observations are certain and contradict each other.
pub fn boxdot<P: Probability>(a: &P, b: &P) -> Option<P> {
    let one = P::one();
    let num = a.clone() * b.clone();
    let den = num.clone() + (one.clone() - a.clone()) * (one - b.clone());
    if den.is_zero() {
        None
    } else {
        Some(num / den)
    }
}

/// Threshold at one half; ties decide 0.
pub fn hard_decision_bit<P: Probability>(q: &P) -> u8 {
    u8::from(*q > P::half())
}

/// Which combining rule a node applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// `⊞`
    Check,
    /// `⊛`
    Bit,
}

#[derive(Clone, PartialEq)]
pub struct ConditionalMessage<P> {
    probs: Vec<P>,
    frozen: Vec<usize>,
}

impl<P: Probability> ConditionalMessage<P> {
    pub fn new(probs: Vec<P>, frozen: Vec<usize>) -> Result<Self> {
        if frozen.len() >= usize::BITS as usize - 1 {
            return Err(Error::resource(format!("{} conditioning qubits", frozen.len())));
        }
        if probs.len() != 1usize << frozen.len() {
            return Err(Error::invariant(format!(
                "message over {} frozen qubits has {} entries",
                frozen.len(),
                probs.len()
            )));
        }
        if frozen.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invariant(format!("frozen list {frozen:?} is not strictly increasing")));
        }
        if frozen.first() == Some(&0) {
            return Err(Error::invariant("frozen labels are 1-based"));
        }
        let zero = P::zero();
        let one = P::one();
        if probs.iter().any(|q| *q < zero || *q > one) {
            return Err(Error::invariant("message entry outside [0, 1]"));
        }
        Ok(ConditionalMessage { probs, frozen })
    }

    /// `{{p}, {}}`
    pub fn unconditioned(p: P) -> Self {
        ConditionalMessage { probs: vec![p], frozen: Vec::new() }
    }

    /// Message sent back by a frozen leaf: `{{0, 1}, {label}}`.
    pub fn frozen_leaf(label: usize) -> Self {
        assert!(label >= 1, "frozen labels are 1-based");
        ConditionalMessage { probs: vec![P::zero(), P::one()], frozen: vec![label] }
    }

    pub fn probs(&self) -> &[P] {
        &self.probs
    }

    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    pub fn width(&self) -> usize {
        self.frozen.len()
    }

    /// Entry selected by the frozen values, looked up by label.
    pub fn entry_for(&self, value_of: impl Fn(usize) -> u8) -> &P {
        let idx = self.frozen.iter().fold(0usize, |acc, &label| (acc << 1) | usize::from(value_of(label) & 1));
        &self.probs[idx]
    }

    pub fn hard_decision(&self) -> HardDecisionMessage {
        HardDecisionMessage {
            bits: self.probs.iter().map(hard_decision_bit).collect(),
            frozen: self.frozen.clone(),
        }
    }

    /// One-line debug dump, `L_F=[i,j,…] p=[…]`.
    pub fn dump(&self) -> String {
        let labels: Vec<String> = self.frozen.iter().map(|l| l.to_string()).collect();
        let probs: Vec<String> = self.probs.iter().map(|q| q.to_f64().to_string()).collect();
        format!("L_F=[{}] p=[{}]", labels.join(","), probs.join(","))
    }
}

impl<P: Probability> fmt::Debug for ConditionalMessage<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// Hard decisions `{h_vec, L_F}` of a conditional message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardDecisionMessage {
    bits: Vec<u8>,
    frozen: Vec<usize>,
}

impl HardDecisionMessage {
    pub fn new(bits: Vec<u8>, frozen: Vec<usize>) -> Result<Self> {
        if bits.len() != 1usize << frozen.len() {
            return Err(Error::invariant("hard decision length is not 2^|L_F|"));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invariant("hard decision entry outside {0,1}"));
        }
        Ok(HardDecisionMessage { bits, frozen })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// The decision as a `{0,1}`-valued conditional message.
    pub fn to_message<P: Probability>(&self) -> ConditionalMessage<P> {
        ConditionalMessage {
            probs: self.bits.iter().map(|&b| if b == 1 { P::one() } else { P::zero() }).collect(),
            frozen: self.frozen.clone(),
        }
    }

    pub fn dump(&self) -> String {
        let labels: Vec<String> = self.frozen.iter().map(|l| l.to_string()).collect();
        let bits: Vec<String> = self.bits.iter().map(|b| b.to_string()).collect();
        format!("L_F=[{}] h=[{}]", labels.join(","), bits.join(","))
    }
}

/// A combined message plus the positions whose bit-node denominator vanished.
#[derive(Clone)]
pub struct Combined<P> {
    pub message: ConditionalMessage<P>,
    /// Entries set to 1/2 because the two inputs were contradictory certainties.
    pub inconsistent: Vec<usize>,
}

impl<P: Probability> fmt::Debug for Combined<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} inconsistent={:?}", self.message.dump(), self.inconsistent)
    }
}

pub fn cnop<P: Probability>(a: &ConditionalMessage<P>, b: &ConditionalMessage<P>) -> Result<ConditionalMessage<P>> {
    combine(Rule::Check, a, b, DEFAULT_MAX_CONDITIONS).map(|c| c.message)
}

pub fn bnop<P: Probability>(a: &ConditionalMessage<P>, b: &ConditionalMessage<P>) -> Result<ConditionalMessage<P>> {
    combine(Rule::Bit, a, b, DEFAULT_MAX_CONDITIONS).map(|c| c.message)
}

/// Combines two conditional messages with the given rule.
///
/// Follows the intersection / left-only / right-only triple loop: both inputs
/// are first reordered to `(L∩, L1)` and `(L∩, L2)` order, combined entrywise
/// over `(L∩, L1, L2)`, and the result is reordered to the ascending union.
pub fn combine<P: Probability>(
    rule: Rule,
    a: &ConditionalMessage<P>,
    b: &ConditionalMessage<P>,
    max_conditions: usize,
) -> Result<Combined<P>> {
    let shared: Vec<usize> = a.frozen.iter().copied().filter(|l| b.frozen.contains(l)).collect();
    let left: Vec<usize> = a.frozen.iter().copied().filter(|l| !shared.contains(l)).collect();
    let right: Vec<usize> = b.frozen.iter().copied().filter(|l| !shared.contains(l)).collect();

    let width = shared.len() + left.len() + right.len();
    if width > max_conditions {
        return Err(Error::resource(format!(
            "combined message needs {width} conditioning qubits, cap is {max_conditions}"
        )));
    }

    let a_order: Vec<usize> = shared.iter().chain(&left).copied().collect();
    let b_order: Vec<usize> = shared.iter().chain(&right).copied().collect();
    let a_re = reorder(&a.probs, &a.frozen, &a_order);
    let b_re = reorder(&b.probs, &b.frozen, &b_order);

    let (n_shared, n_left, n_right) = (1usize << shared.len(), 1usize << left.len(), 1usize << right.len());
    let mut out = Vec::with_capacity(n_shared * n_left * n_right);
    let mut inconsistent = Vec::new();
    for i in 0..n_shared {
        for j in 0..n_left {
            let q = &a_re[i * n_left + j];
            for k in 0..n_right {
                let q2 = &b_re[i * n_right + k];
                let v = match rule {
                    Rule::Check => boxplus(q, q2),
                    Rule::Bit => boxdot(q, q2).unwrap_or_else(|| {
                        inconsistent.push(out.len());
                        P::half()
                    }),
                };
                out.push(v);
            }
        }
    }

    let combined_order: Vec<usize> = shared.iter().chain(&left).chain(&right).copied().collect();
    let mut sorted = combined_order.clone();
    sorted.sort_unstable();
    let probs = reorder(&out, &combined_order, &sorted);
    let inconsistent = inconsistent
        .into_iter()
        .map(|idx| reindex(idx, &combined_order, &sorted))
        .collect();
    Ok(Combined {
        message: ConditionalMessage { probs, frozen: sorted },
        inconsistent,
    })
}

/// Moves an MSB-first assignment index from label order `from` to label order `to`.
fn reindex(idx: usize, from: &[usize], to: &[usize]) -> usize {
    let l = from.len();
    to.iter().fold(0usize, |acc, label| {
        let pos = from.iter().position(|x| x == label).expect("same label set");
        (acc << 1) | ((idx >> (l - 1 - pos)) & 1)
    })
}

fn reorder<P: Clone>(values: &[P], from: &[usize], to: &[usize]) -> Vec<P> {
    if from == to {
        return values.to_vec();
    }
    let l = from.len();
    // bit position (MSB-first) in `from` for each label of `to`
    let shifts: Vec<usize> = to
        .iter()
        .map(|label| l - 1 - from.iter().position(|x| x == label).expect("same label set"))
        .collect();
    (0..values.len())
        .map(|t| {
            let src = shifts
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &shift)| acc | (((t >> (l - 1 - k)) & 1) << shift));
            values[src].clone()
        })
        .collect()
}
