//! Lifted successive cancellation with conditional messages.
//!
//! Classical messages never depend on the quantum state, so the schedule is
//! evaluated once into a list of leaf steps. Each information leaf yields a
//! hard-decision message `{h_vec, L_F}` controlled only by frozen qubits, which
//! becomes a conditional flip (Bob) or a conditional projector (Alice).

use std::fmt;

use crate::bits::BitVector;
use crate::error::Result;
use crate::messages::{combine, ConditionalMessage, HardDecisionMessage, Rule};
use crate::polar::PolarCodeSpec;
use crate::scalar::Probability;

/// One information leaf of the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafStep {
    /// 0-based u-index, which is also the qubit position.
    pub target: usize,
    pub decision: HardDecisionMessage,
}

impl LeafStep {
    /// 0-based positions of the controlling frozen qubits.
    pub fn controls(&self) -> Vec<usize> {
        self.decision.frozen().iter().map(|l| l - 1).collect()
    }
}

/// Where a traced message sits in the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// Check-node output feeding the first-half subproblem.
    Check,
    /// Bit-node output feeding the second-half subproblem.
    Bit,
    /// Message arriving at an information leaf.
    InfoLeaf,
    /// Hard decision taken at an information leaf.
    Decision,
    /// Message sent back by a frozen leaf.
    FrozenLeaf,
}

#[derive(Clone)]
pub struct TraceEntry<P> {
    pub kind: TraceKind,
    /// Length of the subproblem the message belongs to.
    pub block: usize,
    /// First 0-based leaf covered by the subproblem.
    pub first_leaf: usize,
    /// Position inside the subproblem's message list.
    pub position: usize,
    pub message: ConditionalMessage<P>,
}

impl<P: Probability> TraceEntry<P> {
    pub fn describe(&self) -> String {
        let what = match self.kind {
            TraceKind::Check => format!("check  block={} leaves={}..", self.block, self.first_leaf + 1),
            TraceKind::Bit => format!("bit    block={} leaves={}..", self.block, self.first_leaf + 1),
            TraceKind::InfoLeaf => format!("u{} in", self.first_leaf + 1),
            TraceKind::Decision => format!("u{} hard", self.first_leaf + 1),
            TraceKind::FrozenLeaf => format!("u{} frozen", self.first_leaf + 1),
        };
        let body = match self.kind {
            TraceKind::Decision => self.message.hard_decision().dump(),
            _ => self.message.dump(),
        };
        format!("{what:<28} [{}] {body}", self.position)
    }
}

/// The evaluated schedule.
#[derive(Clone)]
pub struct LiftedPlan<P> {
    n: usize,
    steps: Vec<LeafStep>,
    trace: Vec<TraceEntry<P>>,
    /// Re-encoded code-bit messages `x̂_j` conditioned on frozen values.
    outputs: Vec<ConditionalMessage<P>>,
}

impl<P: Probability> fmt::Debug for TraceEntry<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl<P: Probability> fmt::Debug for LiftedPlan<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LiftedPlan").field("n", &self.n).field("steps", &self.steps).finish_non_exhaustive()
    }
}

impl<P: Probability> LiftedPlan<P> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> &[LeafStep] {
        &self.steps
    }

    pub fn trace(&self) -> &[TraceEntry<P>] {
        &self.trace
    }

    pub fn outputs(&self) -> &[ConditionalMessage<P>] {
        &self.outputs
    }

    /// Classical read-out: the information bits chosen for a given frozen assignment
    /// (0/1 per u-position, frozen positions taken from `syndrome`).
    pub fn decide(&self, spec: &PolarCodeSpec, syndrome: &BitVector) -> BitVector {
        let mut u = BitVector::zeros(self.n);
        for (&pos, &b) in spec.frozen_positions().iter().zip(syndrome.as_slice()) {
            u.set(pos, b);
        }
        for step in &self.steps {
            let sel = step.decision.frozen().iter().fold(0usize, |acc, &l| (acc << 1) | usize::from(u[l - 1]));
            u.set(step.target, step.decision.bits()[sel]);
        }
        u
    }
}

/// Evaluates the lifted schedule for source probability `source_p` at every code bit.
///
/// `max_conditions` caps the conditioning width of any intermediate message.
pub fn lifted_plan<P: Probability>(spec: &PolarCodeSpec, source_p: &P, max_conditions: usize) -> Result<LiftedPlan<P>> {
    let inputs = vec![ConditionalMessage::unconditioned(source_p.clone()); spec.n()];
    let mut ctx = Ctx { mask: spec.frozen_mask(), max_conditions, steps: Vec::new(), trace: Vec::new() };
    let outputs = ctx.descend(&inputs, 0)?;
    Ok(LiftedPlan { n: spec.n(), steps: ctx.steps, trace: ctx.trace, outputs })
}

struct Ctx<'a, P> {
    mask: &'a [bool],
    max_conditions: usize,
    steps: Vec<LeafStep>,
    trace: Vec<TraceEntry<P>>,
}

impl<P: Probability> Ctx<'_, P> {
    fn record(&mut self, kind: TraceKind, block: usize, first_leaf: usize, position: usize, message: &ConditionalMessage<P>) {
        self.trace.push(TraceEntry { kind, block, first_leaf, position, message: message.clone() });
    }

    fn check(&self, a: &ConditionalMessage<P>, b: &ConditionalMessage<P>) -> Result<ConditionalMessage<P>> {
        combine(Rule::Check, a, b, self.max_conditions).map(|c| c.message)
    }

    fn bit(&self, a: &ConditionalMessage<P>, b: &ConditionalMessage<P>) -> Result<ConditionalMessage<P>> {
        combine(Rule::Bit, a, b, self.max_conditions).map(|c| c.message)
    }

    // Same recursion as the scalar SC decoder: the first half sees c_{2j} ⊕ c_{2j+1},
    // the second half sees c_{2j+1}. Returns hard code-bit messages.
    fn descend(&mut self, msgs: &[ConditionalMessage<P>], first_leaf: usize) -> Result<Vec<ConditionalMessage<P>>> {
        let n = msgs.len();
        if n == 1 {
            if self.mask[first_leaf] {
                let m = ConditionalMessage::frozen_leaf(first_leaf + 1);
                self.record(TraceKind::FrozenLeaf, 1, first_leaf, 0, &m);
                return Ok(vec![m]);
            }
            self.record(TraceKind::InfoLeaf, 1, first_leaf, 0, &msgs[0]);
            let decision = msgs[0].hard_decision();
            let as_msg = decision.to_message();
            self.record(TraceKind::Decision, 1, first_leaf, 0, &msgs[0]);
            self.steps.push(LeafStep { target: first_leaf, decision });
            return Ok(vec![as_msg]);
        }
        let half = n / 2;
        let mut upper = Vec::with_capacity(half);
        for (j, pair) in msgs.chunks_exact(2).enumerate() {
            let m = self.check(&pair[0], &pair[1])?;
            self.record(TraceKind::Check, half, first_leaf, j, &m);
            upper.push(m);
        }
        let a = self.descend(&upper, first_leaf)?;
        let mut lower = Vec::with_capacity(half);
        for (j, (pair, aj)) in msgs.chunks_exact(2).zip(&a).enumerate() {
            let m = self.bit(&pair[1], &self.check(&pair[0], aj)?)?;
            self.record(TraceKind::Bit, half, first_leaf + half, j, &m);
            lower.push(m);
        }
        let b = self.descend(&lower, first_leaf + half)?;
        let mut out = Vec::with_capacity(n);
        for (aj, bj) in a.iter().zip(b) {
            out.push(self.check(aj, &bj)?);
            out.push(bj);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::messages::DEFAULT_MAX_CONDITIONS;
    use crate::polar::{polar_transform, sc_syndrome_decode};
    use num_rational::BigRational;

    #[test]
    fn four_bit_example_messages() {
        let spec = PolarCodeSpec::with_frozen(2, vec![1, 3]).unwrap();
        let plan = lifted_plan(&spec, &BigRational::from_ratio(1, 10), DEFAULT_MAX_CONDITIONS).unwrap();
        let r = |n, d| BigRational::from_ratio(n, d);
        let checks: Vec<_> = plan.trace().iter().filter(|e| e.kind == TraceKind::Check).collect();
        assert_eq!(checks[0].message.probs(), &[r(9, 50)]);
        assert_eq!(checks[2].message.probs(), &[r(738, 2500)]);
        let u2 = plan.trace().iter().find(|e| e.kind == TraceKind::InfoLeaf).unwrap();
        assert_eq!(u2.first_leaf, 1);
        assert_eq!(u2.message.frozen(), &[1]);
        assert_eq!(u2.message.probs(), &[r(81, 1762), r(1, 2)]);
        let u4 = plan.trace().iter().filter(|e| e.kind == TraceKind::InfoLeaf).nth(1).unwrap();
        assert_eq!(u4.message.frozen(), &[1, 3]);
        assert_eq!(u4.message.probs().len(), 4);
        assert_eq!(plan.steps().len(), 2);
    }

    #[test]
    fn classical_readout_matches_scalar_decoder() {
        let spec = PolarCodeSpec::with_frozen(3, vec![1, 2, 3, 5, 6]).unwrap();
        let plan = lifted_plan(&spec, &0.07, DEFAULT_MAX_CONDITIONS).unwrap();
        for s in 0..32 {
            let syn = BitVector::from_index(s, 5);
            let x = polar_transform(&plan.decide(&spec, &syn)).unwrap();
            assert_eq!(x, sc_syndrome_decode(&spec, &syn, &0.07).unwrap());
        }
    }
}
