use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::messages::hard_decision_bit;
use crate::rng;
use crate::scalar::binary_entropy;

use super::{sc_decode_with, transform_in_place, PolarCodeSpec, MAX_N_EXP};

/// How many information indices a designed code keeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dimension {
    Explicit(usize),
    /// `K = ⌊(1 - h(p) - δ) N⌋`.
    RateRule { delta: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignReport {
    pub spec: PolarCodeSpec,
    /// Genie-aided decision errors per u-index (0-based).
    pub error_counts: Vec<u64>,
    pub trials: u64,
}

impl DesignReport {
    pub fn error_rates(&self) -> Vec<f64> {
        self.error_counts.iter().map(|&c| c as f64 / self.trials as f64).collect()
    }
}

/// `⌊(1 - h(p) - δ) N⌋`, clamped to `[0, N]`.
pub fn rate_rule_dimension(n: usize, p: f64, delta: f64) -> usize {
    let k = ((1.0 - binary_entropy(p) - delta) * n as f64).floor();
    k.clamp(0.0, n as f64) as usize
}

/// Per-index decision errors of genie-aided SC syndrome decoding.
///
/// Each trial draws an error pattern `e` from a BSC(`design_p`) and takes
/// `u = e G_N` as the truth. Every leaf is decided from the uniform prior
/// `design_p`, counted as an error if the decision differs from `u`, then fixed
/// to the true value. Ties resolve to 0 exactly as in the decoder, so indices
/// that tie often are ranked as unreliable.
pub fn genie_error_counts(n_exp: u32, design_p: f64, trials: u64, seed: u64) -> Result<Vec<u64>> {
    if n_exp == 0 || n_exp > MAX_N_EXP {
        return Err(Error::param(format!("n_exp must be in 1..={MAX_N_EXP}, got {n_exp}")));
    }
    if !(design_p > 0.0 && design_p <= 0.5) {
        return Err(Error::param(format!("design_p must be in (0, 0.5], got {design_p}")));
    }
    if trials == 0 {
        return Err(Error::param("mc_trials must be at least 1"));
    }
    let n = 1usize << n_exp;
    let probs = vec![design_p; n];
    let partial = rng::chunked(trials, seed, |rng, count| {
        let mut counts = vec![0u64; n];
        let mut u = vec![0u8; n];
        for _ in 0..count {
            for b in u.iter_mut() {
                *b = u8::from(rng.random_bool(design_p));
            }
            transform_in_place(&mut u);
            sc_decode_with(&probs, |leaf, q| {
                counts[leaf] += u64::from(hard_decision_bit(q) != u[leaf]);
                u[leaf]
            });
        }
        counts
    });
    Ok(partial.into_iter().fold(vec![0u64; n], |mut acc, c| {
        acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        acc
    }))
}

/// Monte Carlo code design: freezes the `N - K` least reliable indices.
///
/// Ties in the error count freeze the lower index first.
pub fn design_frozen_set(n_exp: u32, design_p: f64, dimension: Dimension, mc_trials: u64, seed: u64) -> Result<DesignReport> {
    let counts = genie_error_counts(n_exp, design_p, mc_trials, seed)?;
    let n = counts.len();
    let k = match dimension {
        Dimension::Explicit(k) if k > n => return Err(Error::param(format!("K = {k} exceeds N = {n}"))),
        Dimension::Explicit(k) => k,
        Dimension::RateRule { delta } if !(delta >= 0.0) => return Err(Error::param("delta must be non-negative")),
        Dimension::RateRule { delta } => rate_rule_dimension(n, design_p, delta),
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    let mut frozen: Vec<usize> = order[..n - k].iter().map(|i| i + 1).collect();
    frozen.sort_unstable();
    let spec = PolarCodeSpec::new(n_exp, frozen, design_p, mc_trials, seed)?;
    Ok(DesignReport { spec, error_counts: counts, trials: mc_trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_rule_matches_hand_values() {
        assert_eq!(rate_rule_dimension(1024, 0.05, 0.1), 628);
        assert_eq!(rate_rule_dimension(64, 0.05, 0.1), 39);
        assert_eq!(rate_rule_dimension(8, 0.5, 0.1), 0);
    }

    #[test]
    fn zero_trials_is_a_parameter_error() {
        assert!(matches!(design_frozen_set(2, 0.1, Dimension::Explicit(2), 0, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn rate_zero_freezes_everything() {
        let r = design_frozen_set(3, 0.1, Dimension::Explicit(0), 10, 1).unwrap();
        assert_eq!(r.spec.frozen_set(), &[1, 2, 3, 4, 5, 6, 7, 8]);
        let r = design_frozen_set(3, 0.1, Dimension::Explicit(8), 10, 1).unwrap();
        assert!(r.spec.frozen_set().is_empty());
    }

    #[test]
    fn tiny_p_freezes_first_index() {
        let r = design_frozen_set(2, 1e-9, Dimension::Explicit(3), 1000, 3).unwrap();
        assert_eq!(r.spec.frozen_set(), &[1]);
    }

    #[test]
    fn length_eight_design_is_the_standard_code() {
        let r = design_frozen_set(3, 0.05, Dimension::Explicit(4), 20_000, 7).unwrap();
        assert_eq!(r.spec.frozen_set(), &[1, 2, 3, 5]);
    }

    #[test]
    fn design_is_reproducible() {
        let a = design_frozen_set(4, 0.1, Dimension::Explicit(8), 5000, 9).unwrap();
        let b = design_frozen_set(4, 0.1, Dimension::Explicit(8), 5000, 9).unwrap();
        assert_eq!(a.error_counts, b.error_counts);
        assert_eq!(a.spec, b.spec);
    }
}
