use rand::Rng;
use serde::Serialize;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::rng;

use super::{compress, sc_syndrome_decode, PolarCodeSpec};

/// A binomial Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub failures: u64,
    pub trials: u64,
    pub estimate: f64,
    pub stderr: f64,
}

impl McEstimate {
    pub fn from_counts(failures: u64, trials: u64) -> Self {
        let estimate = failures as f64 / trials as f64;
        let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
        McEstimate { failures, trials, estimate, stderr }
    }

    /// The complementary event, e.g. success from failure.
    pub fn complement(&self) -> Self {
        McEstimate::from_counts(self.trials - self.failures, self.trials)
    }
}

/// Fraction of Bernoulli(`source_p`) patterns that the SC syndrome decoder fails to recover.
pub fn monte_carlo_failure_rate(spec: &PolarCodeSpec, source_p: f64, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    if !(source_p > 0.0 && source_p < 1.0) {
        return Err(Error::param(format!("source probability must lie in (0, 1), got {source_p}")));
    }
    let n = spec.n();
    let per_chunk = rng::chunked(trials, seed, |rng, count| -> Result<u64> {
        let mut failures = 0;
        for _ in 0..count {
            let x = BitVector::from_bools(&(0..n).map(|_| rng.random_bool(source_p)).collect::<Vec<_>>());
            let s = compress(spec, &x)?;
            if sc_syndrome_decode(spec, &s, &source_p)? != x {
                failures += 1;
            }
        }
        Ok(failures)
    });
    let failures = per_chunk.into_iter().sum::<Result<u64>>()?;
    Ok(McEstimate::from_counts(failures, trials))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_freeze_never_fails() {
        let spec = PolarCodeSpec::with_frozen(3, (1..=8).collect()).unwrap();
        let est = monte_carlo_failure_rate(&spec, 0.3, 1000, 5).unwrap();
        assert_eq!(est.failures, 0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let spec = PolarCodeSpec::with_frozen(2, vec![1]).unwrap();
        assert!(monte_carlo_failure_rate(&spec, 0.1, 0, 0).is_err());
    }

    #[test]
    fn estimate_is_seed_deterministic() {
        let spec = PolarCodeSpec::with_frozen(3, vec![1, 2, 3, 5]).unwrap();
        let a = monte_carlo_failure_rate(&spec, 0.1, 3000, 42).unwrap();
        let b = monte_carlo_failure_rate(&spec, 0.1, 3000, 42).unwrap();
        assert_eq!(a, b);
    }
}
