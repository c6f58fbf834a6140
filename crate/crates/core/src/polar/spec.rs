use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported blocklength exponent.
pub const MAX_N_EXP: u32 = 24;

/// A polar code: blocklength `N = 2^n_exp` and the frozen index set.
///
/// `frozen_set` holds 1-based u-domain indices in increasing order. Serializes
/// to `{"n_exp", "frozen_set", "design_p", "mc_trials", "seed"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecDocument", into = "SpecDocument")]
pub struct PolarCodeSpec {
    n_exp: u32,
    frozen_set: Vec<usize>,
    design_p: f64,
    mc_trials: u64,
    seed: u64,
    frozen_mask: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct SpecDocument {
    n_exp: u32,
    frozen_set: Vec<usize>,
    design_p: f64,
    mc_trials: u64,
    seed: u64,
}

impl TryFrom<SpecDocument> for PolarCodeSpec {
    type Error = Error;
    fn try_from(d: SpecDocument) -> Result<Self> {
        PolarCodeSpec::new(d.n_exp, d.frozen_set, d.design_p, d.mc_trials, d.seed)
    }
}

impl From<PolarCodeSpec> for SpecDocument {
    fn from(s: PolarCodeSpec) -> Self {
        SpecDocument {
            n_exp: s.n_exp,
            frozen_set: s.frozen_set,
            design_p: s.design_p,
            mc_trials: s.mc_trials,
            seed: s.seed,
        }
    }
}

impl PolarCodeSpec {
    pub fn new(n_exp: u32, frozen_set: Vec<usize>, design_p: f64, mc_trials: u64, seed: u64) -> Result<Self> {
        if n_exp == 0 || n_exp > MAX_N_EXP {
            return Err(Error::param(format!("n_exp must be in 1..={MAX_N_EXP}, got {n_exp}")));
        }
        if !(design_p > 0.0 && design_p <= 0.5) {
            return Err(Error::param(format!("design_p must be in (0, 0.5], got {design_p}")));
        }
        let n = 1usize << n_exp;
        if frozen_set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("frozen_set must be strictly increasing"));
        }
        if frozen_set.iter().any(|&i| i == 0 || i > n) {
            return Err(Error::validation(format!("frozen indices must lie in 1..={n}")));
        }
        let mut frozen_mask = vec![false; n];
        for &i in &frozen_set {
            frozen_mask[i - 1] = true;
        }
        Ok(PolarCodeSpec { n_exp, frozen_set, design_p, mc_trials, seed, frozen_mask })
    }

    /// A hand-specified code (not produced by Monte Carlo design).
    pub fn with_frozen(n_exp: u32, frozen_set: Vec<usize>) -> Result<Self> {
        PolarCodeSpec::new(n_exp, frozen_set, 0.5, 0, 0)
    }

    pub fn n_exp(&self) -> u32 {
        self.n_exp
    }

    pub fn n(&self) -> usize {
        1 << self.n_exp
    }

    pub fn k(&self) -> usize {
        self.n() - self.frozen_set.len()
    }

    /// Number of frozen indices, `N - K`.
    pub fn frozen_count(&self) -> usize {
        self.frozen_set.len()
    }

    /// 1-based frozen indices.
    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    pub fn design_p(&self) -> f64 {
        self.design_p
    }

    pub fn mc_trials(&self) -> u64 {
        self.mc_trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `true` at 0-based position `i` when `u_{i+1}` is frozen.
    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen_mask
    }

    pub fn is_frozen(&self, position: usize) -> bool {
        self.frozen_mask[position]
    }

    /// 0-based frozen positions, increasing.
    pub fn frozen_positions(&self) -> Vec<usize> {
        self.frozen_set.iter().map(|i| i - 1).collect()
    }

    /// 0-based information positions, increasing.
    pub fn info_positions(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.frozen_mask[i]).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        PolarCodeSpec::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_uses_one_based_indices() {
        let spec = PolarCodeSpec::new(2, vec![1, 3], 0.1, 1000, 7).unwrap();
        let text = spec.to_json().unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["frozen_set"], serde_json::json!([1, 3]));
        assert_eq!(value["n_exp"], 2);
        assert_eq!(PolarCodeSpec::from_json(&text).unwrap(), spec);
        assert_eq!(spec.frozen_positions(), vec![0, 2]);
        assert_eq!(spec.info_positions(), vec![1, 3]);
        assert_eq!(spec.k(), 2);
    }

    #[test]
    fn invalid_documents_are_rejected() {
        assert!(PolarCodeSpec::from_json(r#"{"n_exp":2,"frozen_set":[3,1],"design_p":0.1,"mc_trials":1,"seed":0}"#).is_err());
        assert!(PolarCodeSpec::from_json(r#"{"n_exp":2,"frozen_set":[0],"design_p":0.1,"mc_trials":1,"seed":0}"#).is_err());
        assert!(PolarCodeSpec::from_json(r#"{"n_exp":2,"frozen_set":[5],"design_p":0.1,"mc_trials":1,"seed":0}"#).is_err());
        assert!(PolarCodeSpec::from_json(r#"{"n_exp":2,"frozen_set":[],"design_p":0.7,"mc_trials":1,"seed":0}"#).is_err());
        assert!(PolarCodeSpec::new(0, vec![], 0.1, 1, 0).is_err());
    }

    #[test]
    fn degenerate_rates_are_valid() {
        let all = PolarCodeSpec::with_frozen(3, (1..=8).collect()).unwrap();
        assert_eq!(all.k(), 0);
        let none = PolarCodeSpec::with_frozen(3, vec![]).unwrap();
        assert_eq!(none.k(), 8);
    }
}
