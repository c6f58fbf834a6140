use std::collections::HashMap;

use rayon::prelude::*;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::scalar::{pattern_probability, Probability};

use super::{compress, sc_syndrome_decode, PolarCodeSpec};

/// Default limit on `N - K` for exhaustive enumeration (2^20 syndromes).
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// The range `T` of a syndrome decoder `f`, stored as the map `s -> f(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectableSet {
    n: usize,
    syndrome_len: usize,
    // patterns[s] = f(s), s read as an MSB-first integer
    patterns: Vec<BitVector>,
    index: HashMap<BitVector, usize>,
}

impl CorrectableSet {
    /// Builds the set from `f` listed in syndrome order. Fails unless `f` is injective.
    pub fn from_patterns(n: usize, syndrome_len: usize, patterns: Vec<BitVector>) -> Result<Self> {
        if patterns.len() != 1usize << syndrome_len {
            return Err(Error::size(format!(
                "{} patterns for {} syndromes",
                patterns.len(),
                1usize << syndrome_len
            )));
        }
        let mut index = HashMap::with_capacity(patterns.len());
        for (s, x) in patterns.iter().enumerate() {
            if x.len() != n {
                return Err(Error::size(format!("pattern of length {} in a length-{n} set", x.len())));
            }
            if let Some(prev) = index.insert(x.clone(), s) {
                return Err(Error::invariant(format!("syndromes {prev} and {s} decode to the same pattern {x}")));
            }
        }
        Ok(CorrectableSet { n, syndrome_len, patterns, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn syndrome_len(&self) -> usize {
        self.syndrome_len
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// `f(s)`.
    pub fn decode(&self, syndrome: &BitVector) -> Result<&BitVector> {
        if syndrome.len() != self.syndrome_len {
            return Err(Error::size(format!("syndrome length {} (expected {})", syndrome.len(), self.syndrome_len)));
        }
        Ok(&self.patterns[syndrome.to_index() as usize])
    }

    pub fn contains(&self, x: &BitVector) -> bool {
        self.index.contains_key(x)
    }

    /// The syndrome whose decoding is `x`, if `x ∈ T`.
    pub fn syndrome_of(&self, x: &BitVector) -> Option<BitVector> {
        self.index.get(x).map(|&s| BitVector::from_index(s as u64, self.syndrome_len))
    }

    /// `(s, f(s))` in syndrome order.
    pub fn iter(&self) -> impl Iterator<Item = (BitVector, &BitVector)> + '_ {
        self.patterns
            .iter()
            .enumerate()
            .map(|(s, x)| (BitVector::from_index(s as u64, self.syndrome_len), x))
    }

    pub fn patterns(&self) -> &[BitVector] {
        &self.patterns
    }

    /// Number of members of each Hamming weight `0..=N`.
    pub fn weight_histogram(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.n + 1];
        for x in &self.patterns {
            hist[x.weight()] += 1;
        }
        hist
    }
}

/// Enumerates `T` for the polar SC syndrome decoder by decoding every syndrome.
///
/// Refuses codes with more than `cap` frozen indices. Verifies the round trip
/// `compress(f(s)) = s` and injectivity on the way.
pub fn enumerate_correctable_set<P: Probability>(spec: &PolarCodeSpec, source_p: &P, cap: usize) -> Result<CorrectableSet> {
    let m = spec.frozen_count();
    if m > cap {
        return Err(Error::resource(format!("enumeration of 2^{m} syndromes exceeds cap 2^{cap}")));
    }
    let patterns = (0..1u64 << m)
        .into_par_iter()
        .map(|s| {
            let syndrome = BitVector::from_index(s, m);
            let x = sc_syndrome_decode(spec, &syndrome, source_p)?;
            if compress(spec, &x)? != syndrome {
                return Err(Error::invariant(format!("decoded pattern {x} does not reproduce syndrome {syndrome}")));
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>>>()?;
    CorrectableSet::from_patterns(spec.n(), m, patterns)
}

/// `Σ_{x∈T} p^{w(x)} (1-p)^{N-w(x)}`.
pub fn success_probability_exact<P: Probability>(set: &CorrectableSet, source_p: &P) -> P {
    set.weight_histogram()
        .iter()
        .enumerate()
        .filter(|(_, &count)| count > 0)
        .fold(P::zero(), |acc, (w, &count)| {
            acc + P::from_ratio(count as i64, 1) * pattern_probability(source_p, w, set.n())
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn full_freeze_covers_the_space() {
        let spec = PolarCodeSpec::with_frozen(2, vec![1, 2, 3, 4]).unwrap();
        let t = enumerate_correctable_set(&spec, &0.1, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(t.len(), 16);
        assert_eq!(t.weight_histogram(), vec![1, 4, 6, 4, 1]);
        let exact = success_probability_exact(&t, &BigRational::from_ratio(1, 10));
        assert_eq!(exact, BigRational::from_ratio(1, 1));
    }

    #[test]
    fn four_bit_example_has_one_pattern_per_syndrome() {
        let spec = PolarCodeSpec::with_frozen(2, vec![1, 3]).unwrap();
        let t = enumerate_correctable_set(&spec, &0.1, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.decode(&BitVector::zeros(2)).unwrap(), &BitVector::zeros(4));
        for (s, x) in t.iter() {
            assert_eq!(t.syndrome_of(x), Some(s));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let spec = PolarCodeSpec::with_frozen(3, vec![1, 2, 3, 4, 5]).unwrap();
        assert!(matches!(enumerate_correctable_set(&spec, &0.1, 4), Err(Error::Resource(_))));
    }

    #[test]
    fn duplicate_patterns_are_rejected() {
        let x = BitVector::zeros(2);
        assert!(CorrectableSet::from_patterns(2, 1, vec![x.clone(), x]).is_err());
    }
}
