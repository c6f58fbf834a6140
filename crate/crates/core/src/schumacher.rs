//! Schumacher compression baseline: δ-typical sets by weight class, success
//! probability, rate, and a dense quantum check at small N.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::qsim::{
    fidelity, BasisProjector, BooleanIsometry, DensityMatrix, QuantumState, QubitSource, StateVector, FIDELITY_TOL,
    MIXED_QUBIT_CAP,
};

/// Largest blocklength for the weight-class representation.
pub const TYPICAL_MAX_N: usize = 30;
/// Largest blocklength for [`schumacher_quantum_check`].
pub const SCHUMACHER_QUANTUM_MAX_N: usize = 8;

/// How the sample entropy is measured against the source entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypicalityConvention {
    /// Base-2 logarithms when true, natural logarithms otherwise.
    pub bits: bool,
    /// Divide the log-probability by `N`.
    pub normalized: bool,
}

impl Default for TypicalityConvention {
    fn default() -> Self {
        TypicalityConvention { bits: true, normalized: true }
    }
}

impl TypicalityConvention {
    fn log(&self, x: f64) -> f64 {
        if self.bits {
            x.log2()
        } else {
            x.ln()
        }
    }
}

/// `H̄(x) = −(1/N) log₂ p(x)` for an i.i.d. Bernoulli(`p`) string.
pub fn sample_entropy(x: &BitVector, p: f64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::size("sample entropy of an empty string"));
    }
    weight_sample_entropy(x.weight(), x.len(), p, TypicalityConvention::default())
}

fn weight_sample_entropy(w: usize, n: usize, p: f64, conv: TypicalityConvention) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("sample entropy needs p in (0, 1), got {p}")));
    }
    let total = -(w as f64 * conv.log(p) + (n - w) as f64 * conv.log(1.0 - p));
    Ok(if conv.normalized { total / n as f64 } else { total })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypicalSetSpec {
    pub n: usize,
    pub p: f64,
    pub delta: f64,
    pub convention: TypicalityConvention,
}

impl TypicalSetSpec {
    pub fn new(n: usize, p: f64, delta: f64) -> Result<Self> {
        Self::with_convention(n, p, delta, TypicalityConvention::default())
    }

    pub fn with_convention(n: usize, p: f64, delta: f64, convention: TypicalityConvention) -> Result<Self> {
        if n == 0 || n > TYPICAL_MAX_N {
            return Err(Error::resource(format!("typical sets support 1 <= N <= {TYPICAL_MAX_N}, got {n}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("source probability must lie in (0, 1), got {p}")));
        }
        if !(delta > 0.0) {
            return Err(Error::param(format!("delta must be positive, got {delta}")));
        }
        Ok(TypicalSetSpec { n, p, delta, convention })
    }

    /// Source entropy in the convention's unit.
    pub fn entropy(&self) -> f64 {
        let c = self.convention;
        let h = -(self.p * c.log(self.p) + (1.0 - self.p) * c.log(1.0 - self.p));
        if c.normalized {
            h
        } else {
            h * self.n as f64
        }
    }

    /// Weight classes `w` whose strings satisfy `|H̄ − H| < δ`.
    pub fn mask(&self) -> Vec<bool> {
        let h = self.entropy();
        (0..=self.n)
            .map(|w| {
                let hw = weight_sample_entropy(w, self.n, self.p, self.convention).expect("p checked at construction");
                (hw - h).abs() < self.delta
            })
            .collect()
    }

    /// `|T_δ|`.
    pub fn size(&self) -> u64 {
        self.mask().iter().enumerate().filter(|(_, &m)| m).map(|(w, _)| binomial(self.n, w)).sum()
    }

    pub fn contains(&self, x: &BitVector) -> bool {
        x.len() == self.n && self.mask()[x.weight()]
    }

    /// Basis indices of the typical strings, ascending.
    pub fn members(&self) -> Result<Vec<usize>> {
        if self.n > 20 {
            return Err(Error::resource("explicit typical-set enumeration supports N <= 20"));
        }
        let mask = self.mask();
        Ok((0..1usize << self.n).filter(|x| mask[x.count_ones() as usize]).collect())
    }

    /// Qubits sent: `⌈log₂|T_δ|⌉`, 0 when `|T_δ| ≤ 1`.
    pub fn qubits_required(&self) -> usize {
        ceil_log2(self.size())
    }
}

fn ceil_log2(m: u64) -> usize {
    if m <= 1 {
        0
    } else {
        (64 - (m - 1).leading_zeros()) as usize
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Weight classes of [`TypicalSetSpec::mask`].
pub fn typical_set(spec: &TypicalSetSpec) -> Vec<bool> {
    spec.mask()
}

/// `Σ_{w typical} C(N,w) p^w (1−p)^{N−w}`.
pub fn schumacher_success(spec: &TypicalSetSpec) -> f64 {
    let (n, p) = (spec.n, spec.p);
    spec.mask()
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(w, _)| binomial(n, w) as f64 * p.powi(w as i32) * (1.0 - p).powi((n - w) as i32))
        .fold(0.0, |acc, x| acc + x)
}

/// `⌈log₂|T_δ|⌉ / N`.
pub fn schumacher_rate(spec: &TypicalSetSpec) -> f64 {
    spec.qubits_required() as f64 / spec.n as f64
}

/// `⌈N(S + δ)⌉ / N` with `S` in bits, capped at 1.
pub fn schumacher_rate_alt(spec: &TypicalSetSpec) -> f64 {
    let s = crate::scalar::binary_entropy(spec.p);
    let n = spec.n as f64;
    ((n * (s + spec.delta)).ceil() / n).min(1.0)
}

/// Rate as drawn in the reference comparison data: at least one qubit, and the
/// whole block when the typical set is empty.
pub fn schumacher_rate_figure(spec: &TypicalSetSpec) -> f64 {
    if spec.size() == 0 {
        return 1.0;
    }
    spec.qubits_required().max(1) as f64 / spec.n as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct SchumacherQuantumReport {
    pub success_quantum: f64,
    pub success_classical: f64,
    pub qubits_sent: usize,
    /// `None` when the typical set is empty.
    pub min_fidelity: Option<f64>,
    pub passed: bool,
}

/// Typical-subspace instrument, bijection `U_f` onto the low `⌈log₂|T_δ|⌉` qubits,
/// transmission, and `U_f†` with the inverse rotation at Bob's side.
pub fn schumacher_quantum_check(spec: &TypicalSetSpec, source: &QubitSource<f64>) -> Result<SchumacherQuantumReport> {
    let n = spec.n;
    if n > SCHUMACHER_QUANTUM_MAX_N.min(MIXED_QUBIT_CAP) {
        return Err(Error::resource(format!("quantum check supports N <= {SCHUMACHER_QUANTUM_MAX_N}, got {n}")));
    }
    if (source.p() - spec.p).abs() > 1e-15 {
        return Err(Error::param("source and typical-set probabilities differ"));
    }
    let members = spec.members()?;
    let m = spec.qubits_required();
    let projector = BasisProjector::from_support(n, members.iter().copied())?;

    let mut rotated = DensityMatrix::tensor_power(&source.rho(), n)?;
    rotated.apply_all(&source.u_rho())?;
    let success_quantum = projector.project_density(&rotated)?.trace();
    let success_classical = schumacher_success(spec);

    // U_f: j-th typical string ↦ |j⟩, atypical strings fill the remaining indices in order
    let mut table = vec![0usize; 1 << n];
    let mut next_atypical = members.len();
    let mut rank = 0usize;
    for (x, slot) in table.iter_mut().enumerate() {
        if members.get(rank) == Some(&x) {
            *slot = rank;
            rank += 1;
        } else {
            *slot = next_atypical;
            next_atypical += 1;
        }
    }
    let u_f = BooleanIsometry::new(n, n, table)?;
    let low = BooleanIsometry::from_fn(m, n, |j| j)?;

    let mut min_fidelity = None;
    if !members.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut worst = 1.0f64;
        for _ in 0..8 {
            let mut psi = StateVector::haar_random(n, &members, &mut rng)?;
            psi.apply_all(&source.u_rho_dagger())?;
            let mut a = psi.clone();
            a.apply_all(&source.u_rho())?;
            let sent = low.apply_adjoint_state(&u_f.apply_state(&projector.project_state(&a)?)?)?;
            let mut out = u_f.apply_adjoint_state(&low.apply_state(&sent)?)?;
            out.apply_all(&source.u_rho_dagger())?;
            worst = worst.min(fidelity(&QuantumState::pure(psi), &QuantumState::pure(out))?);
        }
        min_fidelity = Some(worst);
    }
    let passed = (success_quantum - success_classical).abs() <= 1e-10
        && min_fidelity.is_none_or(|f| f >= 1.0 - FIDELITY_TOL);
    Ok(SchumacherQuantumReport { success_quantum, success_classical, qubits_sent: m, min_fidelity, passed })
}

/// One candidate reading of the typicality definition, scored against target data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConventionMatch {
    pub n: usize,
    pub delta: f64,
    pub convention: TypicalityConvention,
    /// Largest absolute success-probability deviation over the grid.
    pub max_abs_error: f64,
}

/// Scores every `(N, δ, convention)` candidate against `(p, success)` targets; best first.
pub fn search_conventions(targets: &[(f64, f64)], n_range: std::ops::RangeInclusive<usize>, deltas: &[f64]) -> Result<Vec<ConventionMatch>> {
    let conventions = [
        TypicalityConvention { bits: true, normalized: true },
        TypicalityConvention { bits: false, normalized: true },
        TypicalityConvention { bits: true, normalized: false },
        TypicalityConvention { bits: false, normalized: false },
    ];
    let mut out = Vec::new();
    for n in n_range {
        for &delta in deltas {
            for convention in conventions {
                let mut err = 0.0f64;
                for &(p, target) in targets {
                    let spec = TypicalSetSpec::with_convention(n, p, delta, convention)?;
                    err = err.max((schumacher_success(&spec) - target).abs());
                }
                out.push(ConventionMatch { n, delta, convention, max_abs_error: err });
            }
        }
    }
    out.sort_by(|a, b| a.max_abs_error.total_cmp(&b.max_abs_error));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_entropy_values() {
        let x = BitVector::from_index(0b0100_0000, 8);
        let expected = (-(0.01_f64.log2()) - 7.0 * 0.99_f64.log2()) / 8.0;
        assert!((sample_entropy(&x, 0.01).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.84317).abs() < 1e-5);
        assert!((sample_entropy(&BitVector::zeros(5), 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(sample_entropy(&x, 0.0).is_err());
        assert!(sample_entropy(&x, 1.0).is_err());
    }

    #[test]
    fn weight_classes_match_string_enumeration() {
        for n in 1..=10 {
            for &(p, d) in &[(0.05, 0.05), (0.2, 0.1), (0.37, 0.3)] {
                let spec = TypicalSetSpec::new(n, p, d).unwrap();
                let explicit = (0..1u64 << n)
                    .filter(|&x| {
                        let h = sample_entropy(&BitVector::from_index(x, n), p).unwrap();
                        (h - spec.entropy()).abs() < d
                    })
                    .count() as u64;
                assert_eq!(spec.size(), explicit);
            }
        }
    }

    #[test]
    fn degenerate_sets() {
        let all = TypicalSetSpec::new(8, 0.1, 10.0).unwrap();
        assert_eq!(all.size(), 256);
        assert!((schumacher_success(&all) - 1.0).abs() < 1e-12);
        assert_eq!(schumacher_rate(&all), 1.0);
        let uniform = TypicalSetSpec::new(6, 0.5, 1e-9).unwrap();
        assert_eq!(uniform.size(), 64);
        assert_eq!(schumacher_rate_alt(&uniform), 1.0);
        // N=8, p=0.01, δ=0.05 keeps no weight class
        let literal = TypicalSetSpec::new(8, 0.01, 0.05).unwrap();
        assert_eq!(literal.size(), 0);
        assert_eq!(schumacher_success(&literal), 0.0);
    }

    #[test]
    fn quantum_check_matches_classical_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let source = QubitSource::random_basis(0.1, &mut rng).unwrap();
        let spec = TypicalSetSpec::new(4, 0.1, 0.3).unwrap();
        let r = schumacher_quantum_check(&spec, &source).unwrap();
        assert!(r.passed, "{r:?}");
        let wide = schumacher_quantum_check(&TypicalSetSpec::new(4, 0.1, 10.0).unwrap(), &source).unwrap();
        assert!((wide.success_quantum - 1.0).abs() < 1e-12);
        assert_eq!(wide.qubits_sent, 4);
    }

    #[test]
    fn figure_rate_rule() {
        let one = TypicalSetSpec::new(3, 0.01, 0.2).unwrap();
        assert_eq!(one.size(), 1);
        assert!((schumacher_rate_figure(&one) - 1.0 / 3.0).abs() < 1e-15);
        assert!((schumacher_success(&one) - 0.970299).abs() < 1e-12);
    }
}
