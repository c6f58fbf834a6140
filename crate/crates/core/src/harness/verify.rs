use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::BitVector;
use crate::error::Result;
use crate::harness::sweep::{csv_string, run_sweep, SweepConfig, SweepProtocol};
use crate::messages::{bnop, boxdot, boxplus, cnop, ConditionalMessage, DEFAULT_MAX_CONDITIONS};
use crate::oracle::{build_coset_table, generic_quantum_ssc_check, is_coset_partition, polar_vs_ml_comparison, LinearCode};
use crate::polar::{
    compress, design_frozen_set, enumerate_correctable_set, polar_transform, sc_syndrome_decode, success_probability_exact,
    Dimension, PolarCodeSpec, DEFAULT_ENUMERATION_CAP,
};
use crate::protocol::{lifted_plan, ExecutionMode, ProjectionMethod, Protocol, ProtocolConfig};
use crate::qsim::{build_vn, fidelity, QuantumState, QubitSource, StateVector, FIDELITY_TOL};
use crate::schumacher::{schumacher_quantum_check, TypicalSetSpec};

/// Tolerance for exact-vs-simulated success probabilities.
pub const SUCCESS_TOL: f64 = 1e-10;

/// The length-8 code used throughout the checks: designed at `p = 0.05` with `K = 4`.
pub fn designed_n8() -> Result<PolarCodeSpec> {
    Ok(design_frozen_set(3, 0.05, Dimension::Explicit(4), 20_000, 7)?.spec)
}

/// Length-16 code designed at `p = 0.05` with `K = 8`.
pub fn designed_n16() -> Result<PolarCodeSpec> {
    Ok(design_frozen_set(4, 0.05, Dimension::Explicit(8), 20_000, 7)?.spec)
}

/// The worked example code, `N = 4` with frozen `{1, 3}`.
pub fn example_n4() -> PolarCodeSpec {
    PolarCodeSpec::new(2, vec![1, 3], 0.1, 0, 0).expect("valid example code")
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Largest blocklength for density-matrix checks.
    pub quantum_cap: usize,
    pub seed: u64,
    /// Negative control: check the round trip against a correctable set built for a different frozen set.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { quantum_cap: 8, seed: 1, inject_fault: false }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Measured deviation (mismatch count or absolute error).
    pub deviation: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, deviation: f64, detail: impl Into<String>) -> Self {
        CheckResult { name: name.to_string(), passed, deviation, detail: detail.into() }
    }

    fn count(name: &str, mismatches: usize, total: usize) -> Self {
        Self::new(name, mismatches == 0, mismatches as f64, format!("{mismatches} mismatches in {total} cases"))
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<24} deviation={:<12.3e} {}", self.name, self.deviation, self.detail)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

/// Runs every suite. Errors only on internal failures; failed checks are reported.
pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let n4 = example_n4();
    let n8 = designed_n8()?;
    let n16 = designed_n16()?;
    let mut checks = vec![
        transform_involution(),
        transform_matrix(),
        vn_permutation()?,
        message_laws(opts.seed, 1000)?,
        round_trip(&[&n4, &n8, &n16], opts.inject_fault)?,
        coset_partition(&[&n4, &n8])?,
        lifted_equals_f(&n4)?,
        lifted_equals_f(&n8)?,
        lifted_readout_n16(&n16, opts.seed)?,
        losslessness(&n8, opts.seed)?,
        sc_vs_ml(&n8)?,
        mc_consistency(&n8, opts.seed)?,
        csv_determinism(&n8)?,
    ];
    for spec in [&n4, &n8] {
        if spec.n() <= opts.quantum_cap {
            checks.push(oracle_equivalence(spec, &[0.02, 0.05, 0.1])?);
        }
    }
    if 4 <= opts.quantum_cap {
        checks.push(lifted_projection(&n4)?);
        checks.push(schumacher_quantum(4, &[(0.1, 0.3), (0.05, 0.05), (0.3, 0.2)])?);
    }
    if 3 <= opts.quantum_cap {
        checks.push(generic_ssc()?);
    }
    if 8 <= opts.quantum_cap {
        checks.push(schumacher_quantum(8, &[(0.02, 0.05), (0.1, 0.05), (0.2, 0.1)])?);
    }
    Ok(VerifyReport { checks })
}

pub fn transform_involution() -> CheckResult {
    let mut bad = 0;
    let mut total = 0;
    for n_exp in 1..=3u32 {
        let n = 1usize << n_exp;
        for x in 0..1u64 << n {
            let v = BitVector::from_index(x, n);
            total += 1;
            if polar_transform(&polar_transform(&v).expect("power of two")).expect("power of two") != v {
                bad += 1;
            }
        }
    }
    CheckResult::count("transform-involution", bad, total)
}

// G_N built literally as (I ⊗ G_2) R_N (I_2 ⊗ G_{N/2}) with dense GF(2) products.
fn explicit_gn(n: usize) -> Vec<Vec<u8>> {
    if n == 1 {
        return vec![vec![1]];
    }
    let half = n / 2;
    let mut a = vec![vec![0u8; n]; n];
    for k in 0..half {
        a[2 * k][2 * k] = 1;
        a[2 * k + 1][2 * k] = 1;
        a[2 * k + 1][2 * k + 1] = 1;
    }
    // (u R)_j = u_{π(j)} with π = (0, 2, 4, …, 1, 3, …)
    let mut r = vec![vec![0u8; n]; n];
    for j in 0..n {
        let src = if j < half { 2 * j } else { 2 * (j - half) + 1 };
        r[src][j] = 1;
    }
    let g = explicit_gn(half);
    let mut b = vec![vec![0u8; n]; n];
    for blk in 0..2 {
        for i in 0..half {
            for j in 0..half {
                b[blk * half + i][blk * half + j] = g[i][j];
            }
        }
    }
    gf2_mul(&gf2_mul(&a, &r), &b)
}

fn gf2_mul(a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let (n, m) = (a.len(), b[0].len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).fold(0u8, |acc, k| acc ^ (a[i][k] & b[k][j]))).collect())
        .collect()
}

pub fn transform_matrix() -> CheckResult {
    let mut bad = 0;
    let mut total = 0;
    for n in [2usize, 4, 8] {
        let g = explicit_gn(n);
        for x in 0..1u64 << n {
            let u = BitVector::from_index(x, n);
            let expected: Vec<u8> =
                (0..n).map(|j| (0..n).fold(0u8, |acc, i| acc ^ (u[i] & g[i][j]))).collect();
            total += 1;
            if polar_transform(&u).expect("power of two").as_slice() != expected.as_slice() {
                bad += 1;
            }
        }
    }
    CheckResult::count("transform-matrix", bad, total)
}

pub fn vn_permutation() -> Result<CheckResult> {
    let mut bad = 0;
    let mut total = 0;
    for n_exp in 1..=4u32 {
        let n = 1usize << n_exp;
        let vn = build_vn(n_exp)?;
        if !vn.is_permutation() {
            bad += 1;
        }
        for u in 0..1usize << n {
            total += 1;
            let x = polar_transform(&BitVector::from_index(u as u64, n))?.to_index() as usize;
            if vn.image(u) != x {
                bad += 1;
            }
        }
    }
    Ok(CheckResult::count("vn-permutation", bad, total))
}

fn random_message(rng: &mut ChaCha8Rng, max_width: usize) -> ConditionalMessage<f64> {
    let mut labels: Vec<usize> = (1..=6).filter(|_| rng.random_bool(0.4)).collect();
    labels.truncate(max_width);
    let probs = (0..1usize << labels.len())
        .map(|_| match rng.random_range(0..8) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random_range(0.01..0.99),
        })
        .collect();
    ConditionalMessage::new(probs, labels).expect("valid random message")
}

/// Commutativity, size law and per-assignment consistency of both combining rules.
pub fn message_laws(seed: u64, cases: usize) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let a = random_message(&mut rng, 3);
        let b = random_message(&mut rng, 3);
        let mut union: Vec<usize> = a.frozen().iter().chain(b.frozen()).copied().collect();
        union.sort_unstable();
        union.dedup();
        for (is_check, ab, ba) in [(true, cnop(&a, &b)?, cnop(&b, &a)?), (false, bnop(&a, &b)?, bnop(&b, &a)?)] {
            if ab.frozen() != union.as_slice() || ab.probs().len() != 1 << union.len() {
                bad += 1;
            }
            for (x, y) in ab.probs().iter().zip(ba.probs()) {
                worst = worst.max((x - y).abs());
            }
            for assignment in 0..1usize << union.len() {
                let bit = |label: usize| {
                    let pos = union.iter().position(|&l| l == label).expect("label in union");
                    ((assignment >> (union.len() - 1 - pos)) & 1) as u8
                };
                let (qa, qb) = (a.entry_for(bit), b.entry_for(bit));
                let expected = if is_check { boxplus(qa, qb) } else { boxdot(qa, qb).unwrap_or(0.5) };
                worst = worst.max((ab.probs()[assignment] - expected).abs());
            }
        }
    }
    let passed = bad == 0 && worst <= 1e-15;
    Ok(CheckResult::new("message-laws", passed, worst, format!("{cases} random pairs, {bad} shape errors")))
}

/// `compress(f(s)) = s` for every syndrome.
pub fn round_trip(specs: &[&PolarCodeSpec], inject_fault: bool) -> Result<CheckResult> {
    let mut bad = 0;
    let mut total = 0;
    for spec in specs {
        let p = 0.05;
        let source_spec = if inject_fault { shifted_frozen_set(spec)? } else { (*spec).clone() };
        let t = enumerate_correctable_set(&source_spec, &p, DEFAULT_ENUMERATION_CAP)?;
        for (s, x) in t.iter() {
            total += 1;
            if compress(spec, x)? != s {
                bad += 1;
            }
        }
    }
    let mut r = CheckResult::count("round-trip", bad, total);
    if inject_fault {
        r.detail.push_str(" (fault injected)");
    }
    Ok(r)
}

// Same size, different frozen set: rotate every index by one.
fn shifted_frozen_set(spec: &PolarCodeSpec) -> Result<PolarCodeSpec> {
    let n = spec.n();
    let mut frozen: Vec<usize> = spec.frozen_set().iter().map(|&i| i % n + 1).collect();
    frozen.sort_unstable();
    PolarCodeSpec::with_frozen(spec.n_exp(), frozen)
}

pub fn coset_partition(specs: &[&PolarCodeSpec]) -> Result<CheckResult> {
    let mut bad = 0;
    for spec in specs {
        let code = LinearCode::from_polar(spec)?;
        let t = enumerate_correctable_set(spec, &0.05, DEFAULT_ENUMERATION_CAP)?;
        if !is_coset_partition(&code, &t)? {
            bad += 1;
        }
    }
    Ok(CheckResult::count("coset-partition", bad, specs.len()))
}

fn protocol(spec: &PolarCodeSpec, p: f64, mode: ExecutionMode, seed: u64) -> Result<Protocol> {
    let source = QubitSource::random_basis(p, &mut ChaCha8Rng::seed_from_u64(seed))?;
    Protocol::new(ProtocolConfig::new(spec.clone(), source, mode))
}

/// Bob's lifted decoder on every basis syndrome against the classical decoder, in the
/// computational frame.
pub fn lifted_equals_f(spec: &PolarCodeSpec) -> Result<CheckResult> {
    let p = 0.1;
    let source = QubitSource::computational(p)?;
    let proto = Protocol::new(ProtocolConfig::new(spec.clone(), source, ExecutionMode::QuantumPure))?;
    let m = spec.frozen_count();
    let mut bad = 0;
    for s in 0..1usize << m {
        let out = proto.bob_decode(&QuantumState::pure(StateVector::basis(m, s)?))?;
        let x = sc_syndrome_decode(spec, &BitVector::from_index(s as u64, m), &p)?;
        let expected = QuantumState::pure(StateVector::basis(spec.n(), x.to_index() as usize)?);
        if (fidelity(&out, &expected)? - 1.0).abs() > 1e-12 {
            bad += 1;
        }
    }
    Ok(CheckResult::count(&format!("lifted=f N={}", spec.n()), bad, 1 << m))
}

/// At N=16: the lifted schedule's classical read-out on 1000 random syndromes, and the
/// quantum decoder on 16 of them.
pub fn lifted_readout_n16(spec: &PolarCodeSpec, seed: u64) -> Result<CheckResult> {
    let p = 0.1;
    let plan = lifted_plan(spec, &p, DEFAULT_MAX_CONDITIONS)?;
    let proto = Protocol::new(ProtocolConfig::new(spec.clone(), QubitSource::computational(p)?, ExecutionMode::QuantumPure))?;
    let m = spec.frozen_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for i in 0..1000 {
        let s = BitVector::from_index(rng.random_range(0..1u64 << m), m);
        let x = sc_syndrome_decode(spec, &s, &p)?;
        if polar_transform(&plan.decide(spec, &s))? != x {
            bad += 1;
        }
        if i < 16 {
            let out = proto.bob_decode(&QuantumState::pure(StateVector::basis(m, s.to_index() as usize)?))?;
            let expected = QuantumState::pure(StateVector::basis(spec.n(), x.to_index() as usize)?);
            if (fidelity(&out, &expected)? - 1.0).abs() > 1e-12 {
                bad += 1;
            }
        }
    }
    Ok(CheckResult::count(&format!("lifted=f N={}", spec.n()), bad, 1016))
}

/// Haar-random states on the rotated span of T recover with fidelity ≥ 1 − 1e−9.
pub fn losslessness(spec: &PolarCodeSpec, seed: u64) -> Result<CheckResult> {
    let proto = protocol(spec, 0.05, ExecutionMode::QuantumPure, seed)?;
    let support: Vec<usize> = proto
        .correctable_set()
        .expect("enumerated for quantum modes")
        .patterns()
        .iter()
        .map(|x| x.to_index() as usize)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut worst = 1.0f64;
    for _ in 0..100 {
        let mut psi = StateVector::haar_random(spec.n(), &support, &mut rng)?;
        psi.apply_all(&proto.config().source.u_rho_dagger())?;
        let input = QuantumState::pure(psi);
        let enc = proto.alice_encode(&input)?;
        let f = match enc.compressed {
            Some(c) => fidelity(&input, &proto.bob_decode(&c)?)?,
            None => 0.0,
        };
        worst = worst.min(f);
    }
    Ok(CheckResult::new(
        &format!("losslessness N={}", spec.n()),
        worst >= 1.0 - FIDELITY_TOL,
        1.0 - worst,
        "100 Haar-random states on span(T)",
    ))
}

/// Density-matrix protocol success against the enumerated sum.
pub fn oracle_equivalence(spec: &PolarCodeSpec, ps: &[f64]) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    let mut worst_fid = 1.0f64;
    for (i, &p) in ps.iter().enumerate() {
        let proto = protocol(spec, p, ExecutionMode::QuantumExact, i as u64)?;
        let out = proto.run(0, 0)?;
        let t = enumerate_correctable_set(spec, &p, DEFAULT_ENUMERATION_CAP)?;
        worst = worst.max((out.success_prob - success_probability_exact(&t, &p)).abs());
        worst_fid = worst_fid.min(out.fidelity.unwrap_or(0.0));
    }
    Ok(CheckResult::new(
        &format!("oracle-equivalence N={}", spec.n()),
        worst <= SUCCESS_TOL && worst_fid >= 1.0 - FIDELITY_TOL,
        worst,
        format!("p in {ps:?}, min branch fidelity {worst_fid:.12}"),
    ))
}

/// Leaf-by-leaf conditional projectors against the direct projector onto span(T).
pub fn lifted_projection(spec: &PolarCodeSpec) -> Result<CheckResult> {
    let direct = protocol(spec, 0.1, ExecutionMode::QuantumExact, 0)?;
    let rho = direct.source_state()?;
    let mut rotated = rho;
    rotated.apply_all(&direct.config().source.u_rho())?;
    let proj = direct.correctable_projector()?;
    let expected = proj.project_density(&rotated)?;
    let lifted = Protocol::new(direct.config().clone().with_projection(ProjectionMethod::Lifted))?;
    let got = lifted.lifted_projection_pass(&rotated)?;
    let dev = got.success.matrix().max_abs_diff(expected.matrix());
    Ok(CheckResult::new(&format!("lifted-projection N={}", spec.n()), dev <= 1e-12, dev, "flag-1 branch, dense comparison"))
}

pub fn sc_vs_ml(spec: &PolarCodeSpec) -> Result<CheckResult> {
    let r = polar_vs_ml_comparison(spec, &0.05)?;
    Ok(CheckResult::new(
        &format!("sc-vs-ml N={}", spec.n()),
        r.gap >= -SUCCESS_TOL,
        r.gap,
        format!("SC {:.12} ML {:.12}, {} syndromes differ", r.sc_success, r.ml_success, r.differing_syndromes),
    ))
}

/// Classical-fast Monte Carlo against the exact sum, within 3 standard errors.
pub fn mc_consistency(spec: &PolarCodeSpec, seed: u64) -> Result<CheckResult> {
    let p = 0.05;
    let out = protocol(spec, p, ExecutionMode::ClassicalFast, seed)?.run(100_000, seed)?;
    let t = enumerate_correctable_set(spec, &p, DEFAULT_ENUMERATION_CAP)?;
    let exact = success_probability_exact(&t, &p);
    let se = out.stderr.unwrap_or(0.0);
    let dev = (out.success_prob - exact).abs();
    Ok(CheckResult::new(
        &format!("mc-consistency N={}", spec.n()),
        dev <= 3.0 * se,
        dev,
        format!("estimate {:.6} exact {exact:.6} stderr {se:.2e}", out.success_prob),
    ))
}

/// The same sweep on a 1-thread and a 4-thread pool must produce identical bytes.
pub fn csv_determinism(spec: &PolarCodeSpec) -> Result<CheckResult> {
    let config = SweepConfig {
        spec: spec.clone(),
        grid: crate::harness::sweep::linear_grid(0.01, 0.49, 12)?,
        protocols: SweepProtocol::ALL.to_vec(),
        mc_trials: 3000,
        seed: 11,
        delta: 0.05,
    };
    let run = |threads: usize| -> Result<String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| crate::error::Error::resource(e.to_string()))?;
        pool.install(|| csv_string(&run_sweep(&config)?.records))
    };
    let (a, b) = (run(1)?, run(4)?);
    Ok(CheckResult::new("csv-determinism", a == b, if a == b { 0.0 } else { 1.0 }, format!("{} bytes", a.len())))
}

pub fn generic_ssc() -> Result<CheckResult> {
    let source = QubitSource::random_basis(0.1, &mut ChaCha8Rng::seed_from_u64(5))?;
    let code = LinearCode::repetition(3)?;
    let r = generic_quantum_ssc_check(&code, &source, SUCCESS_TOL)?;
    let leaders = build_coset_table(&code)?.len();
    Ok(CheckResult::new(
        "generic-ssc [3,1]",
        r.passed,
        (r.success_quantum - r.success_classical).abs(),
        format!("success {:.12} over {leaders} leaders, min fidelity {:.12}", r.success_quantum, r.min_fidelity),
    ))
}

/// Typical-subspace protocol against the classical typical-set sum.
pub fn schumacher_quantum(n: usize, cases: &[(f64, f64)]) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    let mut passed = true;
    for (i, &(p, delta)) in cases.iter().enumerate() {
        let source = QubitSource::random_basis(p, &mut ChaCha8Rng::seed_from_u64(i as u64))?;
        let r = schumacher_quantum_check(&TypicalSetSpec::new(n, p, delta)?, &source)?;
        worst = worst.max((r.success_quantum - r.success_classical).abs());
        passed &= r.passed;
    }
    Ok(CheckResult::new(&format!("schumacher-quantum N={n}"), passed, worst, format!("{} (p, delta) cases", cases.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_matrix_is_an_involution() {
        let g = explicit_gn(8);
        let sq = gf2_mul(&g, &g);
        for (i, row) in sq.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, u8::from(i == j));
            }
        }
    }

    #[test]
    fn negative_control_fails() {
        let r = round_trip(&[&example_n4()], true).unwrap();
        assert!(!r.passed);
        assert!(round_trip(&[&example_n4()], false).unwrap().passed);
    }
}
