//! Brute-force ground truth for small codes: generic linear codes over GF(2),
//! minimum-weight coset leaders, and the generic quantum syndrome-coding protocol.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::polar::{enumerate_correctable_set, polar_transform, success_probability_exact, CorrectableSet, PolarCodeSpec};
use crate::qsim::{
    fidelity, BasisProjector, BooleanIsometry, DensityMatrix, QuantumState, QubitSource, StateVector, FIDELITY_TOL,
};
use crate::scalar::{pattern_probability, Probability};

/// Largest blocklength the coset scan accepts.
pub const ORACLE_MAX_N: usize = 20;
/// Largest blocklength for the density-matrix cross-check.
pub const ORACLE_QUANTUM_MAX_N: usize = 8;

/// Rank of a set of GF(2) row vectors.
pub fn gf2_rank(rows: &[BitVector]) -> usize {
    reduce(rows).len()
}

// Gaussian elimination; returns (pivot column, row) pairs of a reduced basis.
fn reduce(rows: &[BitVector]) -> Vec<(usize, Vec<u8>)> {
    let mut basis: Vec<(usize, Vec<u8>)> = Vec::new();
    for row in rows {
        let mut r = row.as_slice().to_vec();
        for (pivot, b) in &basis {
            if r[*pivot] == 1 {
                r.iter_mut().zip(b).for_each(|(x, y)| *x ^= y);
            }
        }
        if let Some(pivot) = r.iter().position(|&x| x == 1) {
            for (_, b) in basis.iter_mut() {
                if b[pivot] == 1 {
                    b.iter_mut().zip(&r).for_each(|(x, y)| *x ^= y);
                }
            }
            basis.push((pivot, r));
        }
    }
    basis
}

/// Basis of `{x : x·r = 0 for every row r}`.
pub fn null_space(rows: &[BitVector], n: usize) -> Vec<BitVector> {
    let basis = reduce(rows);
    let pivots: Vec<usize> = basis.iter().map(|(p, _)| *p).collect();
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0u8; n];
            v[free] = 1;
            for (pivot, row) in &basis {
                v[*pivot] = row[free];
            }
            BitVector::from_bits(v).expect("binary entries")
        })
        .collect()
}

fn dot(a: &BitVector, b: &BitVector) -> u8 {
    a.as_slice().iter().zip(b.as_slice()).fold(0, |acc, (x, y)| acc ^ (x & y))
}

/// An `[N, K]` binary linear code with generator `G` (K×N) and parity check `H` ((N−K)×N).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    n: usize,
    generator: Vec<BitVector>,
    parity_check: Vec<BitVector>,
}

impl LinearCode {
    pub fn from_generator(n: usize, generator: Vec<BitVector>) -> Result<Self> {
        check_rows(&generator, n, "generator")?;
        let parity_check = null_space(&generator, n);
        Self::checked(n, generator, parity_check)
    }

    pub fn from_parity_check(n: usize, parity_check: Vec<BitVector>) -> Result<Self> {
        check_rows(&parity_check, n, "parity-check")?;
        let generator = null_space(&parity_check, n);
        Self::checked(n, generator, parity_check)
    }

    /// Both matrices supplied; `G Hᵀ = 0` and full rank are checked.
    pub fn new(n: usize, generator: Vec<BitVector>, parity_check: Vec<BitVector>) -> Result<Self> {
        check_rows(&generator, n, "generator")?;
        check_rows(&parity_check, n, "parity-check")?;
        Self::checked(n, generator, parity_check)
    }

    fn checked(n: usize, generator: Vec<BitVector>, parity_check: Vec<BitVector>) -> Result<Self> {
        if gf2_rank(&generator) != generator.len() || gf2_rank(&parity_check) != parity_check.len() {
            return Err(Error::validation("matrix rows are linearly dependent"));
        }
        if generator.len() + parity_check.len() != n {
            return Err(Error::validation("rank of G plus rank of H differs from N"));
        }
        if generator.iter().any(|g| parity_check.iter().any(|h| dot(g, h) == 1)) {
            return Err(Error::validation("G Hᵀ is not zero"));
        }
        Ok(LinearCode { n, generator, parity_check })
    }

    /// `[n, 1]` repetition code with `H` rows `e_1 + e_j`.
    pub fn repetition(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("repetition code needs n >= 1"));
        }
        let h = (1..n)
            .map(|j| {
                let mut v = BitVector::zeros(n);
                v.set(0, 1);
                v.set(j, 1);
                v
            })
            .collect();
        Self::new(n, vec![BitVector::from_bits(vec![1; n])?], h)
    }

    /// The polar code of `spec` as a linear code: `G` holds the rows of `G_N` at the
    /// information positions and `H` the columns of `G_N` at the frozen positions, so
    /// that `x Hᵀ` equals the compressed syndrome.
    pub fn from_polar(spec: &PolarCodeSpec) -> Result<Self> {
        let n = spec.n();
        let rows: Vec<BitVector> = (0..n)
            .map(|i| {
                let mut e = BitVector::zeros(n);
                e.set(i, 1);
                polar_transform(&e)
            })
            .collect::<Result<_>>()?;
        let generator = spec.info_positions().iter().map(|&i| rows[i].clone()).collect();
        let parity_check = spec
            .frozen_positions()
            .iter()
            .map(|&f| BitVector::from_bits(rows.iter().map(|r| r[f]).collect()))
            .collect::<Result<_>>()?;
        Self::new(n, generator, parity_check)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.generator.len()
    }

    pub fn generator(&self) -> &[BitVector] {
        &self.generator
    }

    pub fn parity_check(&self) -> &[BitVector] {
        &self.parity_check
    }

    /// `s = z Hᵀ`.
    pub fn syndrome(&self, z: &BitVector) -> Result<BitVector> {
        if z.len() != self.n {
            return Err(Error::size(format!("vector of length {} for a code of length {}", z.len(), self.n)));
        }
        BitVector::from_bits(self.parity_check.iter().map(|h| dot(z, h)).collect())
    }

    pub fn is_codeword(&self, z: &BitVector) -> Result<bool> {
        Ok(self.syndrome(z)?.weight() == 0)
    }

    /// `K` rows appended below `H` so that the square matrix `H'` is invertible.
    pub fn completion(&self) -> Vec<BitVector> {
        let mut rows = self.parity_check.clone();
        let mut extra = Vec::new();
        for i in 0..self.n {
            let mut e = BitVector::zeros(self.n);
            e.set(i, 1);
            rows.push(e.clone());
            if gf2_rank(&rows) == rows.len() {
                extra.push(e);
            } else {
                rows.pop();
            }
        }
        extra
    }

    /// Column masks of `H`, bit `N−K−1−r` set when row `r` has a one in that column.
    fn syndrome_masks(&self) -> Vec<u64> {
        let m = self.parity_check.len();
        (0..self.n)
            .map(|c| self.parity_check.iter().enumerate().fold(0u64, |acc, (r, h)| acc | (u64::from(h[c]) << (m - 1 - r))))
            .collect()
    }
}

fn check_rows(rows: &[BitVector], n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::size("code length must be positive"));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::size(format!("{what} row of length {} for N = {n}", r.len())));
    }
    Ok(())
}

/// Minimum-weight leader for every syndrome.
#[derive(Debug, Clone)]
pub struct CosetTable {
    leaders: Vec<BitVector>,
    /// Number of minimum-weight candidates per syndrome.
    ties: Vec<u64>,
    syndrome_len: usize,
}

impl CosetTable {
    pub fn len(&self) -> usize {
        self.leaders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaders.is_empty()
    }

    pub fn syndrome_len(&self) -> usize {
        self.syndrome_len
    }

    pub fn leader(&self, syndrome: &BitVector) -> Result<&BitVector> {
        if syndrome.len() != self.syndrome_len {
            return Err(Error::size(format!("syndrome of length {}, expected {}", syndrome.len(), self.syndrome_len)));
        }
        Ok(&self.leaders[syndrome.to_index() as usize])
    }

    /// Leaders in syndrome order.
    pub fn leaders(&self) -> &[BitVector] {
        &self.leaders
    }

    pub fn ties(&self) -> &[u64] {
        &self.ties
    }

    pub fn success_probability<P: Probability>(&self, p: &P) -> P {
        let n = self.leaders.first().map_or(0, BitVector::len);
        self.leaders.iter().fold(P::zero(), |acc, x| acc + pattern_probability(p, x.weight(), n))
    }

    pub fn to_correctable_set(&self) -> Result<CorrectableSet> {
        let n = self.leaders.first().map_or(0, BitVector::len);
        CorrectableSet::from_patterns(n, self.syndrome_len, self.leaders.clone())
    }
}

/// Scans all of `𝔽₂^N` in lexicographic order; the first minimum-weight vector of each coset wins.
pub fn build_coset_table(code: &LinearCode) -> Result<CosetTable> {
    let n = code.n();
    if n > ORACLE_MAX_N {
        return Err(Error::resource(format!("coset scan supports N <= {ORACLE_MAX_N}, got {n}")));
    }
    let m = code.parity_check().len();
    let masks = code.syndrome_masks();
    let mut best: Vec<Option<(u32, u64)>> = vec![None; 1 << m];
    let mut ties = vec![0u64; 1 << m];
    for x in 0u64..(1u64 << n) {
        let s = (0..n).filter(|&c| (x >> (n - 1 - c)) & 1 == 1).fold(0u64, |acc, c| acc ^ masks[c]) as usize;
        let w = x.count_ones();
        match best[s] {
            Some((bw, _)) if bw < w => {}
            Some((bw, _)) if bw == w => ties[s] += 1,
            _ => {
                best[s] = Some((w, x));
                ties[s] = 1;
            }
        }
    }
    let leaders = best
        .into_iter()
        .map(|b| b.map(|(_, x)| BitVector::from_index(x, n)).ok_or_else(|| Error::invariant("syndrome with empty coset")))
        .collect::<Result<_>>()?;
    Ok(CosetTable { leaders, ties, syndrome_len: m })
}

/// `true` when every pattern of `set` lies in a different coset of `code`.
pub fn is_coset_partition(code: &LinearCode, set: &CorrectableSet) -> Result<bool> {
    let mut seen = vec![false; 1usize << code.parity_check().len()];
    for x in set.patterns() {
        let s = code.syndrome(x)?.to_index() as usize;
        if std::mem::replace(&mut seen[s], true) {
            return Ok(false);
        }
    }
    Ok(seen.iter().all(|&b| b))
}

#[derive(Debug, Clone, Serialize)]
pub struct SscComparison<P> {
    pub n: usize,
    pub k: usize,
    /// Probability mass of the SC-correctable set.
    pub sc_success: P,
    /// Probability mass of the minimum-weight coset leaders.
    pub ml_success: P,
    /// `ml_success − sc_success`.
    pub gap: P,
    /// Syndromes where the SC pattern differs from the chosen leader.
    pub differing_syndromes: usize,
}

/// Compares the SC-decodable mass with the coset-leader mass for the same frozen set.
pub fn polar_vs_ml_comparison<P: Probability>(spec: &PolarCodeSpec, source_p: &P) -> Result<SscComparison<P>> {
    if spec.n() > 16 {
        return Err(Error::resource(format!("SC/ML comparison supports N <= 16, got {}", spec.n())));
    }
    let code = LinearCode::from_polar(spec)?;
    let table = build_coset_table(&code)?;
    let t = enumerate_correctable_set(spec, source_p, ORACLE_MAX_N)?;
    let sc_success = success_probability_exact(&t, source_p);
    let ml_success = table.success_probability(source_p);
    let differing_syndromes = t.iter().filter(|(s, x)| table.leaders()[s.to_index() as usize] != **x).count();
    Ok(SscComparison {
        n: spec.n(),
        k: spec.k(),
        gap: ml_success.clone() - sc_success.clone(),
        sc_success,
        ml_success,
        differing_syndromes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantumSscReport {
    pub success_quantum: f64,
    pub success_classical: f64,
    /// Smallest fidelity over the random inputs supported on the correctable span.
    pub min_fidelity: f64,
    pub passed: bool,
}

/// Runs the generic protocol with the coset-leader table: rotate, flagged projection
/// onto span(T), `E(H'x)`, reset of the extension register, transmission of the
/// syndrome qubits, and Bob's `U_D = Σ_{x∈T} |x⟩⟨Hx|` followed by the inverse rotation.
pub fn generic_quantum_ssc_check(code: &LinearCode, source: &QubitSource<f64>, tolerance: f64) -> Result<QuantumSscReport> {
    let (n, k) = (code.n(), code.k());
    if n > ORACLE_QUANTUM_MAX_N {
        return Err(Error::resource(format!("generic quantum check supports N <= {ORACLE_QUANTUM_MAX_N}, got {n}")));
    }
    if k == 0 || k == n {
        return Err(Error::param("degenerate rates are not run through the quantum check"));
    }
    let table = build_coset_table(code)?;
    let m = n - k;
    let h_ext: Vec<BitVector> = code.parity_check().iter().cloned().chain(code.completion()).collect();
    let apply = |rows: &[BitVector], x: usize| -> usize {
        let v = BitVector::from_index(x as u64, n);
        rows.iter().fold(0usize, |acc, r| (acc << 1) | usize::from(dot(r, &v)))
    };
    let u_h = BooleanIsometry::from_fn(n, n, |x| apply(&h_ext, x))?;
    let leader_of = |s: usize| table.leaders()[s].to_index() as usize;
    // the extension bits of a leader depend on its syndrome; undo them before discarding
    let reset = BooleanIsometry::from_fn(n, n, |y| {
        let s = y >> k;
        y ^ (apply(&h_ext, leader_of(s)) & ((1 << k) - 1))
    })?;
    let keep_syndrome = BooleanIsometry::from_fn(m, n, |s| s << k)?;
    let u_d = BooleanIsometry::from_fn(m, n, leader_of)?;
    let projector = BasisProjector::from_support(n, table.leaders().iter().map(|x| x.to_index() as usize))?;

    let rho = DensityMatrix::tensor_power(&source.rho(), n)?;
    let mut rotated = rho;
    rotated.apply_all(&source.u_rho())?;
    let success_quantum = projector.project_density(&rotated)?.trace();
    let success_classical = table.success_probability(&source.p());

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let support: Vec<usize> = table.leaders().iter().map(|x| x.to_index() as usize).collect();
    let mut min_fidelity = 1.0f64;
    for _ in 0..8 {
        let mut psi = StateVector::haar_random(n, &support, &mut rng)?;
        psi.apply_all(&source.u_rho_dagger())?;
        let mut a = psi.clone();
        a.apply_all(&source.u_rho())?;
        let a = projector.project_state(&a)?;
        let a = reset.apply_state(&u_h.apply_state(&a)?)?;
        let sent = keep_syndrome.apply_adjoint_state(&a)?;
        let mut out = u_d.apply_state(&sent)?;
        out.apply_all(&source.u_rho_dagger())?;
        min_fidelity = min_fidelity.min(fidelity(&QuantumState::pure(psi), &QuantumState::pure(out))?);
    }
    let passed = (success_quantum - success_classical).abs() <= tolerance && min_fidelity >= 1.0 - FIDELITY_TOL;
    Ok(QuantumSscReport { success_quantum, success_classical, min_fidelity, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        BitVector::from_bits(s.bytes().map(|b| b - b'0').collect()).unwrap()
    }

    #[test]
    fn repetition_syndrome_and_leaders() {
        let code = LinearCode::repetition(3).unwrap();
        assert_eq!(code.parity_check(), &[bv("110"), bv("101")]);
        assert_eq!(code.syndrome(&bv("100")).unwrap(), bv("11"));
        assert!(code.is_codeword(&bv("111")).unwrap());
        let table = build_coset_table(&code).unwrap();
        let mut leaders: Vec<String> = table.leaders().iter().map(|x| x.to_string()).collect();
        leaders.sort();
        assert_eq!(leaders, ["000", "001", "010", "100"]);
        assert!((table.success_probability(&0.1_f64) - 0.972).abs() < 1e-12);
    }

    #[test]
    fn lexicographic_tie_break() {
        // [4,1] repetition: syndrome of 1100 ties with 0011
        let table = build_coset_table(&LinearCode::repetition(4).unwrap()).unwrap();
        let code = LinearCode::repetition(4).unwrap();
        let s = code.syndrome(&bv("0011")).unwrap();
        assert_eq!(table.leader(&s).unwrap(), &bv("0011"));
        assert_eq!(table.ties()[s.to_index() as usize], 2);
    }

    #[test]
    fn rate_one_code_has_single_coset() {
        let code = LinearCode::from_parity_check(3, vec![]).unwrap();
        let table = build_coset_table(&code).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table.leaders()[0], bv("000"));
    }

    #[test]
    fn completion_is_invertible() {
        let spec = PolarCodeSpec::with_frozen(3, vec![1, 2, 3, 5]).unwrap();
        let code = LinearCode::from_polar(&spec).unwrap();
        let mut rows = code.parity_check().to_vec();
        rows.extend(code.completion());
        assert_eq!(rows.len(), 8);
        assert_eq!(gf2_rank(&rows), 8);
    }

    #[test]
    fn polar_parity_check_matches_compress() {
        let spec = PolarCodeSpec::with_frozen(3, vec![1, 2, 4, 5, 6]).unwrap();
        let code = LinearCode::from_polar(&spec).unwrap();
        for x in 0..256 {
            let x = BitVector::from_index(x, 8);
            assert_eq!(code.syndrome(&x).unwrap(), crate::polar::compress(&spec, &x).unwrap());
        }
    }

    #[test]
    fn generic_quantum_repetition() {
        let code = LinearCode::repetition(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let source = QubitSource::random_basis(0.1, &mut rng).unwrap();
        let r = generic_quantum_ssc_check(&code, &source, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.success_classical - 0.972).abs() < 1e-12);
    }

    #[test]
    fn generic_quantum_rejects_degenerate_rates() {
        let source = QubitSource::computational(0.1).unwrap();
        let code = LinearCode::from_parity_check(3, vec![]).unwrap();
        assert!(generic_quantum_ssc_check(&code, &source, 1e-10).is_err());
    }
}
