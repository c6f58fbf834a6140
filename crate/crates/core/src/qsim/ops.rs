use num_complex::Complex;

use super::{check_qubits, shift, DenseMatrix, DensityMatrix, StateVector, MIXED_QUBIT_CAP, PURE_QUBIT_CAP};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// The isometry `E(f) = Σ_x |f(x)⟩⟨x|` of an injective map `f: F_2^M → F_2^N`,
/// stored as the index table `x ↦ f(x)`. With `M = N` it is a permutation unitary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanIsometry {
    domain_bits: usize,
    codomain_bits: usize,
    table: Vec<usize>,
}

impl BooleanIsometry {
    pub fn new(domain_bits: usize, codomain_bits: usize, table: Vec<usize>) -> Result<Self> {
        check_qubits(codomain_bits, PURE_QUBIT_CAP)?;
        if domain_bits > codomain_bits {
            return Err(Error::validation("an isometry cannot shrink the register"));
        }
        if table.len() != 1usize << domain_bits {
            return Err(Error::size(format!("table of length {} for {domain_bits} input bits", table.len())));
        }
        let dim = 1usize << codomain_bits;
        let mut hit = vec![false; dim];
        for (x, &y) in table.iter().enumerate() {
            if y >= dim {
                return Err(Error::validation(format!("image {y} of {x} is outside the codomain")));
            }
            if std::mem::replace(&mut hit[y], true) {
                return Err(Error::validation(format!("map is not injective: {y} has two preimages")));
            }
        }
        Ok(BooleanIsometry { domain_bits, codomain_bits, table })
    }

    pub fn from_fn(domain_bits: usize, codomain_bits: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::new(domain_bits, codomain_bits, (0..1usize << domain_bits).map(f).collect())
    }

    pub fn identity(bits: usize) -> Self {
        BooleanIsometry { domain_bits: bits, codomain_bits: bits, table: (0..1usize << bits).collect() }
    }

    pub fn domain_bits(&self) -> usize {
        self.domain_bits
    }

    pub fn codomain_bits(&self) -> usize {
        self.codomain_bits
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn image(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn is_permutation(&self) -> bool {
        self.domain_bits == self.codomain_bits
    }

    pub fn is_identity(&self) -> bool {
        self.is_permutation() && self.table.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &BooleanIsometry) -> Result<BooleanIsometry> {
        if then.domain_bits != self.codomain_bits {
            return Err(Error::size("composed maps have incompatible registers"));
        }
        Ok(BooleanIsometry {
            domain_bits: self.domain_bits,
            codomain_bits: then.codomain_bits,
            table: self.table.iter().map(|&y| then.table[y]).collect(),
        })
    }

    /// Inverse of a permutation.
    pub fn inverse(&self) -> Result<BooleanIsometry> {
        if !self.is_permutation() {
            return Err(Error::validation("only permutations are invertible"));
        }
        let mut inv = vec![0; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y] = x;
        }
        Ok(BooleanIsometry { domain_bits: self.domain_bits, codomain_bits: self.codomain_bits, table: inv })
    }

    /// `self ⊗ I` on `extra` trailing qubits.
    pub fn tensor_identity(&self, extra: usize) -> Result<BooleanIsometry> {
        let low = 1usize << extra;
        Self::new(
            self.domain_bits + extra,
            self.codomain_bits + extra,
            (0..self.table.len() << extra).map(|i| (self.table[i >> extra] << extra) | (i & (low - 1))).collect(),
        )
    }

    pub fn apply_state<T: Real>(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        if psi.n_qubits() != self.domain_bits {
            return Err(Error::size(format!("map on {} qubits applied to {}", self.domain_bits, psi.n_qubits())));
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); 1usize << self.codomain_bits];
        for (x, a) in psi.amplitudes().iter().enumerate() {
            out[self.table[x]] = *a;
        }
        StateVector::unnormalized(self.codomain_bits, out)
    }

    /// `E† |ψ⟩`: amplitudes outside the range are discarded.
    pub fn apply_adjoint_state<T: Real>(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        if psi.n_qubits() != self.codomain_bits {
            return Err(Error::size("adjoint applied to a register of the wrong size"));
        }
        let amps = self.table.iter().map(|&y| psi.amplitudes()[y]).collect();
        StateVector::unnormalized(self.domain_bits, amps)
    }

    /// `E ρ E†`.
    pub fn apply_density<T: Real>(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        if rho.n_qubits() != self.domain_bits {
            return Err(Error::size(format!("map on {} qubits applied to {}", self.domain_bits, rho.n_qubits())));
        }
        check_qubits(self.codomain_bits, MIXED_QUBIT_CAP)?;
        let dim = 1usize << self.codomain_bits;
        let mut out = DenseMatrix::zeros(dim, dim);
        let m = rho.matrix();
        for (r, &yr) in self.table.iter().enumerate() {
            for (c, &yc) in self.table.iter().enumerate() {
                out[(yr, yc)] = m[(r, c)];
            }
        }
        DensityMatrix::unnormalized(self.codomain_bits, out)
    }

    /// `E† ρ E`.
    pub fn apply_adjoint_density<T: Real>(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        if rho.n_qubits() != self.codomain_bits {
            return Err(Error::size("adjoint applied to a register of the wrong size"));
        }
        let m = rho.matrix();
        let dim = self.table.len();
        DensityMatrix::unnormalized(self.domain_bits, DenseMatrix::from_fn(dim, dim, |r, c| m[(self.table[r], self.table[c])]))
    }
}

/// Dense `E(f)`, capped at `cap` qubits on either side.
pub fn embed_boolean<T: Real>(f: &BooleanIsometry, cap: usize) -> Result<DenseMatrix<T>> {
    check_qubits(f.codomain_bits, cap)?;
    let mut e = DenseMatrix::zeros(1usize << f.codomain_bits, 1usize << f.domain_bits);
    for (x, &y) in f.table.iter().enumerate() {
        e[(y, x)] = Complex::new(T::one(), T::zero());
    }
    Ok(e)
}

/// `CNOT` with the given control and target positions on `m` qubits.
pub fn cnot(m: usize, control: usize, target: usize) -> Result<BooleanIsometry> {
    if control >= m || target >= m || control == target {
        return Err(Error::validation(format!("invalid CNOT {control} -> {target} on {m} qubits")));
    }
    let (cb, tb) = (1usize << shift(control, m), 1usize << shift(target, m));
    BooleanIsometry::from_fn(m, m, |i| if i & cb != 0 { i ^ tb } else { i })
}

/// The qubit permutation sending the state of position `k` to position `pi[k]`.
pub fn qubit_permutation(m: usize, pi: &[usize]) -> Result<BooleanIsometry> {
    if pi.len() != m {
        return Err(Error::size("qubit permutation length differs from register size"));
    }
    let mut seen = vec![false; m];
    for &q in pi {
        if q >= m || std::mem::replace(&mut seen[q], true) {
            return Err(Error::validation("qubit map is not a permutation"));
        }
    }
    BooleanIsometry::from_fn(m, m, |i| {
        (0..m).fold(0usize, |acc, k| acc | (((i >> shift(k, m)) & 1) << shift(pi[k], m)))
    })
}

/// `V_N |u⟩ = |u G_N⟩` built gate by gate: `CNOT_{2→1}` on each adjacent pair,
/// then the reverse shuffle `U^R_N`, then `V_{N/2}` on each half.
pub fn build_vn(n_exp: u32) -> Result<BooleanIsometry> {
    let n = 1usize << n_exp;
    check_qubits(n, PURE_QUBIT_CAP)?;
    vn_on(n, 0, n)
}

fn vn_on(m: usize, offset: usize, len: usize) -> Result<BooleanIsometry> {
    if len == 1 {
        return Ok(BooleanIsometry::identity(m));
    }
    let mut op = BooleanIsometry::identity(m);
    for k in 0..len / 2 {
        op = op.then(&cnot(m, offset + 2 * k + 1, offset + 2 * k)?)?;
    }
    // position offset + r(k) moves to offset + k, r = (1, 3, ..., 2, 4, ...)
    let half = len / 2;
    let mut pi: Vec<usize> = (0..m).collect();
    for k in 0..len {
        let src = if k < half { 2 * k } else { 2 * (k - half) + 1 };
        pi[offset + src] = offset + k;
    }
    op = op.then(&qubit_permutation(m, &pi)?)?;
    op = op.then(&vn_on(m, offset, half)?)?;
    op.then(&vn_on(m, offset + half, half)?)
}

/// `U_{t,L}(h) = Σ_f |f⟩⟨f| ⊗ σ_x^{h_f}` on `|L| + 1` qubits: the first `|L|`
/// qubits are controls (MSB first), the last is the target.
pub fn controlled_flip_block(h_vec: &[u8]) -> Result<BooleanIsometry> {
    let l = h_vec.len().trailing_zeros() as usize;
    if h_vec.len() != 1 << l {
        return Err(Error::size("h_vec length is not a power of two"));
    }
    BooleanIsometry::from_fn(l + 1, l + 1, |i| i ^ usize::from(h_vec[i >> 1] & 1))
}

fn swap_order(m: usize, target: usize, frozen: &[usize]) -> Result<Vec<usize>> {
    if target >= m || frozen.iter().any(|&q| q >= m) {
        return Err(Error::size(format!("qubit position out of range for {m} qubits")));
    }
    if frozen.contains(&target) {
        return Err(Error::validation(format!("target qubit {target} is also a control")));
    }
    if frozen.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation("control list must be strictly increasing"));
    }
    // slot k ← π(k): controls, then the target, then the untouched qubits in order
    let mut order: Vec<usize> = frozen.to_vec();
    order.push(target);
    order.extend((0..m).filter(|q| *q != target && !frozen.contains(q)));
    Ok(order)
}

/// `Sw_π (U_{t,L}(h) ⊗ I) Sw_π†` on `m` qubits, where `Sw_π` moves slot `k` to
/// position `π(k)` and `π` lists the controls, then the target.
pub fn conditional_flip_unitary(m: usize, target: usize, frozen: &[usize], h_vec: &[u8]) -> Result<BooleanIsometry> {
    if h_vec.len() != 1usize << frozen.len() {
        return Err(Error::size(format!("h_vec has {} entries for {} controls", h_vec.len(), frozen.len())));
    }
    let pi = swap_order(m, target, frozen)?;
    let sw = qubit_permutation(m, &pi)?;
    let block = controlled_flip_block(h_vec)?.tensor_identity(m - frozen.len() - 1)?;
    sw.inverse()?.then(&block)?.then(&sw)
}

/// Bit-level flip: `|a⟩ ↦ |a ⊕ h(a_L) e_t⟩`.
pub fn conditional_flip_direct(m: usize, target: usize, frozen: &[usize], h_vec: &[u8]) -> Result<BooleanIsometry> {
    swap_order(m, target, frozen)?;
    if h_vec.len() != 1usize << frozen.len() {
        return Err(Error::size("h_vec length is not 2^|L|"));
    }
    let tb = 1usize << shift(target, m);
    BooleanIsometry::from_fn(m, m, |i| {
        let sel = frozen.iter().fold(0usize, |acc, &q| (acc << 1) | ((i >> shift(q, m)) & 1));
        if h_vec[sel] & 1 == 1 {
            i ^ tb
        } else {
            i
        }
    })
}

/// A projector diagonal in the computational basis, stored as its support mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisProjector {
    n_qubits: usize,
    mask: Vec<bool>,
}

impl BasisProjector {
    pub fn new(n_qubits: usize, mask: Vec<bool>) -> Result<Self> {
        check_qubits(n_qubits, PURE_QUBIT_CAP)?;
        if mask.len() != 1usize << n_qubits {
            return Err(Error::size("projector mask length is not 2^m"));
        }
        Ok(BasisProjector { n_qubits, mask })
    }

    pub fn from_support(n_qubits: usize, support: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; 1usize << n_qubits];
        for i in support {
            *mask.get_mut(i).ok_or_else(|| Error::size(format!("basis index {i} out of range")))? = true;
        }
        Self::new(n_qubits, mask)
    }

    pub fn identity(n_qubits: usize) -> Self {
        BasisProjector { n_qubits, mask: vec![true; 1usize << n_qubits] }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn rank(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// `I - Π`.
    pub fn complement(&self) -> Self {
        BasisProjector { n_qubits: self.n_qubits, mask: self.mask.iter().map(|b| !b).collect() }
    }

    /// Product of commuting basis projectors.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::size("projectors act on different registers"));
        }
        Ok(BasisProjector { n_qubits: self.n_qubits, mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect() })
    }

    pub fn to_dense<T: Real>(&self) -> DenseMatrix<T> {
        DenseMatrix::diagonal(&self.mask.iter().map(|&b| if b { T::one() } else { T::zero() }).collect::<Vec<_>>())
    }

    pub fn project_state<T: Real>(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::size("projector and state act on different registers"));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let amps = psi.amplitudes().iter().zip(&self.mask).map(|(a, &keep)| if keep { *a } else { zero }).collect();
        StateVector::unnormalized(self.n_qubits, amps)
    }

    pub fn project_density<T: Real>(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        if rho.n_qubits() != self.n_qubits {
            return Err(Error::size("projector and state act on different registers"));
        }
        let m = rho.matrix();
        let zero = Complex::new(T::zero(), T::zero());
        let dim = rho.dim();
        let out = DenseMatrix::from_fn(dim, dim, |r, c| if self.mask[r] && self.mask[c] { m[(r, c)] } else { zero });
        DensityMatrix::unnormalized(self.n_qubits, out)
    }
}

/// `Π_{t,L}(h) = Σ_f |f⟩⟨f| ⊗ Π_{h_f}` on target `t`, identity elsewhere.
pub fn conditional_projector(m: usize, target: usize, frozen: &[usize], h_vec: &[u8]) -> Result<BasisProjector> {
    swap_order(m, target, frozen)?;
    if h_vec.len() != 1usize << frozen.len() {
        return Err(Error::size("h_vec length is not 2^|L|"));
    }
    let s = shift(target, m);
    let mask = (0..1usize << m)
        .map(|i| {
            let sel = frozen.iter().fold(0usize, |acc, &q| (acc << 1) | ((i >> shift(q, m)) & 1));
            ((i >> s) & 1) as u8 == h_vec[sel] & 1
        })
        .collect();
    BasisProjector::new(m, mask)
}

/// A projector given either as a basis mask or as a dense matrix.
#[derive(Debug, Clone)]
pub enum Projector<T> {
    Basis(BasisProjector),
    Dense(DenseMatrix<T>),
}

/// Outcome of the two-outcome instrument `{Π, I - Π}`.
#[derive(Debug, Clone)]
pub struct InstrumentOutcome<T> {
    /// `Π ρ Π`, not normalized.
    pub success: DensityMatrix<T>,
    /// `(I - Π) ρ (I - Π)`, not normalized.
    pub failure: DensityMatrix<T>,
}

impl<T: Real> InstrumentOutcome<T> {
    pub fn success_probability(&self) -> T {
        self.success.trace()
    }

    pub fn failure_probability(&self) -> T {
        self.failure.trace()
    }

    /// `Π ρ Π ⊗ |1⟩⟨1|_B + (I-Π) ρ (I-Π) ⊗ |0⟩⟨0|_B`, flag as the last qubit.
    pub fn joint(&self) -> Result<DensityMatrix<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        let dim = self.success.dim();
        let (s, f) = (self.success.matrix(), self.failure.matrix());
        let out = DenseMatrix::from_fn(2 * dim, 2 * dim, |r, c| match (r & 1, c & 1) {
            (1, 1) => s[(r >> 1, c >> 1)],
            (0, 0) => f[(r >> 1, c >> 1)],
            _ => zero,
        });
        DensityMatrix::unnormalized(self.success.n_qubits() + 1, out)
    }
}

/// Applies the flagged instrument of `projector` to `rho`.
pub fn apply_instrument<T: Real>(rho: &DensityMatrix<T>, projector: &Projector<T>) -> Result<InstrumentOutcome<T>> {
    match projector {
        Projector::Basis(p) => Ok(InstrumentOutcome { success: p.project_density(rho)?, failure: p.complement().project_density(rho)? }),
        Projector::Dense(p) => {
            if p.rows() != rho.dim() || !p.is_square() {
                return Err(Error::size("projector does not act on this register"));
            }
            if !p.is_projector(T::lit(super::STRUCTURAL_TOL)) {
                return Err(Error::validation("operator is not an orthogonal projector"));
            }
            let q = DenseMatrix::identity(p.rows()).sub(p)?;
            Ok(InstrumentOutcome { success: rho.conjugate(p)?, failure: rho.conjugate(&q)? })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitVector;
    use crate::polar::polar_transform;

    #[test]
    fn v2_is_cnot_from_second_to_first() {
        let v2 = build_vn(1).unwrap();
        assert_eq!(v2, cnot(2, 1, 0).unwrap());
        assert_eq!(v2.table(), &[0, 3, 2, 1]);
    }

    #[test]
    fn vn_matches_transform_exhaustively() {
        for n_exp in 1..=4 {
            let vn = build_vn(n_exp).unwrap();
            let n = 1usize << n_exp;
            for u in 0..1usize << n {
                let x = polar_transform(&BitVector::from_index(u as u64, n)).unwrap();
                assert_eq!(vn.image(u), x.to_index() as usize);
            }
            assert!(vn.then(&vn).unwrap().is_identity());
        }
    }

    #[test]
    fn swapped_flip_matches_direct_flip() {
        let h = [0u8, 1, 1, 0, 1, 0, 0, 1];
        for target in 0..5 {
            let controls: Vec<usize> = (0..5).filter(|&q| q != target).take(3).collect();
            let a = conditional_flip_unitary(5, target, &controls, &h).unwrap();
            let b = conditional_flip_direct(5, target, &controls, &h).unwrap();
            assert_eq!(a, b);
            assert!(a.then(&a).unwrap().is_identity());
        }
        assert!(conditional_flip_unitary(3, 1, &[1], &[0, 1]).is_err());
    }

    #[test]
    fn embedding_is_an_isometry() {
        let f = BooleanIsometry::from_fn(2, 4, |x| [0b0000, 0b0101, 0b1000, 0b1111][x]).unwrap();
        let e: DenseMatrix<f64> = embed_boolean(&f, 10).unwrap();
        assert_eq!((e.rows(), e.cols()), (16, 4));
        assert!(e.is_isometry(1e-15));
        assert!(BooleanIsometry::from_fn(2, 3, |_| 1).is_err());
    }

    #[test]
    fn instrument_edge_cases() {
        let rho = DensityMatrix::<f64>::new(1, DenseMatrix::diagonal(&[0.9, 0.1])).unwrap();
        let all = apply_instrument(&rho, &Projector::Basis(BasisProjector::identity(1))).unwrap();
        assert_eq!(all.success_probability(), 1.0);
        let none = apply_instrument(&rho, &Projector::Basis(BasisProjector::identity(1).complement())).unwrap();
        assert_eq!(none.success_probability(), 0.0);
        let bad = DenseMatrix::diagonal(&[0.5, 1.0]);
        assert!(matches!(apply_instrument(&rho, &Projector::Dense(bad)), Err(Error::Validation(_))));
        let joint = all.joint().unwrap();
        assert!((joint.trace() - 1.0).abs() < 1e-15);
        assert!((joint.matrix()[(1, 1)].re - 0.9).abs() < 1e-15);
    }
}
