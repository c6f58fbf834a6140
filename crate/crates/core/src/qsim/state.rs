use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{hermitian_eigen, hermitian_function};
use super::{check_qubits, shift, DenseMatrix, MIXED_QUBIT_CAP, PURE_QUBIT_CAP, STRUCTURAL_TOL};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Pure state on `m` qubits. Qubit position 0 is the most significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Validates the length and the unit norm.
    pub fn new(n_qubits: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        let s = Self::unnormalized(n_qubits, amps)?;
        let norm = s.norm_sqr();
        if (norm - T::one()).abs() > T::lit(STRUCTURAL_TOL) {
            return Err(Error::validation(format!("state norm² is {norm}, expected 1")));
        }
        Ok(s)
    }

    /// A vector of the right length with no norm requirement (branches of an instrument).
    pub fn unnormalized(n_qubits: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        check_qubits(n_qubits, PURE_QUBIT_CAP)?;
        if amps.len() != 1usize << n_qubits {
            return Err(Error::size(format!("{} amplitudes for {n_qubits} qubits", amps.len())));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits, PURE_QUBIT_CAP)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::size(format!("basis index {index} out of range for {n_qubits} qubits")));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(StateVector { n_qubits, amps })
    }

    /// Normalized `Σ_i c_i |i⟩` with i.i.d. complex Gaussian `c_i` over `support` (Haar on that span).
    pub fn haar_random(n_qubits: usize, support: &[usize], rng: &mut impl Rng) -> Result<Self> {
        check_qubits(n_qubits, PURE_QUBIT_CAP)?;
        let dim = 1usize << n_qubits;
        if support.is_empty() || support.iter().any(|&i| i >= dim) {
            return Err(Error::param("support must be a non-empty set of basis indices"));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        for &i in support {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            amps[i] = Complex::new(T::lit(re), T::lit(im));
        }
        let mut s = StateVector { n_qubits, amps };
        s.normalize()?;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        pairwise_sum(&self.amps.iter().map(|a| a.norm_sqr()).collect::<Vec<_>>())
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm <= T::zero() {
            return Err(Error::validation("cannot normalize the zero vector"));
        }
        for a in &mut self.amps {
            *a = *a / norm;
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::size("inner product of states on different qubit counts"));
        }
        Ok(self.amps.iter().zip(&other.amps).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// Applies a 2×2 unitary to one qubit.
    pub fn apply_single(&mut self, qubit: usize, u: &DenseMatrix<T>) -> Result<()> {
        check_single(u, qubit, self.n_qubits)?;
        let bit = 1usize << shift(qubit, self.n_qubits);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                self.amps[i | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
            }
        }
        Ok(())
    }

    /// Applies the same 2×2 unitary to every qubit.
    pub fn apply_all(&mut self, u: &DenseMatrix<T>) -> Result<()> {
        (0..self.n_qubits).try_for_each(|q| self.apply_single(q, u))
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| *a * *b)).collect();
        Self::unnormalized(self.n_qubits + other.n_qubits, amps)
    }

    pub fn to_density(&self) -> Result<DensityMatrix<T>> {
        check_qubits(self.n_qubits, MIXED_QUBIT_CAP)?;
        let dim = self.dim();
        let data = DenseMatrix::from_fn(dim, dim, |r, c| self.amps[r] * self.amps[c].conj());
        Ok(DensityMatrix { n_qubits: self.n_qubits, data })
    }

    /// `(basis index, amplitude)` for amplitudes above `1e-12` in modulus.
    pub fn dump(&self) -> Vec<(usize, Complex<T>)> {
        self.amps.iter().copied().enumerate().filter(|(_, a)| a.norm() > T::lit(1e-12)).collect()
    }
}

/// Mixed state on `m` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    n_qubits: usize,
    data: DenseMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity to `1e-10`.
    pub fn new(n_qubits: usize, data: DenseMatrix<T>) -> Result<Self> {
        let rho = Self::unnormalized(n_qubits, data)?;
        rho.validate()?;
        Ok(rho)
    }

    /// A square operator of the right size with no trace requirement (instrument branches).
    pub fn unnormalized(n_qubits: usize, data: DenseMatrix<T>) -> Result<Self> {
        check_qubits(n_qubits, MIXED_QUBIT_CAP)?;
        let dim = 1usize << n_qubits;
        if data.rows() != dim || data.cols() != dim {
            return Err(Error::size(format!("{}x{} matrix for {n_qubits} qubits", data.rows(), data.cols())));
        }
        Ok(DensityMatrix { n_qubits, data })
    }

    pub fn validate(&self) -> Result<()> {
        let tol = T::lit(STRUCTURAL_TOL);
        if !self.data.is_hermitian(tol) {
            return Err(Error::validation("density matrix is not Hermitian"));
        }
        let tr = self.trace();
        if (tr - T::one()).abs() > tol {
            return Err(Error::validation(format!("density matrix trace is {tr}")));
        }
        let (values, _) = hermitian_eigen(&self.data)?;
        if let Some(&min) = values.first() {
            if min < -tol {
                return Err(Error::validation(format!("density matrix has eigenvalue {min}")));
            }
        }
        Ok(())
    }

    /// `ρ^{⊗m}` for a single-qubit `ρ`.
    pub fn tensor_power(single: &DenseMatrix<T>, m: usize) -> Result<Self> {
        check_qubits(m, MIXED_QUBIT_CAP)?;
        if single.rows() != 2 || single.cols() != 2 {
            return Err(Error::size("tensor power needs a 2x2 matrix"));
        }
        let data = (0..m).fold(DenseMatrix::identity(1), |acc, _| acc.kron(single));
        DensityMatrix::new(m, data)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.data.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.data
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.data
    }

    pub fn trace(&self) -> T {
        pairwise_sum(&(0..self.dim()).map(|i| self.data[(i, i)].re).collect::<Vec<_>>())
    }

    /// Diagonal entries `⟨i|ρ|i⟩`.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.data[(i, i)].re).collect()
    }

    /// `ρ / Tr ρ`.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= T::zero() {
            return Err(Error::validation("cannot normalize a zero-trace operator"));
        }
        Ok(DensityMatrix { n_qubits: self.n_qubits, data: self.data.scale(Complex::new(T::one() / tr, T::zero())) })
    }

    /// `U ρ U†` for a 2×2 unitary on one qubit.
    pub fn apply_single(&mut self, qubit: usize, u: &DenseMatrix<T>) -> Result<()> {
        check_single(u, qubit, self.n_qubits)?;
        let dim = self.dim();
        let bit = 1usize << shift(qubit, self.n_qubits);
        // left multiply: rows
        for c in 0..dim {
            for r in (0..dim).filter(|r| r & bit == 0) {
                let (a0, a1) = (self.data[(r, c)], self.data[(r | bit, c)]);
                self.data[(r, c)] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                self.data[(r | bit, c)] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
            }
        }
        // right multiply by U†: columns
        for r in 0..dim {
            for c in (0..dim).filter(|c| c & bit == 0) {
                let (a0, a1) = (self.data[(r, c)], self.data[(r, c | bit)]);
                self.data[(r, c)] = a0 * u[(0, 0)].conj() + a1 * u[(0, 1)].conj();
                self.data[(r, c | bit)] = a0 * u[(1, 0)].conj() + a1 * u[(1, 1)].conj();
            }
        }
        Ok(())
    }

    pub fn apply_all(&mut self, u: &DenseMatrix<T>) -> Result<()> {
        (0..self.n_qubits).try_for_each(|q| self.apply_single(q, u))
    }

    /// `A ρ A†` for a dense operator on the full register.
    pub fn conjugate(&self, a: &DenseMatrix<T>) -> Result<Self> {
        if a.cols() != self.dim() {
            return Err(Error::size("operator does not act on this register"));
        }
        let out = a.matmul(&self.data)?.matmul(&a.adjoint())?;
        let m = a.rows().trailing_zeros() as usize;
        if a.rows() != 1 << m {
            return Err(Error::size("operator codomain is not a qubit register"));
        }
        DensityMatrix::unnormalized(m, out)
    }

    /// Reduced state on the qubit positions in `keep`, in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let m = self.n_qubits;
        if keep.iter().any(|&q| q >= m) {
            return Err(Error::size(format!("qubit position out of range for {m} qubits")));
        }
        let mut seen = vec![false; m];
        for &q in keep {
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::validation(format!("qubit {q} listed twice")));
            }
        }
        let traced: Vec<usize> = (0..m).filter(|q| !seen[*q]).collect();
        let k = keep.len();
        let kd = 1usize << k;
        let compose = |kept: usize, env: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                idx |= ((kept >> (k - 1 - pos)) & 1) << shift(q, m);
            }
            for (pos, &q) in traced.iter().enumerate() {
                idx |= ((env >> (traced.len() - 1 - pos)) & 1) << shift(q, m);
            }
            idx
        };
        let env_dim = 1usize << traced.len();
        let out = DenseMatrix::from_fn(kd, kd, |r, c| {
            (0..env_dim).fold(Complex::new(T::zero(), T::zero()), |acc, e| acc + self.data[(compose(r, e), compose(c, e))])
        });
        DensityMatrix::unnormalized(k, out)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        DensityMatrix::unnormalized(self.n_qubits + other.n_qubits, self.data.kron(&other.data))
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector<T>) -> Result<T> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::size("state and density matrix have different qubit counts"));
        }
        let rho_psi = self.data.apply(psi.amplitudes())?;
        Ok(psi.inner_raw(&rho_psi).re)
    }
}

impl<T: Real> StateVector<T> {
    fn inner_raw(&self, other: &[Complex<T>]) -> Complex<T> {
        self.amps.iter().zip(other).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * *b)
    }
}

/// A pure or mixed register, optionally carrying a flag qubit.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState<T> {
    Pure { state: StateVector<T>, flag: Option<usize> },
    Mixed { state: DensityMatrix<T>, flag: Option<usize> },
}

impl<T: Real> QuantumState<T> {
    pub fn pure(state: StateVector<T>) -> Self {
        QuantumState::Pure { state, flag: None }
    }

    pub fn mixed(state: DensityMatrix<T>) -> Self {
        QuantumState::Mixed { state, flag: None }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            QuantumState::Pure { state, .. } => state.n_qubits(),
            QuantumState::Mixed { state, .. } => state.n_qubits(),
        }
    }

    /// Position of the flag qubit, if one is attached.
    pub fn flag(&self) -> Option<usize> {
        match self {
            QuantumState::Pure { flag, .. } | QuantumState::Mixed { flag, .. } => *flag,
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix<T>> {
        match self {
            QuantumState::Pure { state, .. } => state.to_density(),
            QuantumState::Mixed { state, .. } => Ok(state.clone()),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        Ok(QuantumState::mixed(self.to_density()?.partial_trace(keep)?))
    }
}

/// Fidelity. Pure/pure is `|⟨a|b⟩|²`, pure/mixed is `⟨a|ρ|a⟩`, mixed/mixed is
/// `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity<T: Real>(a: &QuantumState<T>, b: &QuantumState<T>) -> Result<T> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::size(format!("fidelity between {} and {} qubits", a.n_qubits(), b.n_qubits())));
    }
    let f = match (a, b) {
        (QuantumState::Pure { state: x, .. }, QuantumState::Pure { state: y, .. }) => x.inner(y)?.norm_sqr(),
        (QuantumState::Pure { state: x, .. }, QuantumState::Mixed { state: r, .. })
        | (QuantumState::Mixed { state: r, .. }, QuantumState::Pure { state: x, .. }) => r.expectation(x)?,
        (QuantumState::Mixed { state: r, .. }, QuantumState::Mixed { state: s, .. }) => {
            if let (Some(dr), Some(ds)) = (diagonal_of(r.matrix()), diagonal_of(s.matrix())) {
                // commuting diagonal states: classical fidelity, no square roots of tiny eigenvalues
                let t: T = dr.iter().zip(&ds).map(|(&x, &y)| (x.max(T::zero()) * y.max(T::zero())).sqrt()).sum();
                return Ok((t * t).max(T::zero()).min(T::one()));
            }
            let clamp = |x: T| x.max(T::zero()).sqrt();
            let sr = hermitian_function(r.matrix(), clamp)?;
            let inner = sr.matmul(s.matrix())?.matmul(&sr)?;
            let (values, _) = hermitian_eigen(&inner)?;
            let t: T = values.into_iter().map(clamp).sum();
            t * t
        }
    };
    Ok(f.max(T::zero()).min(T::one()))
}

fn diagonal_of<T: Real>(m: &DenseMatrix<T>) -> Option<Vec<T>> {
    let n = m.rows();
    for r in 0..n {
        if m.row(r).iter().enumerate().any(|(c, z)| c != r && z.norm() > T::lit(1e-13)) {
            return None;
        }
    }
    Some((0..n).map(|i| m[(i, i)].re).collect())
}

fn check_single<T: Real>(u: &DenseMatrix<T>, qubit: usize, m: usize) -> Result<()> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::size("single-qubit gate must be 2x2"));
    }
    if qubit >= m {
        return Err(Error::size(format!("qubit {qubit} out of range for {m} qubits")));
    }
    Ok(())
}

/// Summation by recursive halving, independent of thread scheduling.
pub(crate) fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}
