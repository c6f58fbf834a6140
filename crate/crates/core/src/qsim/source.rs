use num_complex::Complex;
use rand::Rng;

use super::{DenseMatrix, StateVector, STRUCTURAL_TOL};
use crate::error::{Error, Result};
use crate::scalar::{binary_entropy, Real};

/// A qubit source `ρ = (1-p)|ψ_0⟩⟨ψ_0| + p|ψ_1⟩⟨ψ_1|`.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitSource<T> {
    p: T,
    // columns ψ_0, ψ_1
    eigenvectors: DenseMatrix<T>,
}

impl<T: Real> QubitSource<T> {
    /// `eigenvectors` holds `ψ_0` and `ψ_1` as columns.
    pub fn new(p: T, eigenvectors: DenseMatrix<T>) -> Result<Self> {
        if !(p > T::zero() && p <= T::lit(0.5)) {
            return Err(Error::param(format!("source probability must lie in (0, 1/2], got {p}")));
        }
        if eigenvectors.rows() != 2 || !eigenvectors.is_unitary(T::lit(1e-12)) {
            return Err(Error::validation("eigenvector matrix is not a 2x2 unitary"));
        }
        Ok(QubitSource { p, eigenvectors })
    }

    /// Eigenbasis equal to the computational basis.
    pub fn computational(p: T) -> Result<Self> {
        Self::new(p, DenseMatrix::identity(2))
    }

    /// Eigenbasis drawn from the Haar measure on `U(2)`.
    pub fn random_basis(p: T, rng: &mut impl Rng) -> Result<Self> {
        let psi0 = StateVector::haar_random(1, &[0, 1], rng)?;
        let a = psi0.amplitudes();
        // ψ_1 = (-conj(a_1), conj(a_0)) is orthogonal to ψ_0
        let w = DenseMatrix::from_rows(&[vec![a[0], -a[1].conj()], vec![a[1], a[0].conj()]])?;
        Self::new(p, w)
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn eigenvectors(&self) -> &DenseMatrix<T> {
        &self.eigenvectors
    }

    /// `U_ρ = Σ_k |k⟩⟨ψ_k|`, so that `U_ρ ρ U_ρ† = diag(1-p, p)`.
    pub fn u_rho(&self) -> DenseMatrix<T> {
        self.eigenvectors.adjoint()
    }

    pub fn u_rho_dagger(&self) -> DenseMatrix<T> {
        self.eigenvectors.clone()
    }

    pub fn rho(&self) -> DenseMatrix<T> {
        let d = DenseMatrix::diagonal(&[T::one() - self.p, self.p]);
        self.eigenvectors
            .matmul(&d)
            .and_then(|m| m.matmul(&self.eigenvectors.adjoint()))
            .expect("2x2 shapes")
    }

    /// `S(ρ) = h(p)` in bits.
    pub fn entropy(&self) -> f64 {
        binary_entropy(self.p.to_f64().unwrap_or(f64::NAN))
    }
}

/// Eigendecomposition of a qubit density matrix, `p` the smaller eigenvalue.
///
/// Each eigenvector's first nonzero component is made real positive. A
/// maximally mixed input returns the computational basis.
pub fn diagonalize_qubit<T: Real>(rho: &DenseMatrix<T>) -> Result<QubitSource<T>> {
    let tol = T::lit(STRUCTURAL_TOL);
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::size("qubit density matrix must be 2x2"));
    }
    if !rho.is_hermitian(tol) {
        return Err(Error::validation("density matrix is not Hermitian"));
    }
    let (a, d, b) = (rho[(0, 0)].re, rho[(1, 1)].re, rho[(0, 1)]);
    if (a + d - T::one()).abs() > tol {
        return Err(Error::validation("density matrix trace differs from 1"));
    }
    let half = T::lit(0.5);
    let radius = ((a - d) * (a - d) * T::lit(0.25) + b.norm_sqr()).sqrt();
    let p = half - radius;
    if p < -tol {
        return Err(Error::validation("density matrix has a negative eigenvalue"));
    }
    if radius <= tol {
        return QubitSource::new(half, DenseMatrix::identity(2));
    }
    let hi = half + radius;
    let zero = Complex::new(T::zero(), T::zero());
    let eigvec = |lambda: T| -> [Complex<T>; 2] {
        let v = if b.norm() > tol {
            [b, Complex::new(lambda - a, T::zero())]
        } else if (lambda - a).abs() <= (lambda - d).abs() {
            [Complex::new(T::one(), T::zero()), zero]
        } else {
            [zero, Complex::new(T::one(), T::zero())]
        };
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        let lead = if v[0].norm() > tol { v[0] } else { v[1] };
        let phase = lead.conj() / lead.norm();
        [v[0] * phase / norm, v[1] * phase / norm]
    };
    let (v0, v1) = (eigvec(hi), eigvec(p));
    let w = DenseMatrix::from_rows(&[vec![v0[0], v1[0]], vec![v0[1], v1[1]]])?;
    QubitSource::new(p.max(T::min_positive_value()), w)
}
