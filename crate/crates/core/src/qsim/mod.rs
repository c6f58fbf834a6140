//! Dense ideal quantum simulation at small register sizes.
//!
//! Qubits are addressed by 0-based position; position 0 is the most
//! significant bit of a basis index, so `|a_1 a_2 … a_m⟩` has index
//! `Σ a_k 2^{m-k}`. Operators that only permute basis states are kept as
//! index tables ([`BooleanIsometry`]) and never densified.

mod linalg;
mod matrix;
mod ops;
mod source;
mod state;

pub use linalg::{hermitian_eigen, hermitian_function};
pub use matrix::DenseMatrix;
pub use ops::{
    apply_instrument, build_vn, cnot, conditional_flip_direct, conditional_flip_unitary, conditional_projector,
    controlled_flip_block, embed_boolean, qubit_permutation, BasisProjector, BooleanIsometry, InstrumentOutcome,
    Projector,
};
pub use source::{diagonalize_qubit, QubitSource};
pub use state::{fidelity, DensityMatrix, QuantumState, StateVector};

use crate::error::{Error, Result};

/// Largest register held as a state vector.
pub const PURE_QUBIT_CAP: usize = 16;
/// Largest register held as a density matrix.
pub const MIXED_QUBIT_CAP: usize = 10;
/// Tolerance for unitarity, normalization and projector checks.
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Tolerance for fidelity assertions.
pub const FIDELITY_TOL: f64 = 1e-9;

pub(crate) fn check_qubits(m: usize, cap: usize) -> Result<()> {
    if m > cap {
        return Err(Error::resource(format!("{m} qubits exceeds the simulation cap of {cap}")));
    }
    Ok(())
}

/// Bit shift of qubit position `q` in an `m`-qubit basis index.
pub(crate) fn shift(q: usize, m: usize) -> usize {
    m - 1 - q
}
