//! Lossless compression of i.i.d. qubit sources with embedded polar codes.
//!
//! Alice diagonalizes the source, projects onto the span of the error patterns
//! that polar successive-cancellation syndrome decoding corrects, maps the state
//! through the polar transform and sends the frozen qubits. Bob recovers the
//! block with a lifted SC decoder whose classical messages are conditioned on
//! the frozen qubits.
//!
//! The classical algebra is generic over [`scalar::Probability`] (`f32`, `f64`,
//! exact [`num_rational::BigRational`]); the simulator over [`scalar::Real`].

pub mod bits;
pub mod error;
pub mod harness;
pub mod messages;
pub mod oracle;
pub mod polar;
pub mod protocol;
pub mod qsim;
pub mod rng;
pub mod scalar;
pub mod schumacher;

pub use bits::BitVector;
pub use error::{Error, Result};
pub use messages::{bnop, cnop, ConditionalMessage, HardDecisionMessage};
pub use polar::{
    compress, design_frozen_set, enumerate_correctable_set, monte_carlo_failure_rate, polar_transform,
    sc_syndrome_decode, success_probability_exact, CorrectableSet, PolarCodeSpec,
};
pub use protocol::{run_protocol, ExecutionMode, ProjectionMethod, Protocol, ProtocolConfig, ProtocolOutcome};
pub use qsim::{BooleanIsometry, DenseMatrix, DensityMatrix, QuantumState, QubitSource, StateVector};
pub use scalar::{Probability, Real};

/// Exact rational probabilities.
pub type Exact = num_rational::BigRational;

pub type Message = ConditionalMessage<f64>;
pub type Message32 = ConditionalMessage<f32>;
pub type ExactMessage = ConditionalMessage<Exact>;

pub type Matrix = DenseMatrix<f64>;
pub type State = StateVector<f64>;
pub type Density = DensityMatrix<f64>;
pub type Source = QubitSource<f64>;
