//! Exact small-system quantum-information toolkit: entropy-based
//! correlation measures over arbitrary partitions of multipartite systems,
//! invariance and monotonicity checks under embedded unitary evolution,
//! four-qubit entanglement swapping with its transfer bound, and the
//! two-atom Jaynes-Cummings entanglement-exchange protocol.
//!
//! Everything runs at desk scale (dimensions of a few dozen at most) on a
//! hand-rolled dense complex-matrix core, in nats, with explicit seeds for
//! anything random.

pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod jcm;
pub mod linalg;
pub mod partition;
pub mod random;
pub mod selftest;
pub mod state;
pub mod swap;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SubsystemLayout};
pub use state::QuantumState;
