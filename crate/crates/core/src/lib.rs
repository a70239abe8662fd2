//! Quantum networks built from nilpotent-ancilla circuit elements.
//!
//! Every transformation `U` on a register is realized by a network `Q(U)` of
//! rotators and transitors that, on `psi (x) |0>_A`, produces
//! `psi (x) |0>_A + (U psi) (x) |1>_A`. Sums of transformations compose by
//! concatenation and products by connector chains, which lets whole
//! algorithms (QFT, Grover, Shor, discretized Schrodinger evolution) be
//! assembled from plug-in subnetworks and checked against dense oracles.

pub mod algorithms;
pub mod compiler;
pub mod elements;
pub mod error;
pub mod limits;
pub mod linalg;
pub mod network;
pub mod registers;
pub mod report;
pub mod schrodinger;
pub mod verify;

pub use elements::Element;
pub use error::{QnetError, Result};
pub use linalg::{Amplitude, Operator, Vector};
pub use network::Network;
pub use registers::{AugmentedState, RegisterLayout};
pub use report::{emit_report, Check, Style, VerificationReport};
