//! Statevector simulation and training of entanglement-variational
//! hardware-efficient ansatzes (EHA) and the circuits they are compared with.
//!
//! Conventions used throughout:
//! - qubit 0 is the most significant bit of a basis index;
//! - Pauli rotations are `exp(-i theta/2 P)`;
//! - entropies are in bits unless a different base is requested.

pub mod analysis;
pub mod ansatz;
pub mod dense;
pub mod error;
pub mod experiment;
pub mod hamiltonians;
pub mod optimize;
pub mod pauli;
pub mod statevec;

pub use error::{Error, Result};
pub use pauli::{PauliString, PauliSum};
pub use statevec::{GateKind, PauliLetter, ReferenceState, Statevector};
