//! Bitstring combinatorics, sparse kets and the target states.
//!
//! Qubit `q` of an `n`-qubit register is bit `q` of a basis label. A set bit
//! is the outcome "1" of a Pauli-Z measurement (eigenvalue −1), which we also
//! call an excitation.

mod basis;
mod ket;
mod states;

pub use basis::{binom, BasisState, WeightSector, MAX_QUBITS};
pub(crate) use basis::{extract_bits, full_mask};
pub use ket::{Ket, PRUNE_THRESHOLD};
pub use states::{
    basis_ket, bell_phi_plus, bell_psi_minus, bell_psi_plus, dicke_state, singlet_pair_state,
    w_state,
};
