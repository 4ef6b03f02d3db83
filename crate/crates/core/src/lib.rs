//! Information-flux analysis of multi-qubit dynamics.
//!
//! The flux `I^{ΣΣ'}_i(t)` measures how the input qubit's Pauli operator `σ_Σ'`
//! enters the Heisenberg-evolved operator `σ_Σ` of qubit `i`, once the rest of
//! the register is fixed to a known initial state. This crate computes it for
//!
//! * Clifford circuits, exactly, by Pauli-string conjugation ([`clifford`]);
//! * arbitrary small spin Hamiltonians, by four-probe tomography on dense
//!   state vectors ([`dense`]);
//! * long open XY chains in the single-excitation sector ([`transfer`]);
//! * Markovian open dynamics ([`open`]).
//!
//! Qubits are 0-indexed everywhere; qubit 0 is the most significant bit of a
//! basis-state index.

pub mod clifford;
pub mod config;
pub mod dense;
pub mod error;
pub mod flux;
pub mod open;
pub mod optimize;
mod par;
pub mod pauli;
pub mod run;
pub mod state;
pub mod table;
pub mod transfer;

pub use error::{FluxError, Result};
pub use flux::{cloning_fidelity, FluxMatrix, TimeLabel};
pub use pauli::{Pauli, PauliObservable, PauliString, Phase};
pub use state::{BlochVector, RegisterState};
