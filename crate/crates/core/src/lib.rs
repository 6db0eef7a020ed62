//! Simulation and verification of teleportation-based nonlocal CNOT gates.
//!
//! Two families of protocols are built and executed on a dense statevector:
//!
//! * teleport-there-and-back gates, where Bell measurements and their Pauli
//!   corrections happen in the middle of the protocol
//!   ([`protocols::build_measure_in_middle`], [`protocols::build_generic_nonlocal`]);
//! * post-measurement gates, where every Bell measurement is postponed until
//!   all unitaries have run and the corrections are read off a lookup table
//!   ([`protocols::build_post_measurement_2q`], [`protocols::build_post_measurement_3q`]).
//!
//! Correction tables are derived two independent ways in [`synth`] (exact
//! Pauli conjugation and a brute-force statevector search) and compared with
//! the printed reference tables. [`verify`] sweeps every measurement branch
//! against direct application of the gate.

pub mod cli;
pub mod error;
pub mod network;
pub mod pauli;
pub mod protocols;
pub mod statevec;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
pub use network::{CnotNetwork, Role};
pub use pauli::{Pauli, PauliOp, Phase};
pub use protocols::{BranchAssignment, BranchChoice, ProtocolSpec, Scheme, Site};
pub use statevec::{Amplitudes, BellOutcome, Gate, GateKind, QubitLabel, StateVector};
pub use synth::{CorrectionTable, TableDiff};
pub use verify::VerificationReport;
