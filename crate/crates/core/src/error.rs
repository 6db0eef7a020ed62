use thiserror::Error;

use crate::statevec::QubitLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit label {0} is already present")]
    DuplicateLabel(QubitLabel),
    #[error("qubit label {0} is not present in the state")]
    UnknownLabel(QubitLabel),
    #[error("amplitude pair for {0} has (near) zero norm")]
    NonNormalizable(QubitLabel),
    #[error("amplitude pair for {label} has squared norm {norm_sqr}, which is not within 1e-9 of 1")]
    NotNormalized { label: QubitLabel, norm_sqr: f64 },
    #[error("label sets differ: {0}")]
    LabelMismatch(String),
    #[error("gate {0} is malformed")]
    BadGate(String),
    #[error("qubit {0} is still entangled or not in |0>, cannot discard")]
    NotDisentangled(QubitLabel),
    #[error("role {0} is not available for this protocol")]
    BadRole(String),
    #[error("protocol would need {0} simultaneous qubits (limit 20)")]
    ArityTooLarge(usize),
    #[error("branch {0} has zero probability")]
    ImpossibleBranch(String),
    #[error("branch assignment does not match the protocol's measurement sites: {0}")]
    BranchMismatch(String),
    #[error("malformed protocol: {0}")]
    MalformedSpec(String),
    #[error("unsupported protocol for this operation: {0}")]
    UnsupportedSpec(String),
    #[error("no unique Pauli correction for branch {branch}: {candidates} candidates fit")]
    NoUniqueCorrection { branch: String, candidates: usize },
    #[error("corrections do not factor over measurement sites at branch {0}")]
    InconsistentCorrections(String),
    #[error("measurement sites differ: {0}")]
    SiteMismatch(String),
    #[error("protocol has {0} measurement sites (limit 6)")]
    TooManySites(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
