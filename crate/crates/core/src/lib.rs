//! Simulator and verification suite for the minimal two-qubit quantum
//! energy teleportation protocol: a transverse-field Ising pair whose
//! ground state carries exactly zero local energy, a projective
//! measurement on side A that injects energy, and a conditioned
//! rotation on side B that extracts part of it using only the
//! classically communicated outcome.
//!
//! Basis convention used everywhere: subsystem A is the left Kronecker
//! factor, the product basis is ordered |++>, |+->, |-+>, |-->, and
//! sigma_z = diag(+1, -1) with the +1 eigenvector listed first.
//! Energies are in units with hbar = 1; times are inverse energies.

pub mod analysis;
pub mod cli;
pub mod linalg;
pub mod model;
pub mod protocol;
pub mod report;
pub mod tolerances;

/// Failure taxonomy: rejected inputs versus degraded numerics.
/// The CLI maps these onto exit codes 1 and 2 respectively.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 1,
            Error::Numeric(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
