use thiserror::Error;

/// Failure modes shared by the whole library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller supplied malformed or inconsistent data.
    #[error("invalid input: {0}")]
    Input(String),
    /// A null-probability coincidence (parallel planes, simultaneous events, ...).
    /// Callers that drew the offending data at random should redraw.
    #[error("degenerate geometry: {0}; resample")]
    Degeneracy(String),
    /// A domain could not be built from its halfspaces.
    #[error("domain construction failed: {0}")]
    Construction(String),
    /// A Hamiltonian evaluator returned a non-finite value.
    #[error("hamiltonian contract violated: {0}")]
    Hamiltonian(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn degenerate<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Degeneracy(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
