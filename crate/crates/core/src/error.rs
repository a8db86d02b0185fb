use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures reported by the solvers.
///
/// Variants split into input-validation problems and numerical failures; see
/// [`Error::is_numerical`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bond {bond}: {reason}")]
    InvalidBond { bond: usize, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bond index {index} out of range 1..={n_bonds}")]
    IndexOutOfRange { index: usize, n_bonds: usize },

    #[error("bond {bond} is evanescent at k = {k} (k^2 <= V(0) = {v0})")]
    Evanescent { bond: usize, k: f64, v0: f64 },

    #[error("branch point: |E - V| = {gap:e} is within the guard")]
    BranchPoint { gap: f64 },

    #[error("vertex assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("pole of the secular function at k = {k} (sin(k L_{bond}) ~ 0)")]
    Pole { k: f64, bond: usize },

    #[error("unsupported graph: {0}")]
    Unsupported(String),

    #[error("degenerate root at {value}: {reason}")]
    DegenerateRoot { value: f64, reason: String },

    #[error("degenerate null space: singular values {0:e} and {1:e} are not separated")]
    DegenerateNullspace(f64, f64),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("failed to converge: {0}")]
    NonConvergence(String),

    #[error("graph file: {0}")]
    GraphFile(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence(_)
                | Error::SingularSystem(_)
                | Error::DegenerateNullspace(..)
                | Error::DegenerateRoot { .. }
        )
    }
}
