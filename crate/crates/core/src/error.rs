use thiserror::Error;

/// Errors raised by the compiler, simulator and optimizer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PwaError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (max |H - H^dag| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rotation form requires r < 1; r = {r} needs the phase-shift path")]
    PhaseGateRequired { r: f64 },

    #[error("no free-integer lift places section {section} inside the parameter bounds")]
    BoundsInfeasible { section: usize },

    #[error("diophantine precision {requested:.3e} unreachable, best {achieved:.3e} at q = {q}")]
    PrecisionUnreachable { requested: f64, achieved: f64, q: i64 },

    #[error("gap compensation infeasible: beta' = {beta:.6e}, C' = {coupling:.6e}, L' = {length:.6e}")]
    GapInfeasible { beta: f64, coupling: f64, length: f64 },

    #[error("plan error: {0}")]
    Plan(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, PwaError>;

impl From<std::io::Error> for PwaError {
    fn from(e: std::io::Error) -> Self {
        PwaError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for PwaError {
    fn from(e: serde_json::Error) -> Self {
        PwaError::Input(format!("json: {e}"))
    }
}

impl PwaError {
    /// Short machine-readable tag, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            PwaError::Input(_) => "input",
            PwaError::NotUnitary { .. } => "not_unitary",
            PwaError::NotHermitian { .. } => "not_hermitian",
            PwaError::DimensionMismatch { .. } => "dimension_mismatch",
            PwaError::PhaseGateRequired { .. } => "phase_gate_required",
            PwaError::BoundsInfeasible { .. } => "bounds_infeasible",
            PwaError::PrecisionUnreachable { .. } => "precision_unreachable",
            PwaError::GapInfeasible { .. } => "gap_infeasible",
            PwaError::Plan(_) => "plan",
            PwaError::Internal(_) => "internal",
            PwaError::Io(_) => "io",
        }
    }
}
