use thiserror::Error;

use crate::families::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The masked dynamical system left the unit domain by more than the mask tolerance.
    #[error("orbit escaped the attractor at step {step}: no mask cell claims {point:?}")]
    OrbitEscaped { point: Vec<f64>, step: usize },

    /// `index` is 0-based; messages name maps 1-based like symbols.
    #[error("map {} is singular (|det| = {det:e})", .index + 1)]
    SingularMap { index: usize, det: f64 },

    #[error("map {} is not contractive (Lipschitz constant {lipschitz})", .index + 1)]
    NonContractive { index: usize, lipschitz: f64 },

    #[error("map {} sends the unit domain outside itself", .index + 1)]
    MapLeavesDomain { index: usize },

    #[error("contraction factor {0} is not in (0, 1)")]
    ContractionOutOfRange(f64),

    #[error("sample pitch must be positive, got {0}")]
    InvalidPitch(f64),

    #[error("invalid mask: {0}")]
    InvalidMask(String),

    #[error("systems are incompatible: {0}")]
    Incompatible(String),

    #[error("parameter `{name}` = {value} outside {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error(
        "accumulated orbit error {budget:e} after {code_length} steps (expansion {expansion}) exceeds the allowed {max:e}"
    )]
    ErrorBudgetExceeded {
        budget: f64,
        max: f64,
        expansion: f64,
        code_length: usize,
    },

    #[error("IFS failed validation:\n{0}")]
    Validation(Box<ValidationReport>),

    #[error("{0}")]
    Unsupported(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{format} parse error: {message}")]
    Format {
        format: &'static str,
        message: String,
    },

    #[error("face {face}: {message}")]
    BadFace { face: usize, message: String },

    #[error("vertex {index} lies outside the unit cube: {point:?}")]
    VertexOutOfDomain { index: usize, point: [f64; 3] },

    #[error("refinement would exceed the vertex budget of {cap}")]
    VertexBudget { cap: usize },
}

impl Error {
    pub(crate) fn format(format: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            format,
            message: message.into(),
        }
    }
}
