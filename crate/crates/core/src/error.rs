use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("hadamard order {0} is not a power of two")]
    NonPowerOfTwo(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:.3e})")]
    SingularMatrix { condition: f64 },

    #[error("code length {code_len} cannot carry {carriers} virtual carriers")]
    CodeTooShort { carriers: usize, code_len: usize },

    #[error("no admissible RA channel after {attempts} attempts at threshold {lambda_db} dB")]
    AdmissionExhausted { lambda_db: f64, attempts: usize },

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("availability probability {p_av:.3e} is too small to condition on")]
    DegenerateThreshold { p_av: f64 },

    #[error("infeasible calibration target: {0}")]
    InfeasibleTarget(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("unknown figure `{0}`")]
    UnknownFigure(String),
}

impl Error {
    /// Stable machine-readable category, used by the CLI on stderr.
    pub fn category(&self) -> &'static str {
        match self {
            Error::NonPowerOfTwo(_) => "non_power_of_two",
            Error::Domain(_) => "domain",
            Error::Dimension(_) => "dimension",
            Error::SingularMatrix { .. } => "singular_matrix",
            Error::CodeTooShort { .. } => "code_too_short",
            Error::AdmissionExhausted { .. } => "admission_exhausted",
            Error::ModelMismatch(_) => "model_mismatch",
            Error::DegenerateThreshold { .. } => "degenerate_threshold",
            Error::InfeasibleTarget(_) => "infeasible_target",
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::UnknownFigure(_) => "unknown_figure",
        }
    }

    /// True for errors caused by user input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Validation(_)
                | Error::UnknownFigure(_)
                | Error::ModelMismatch(_)
        )
    }
}
