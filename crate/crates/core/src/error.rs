use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("basis mismatch: state has N={state}, hbar={state_hbar}; expected N={expected}, hbar={expected_hbar}")]
    BasisMismatch {
        state: usize,
        state_hbar: f64,
        expected: usize,
        expected_hbar: f64,
    },

    #[error("grid overflow at step {step}: tail probability {tail_mass:.3e} exceeds {limit:.0e}")]
    GridOverflow {
        step: usize,
        tail_mass: f64,
        limit: f64,
    },

    #[error("zero state: norm squared {norm_sqr:.3e} below threshold")]
    ZeroState { norm_sqr: f64 },

    #[error("time {requested} outside trajectory range 0..={t_max}")]
    TimeOutOfRange { requested: usize, t_max: usize },

    #[error("dense oracle supports at most {max} modes, got {got}")]
    OracleTooLarge { got: usize, max: usize },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("non-positive data at index {index}: {value}")]
    NonPositiveData { index: usize, value: f64 },

    #[error("insufficient decay: density spans {decades:.2} decades, need at least 3")]
    InsufficientDecay { decades: f64 },

    #[error("invalid bracket: {0}")]
    InvalidBracket(String),

    #[error("config line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("config key `{key}` ({}): {reason}", origin(*line))]
    ConfigValue {
        key: String,
        line: usize,
        reason: String,
    },

    #[error("unknown config key `{key}` ({})", origin(*line))]
    UnknownKey { key: String, line: usize },

    #[error("missing config key `{0}`")]
    MissingKey(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("table schema mismatch: {0}")]
    Schema(String),
}

fn origin(line: usize) -> String {
    if line == 0 {
        "override".into()
    } else {
        format!("line {line}")
    }
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigSyntax { .. }
            | Error::ConfigValue { .. }
            | Error::UnknownKey { .. }
            | Error::MissingKey(_)
            | Error::InvalidParameter { .. }
            | Error::InvalidBasis(_)
            | Error::InvalidBracket(_) => 2,
            Error::GridOverflow { .. } => 3,
            Error::Io { .. } | Error::Schema(_) => 4,
            _ => 1,
        }
    }

    /// Stable snake-case name used in error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidBasis(_) => "invalid_basis",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::BasisMismatch { .. } => "basis_mismatch",
            Error::GridOverflow { .. } => "grid_overflow",
            Error::ZeroState { .. } => "zero_state",
            Error::TimeOutOfRange { .. } => "time_out_of_range",
            Error::OracleTooLarge { .. } => "oracle_too_large",
            Error::Fit(_) => "fit",
            Error::NonPositiveData { .. } => "non_positive_data",
            Error::InsufficientDecay { .. } => "insufficient_decay",
            Error::InvalidBracket(_) => "invalid_bracket",
            Error::ConfigSyntax { .. } => "config_syntax",
            Error::ConfigValue { .. } => "config_value",
            Error::UnknownKey { .. } => "unknown_key",
            Error::MissingKey(_) => "missing_key",
            Error::Io { .. } => "io",
            Error::Schema(_) => "schema",
        }
    }
}
