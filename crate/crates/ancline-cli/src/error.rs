use thiserror::Error;

/// CLI-level errors; each maps to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ancline::Error),

    #[error("unknown figure '{0}' (expected anc-dist, partial-fluxes, mut-rates, or mut-fluxes)")]
    UnknownFigure(String),

    #[error("invalid override: {0}")]
    InvalidOverride(String),

    #[error("target b1 = {target} unreachable: b1 ranges over ({lo:e}, {hi:e}] for s in [0, inf)")]
    TargetUnreachable { target: f64, lo: f64, hi: f64 },

    #[error(
        "total rate {total_rate:e} leaves a negative within-class rate; needs more than {required:e}"
    )]
    NegativeNeutralRate { total_rate: f64, required: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 = invalid input, 2 = numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(ancline::Error::InvalidParameter(_)) => 1,
            CliError::Core(_) => 2,
            CliError::UnknownFigure(_)
            | CliError::InvalidOverride(_)
            | CliError::TargetUnreachable { .. }
            | CliError::NegativeNeutralRate { .. }
            | CliError::Config(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
