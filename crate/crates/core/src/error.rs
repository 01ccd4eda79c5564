use thiserror::Error;

/// Errors produced anywhere in the optimization stack.
#[derive(Debug, Error)]
pub enum GsaError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("force overflow; increase epsilon")]
    ForceOverflow,

    #[error("objective returned non-finite value {value} at {position:?}")]
    NonFiniteFitness { value: f64, position: Vec<f64> },

    #[error("dynamics diverged; increase epsilon or reduce g0")]
    Diverged,

    #[error("run failed for kernel={kernel} objective={objective} seed={seed}: {source}")]
    RunFailed {
        kernel: String,
        objective: String,
        seed: u64,
        #[source]
        source: Box<GsaError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl GsaError {
    /// True for failures of the numerical dynamics, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            GsaError::ForceOverflow | GsaError::NonFiniteFitness { .. } | GsaError::Diverged => {
                true
            }
            GsaError::RunFailed { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T, E = GsaError> = std::result::Result<T, E>;
