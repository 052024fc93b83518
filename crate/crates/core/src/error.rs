use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum IsingError {
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected} nodes, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error(
        "capacity exceeded: {nodes} nodes is over the enumeration limit of {limit}; \
         use the symmetry-reduced routines instead"
    )]
    Capacity { nodes: usize, limit: usize },

    #[error("invalid widget: {0}")]
    Construction(String),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("model class error: {0}")]
    ModelClass(String),

    #[error("autocorrelation estimate inconclusive after {steps} steps (partial lag {partial_lag})")]
    Inconclusive { steps: usize, partial_lag: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<IsingError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl IsingError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        IsingError::Parameter(msg.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            IsingError::Capacity { .. } => 2,
            IsingError::Trial { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, IsingError>;
