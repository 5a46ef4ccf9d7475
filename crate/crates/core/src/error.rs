use std::fmt;

use thiserror::Error;

/// Broad class of a failure, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numeric,
}

/// Pipeline stage that produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Difference,
    Periodogram,
    Eigen,
    Subspace,
    Memory,
    Identification,
    Test,
    Simulation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Ingest => "ingest",
            Stage::Difference => "difference",
            Stage::Periodogram => "periodogram",
            Stage::Eigen => "eigen",
            Stage::Subspace => "subspace",
            Stage::Memory => "memory",
            Stage::Identification => "identification",
            Stage::Test => "test",
            Stage::Simulation => "simulation",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("frequency index {j} outside admissible range [1, {max}]")]
    FrequencyOutOfRange { j: usize, max: usize },

    #[error("averaged periodogram bandwidth m = {m} must exceed q + 3 = {bound}")]
    BandwidthTooSmall { m: usize, bound: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix columns are not orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("matrix is rank deficient (smallest singular value {smallest:e} below floor {floor:e})")]
    RankDeficient { smallest: f64, floor: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("degenerate residual series: all periodogram ordinates are zero")]
    DegenerateResidual,

    #[error("empty input")]
    EmptyInput,

    #[error("ragged row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-numeric cell at row {row}, column {col}: {cell:?}")]
    NonNumeric { row: usize, col: usize, cell: String },

    #[error("{0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("{stage} stage: {source}")]
    AtStage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub fn at(self, stage: Stage) -> Self {
        match self {
            e @ Error::AtStage { .. } => e,
            e => Error::AtStage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The stage recorded on this error, if any.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::AtStage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidConfig(_) | Error::InvalidArgument { .. } | Error::BandwidthTooSmall { .. } => {
                ErrorKind::Config
            }
            Error::DimensionMismatch(_)
            | Error::NonFinite { .. }
            | Error::EmptyInput
            | Error::RaggedRow { .. }
            | Error::NonNumeric { .. }
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Unsupported(_)
            | Error::FrequencyOutOfRange { .. } => ErrorKind::Data,
            Error::NotSymmetric { .. }
            | Error::NotOrthonormal { .. }
            | Error::RankDeficient { .. }
            | Error::NoConvergence { .. }
            | Error::DegenerateResidual => ErrorKind::Numeric,
            Error::AtStage { source, .. } => source.kind(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Extension for tagging results with the stage they came from.
pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
