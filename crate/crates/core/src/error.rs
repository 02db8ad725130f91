use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix must have dimension at least 1")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian at entry ({row}, {col}) (deviation {deviation:e})")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("time {t} outside the domain [{start}, {end}]")]
    OutsideDomain { t: f64, start: f64, end: f64 },

    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("section has {0} points, at least 3 are required")]
    TooFewPoints(usize),

    #[error("expectation value of the zero state")]
    ZeroState,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("convergence study: {0}")]
    Convergence(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// The innermost error, with stage annotations stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True when the failure is numerical (a unitarity breach) rather than a
    /// validation problem with the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self.root(), Error::NotUnitary { .. })
    }
}
