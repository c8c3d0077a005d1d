use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix of dimension {rows} has full column-space rank; no null space")]
    NoNullSpace { rows: usize },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("insufficient antennas for {scheme}: {constraint}")]
    InsufficientAntennas { scheme: String, constraint: String },

    #[error("ZF precoding supports one stream per user, user {user} requests {streams}")]
    UnsupportedStreams { user: usize, streams: usize },

    #[error("rank-deficient matrix: {0}")]
    RankDeficient(String),

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("matrix is not positive definite (eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("trial {index} failed: {source}")]
    Trial {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_trial(self, index: usize) -> Error {
        match self {
            e @ Error::Trial { .. } => e,
            other => Error::Trial {
                index,
                source: Box::new(other),
            },
        }
    }
}
