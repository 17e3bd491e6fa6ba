use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("table must have at least 2 rows and 2 columns, got {rows}x{cols}")]
    TableTooSmall { rows: usize, cols: usize },

    #[error("row {row} has {found} columns, expected {expected}")]
    NonRectangular {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("cell ({row}, {col}) holds invalid count {value}")]
    InvalidCount { row: usize, col: usize, value: f64 },

    #[error("cluster id must be negative, got {0}")]
    InvalidClusterId(i32),

    #[error("cell ({row}, {col}) is outside a {rows}x{cols} table")]
    CellOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("degenerate marginals: {0}")]
    DegenerateMarginal(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cell statistics are required in imputation mode")]
    MissingStats,

    #[error("dataset has no respondents")]
    NoRespondents,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("at least one replicate is required")]
    NoReplicates,

    #[error("mean of the true values is zero; relative metrics are undefined")]
    ZeroDenominator,

    #[error("singular regression design: {0}")]
    SingularDesign(String),

    #[error("missing covariate `{0}`")]
    MissingCovariate(&'static str),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line tool: 2 for unreadable or
    /// malformed input, 3 for invalid parameters, 4 for data the methods
    /// cannot work with.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TableTooSmall { .. }
            | Error::NonRectangular { .. }
            | Error::InvalidCount { .. }
            | Error::CellOutOfRange { .. }
            | Error::InvalidDataset(_)
            | Error::MissingCovariate(_)
            | Error::Malformed(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_) => 2,
            Error::InvalidClusterId(_)
            | Error::InvalidConfig(_)
            | Error::MissingStats
            | Error::NoReplicates => 3,
            Error::DegenerateMarginal(_)
            | Error::NoRespondents
            | Error::ZeroDenominator
            | Error::SingularDesign(_) => 4,
        }
    }
}
