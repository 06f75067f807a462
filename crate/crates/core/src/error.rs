use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("scattering length infinite: tail exponent {exponent} must exceed 3")]
    InfiniteScatteringLength { exponent: f64 },

    #[error("negative or undefined scattering regime: {0}")]
    UnboundScattering(String),

    #[error("scattering bracket width {width:e} exceeds tolerance {tolerance:e}; increase r_max to at least {suggested_r_max}")]
    BracketTooWide {
        width: f64,
        tolerance: f64,
        suggested_r_max: f64,
    },

    #[error("wave field is not normalised: norm {actual} but expected {expected}")]
    NotNormalized { actual: f64, expected: f64 },

    #[error("minimisation did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("trap potential is not homogeneous")]
    NotHomogeneous,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("cell {cell:?} has vanishing minimum density")]
    ZeroDensityCell { cell: [usize; 3] },

    #[error("config error: {0}")]
    Config(String),

    #[error("table {path}: {message}")]
    Table { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
