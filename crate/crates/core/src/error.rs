use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the simulation library.
///
/// Every variant maps to a stable string code (see [`Error::code`]) used by
/// the CLI error JSON and by the C bindings.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation must be at least {min}, got {got}")]
    InvalidTruncation { got: usize, min: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("parameter `{name}` out of range: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("matrix is not Hermitian (max |M - M^H| = {0:e})")]
    NotHermitian(f64),

    #[error("invalid trace {0}")]
    InvalidTrace(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation requires a single-mode state, got {0} modes")]
    NotSingleMode(usize),

    #[error("operation requires a two-mode state, got {0} modes")]
    NotTwoMode(usize),

    #[error("mode index {0} out of range")]
    InvalidModeIndex(usize),

    #[error("target state has zero norm")]
    ZeroNorm,

    #[error("negative population {value:e} at index {index}")]
    NegativePopulation { index: usize, value: f64 },

    #[error("detector never clicks (p_on = {p_on:e}); conditional state undefined")]
    NeverClicks { p_on: f64 },

    #[error("coherent amplitude {amplitude} needs more than {b_trunc} Fock levels (norm loss {norm_loss:e})")]
    InsufficientTruncation {
        amplitude: f64,
        b_trunc: usize,
        norm_loss: f64,
    },

    #[error("comb spacing l* = {l_star} does not exceed scan range n_max = {n_max}")]
    CombAliasing { l_star: f64, n_max: usize },

    #[error("invalid probability {0}")]
    InvalidProbability(f64),

    #[error("configuration requires {0} Kerr media")]
    KerrCount(u8),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidTruncation { .. } => "invalid_truncation",
            Error::NonFinite(_) => "non_finite",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::NotHermitian(_) => "not_hermitian",
            Error::InvalidTrace(_) => "invalid_trace",
            Error::NotPositive(_) => "not_positive",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotSingleMode(_) => "not_single_mode",
            Error::NotTwoMode(_) => "not_two_mode",
            Error::InvalidModeIndex(_) => "invalid_mode_index",
            Error::ZeroNorm => "zero_norm",
            Error::NegativePopulation { .. } => "negative_population",
            Error::NeverClicks { .. } => "never_clicks",
            Error::InsufficientTruncation { .. } => "insufficient_truncation",
            Error::CombAliasing { .. } => "comb_aliasing",
            Error::InvalidProbability(_) => "invalid_probability",
            Error::KerrCount(_) => "kerr_count",
        }
    }
}
