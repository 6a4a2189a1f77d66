use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unknown dispersion symbol `{0}`")]
    UnknownSymbol(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: &'static str,
    },

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("malformed symbol specification `{0}`")]
    MalformedSpec(String),

    #[error("wavenumber must be positive and finite, got {0}")]
    NonPositiveWavenumber(f64),

    #[error("symbol `{name}` is not finite at k = {k}")]
    NonFinite { name: String, k: f64 },

    #[error("resonance with harmonic n = {n} at k = {k}: denominator {denominator:e} below floor {floor:e}")]
    Resonance {
        n: u32,
        k: f64,
        denominator: f64,
        floor: f64,
    },

    #[error("amplitude |a| = {a} exceeds the small-amplitude bound {bound}")]
    AmplitudeTooLarge { a: f64, bound: f64 },

    #[error("Floquet exponent xi = {xi} outside the admissible range {range}")]
    FloquetExponent { xi: f64, range: &'static str },

    #[error("mode truncation N = {0} is below the minimum of 8")]
    Truncation(usize),

    #[error("eigensolver failed for N = {n_modes}; try a different truncation")]
    Eigensolver { n_modes: usize },

    #[error("closed-form critical wavenumber is inconclusive at T = 1/3")]
    InconclusiveTension,

    #[error("no closed form available for model `{0}`")]
    UnsupportedModel(String),

    #[error("no sign change of either index factor in [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("critical-wavenumber count is not monotone in T: {0}")]
    NotMonotone(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
