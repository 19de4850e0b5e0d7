use thiserror::Error;

pub type Result<T> = std::result::Result<T, FlatError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlatError {
    #[error("empty sequence")]
    EmptySequence,

    #[error("invalid symbol {symbol:?} at position {position}")]
    InvalidSymbol { symbol: char, position: usize },

    #[error("invalid sign {value} at position {position}: expected -1 or +1")]
    InvalidSign { value: i64, position: usize },

    #[error("invalid bit {value} at position {position}: expected 0 or 1")]
    InvalidBit { value: i64, position: usize },

    #[error("class violation: {0}")]
    ClassViolation(String),

    #[error("invalid grid size {0}")]
    InvalidGrid(usize),

    #[error("polynomial of degree {degree} cannot be evaluated exactly on a grid of size {grid}")]
    DegreeOverflow { degree: usize, grid: usize },

    #[error("grid of size {grid} aliases a polynomial with {coefficients} coefficients")]
    Aliasing { grid: usize, coefficients: usize },

    #[error("parity error: {0}")]
    Parity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("exponent alpha = {0} must be positive; use the Mahler measure for alpha = 0")]
    NonPositiveExponent(f64),

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("modulus r = {0} must be at least 2")]
    Modulus(usize),

    #[error("lag {lag} out of range for window {window}")]
    Lag { lag: usize, window: usize },

    #[error("window {window} exceeds available length {available}")]
    Window { window: usize, available: usize },

    #[error("Morse factor {index} starts with -1; every factor must satisfy B[0] = +1")]
    MorseCondition { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {requested} exceeds the configured cap {cap}; {hint}")]
    ExceedsCap {
        what: &'static str,
        requested: u64,
        cap: u64,
        hint: &'static str,
    },

    #[error("malformed data: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl FlatError {
    /// True for refusals caused by resource caps rather than invalid input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, FlatError::ExceedsCap { .. })
    }
}

impl From<std::io::Error> for FlatError {
    fn from(err: std::io::Error) -> Self {
        FlatError::Io(err.to_string())
    }
}
