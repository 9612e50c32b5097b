use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid probability vector: {0}")]
    InvalidPmf(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("absolute continuity violated at index {index}: p = {p}, q = 0")]
    AbsoluteContinuityViolated { index: usize, p: f64 },

    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    UnknownSymbol { symbol: usize, alphabet: usize },

    #[error("empty sequence")]
    EmptySequence,

    #[error("malformed channel file: {0}")]
    MalformedChannelFile(String),

    #[error("budget {budget} is below the minimum letter cost {c_min}")]
    BudgetBelowMinCost { budget: f64, c_min: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("codebook of {words} words x length {n} exceeds the bound of {bound} symbols")]
    SizeOverflow { words: u128, n: usize, bound: u128 },

    #[error("output space {states} exceeds the enumeration bound {bound}")]
    StateSpaceTooLarge { states: u128, bound: u128 },

    #[error("message {m} is out of range (message set has {size} elements)")]
    MessageOutOfRange { m: usize, size: usize },

    #[error(
        "single-auxiliary value {single_aux} is not separated from two-auxiliary value {two_aux}"
    )]
    GapNotEstablished { two_aux: f64, single_aux: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
