use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet size {0} is outside the supported range 2..=256")]
    InvalidAlphabet(u32),

    #[error("symbol {symbol} is not in the alphabet of size {q}")]
    SymbolOutOfRange { symbol: u32, q: u32 },

    #[error("word is empty")]
    EmptyWord,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("alphabet mismatch: q={left} vs q={right}")]
    AlphabetMismatch { left: u32, right: u32 },

    #[error("gram length {ell} exceeds word length {len}")]
    GramTooLong { ell: usize, len: usize },

    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("bound not applicable: {0}")]
    NotApplicable(String),

    #[error("{what} needs {needed}, over the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        budget: String,
    },

    #[error("word is not a codeword: {0}")]
    NotInCode(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("Fail: {0}")]
    AssemblyFail(#[from] crate::assembly::Failure),
}
