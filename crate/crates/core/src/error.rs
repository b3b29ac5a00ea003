use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid fraction {num}/{den}")]
    InvalidFraction { num: i64, den: i64 },

    #[error("invariant factors {0:?} are not a divisibility chain of integers >= 2")]
    NonCanonicalFactors(Vec<u64>),

    #[error("element has {got} coordinates, group has rank {expected}")]
    ElementRank { got: usize, expected: usize },

    #[error("generator image {index} has order not dividing {factor}")]
    InvalidHom { index: usize, factor: u64 },

    #[error("mismatched groups: {0}")]
    GroupMismatch(String),

    #[error("enumeration too large: {candidates} candidates exceed budget {limit}")]
    EnumerationTooLarge { candidates: u128, limit: u64 },

    #[error("budget exceeded: computation needs {needed} entries, limit is {limit}")]
    BudgetExceeded { needed: u128, limit: u64 },

    #[error("element is not a fermion candidate: {0}")]
    InvalidFermion(String),

    #[error("not a short exact sequence: {0}")]
    InvalidSequence(String),

    #[error("coefficient map is not equivariant: {0}")]
    InvalidMap(String),

    #[error("mu does not satisfy its coherence precondition: {0}")]
    InvalidMu(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("action data is not f-normalized: mu(g; f, f) = {0} for some g")]
    NormalizationRequired(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error in {file} near {key}: {message}")]
    Parse {
        file: String,
        key: String,
        message: String,
    },
}
