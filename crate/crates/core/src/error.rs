use thiserror::Error;

/// Errors produced by the counting, oracle and probability routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arithmetic overflow in exact integer computation")]
    Overflow,
    #[error("invalid rule set: {0}")]
    InvalidRules(&'static str),
    #[error("invalid query: {0}")]
    InvalidQuery(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("illegal card value {0}; cards are 1 (ace) through 10")]
    IllegalCard(u32),
    #[error("card sequence continues after the dealer finished at card {consumed}")]
    OverlongSequence { consumed: usize },
    #[error("target minus upcard is {gap}, outside this formula's regime (max {limit}); use {alternative}")]
    WrongRegime {
        gap: i64,
        limit: i64,
        alternative: &'static str,
    },
    #[error("invalid card distribution: {0}")]
    InvalidDistribution(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
