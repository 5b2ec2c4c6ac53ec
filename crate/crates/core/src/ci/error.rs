use alloc::string::String;
use core::fmt;

/// Errors raised by the statement algebra and the rule engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CiError {
    /// Two of the three positions of a statement share a symbol.
    OverlappingSets,
    /// One of the two independent sides is empty.
    EmptySide,
    /// The inputs do not fit the pattern of the requested rule.
    ShapeMismatch(&'static str),
    /// A determinism rule was applied without a functional dependency that
    /// licenses it.
    UnlicensedDeterminism,
    /// A label that is not part of the universe.
    UnknownSymbol(String),
    /// A label was declared twice.
    DuplicateSymbol(String),
    /// The universe would exceed [`super::MAX_SYMBOLS`].
    TooManySymbols,
    /// A functional dependency whose determined symbol is among its determiners.
    SelfDetermination(String),
    /// Malformed textual statement.
    Parse(String),
    /// A statement mentions a symbol outside the session universe.
    OutsideUniverse,
    /// Saturation was asked to run with a zero step budget.
    ZeroBudget,
}

impl fmt::Display for CiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CiError::OverlappingSets => f.write_str("statement positions must be pairwise disjoint"),
            CiError::EmptySide => f.write_str("both independent sides must be non-empty"),
            CiError::ShapeMismatch(why) => write!(f, "inputs do not fit the rule: {why}"),
            CiError::UnlicensedDeterminism => {
                f.write_str("no functional dependency licenses this determinism step")
            }
            CiError::UnknownSymbol(s) => write!(f, "unknown symbol `{s}`"),
            CiError::DuplicateSymbol(s) => write!(f, "symbol `{s}` declared twice"),
            CiError::TooManySymbols => {
                write!(f, "a universe holds at most {} symbols", super::MAX_SYMBOLS)
            }
            CiError::SelfDetermination(s) => {
                write!(f, "symbol `{s}` cannot be among its own determiners")
            }
            CiError::Parse(s) => write!(f, "cannot parse statement: {s}"),
            CiError::OutsideUniverse => f.write_str("statement mentions a symbol outside the universe"),
            CiError::ZeroBudget => f.write_str("saturation budget must be positive"),
        }
    }
}

impl core::error::Error for CiError {}
