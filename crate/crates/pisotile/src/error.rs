//! Error type shared by all modules.

use std::fmt;

/// Everything that can go wrong when validating inputs or running a query.
///
/// Each variant has a stable short code (see [`Error::code`]) so that
/// command-line consumers can match on `ERR <code>: <detail>` lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The polynomial X^2 - aX - b has no dominant root > 1 with conjugate
    /// of modulus < 1.
    NotPisot { a: i64, b: i64 },
    /// X^2 - aX - b factors over the rationals (a^2 + 4b is a perfect square).
    Reducible { a: i64, b: i64 },
    /// b = 0, so the polynomial degenerates to X(X - a).
    DegreeOne,
    /// Coefficients outside the supported magnitude window (|a|, |b| <= 2^20).
    CoefficientTooLarge,
    /// Two elements of different quadratic fields were combined.
    ContextMismatch,
    /// Argument outside the required interval, e.g. T_beta needs [0, 1).
    OutOfRange { what: &'static str },
    /// Expansion requested for a negative number.
    NegativeInput,
    /// A digit exceeds the alphabet maximum of the context.
    DigitOutOfRange { digit: i64, max: i64 },
    /// The hypotheses for integer-lattice boundary enumeration fail:
    /// some prime above beta is not split with e = f = 1.
    HypothesesFail { prime: u64 },
    /// A graph node without outgoing edges was fed to an attractor query.
    DeadEndNode { node: usize },
    /// An interval query with lo > hi.
    BadInterval,
    /// The requested prime does not split with e = f = 1.
    NonSplitPrime { prime: u64 },
    /// The requested prime does not divide N(beta).
    NotDividingNorm { prime: u64 },
    /// A denominator is not invertible modulo p^k.
    DenominatorNotInvertible { prime: u64 },
    /// Orbit iteration exceeded the configured cap without cycling.
    IterationCap { cap: usize },
    /// Division by zero in the quadratic field.
    DivisionByZero,
    /// Malformed textual input (rational, digit word, or graph JSON).
    Parse(String),
    /// Underlying I/O failure.
    Io(String),
}

impl Error {
    /// Stable machine-readable code for CLI/stderr reporting.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPisot { .. } => "NotPisot",
            Error::Reducible { .. } => "Reducible",
            Error::DegreeOne => "DegreeOne",
            Error::CoefficientTooLarge => "CoefficientTooLarge",
            Error::ContextMismatch => "ContextMismatch",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::NegativeInput => "NegativeInput",
            Error::DigitOutOfRange { .. } => "DigitOutOfRange",
            Error::HypothesesFail { .. } => "HypothesesFail",
            Error::DeadEndNode { .. } => "DeadEndNode",
            Error::BadInterval => "BadInterval",
            Error::NonSplitPrime { .. } => "NonSplitPrime",
            Error::NotDividingNorm { .. } => "NotDividingNorm",
            Error::DenominatorNotInvertible { .. } => "DenominatorNotInvertible",
            Error::IterationCap { .. } => "IterationCap",
            Error::DivisionByZero => "DivisionByZero",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPisot { a, b } => {
                write!(f, "X^2 - {a}X - {b} is not the minimal polynomial of a Pisot number")
            }
            Error::Reducible { a, b } => {
                write!(f, "X^2 - {a}X - {b} is reducible over the rationals")
            }
            Error::DegreeOne => write!(f, "b = 0 gives a degree-one (rational) root"),
            Error::CoefficientTooLarge => {
                write!(f, "coefficients must satisfy |a|, |b| <= 2^20")
            }
            Error::ContextMismatch => write!(f, "elements belong to different quadratic fields"),
            Error::OutOfRange { what } => write!(f, "argument out of range: {what}"),
            Error::NegativeInput => write!(f, "expansion requires a non-negative input"),
            Error::DigitOutOfRange { digit, max } => {
                write!(f, "digit {digit} exceeds alphabet maximum {max}")
            }
            Error::HypothesesFail { prime } => {
                write!(f, "prime {prime} above beta is not split with e = f = 1")
            }
            Error::DeadEndNode { node } => write!(f, "node {node} has no outgoing edges"),
            Error::BadInterval => write!(f, "interval lower bound exceeds upper bound"),
            Error::NonSplitPrime { prime } => {
                write!(f, "prime {prime} does not split with e = f = 1")
            }
            Error::NotDividingNorm { prime } => {
                write!(f, "prime {prime} does not divide N(beta)")
            }
            Error::DenominatorNotInvertible { prime } => {
                write!(f, "denominator is divisible by {prime}")
            }
            Error::IterationCap { cap } => {
                write!(f, "orbit did not cycle within {cap} iterations")
            }
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
