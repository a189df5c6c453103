//! Error types shared across the crate.

use alloc::string::String;
use core::fmt;
use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure while parsing an expression string.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    /// Byte offset into the input at which the problem was detected.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnexpectedChar(char),
    UnexpectedEnd,
    UnexpectedToken(String),
    UnknownIdentifier(String),
    NonConstantExponent,
    TrailingInput,
    InvalidNumber,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::EmptyInput => write!(f, "empty input"),
            ParseErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character `{c}` at offset {}", self.offset)
            }
            ParseErrorKind::UnexpectedEnd => {
                write!(f, "unexpected end of input at offset {}", self.offset)
            }
            ParseErrorKind::UnexpectedToken(t) => {
                write!(f, "unexpected token `{t}` at offset {}", self.offset)
            }
            ParseErrorKind::UnknownIdentifier(name) => {
                write!(f, "unknown identifier `{name}` at offset {}", self.offset)
            }
            ParseErrorKind::NonConstantExponent => write!(
                f,
                "exponent at offset {} must be an integer or complex literal",
                self.offset
            ),
            ParseErrorKind::TrailingInput => {
                write!(f, "trailing input at offset {}", self.offset)
            }
            ParseErrorKind::InvalidNumber => {
                write!(f, "invalid numeric literal at offset {}", self.offset)
            }
        }
    }
}

/// Failure while evaluating an expression at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalError {
    /// The point at which evaluation failed.
    pub at: Complex64,
    pub kind: EvalErrorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    /// Division by zero.
    Pole,
    /// `log` (or a non-integer power) of zero.
    BranchPoint,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EvalErrorKind::Pole => write!(f, "pole at z = {}", self.at),
            EvalErrorKind::BranchPoint => write!(f, "branch point at z = {}", self.at),
        }
    }
}

/// Any failure reported by the toolkit.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Parse(ParseError),
    Eval(EvalError),
    /// A part that must be analytic contains a `conj` node.
    NotAnalytic { part: &'static str },
    /// `h'` is identically zero, so the dilatation is undefined.
    DegenerateMap,
    /// `|ω(z)| ≥ 1` (or within the exclusion band of 1) at a sampled point.
    Orientation { at: Complex64, omega_abs: f64 },
    /// A scalar parameter is outside its admissible range.
    Parameter { name: &'static str, value: Complex64 },
    /// `φ'` vanishes at an evaluation point.
    CriticalPoint { at: Complex64 },
    /// Two distinct boundary samples with `h(a) = h(b)`.
    NonUnivalent { a: Complex64, b: Complex64 },
    /// A weight kind that needs a map context was built without one.
    MissingMapContext { kind: &'static str },
    /// A user-supplied weight failed an admissibility condition (1, 2 or 3).
    Inadmissible { condition: u8, witness: Complex64 },
    /// The criterion requires a σ- or v-weight and none was supplied.
    MissingWeight { criterion: &'static str },
    /// The right-hand normalizer of a criterion vanished at a point.
    DegenerateNormalizer { at: Complex64 },
    /// The criterion applies to the other subject kind (analytic vs harmonic).
    WrongSubject { criterion: &'static str, needs: &'static str },
    /// Extensions are two-sided; points of `∂△` go through `boundary_trace`.
    BoundaryPoint { at: Complex64 },
    /// Evaluation outside the supported annulus `|z| ≤ r_max`.
    OutOfRange { at: Complex64, r_max: f64 },
    /// `|F_z|` too small for a meaningful Beltrami quotient.
    DegenerateDerivative { at: Complex64 },
    /// The ρ-bound denominator is not positive for these parameters.
    BoundInapplicable { denominator: f64 },
    /// K-formula parameters violate the hypotheses of the owning theorem.
    HypothesesViolated { what: &'static str },
    /// Malformed grid or sampling request.
    InvalidArgument { what: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(e) => write!(f, "parse error: {e}"),
            Error::Eval(e) => write!(f, "evaluation error: {e}"),
            Error::NotAnalytic { part } => {
                write!(f, "{part} must be analytic (no conj)")
            }
            Error::DegenerateMap => write!(f, "h' is identically zero"),
            Error::Orientation { at, omega_abs } => {
                write!(f, "|omega| = {omega_abs} at z = {at}: map is not sense-preserving there")
            }
            Error::Parameter { name, value } => {
                write!(f, "parameter {name} = {value} out of range")
            }
            Error::CriticalPoint { at } => write!(f, "phi' vanishes at z = {at}"),
            Error::NonUnivalent { a, b } => {
                write!(f, "h({a}) = h({b}) for distinct boundary samples")
            }
            Error::MissingMapContext { kind } => {
                write!(f, "weight kind `{kind}` needs a map context")
            }
            Error::Inadmissible { condition, witness } => {
                write!(f, "weight fails admissibility condition ({condition}) at z = {witness}")
            }
            Error::MissingWeight { criterion } => {
                write!(f, "criterion `{criterion}` needs a weight")
            }
            Error::DegenerateNormalizer { at } => {
                write!(f, "criterion normalizer vanishes at z = {at}")
            }
            Error::WrongSubject { criterion, needs } => {
                write!(f, "criterion `{criterion}` applies to {needs} subjects")
            }
            Error::BoundaryPoint { at } => {
                write!(f, "z = {at} lies on the unit circle; use boundary_trace")
            }
            Error::OutOfRange { at, r_max } => {
                write!(f, "z = {at} outside evaluation annulus |z| <= {r_max}")
            }
            Error::DegenerateDerivative { at } => {
                write!(f, "|F_z| below threshold at z = {at}")
            }
            Error::BoundInapplicable { denominator } => {
                write!(f, "rho-bound denominator {denominator} is not positive")
            }
            Error::HypothesesViolated { what } => write!(f, "hypotheses violated: {what}"),
            Error::InvalidArgument { what } => write!(f, "invalid argument: {what}"),
        }
    }
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

impl From<EvalError> for Error {
    fn from(e: EvalError) -> Self {
        Error::Eval(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseError {}
#[cfg(feature = "std")]
impl std::error::Error for EvalError {}
#[cfg(feature = "std")]
impl std::error::Error for Error {}
