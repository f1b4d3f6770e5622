use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Failures raised by the algebraic routines.
///
/// Mathematical failures (a branched input, a limit situation, an unsupported
/// residual factorization) are distinguished from malformed input so that a
/// front end can map them to different exit statuses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    MixedRank,
    UnrepresentableCut(String),
    NegativeValue,
    UnsupportedFactorization(String),
    NonMonic,
    NotIntegral,
    NotKeyPolynomial(String),
    NonIncreasingValue,
    TerminalValuation,
    NotInUnitGroup(String),
    DegreeTooLarge,
    PreconditionViolated(String),
    Branched(Vec<String>),
    Reducible(String),
    LimitSituation { refinements: usize },
    ValueNotGenerating,
    ResidueNotGenerating,
    PrecisionExhausted { t_precision: usize, p_precision: usize },
    NoRoot,
    BudgetExhausted,
    Parse(String),
    InvalidInput(String),
}

impl Error {
    /// True for failures that are properties of the mathematical input rather
    /// than of its encoding.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedFactorization(_)
                | Error::Branched(_)
                | Error::Reducible(_)
                | Error::LimitSituation { .. }
                | Error::NotKeyPolynomial(_)
                | Error::NonIncreasingValue
                | Error::TerminalValuation
                | Error::NotInUnitGroup(_)
                | Error::ValueNotGenerating
                | Error::ResidueNotGenerating
                | Error::NoRoot
                | Error::BudgetExhausted
                | Error::UnrepresentableCut(_)
                | Error::PreconditionViolated(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MixedRank => write!(f, "values of different group rank"),
            Error::UnrepresentableCut(s) => write!(f, "cut not representable: {s}"),
            Error::NegativeValue => write!(f, "element has negative value"),
            Error::UnsupportedFactorization(s) => write!(f, "unsupported factorization: {s}"),
            Error::NonMonic => write!(f, "polynomial is not monic"),
            Error::NotIntegral => write!(f, "coefficients are not in the valuation ring"),
            Error::NotKeyPolynomial(s) => write!(f, "not a key polynomial: {s}"),
            Error::NonIncreasingValue => write!(f, "augmentation value does not increase"),
            Error::TerminalValuation => write!(f, "valuation has nontrivial support"),
            Error::NotInUnitGroup(s) => write!(f, "value {s} is not a grade of a homogeneous unit"),
            Error::DegreeTooLarge => write!(f, "degree too large for a unit"),
            Error::PreconditionViolated(s) => write!(f, "precondition violated: {s}"),
            Error::Branched(fs) => write!(f, "input is branched; residual factors: {}", fs.join(", ")),
            Error::Reducible(s) => write!(f, "input is reducible: {s}"),
            Error::LimitSituation { refinements } => write!(
                f,
                "limit situation: {refinements} refinements without degree growth"
            ),
            Error::ValueNotGenerating => write!(f, "value does not generate vL/vK"),
            Error::ResidueNotGenerating => write!(f, "residue does not generate Lv/Kv"),
            Error::PrecisionExhausted { t_precision, p_precision } => write!(
                f,
                "precision exhausted at t-precision {t_precision}, p-precision {p_precision}; raise both"
            ),
            Error::NoRoot => write!(f, "no root exists"),
            Error::BudgetExhausted => write!(f, "search budget exhausted"),
            Error::Parse(s) => write!(f, "parse error: {s}"),
            Error::InvalidInput(s) => write!(f, "invalid input: {s}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
