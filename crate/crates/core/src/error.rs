use thiserror::Error;

use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("generator index {index} out of range for {count} generators")]
    GeneratorOutOfRange { index: u32, count: usize },
    #[error("permutations act on different domains")]
    DegreeMismatch,
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("a presentation needs at least one generator")]
    NoGenerators,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("images do not form a bijection on 0..{0}")]
    NotBijection(usize),
    #[error("point {point} outside domain of size {degree}")]
    PointOutOfDomain { point: u32, degree: usize },
    #[error("domain of {0} points exceeds the supported capacity")]
    Capacity(usize),
    #[error("permutations act on different domains")]
    DegreeMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("coset table grew past {max_cosets} cosets without closing")]
    LimitExceeded { max_cosets: usize },
    #[error(transparent)]
    InvalidGenerator(#[from] WordError),
    #[error("coset table is not closed")]
    NotClosed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

impl ParamError {
    pub(crate) fn new(msg: impl Into<String>) -> Self {
        ParamError::Invalid(msg.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SggiError {
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("rank mismatch: {left} generators against {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("relator {relator} does not map to the identity")]
    RelatorNotKilled { relator: Word },
    #[error("target group does not carry a passing certificate")]
    TargetNotCertified,
    #[error("generator mapping is not a bijection of 0..{0}")]
    BadMapping(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("refusing to build a polytope from an uncertified group")]
    Uncertified,
    #[error("unsupported graph format {0:?}")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Sggi(#[from] SggiError),
}

impl From<EnumError> for PolytopeError {
    fn from(e: EnumError) -> Self {
        PolytopeError::Sggi(SggiError::Enumeration(e))
    }
}

/// Failure of a single-instance verification, classified for exit codes and
/// atlas rows.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Sggi(#[from] SggiError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

impl VerifyError {
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            VerifyError::Sggi(SggiError::Enumeration(EnumError::LimitExceeded { .. }))
                | VerifyError::Polytope(PolytopeError::Sggi(SggiError::Enumeration(
                    EnumError::LimitExceeded { .. }
                )))
        )
    }

    /// `param-invalid`, `limit-exceeded` or `error`.
    pub fn reason(&self) -> &'static str {
        match self {
            VerifyError::Param(_) => "param-invalid",
            _ if self.is_limit() => "limit-exceeded",
            _ => "error",
        }
    }
}

impl From<EnumError> for VerifyError {
    fn from(e: EnumError) -> Self {
        VerifyError::Sggi(SggiError::Enumeration(e))
    }
}
