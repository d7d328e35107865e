use thiserror::Error;

/// Coarse classification used to pick a process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// A mathematical hypothesis of the requested construction does not hold.
    Hypothesis,
    /// A configured search or degree cap was reached.
    ResourceCap,
    /// Malformed input.
    Input,
    /// Two independent computations disagree.
    Internal,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable-count mismatch: {0} vs {1}")]
    VariableCount(usize, usize),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("invalid germ: {0}")]
    InvalidGerm(String),
    #[error("corank {0} exceeds one")]
    Corank(usize),
    #[error("not finite multiplicity up to jet order {cap} (branch {branch})")]
    NotFiniteMultiplicity { branch: String, cap: u32 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("not liftable: obstruction at degree {degree} in branch {branch}")]
    NotLiftable { branch: String, degree: u32 },
    #[error("not in Rieger-Ruas form: {0}")]
    NotRiegerRuas(String),
    #[error("resource cap reached: {0}")]
    ResourceCap(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error("ambient mismatch: {0}")]
    Ambient(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Hypothesis(_)
            | Error::NotLiftable { .. }
            | Error::NotRiegerRuas(_)
            | Error::Corank(_)
            | Error::NotFiniteMultiplicity { .. } => ErrorKind::Hypothesis,
            Error::ResourceCap(_) => ErrorKind::ResourceCap,
            Error::Consistency(_) => ErrorKind::Internal,
            Error::VariableCount(..)
            | Error::Arity(_)
            | Error::InvalidGerm(_)
            | Error::Parse { .. }
            | Error::Semantic(_)
            | Error::Ambient(_) => ErrorKind::Input,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
