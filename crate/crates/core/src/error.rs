use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("`{0}` is reserved")]
    ReservedName(String),
    #[error("invalid variable declaration: {0}")]
    InvalidVariable(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("cannot divide by `{0}`")]
    IllegalDivision(String),
    #[error("replacement for `{0}` is not a unit, cannot take negative powers")]
    NonInvertibleSubstitution(String),
    #[error("variable tables differ: {0}")]
    VariableMismatch(String),
    #[error("bivector coefficients are not central: `{0}` is differentiated and occurs in a coefficient")]
    NonCentralBivector(String),
    #[error("star product did not terminate within order {0}")]
    TruncationExceeded(u32),
    #[error("supercommutator needs homogeneous arguments")]
    MixedParityInput,
    #[error("pair ({0}, {1}) cannot be resolved in chart `{2}`")]
    UnresolvedPair(String, String, String),
    #[error("transition cycle is not composable: {0}")]
    NonComposableCycle(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{0}` has no fibration data")]
    MissingFibration(String),
    #[error("invalid bivector: {0}")]
    InvalidBivector(String),
    #[error("invalid atlas: {0}")]
    InvalidAtlas(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
