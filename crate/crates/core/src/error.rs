use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid address: {0}")]
    InvalidAddress(String),

    #[error("invalid leaf partition: {0}")]
    InvalidPartition(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("configuration mismatch")]
    ConfigMismatch,

    #[error("summand count mismatch: {left} vs {right}")]
    SummandMismatch { left: usize, right: usize },

    #[error("composition closure violated: ({0}, {1}) and ({1}, {2}) present but ({0}, {2}) missing")]
    MissingComposite(String, String, String),

    #[error("unknown object id `{0}`")]
    UnknownObject(String),

    #[error("object id collision: `{0}`")]
    IdCollision(String),

    #[error("not a subgroupoid: {0}")]
    NotSubgroupoid(String),

    #[error("isomorphism pair ({0}, {1}) present; collapse with underlying_poset first")]
    NotAntisymmetric(String, String),

    #[error("object `{0}` is isomorphic to an object of the base subcategory")]
    IsomorphicToBase(String),

    #[error("action is not functorial: {0}")]
    NotFunctorial(String),

    #[error("invalid Morse function: {0}")]
    InvalidMorse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration cap exceeded: {what} = {value} > {cap}")]
    CapExceeded { what: &'static str, value: usize, cap: usize },

    #[error("boundary of boundary is nonzero in dimension {dim} (column {column})")]
    BoundaryNotClosed { dim: usize, column: usize },

    #[error("complex is disconnected")]
    Disconnected,

    #[error("no cell of dimension {dim} with label `{label}` to trade")]
    NoSuchCell { dim: usize, label: String },

    #[error("k={0} unreachable within the given prefix")]
    Unreachable(i64),

    #[error("schedule is not sparsified: stage {stage} has connectivity {found}, needs at least {needed}")]
    NotSparsified { stage: usize, found: i64, needed: i64 },

    #[error("staircase postcondition failed: {0}")]
    Postcondition(String),

    #[error("schema error: {0}")]
    Schema(String),
}
