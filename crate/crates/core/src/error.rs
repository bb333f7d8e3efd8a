use crate::array::Index;
use crate::value::Value;

/// Errors raised by array construction, the algebra operators, the
/// distribution layer and the relational bridge.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("arity must be at least 1")]
    ZeroArity,

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("consistency violation at {index}: {existing} vs {incoming}")]
    ConsistencyViolation {
        index: Index,
        existing: Value,
        incoming: Value,
    },

    #[error("NaN is not a storable value")]
    NanValue,

    #[error("tuple values must have at least one component")]
    EmptyTuple,

    #[error("predicate references dimension {dim} of an array with arity {arity}")]
    PredicateArity { dim: usize, arity: usize },

    #[error("index map is not injective: {first} and {second} both map to {image}")]
    NotInjective {
        first: Index,
        second: Index,
        image: Index,
    },

    #[error("invalid transform step: {0}")]
    BadStep(String),

    #[error("transform is not invertible: {0}")]
    NotInvertible(String),

    #[error("projection set must not constrain values: {0}")]
    BadProjection(String),

    #[error("fragments {first} and {second} both claim index {index}")]
    NotDisjoint {
        index: Index,
        first: usize,
        second: usize,
    },

    #[error("no fragment claims index {index}")]
    NotExhaustive { index: Index },

    #[error("array is not uniformly tuple-valued at {index}")]
    NotTupleValued { index: Index },

    #[error("invalid value slices: {0}")]
    BadSlices(String),

    #[error("predicate cannot be pushed to fragments: {0}")]
    NotPushable(String),

    #[error("fragment supports disagree at {index}")]
    SupportMismatch { index: Index },

    #[error("placement is malformed: {0}")]
    BadPlacement(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("duplicate key {0}")]
    DuplicateKey(i64),

    #[error("missing cell at row {row}, column {column:?}")]
    MissingCell { row: i64, column: String },

    #[error("unknown label {label:?} on dimension {dim}")]
    UnknownLabel { dim: usize, label: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
