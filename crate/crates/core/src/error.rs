//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group order cap exceeded: {order} > {cap}")]
    OrderCapExceeded { order: u128, cap: u128 },

    #[error("operands belong to different groups")]
    GroupMismatch,

    #[error("operands belong to different algebras")]
    AlgebraMismatch,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("element is not an idempotent")]
    NotIdempotent,

    #[error("the idempotent 1 is excluded here")]
    IdentityIdempotent,

    #[error("algebra has no involution")]
    NoInvolution,

    #[error("bilinear form is degenerate")]
    DegenerateForm,

    #[error("subgroup is not normal in its parent")]
    NotNormal,

    #[error("map is not equivariant")]
    NotEquivariant,

    #[error("formal combination is not a Q[G]-relation")]
    NotARelation,

    #[error("squarefree part of zero is undefined")]
    ZeroSquareClass,

    #[error("unfactored cofactor {cofactor} exceeds the trial-division bound {bound}")]
    FactorBoundExceeded { cofactor: String, bound: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("retry budget exhausted after {attempts} attempts: {what}")]
    RetryBudgetExhausted { what: String, attempts: u32 },

    #[error("character is outside the span of cyclic permutation characters")]
    NotInCyclicSpan,

    #[error("representation is not presented as a subspace of a permutation module")]
    NotACosetSubspace,

    #[error("invalid descriptor `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
