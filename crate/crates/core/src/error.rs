use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is too large for word-sized arithmetic")]
    PrimeTooLarge(u64),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("truncation level mismatch: {left} vs {right}")]
    LevelMismatch { left: u32, right: u32 },
    #[error("operator order {order} exceeds truncation level {level}")]
    OrderExceedsLevel { order: u32, level: u32 },
    #[error("matrix is not invertible over the polynomial ring (determinant {0})")]
    NotInvertible(String),
    #[error("connection is not integrable: curvature K_{{{i}{j}}} = {witness}")]
    NotIntegrable { i: usize, j: usize, witness: String },
    #[error("(nabla_{var})^p is not O-linear: nonzero coefficient on {witness}")]
    NotOLinear { var: usize, witness: String },
    #[error("operation requires {expected} mode, got {got}")]
    WrongMode { expected: &'static str, got: &'static str },
    #[error("form is not closed: d(omega) has nonzero component ({i},{j})")]
    NotClosed { i: usize, j: usize },
    #[error("no solution with degree bound {0}; raise the bound")]
    Infeasible(u32),
    #[error("only {found} of {rank} flat sections found (degree bound {bound})")]
    FlatSectionsDeficient { found: usize, rank: usize, bound: u32 },
    #[error("Higgs matrices {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("Higgs matrix {0} does not satisfy B^p = 0")]
    NotNilpotent(usize),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("invalid Rees element: {0}")]
    InvalidRees(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
