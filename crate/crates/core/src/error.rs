use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: u64, right: u64 },
    #[error("incompatible orders: {order} does not divide {ambient}")]
    IncompatibleOrders { order: u64, ambient: u64 },
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),
    #[error("group too large: |T| = {size} exceeds cap {cap}")]
    GroupTooLarge { size: u64, cap: u64 },
    #[error("map is not an automorphism")]
    NotAutomorphism,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a homogeneous anti-automorphism")]
    NotHomogeneousAntiAutomorphism,
    #[error("not a homogeneous map")]
    NotHomogeneousMap,
    #[error("matrix is not in the det -1, trace 0 locus")]
    NotInLocus,
    #[error("modulus {value} exceeds cap {cap}")]
    CapExceeded { value: u64, cap: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid datum: {0}")]
    InvalidDatum(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("form is not ±symmetric under psi0")]
    FormNotSymmetric,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
