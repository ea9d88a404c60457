use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gram not symmetric")]
    NotSymmetric,
    #[error("gram is degenerate")]
    Degenerate,
    #[error("gram has signature ({positive}, {negative}), expected (1, b2-1)")]
    Signature { positive: usize, negative: usize },
    #[error("invalid surface data: {0}")]
    InvalidSurface(String),
    #[error("invalid polarization: {0}")]
    InvalidPolarization(String),
    #[error("degenerate C: <xi.C> = {0} must be positive")]
    DegenerateC(String),
    #[error("level {level} exceeds the oracle cap {cap}")]
    LevelTooLarge { level: usize, cap: usize },
    #[error("b2 = {b2} exceeds the oracle cap {cap}")]
    RankTooLarge { b2: usize, cap: usize },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("identity violated: {0}")]
    IdentityViolation(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("weight mismatch: l + 2r = {l} + 2*{r} != N = {n}")]
    WeightMismatch { l: i64, r: i64, n: i64 },
    #[error("d = {0} is too large for the exact formula (needs d <= 2)")]
    DTooLarge(i64),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
