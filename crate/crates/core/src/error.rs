use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^32")]
    NotAnOddPrime(u64),
    #[error("polynomial has degree {degree}, above the bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("denominator polynomial is zero")]
    ZeroDenominator,
    #[error("numerator and denominator share a factor of degree {0}")]
    NotCoprime(usize),
    #[error("no value assigned to pole {0}")]
    MissingPoleAssignment(u64),
    #[error("map is not a bijection of F_p")]
    NotABijection,
    #[error("gamma must be non-zero mod p")]
    ZeroGamma,
    #[error("frequency k must be non-zero mod p")]
    ZeroFrequency,
    #[error("phase is constant on F_p")]
    ConstantPhase,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operation needs an exact distribution")]
    ModeMismatch,
    #[error("kernel row {row} is invalid: {reason}")]
    InvalidKernel { row: usize, reason: &'static str },
    #[error("state {0} out of range")]
    StateOutOfRange(u64),
    #[error("found {0} recurrent classes, expected exactly one")]
    NonUniqueRecurrentClass(usize),
    #[error("formula requires p ≡ 3 (mod 4)")]
    WrongResidueClass,
    #[error("target distribution is not stationary for the kernel")]
    NotStationary,
    #[error("no mixing within {0} steps")]
    BudgetExceeded(usize),
    #[error("power iteration did not converge within {0} iterations")]
    NotConverged(usize),
    #[error("rational reconstruction failed after {0} primes")]
    ReconstructionFailed(usize),
    #[error("subset has zero or full stationary mass")]
    TrivialSubset,
    #[error("support of {size} states exceeds the exhaustive limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("set is not symmetric: {0} is in the set but its negation is not")]
    NotSymmetric(u64),
    #[error("average block length too small to equalize")]
    AverageTooSmall,
    #[error("progressions overlap at {0}")]
    Overlapping(u64),
    #[error("progressions have unequal lengths")]
    UnequalLengths,
    #[error("set leaves the kept states from {0}")]
    NotClosed(usize),
    #[error("integer weights overflow the exact Cheeger arithmetic")]
    Overflow,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("cannot parse descriptor: {0}")]
    Parse(String),
}
