use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("q = {0} is not admissible (0, 1 and -1 are excluded)")]
    InadmissibleQ(String),

    #[error("q-power exponent {base_power} * ({exponent}) is not an integer")]
    NonIntegralPower { exponent: String, base_power: u64 },

    #[error("base power must be positive")]
    ZeroBasePower,

    #[error("exponent {0} is outside the supported range")]
    ExponentOverflow(String),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("p-adic modulus {p}^{precision} does not fit in 62 bits")]
    PrecisionTooLarge { p: u64, precision: u32 },

    #[error("precision must be at least 1")]
    ZeroPrecision,

    #[error("{value} is not a {p}-adic integer")]
    NotPadicInteger { value: String, p: u64 },

    #[error("operands live in different rings: Z/{left}Z vs Z/{right}Z")]
    RingMismatch { left: u64, right: u64 },

    #[error("division by {0}, which is not a p-adic unit")]
    NonUnitDivision(u64),

    #[error("q residue {residue} is not congruent to 1 mod {p}")]
    QNotNearOne { residue: u64, p: u64 },

    #[error("truncation level N = {level} needs {p}^{level} terms, over the limit of {limit}")]
    TruncationTooLarge { p: u64, level: u32, limit: u64 },

    #[error("weight vector must be non-empty")]
    EmptyWeights,

    #[error("weight {0} is not odd (all weights must be odd positive integers)")]
    EvenWeight(u64),

    #[error("{0:?} is not a permutation of 1..={1}")]
    NotAPermutation(Vec<usize>, usize),

    #[error("workload of {work} evaluations exceeds the budget of {budget}")]
    BudgetExceeded { work: u128, budget: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
