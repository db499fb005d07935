use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("elements live over different moduli ({0} vs {1})")]
    ModulusMismatch(String, String),
    #[error("modulus {m} is not coprime to the residue characteristic {p}")]
    NonCoprimeModulus { m: u64, p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("form {0:?} is not a primitive form of discriminant {1}")]
    BadForm((i64, i64, i64), i64),
    #[error("discriminants differ: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),
    #[error("|D| = {0} exceeds the configured enumeration bound {1}")]
    BoundExceeded(u64, u64),
    #[error("{l} is inert in the field of discriminant {d}")]
    InertPrime { d: i64, l: u64 },
    #[error("{l} ramifies in the field of discriminant {d}")]
    RamifiedPrime { d: i64, l: u64 },
    #[error("the residue characteristic {p} ramifies in the field of discriminant {d}")]
    RamifiedAtP { d: i64, p: u64 },
    #[error("discriminant {0} is negative; a real quadratic field is required")]
    ImaginaryField(i64),
    #[error("discriminant {0} is positive; an imaginary quadratic field is required")]
    RealField(i64),
    #[error(
        "character has order {0}; its square is trivial so the induced representation is reducible"
    )]
    NotDihedral(u64),
    #[error("expected {expected} character exponents, got {got}")]
    ExponentCount { expected: usize, got: usize },
    #[error(
        "untwisted characters of real quadratic fields have no holomorphic weight one theta series"
    )]
    UnsupportedSignature,
    #[error("discriminant {0} has extra units; theta series are only supported for D < -4")]
    SmallDiscriminant(i64),
    #[error("no auxiliary element found up to height {0}")]
    SearchExhausted(u64),
    #[error("prime {0} is not admissible for the residue symbol")]
    BadPrime(u64),
    #[error("need coefficients up to {needed}, expansion only known to {have}")]
    InsufficientPrecision { needed: u64, have: u64 },
    #[error("scalars of the inputs live in different rings")]
    RingMismatch,
    #[error("level {0} is not squarefree")]
    NonSquarefreeLevel(u64),
    #[error("characteristic {p} divides the level {n}")]
    BadCharacteristic { p: u64, n: u64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}
