use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sieve limit {0} is too small (need at least 2)")]
    LimitTooSmall(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("characteristic {0} is too small (need p > 3)")]
    SmallCharacteristic(u64),

    #[error("curve y^2 = x^3 + {s}x + {t} is singular over F_{p}")]
    SingularReduction { p: u64, s: u64, t: u64 },

    #[error("singular model: 4a^3 + 27b^2 = 0 for a = {a}, b = {b}")]
    SingularModel { a: i64, b: i64 },

    #[error("order table for p = {p} needs {required} bytes, over the budget of {budget}")]
    TableBudget { p: u64, required: u64, budget: u64 },

    #[error("order table data is invalid: {0}")]
    BadTable(String),

    #[error("{0} is not a negative discriminant (need d < 0 and d congruent to 0 or 1 mod 4)")]
    NotDiscriminant(i64),

    #[error("order {n} is outside the Hasse interval of p = {p}")]
    OutsideHasse { n: u64, p: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
