use thiserror::Error;

/// Errors raised by the pool engines and analytics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AmmError {
    #[error("unknown asset: {0}")]
    UnknownAsset(String),

    #[error("reserve for {0} is empty")]
    EmptyReserve(String),

    #[error("input amount must be positive")]
    NonPositiveInput,

    #[error("pool exhausted: requested {requested} exceeds reserve {available}")]
    PoolExhausted { requested: f64, available: f64 },

    #[error("burn amount {requested} exceeds intermediary supply {supply}")]
    SupplyExceeded { requested: f64, supply: f64 },

    #[error("fraction f = {0} out of range")]
    FOutOfRange(f64),

    #[error("price ratio xi must be positive, got {0}")]
    NonPositiveXi(f64),

    #[error("pricing rule returned a non-finite or non-positive value at ({x}, {y})")]
    NonFiniteRule { x: f64, y: f64 },

    #[error("x = {0} outside the sampled curve range")]
    OutOfRange(f64),

    #[error("deposit is not proportional to current reserves")]
    UnbalancedDeposit,

    #[error("share amount {requested} exceeds total outstanding {total}")]
    SharesExceeded { requested: f64, total: f64 },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),
}

pub type Result<T> = std::result::Result<T, AmmError>;
