//! A desk-scale laboratory for automated market maker microstructure:
//! constant-function and token-swap swap engines, numerical derivation of
//! trading curves from pricing rules, closed-form price-impact /
//! impermanent-loss / depth-loss analytics, and a deterministic agent-based
//! simulator.
//!
//! Everything is a pure function over immutable value types, in IEEE double
//! precision. On-chain fixed-point arithmetic, token decimals, and gas
//! costs are out of scope.

pub mod analytics;
pub mod cfmm;
pub mod error;
pub mod invariant_lab;
pub mod shares;
pub mod sim;
pub mod token_swap;
pub mod types;

pub use cfmm::SwapQuote;
pub use error::{AmmError, Result};
pub use types::{
    Amount, FeeParam, PoolConfig, PoolKind, PoolState, Price, Reserve, Side, TokenSwapState,
    TsmmConfig,
};
