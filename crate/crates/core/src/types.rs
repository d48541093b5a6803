//! Shared numeric and domain vocabulary: amounts, prices, fees, pool
//! descriptors.
//!
//! All arithmetic is IEEE double precision. Real on-chain AMMs use wide
//! fixed-point integers; this library is a real-valued model and does not
//! attempt to reproduce integer rounding.

use serde::{Deserialize, Serialize};

use crate::error::{AmmError, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A non-negative, finite quantity of tokens.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Amount(f64);

impl Amount {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(AmmError::InvalidValue(format!(
                "amount must be finite and non-negative, got {value}"
            )));
        }
        Ok(Amount(value))
    }

    pub const ZERO: Amount = Amount(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A positive, finite price (quote token per base token).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Price(f64);

impl Price {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(AmmError::InvalidValue(format!(
                "price must be finite and positive, got {value}"
            )));
        }
        Ok(Price(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Fee parameter gamma in (0, 1]. The fee fraction charged on the incoming
/// leg of a swap is `1 - gamma`; `gamma = 1` means no fee.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeeParam(f64);

impl FeeParam {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 || gamma > 1.0 {
            return Err(AmmError::InvalidValue(format!(
                "gamma must lie in (0, 1], got {gamma}"
            )));
        }
        Ok(FeeParam(gamma))
    }

    pub const NO_FEE: FeeParam = FeeParam(1.0);

    pub fn gamma(self) -> f64 {
        self.0
    }

    pub fn fee_fraction(self) -> f64 {
        1.0 - self.0
    }
}

/// Which function of the reserves the pool holds constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolKind {
    ConstantProduct,
    ConstantSum,
    ConstantMean,
}

/// One pooled reserve: asset id, balance, and normalized weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reserve {
    pub asset: String,
    pub amount: f64,
    #[serde(default)]
    pub weight: f64,
}

/// Immutable snapshot of a constant-function pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PoolConfig", into = "PoolConfig")]
pub struct PoolState {
    kind: PoolKind,
    fee: FeeParam,
    reserves: Vec<Reserve>,
}

/// JSON wire form of a pool: `{"kind", "fee_gamma", "reserves"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoolConfig {
    pub kind: PoolKind,
    pub fee_gamma: f64,
    pub reserves: Vec<Reserve>,
}

impl TryFrom<PoolConfig> for PoolState {
    type Error = AmmError;

    fn try_from(cfg: PoolConfig) -> Result<Self> {
        let fee = FeeParam::new(cfg.fee_gamma)?;
        PoolState::with_weights(cfg.kind, fee, cfg.reserves)
    }
}

impl From<PoolState> for PoolConfig {
    fn from(pool: PoolState) -> Self {
        PoolConfig {
            kind: pool.kind,
            fee_gamma: pool.fee.gamma(),
            reserves: pool.reserves,
        }
    }
}

impl PoolState {
    /// Build a pool with uniform weights. Constant-product pools take
    /// exactly two assets at weights (0.5, 0.5).
    pub fn new(
        kind: PoolKind,
        fee: FeeParam,
        reserves: Vec<(impl Into<String>, f64)>,
    ) -> Result<Self> {
        let n = reserves.len();
        let reserves = reserves
            .into_iter()
            .map(|(asset, amount)| Reserve {
                asset: asset.into(),
                amount,
                weight: 1.0 / n as f64,
            })
            .collect();
        Self::with_weights(kind, fee, reserves)
    }

    pub fn with_weights(kind: PoolKind, fee: FeeParam, mut reserves: Vec<Reserve>) -> Result<Self> {
        if reserves.len() < 2 {
            return Err(AmmError::ConfigInvalid(
                "a pool needs at least two reserves".into(),
            ));
        }
        match kind {
            PoolKind::ConstantProduct | PoolKind::ConstantSum => {
                if kind == PoolKind::ConstantProduct && reserves.len() != 2 {
                    return Err(AmmError::ConfigInvalid(
                        "constant-product pools hold exactly two assets".into(),
                    ));
                }
                // Weights are implied for these kinds; normalize whatever came in.
                let w = 1.0 / reserves.len() as f64;
                for r in &mut reserves {
                    r.weight = w;
                }
            }
            PoolKind::ConstantMean => {
                if reserves.len() > 8 {
                    return Err(AmmError::ConfigInvalid(
                        "constant-mean pools support at most eight assets".into(),
                    ));
                }
                let sum: f64 = reserves.iter().map(|r| r.weight).sum();
                if reserves.iter().any(|r| r.weight <= 0.0) || (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(AmmError::ConfigInvalid(format!(
                        "weights must be positive and sum to 1, got sum {sum}"
                    )));
                }
            }
        }
        for r in &reserves {
            if !r.amount.is_finite() || r.amount <= 0.0 {
                return Err(AmmError::ConfigInvalid(format!(
                    "reserve {} must be positive, got {}",
                    r.asset, r.amount
                )));
            }
        }
        let mut seen: Vec<&str> = reserves.iter().map(|r| r.asset.as_str()).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(AmmError::ConfigInvalid("duplicate asset id".into()));
        }
        Ok(PoolState {
            kind,
            fee,
            reserves,
        })
    }

    pub fn kind(&self) -> PoolKind {
        self.kind
    }

    pub fn fee(&self) -> FeeParam {
        self.fee
    }

    pub fn reserves(&self) -> &[Reserve] {
        &self.reserves
    }

    pub fn asset_ids(&self) -> impl Iterator<Item = &str> {
        self.reserves.iter().map(|r| r.asset.as_str())
    }

    pub(crate) fn index_of(&self, asset: &str) -> Result<usize> {
        self.reserves
            .iter()
            .position(|r| r.asset == asset)
            .ok_or_else(|| AmmError::UnknownAsset(asset.to_string()))
    }

    pub fn reserve(&self, asset: &str) -> Result<&Reserve> {
        Ok(&self.reserves[self.index_of(asset)?])
    }

    /// Replace a reserve balance, returning a new state. Internal to the
    /// engines; validity is re-checked.
    pub(crate) fn with_amounts(&self, amounts: &[f64]) -> Result<Self> {
        let reserves = self
            .reserves
            .iter()
            .zip(amounts)
            .map(|(r, &amount)| Reserve {
                asset: r.asset.clone(),
                amount,
                weight: r.weight,
            })
            .collect();
        Self::with_weights(self.kind, self.fee, reserves)
    }

    /// Marginal price of `base` denominated in `quote`, including the
    /// 1/gamma fee adjustment on an infinitesimal trade.
    pub fn spot_price(&self, base: &str, quote: &str) -> Result<Price> {
        let b = &self.reserves[self.index_of(base)?];
        let q = &self.reserves[self.index_of(quote)?];
        if b.amount <= 0.0 {
            return Err(AmmError::EmptyReserve(base.to_string()));
        }
        if q.amount <= 0.0 {
            return Err(AmmError::EmptyReserve(quote.to_string()));
        }
        let inv_gamma = 1.0 / self.fee.gamma();
        let p = match self.kind {
            PoolKind::ConstantProduct => inv_gamma * q.amount / b.amount,
            PoolKind::ConstantSum => inv_gamma,
            PoolKind::ConstantMean => inv_gamma * (q.amount / q.weight) / (b.amount / b.weight),
        };
        Price::new(p)
    }

    /// The quantity the pool holds constant: product, sum, or weighted
    /// geometric mean of the reserves.
    pub fn invariant_value(&self) -> f64 {
        match self.kind {
            PoolKind::ConstantProduct => self.reserves.iter().map(|r| r.amount).product(),
            PoolKind::ConstantSum => self.reserves.iter().map(|r| r.amount).sum(),
            PoolKind::ConstantMean => self
                .reserves
                .iter()
                .map(|r| r.amount.powf(r.weight))
                .product(),
        }
    }
}

/// State of a token-swap (intermediary-token) market: two reserves, the
/// outstanding intermediary supply, and the fixed reserve ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TsmmConfig", into = "TsmmConfig")]
pub struct TokenSwapState {
    reserve_a: f64,
    reserve_b: f64,
    supply: f64,
    rr_a: f64,
    rr_b: f64,
}

/// JSON wire form: `{"reserve_a", "reserve_b", "supply", "rr_a"}`.
/// `rr_b` is implied as `1 - rr_a`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TsmmConfig {
    pub reserve_a: f64,
    pub reserve_b: f64,
    pub supply: f64,
    pub rr_a: f64,
}

impl TryFrom<TsmmConfig> for TokenSwapState {
    type Error = AmmError;

    fn try_from(cfg: TsmmConfig) -> Result<Self> {
        TokenSwapState::new(cfg.reserve_a, cfg.reserve_b, cfg.supply, cfg.rr_a, 1.0 - cfg.rr_a)
    }
}

impl From<TokenSwapState> for TsmmConfig {
    fn from(s: TokenSwapState) -> Self {
        TsmmConfig {
            reserve_a: s.reserve_a,
            reserve_b: s.reserve_b,
            supply: s.supply,
            rr_a: s.rr_a,
        }
    }
}

/// Which leg of a token-swap state an operation touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl TokenSwapState {
    pub fn new(reserve_a: f64, reserve_b: f64, supply: f64, rr_a: f64, rr_b: f64) -> Result<Self> {
        for (name, v) in [
            ("reserve_a", reserve_a),
            ("reserve_b", reserve_b),
            ("supply", supply),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(AmmError::ConfigInvalid(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(0.0..1.0).contains(&rr_a) || rr_a == 0.0 || !(0.0..1.0).contains(&rr_b) || rr_b == 0.0
        {
            return Err(AmmError::ConfigInvalid(
                "reserve ratios must lie in (0, 1)".into(),
            ));
        }
        if (rr_a + rr_b - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(AmmError::ConfigInvalid(format!(
                "reserve ratios must sum to 1, got {}",
                rr_a + rr_b
            )));
        }
        Ok(TokenSwapState {
            reserve_a,
            reserve_b,
            supply,
            rr_a,
            rr_b,
        })
    }

    pub fn reserve(&self, side: Side) -> f64 {
        match side {
            Side::A => self.reserve_a,
            Side::B => self.reserve_b,
        }
    }

    pub fn reserve_ratio(&self, side: Side) -> f64 {
        match side {
            Side::A => self.rr_a,
            Side::B => self.rr_b,
        }
    }

    pub fn supply(&self) -> f64 {
        self.supply
    }

    pub(crate) fn updated(&self, side: Side, reserve: f64, supply: f64) -> Result<Self> {
        let (a, b) = match side {
            Side::A => (reserve, self.reserve_b),
            Side::B => (self.reserve_a, reserve),
        };
        TokenSwapState::new(a, b, supply, self.rr_a, self.rr_b)
    }
}
