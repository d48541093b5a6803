//! Closed-form microstructure analytics for constant-product pools: price
//! impact, impermanent loss, depth loss, and the arbitrage trade that levels
//! the pool to an external reference price.
//!
//! Sign convention: losses are negative percentages, price increases
//! positive.

use serde::Serialize;

use crate::error::{AmmError, Result};
use crate::types::{FeeParam, PoolKind, PoolState, Price};

/// Trade direction for the reserve-fraction analytics. `f` is always a
/// fraction of the current base reserve, never of trade volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The trader removes `f * B` of the base reserve from the pool.
    BuyFromPool,
    /// The trader sells `f * B` of base tokens into the pool.
    SellToPool,
}

/// Spot-price change in percent caused by trading a fraction `f` of the
/// base reserve: `(1/(1-f)^2 - 1) * 100` when buying from the pool,
/// `-(1 - 1/(1+f)^2) * 100` when selling to it.
pub fn price_impact(f: f64, direction: Direction) -> Result<f64> {
    validate_fraction(f, direction)?;
    Ok(match direction {
        Direction::BuyFromPool => (1.0 / ((1.0 - f) * (1.0 - f)) - 1.0) * 100.0,
        Direction::SellToPool => -(1.0 - 1.0 / ((1.0 + f) * (1.0 + f))) * 100.0,
    })
}

/// Impermanent loss in percent for a relative price move `xi` under fee
/// parameter `gamma`: `((sqrt(gamma*xi) + sqrt(xi/gamma)) / (1+xi) - 1) * 100`.
pub fn impermanent_loss(xi: f64, gamma: FeeParam) -> Result<f64> {
    if !xi.is_finite() || xi <= 0.0 {
        return Err(AmmError::NonPositiveXi(xi));
    }
    let g = gamma.gamma();
    Ok((((g * xi).sqrt() + (xi / g).sqrt()) / (1.0 + xi) - 1.0) * 100.0)
}

/// Output shortfall in percent versus an infinitely deep pool at the entry
/// price: `f * 100` when buying `f * B` of the base reserve,
/// `(1 - 1/(1+f)) * 100` when selling.
pub fn depth_loss(f: f64, direction: Direction) -> Result<f64> {
    validate_fraction(f, direction)?;
    Ok(match direction {
        Direction::BuyFromPool => f * 100.0,
        Direction::SellToPool => (1.0 - 1.0 / (1.0 + f)) * 100.0,
    })
}

/// Average price paid per base token when buying `f * B` of the base
/// reserve: `B_quote / (B_base * (1 - f))`.
pub fn average_execution_price(pool: &PoolState, f: f64) -> Result<Price> {
    require_two_asset_cp(pool)?;
    if !(0.0..1.0).contains(&f) {
        return Err(AmmError::FOutOfRange(f));
    }
    let b_base = pool.reserves()[0].amount;
    let b_quote = pool.reserves()[1].amount;
    Price::new(b_quote / (b_base * (1.0 - f)))
}

/// The leveling trade that moves a two-asset constant-product pool to an
/// external reference price.
#[derive(Debug, Clone, Serialize)]
pub struct ArbTrade {
    /// Ratio of target to pre-trade spot price.
    pub xi: f64,
    /// Signed change of the base reserve (negative: tokens left the pool).
    pub base_delta: f64,
    /// Signed change of the quote reserve.
    pub quote_delta: f64,
    pub spot_after: Price,
    pub new_state: PoolState,
}

impl ArbTrade {
    pub fn is_null(&self) -> bool {
        self.base_delta == 0.0 && self.quote_delta == 0.0
    }
}

/// Level a two-asset constant-product pool to `target` (price of the first
/// asset in units of the second). New balances follow
/// `B'_base = B_base / sqrt(gamma*xi)`, `B'_quote = sqrt(gamma*xi) * B_quote`.
/// A target equal to the current spot yields a null trade.
pub fn arbitrage_to_price(pool: &PoolState, target: Price) -> Result<ArbTrade> {
    require_two_asset_cp(pool)?;
    let base = pool.reserves()[0].asset.clone();
    let quote = pool.reserves()[1].asset.clone();
    let spot_before = pool.spot_price(&base, &quote)?;
    let xi = target.value() / spot_before.value();
    if xi == 1.0 {
        return Ok(ArbTrade {
            xi,
            base_delta: 0.0,
            quote_delta: 0.0,
            spot_after: spot_before,
            new_state: pool.clone(),
        });
    }
    let gamma = pool.fee().gamma();
    let scale = (gamma * xi).sqrt();
    let b_base = pool.reserves()[0].amount;
    let b_quote = pool.reserves()[1].amount;
    let new_base = b_base / scale;
    let new_quote = b_quote * scale;
    let new_state = pool.with_amounts(&[new_base, new_quote])?;
    let spot_after = new_state.spot_price(&base, &quote)?;
    Ok(ArbTrade {
        xi,
        base_delta: new_base - b_base,
        quote_delta: new_quote - b_quote,
        spot_after,
        new_state,
    })
}

/// Mark a two-asset pool in units of its second (quote) asset at the given
/// price of the first (base) asset.
pub fn pool_value_in_quote(pool: &PoolState, base_price: Price) -> Result<f64> {
    require_two_asset_cp(pool)?;
    Ok(pool.reserves()[0].amount * base_price.value() + pool.reserves()[1].amount)
}

fn validate_fraction(f: f64, direction: Direction) -> Result<()> {
    let ok = match direction {
        Direction::BuyFromPool => (0.0..1.0).contains(&f),
        Direction::SellToPool => f >= 0.0 && f.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(AmmError::FOutOfRange(f))
    }
}

fn require_two_asset_cp(pool: &PoolState) -> Result<()> {
    if pool.kind() != PoolKind::ConstantProduct || pool.reserves().len() != 2 {
        return Err(AmmError::ConfigInvalid(
            "operation requires a two-asset constant-product pool".into(),
        ));
    }
    Ok(())
}
