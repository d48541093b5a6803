//! Swap execution against constant-product, constant-sum, and constant-mean
//! pools.
//!
//! The fee leg `(1 - gamma) * input` is charged on the incoming token before
//! the curve math and retained in the input reserve, so fees accrue to
//! liquidity providers and grow the invariant.

use serde::Serialize;

use crate::error::{AmmError, Result};
use crate::types::{Amount, PoolKind, PoolState, Price};

/// Result of executing a swap: amounts, fee, pre/post spot prices, and the
/// pool state after the trade.
#[derive(Debug, Clone, Serialize)]
pub struct SwapQuote<S = PoolState> {
    pub input_asset: String,
    pub output_asset: String,
    pub input_amount: Amount,
    pub output_amount: Amount,
    /// Fee taken, denominated in the input token.
    pub fee_paid: Amount,
    pub spot_before: Price,
    pub spot_after: Price,
    pub new_state: S,
}

impl<S> SwapQuote<S> {
    /// Realized price impact in percent: spot move of the output asset
    /// (quoted in the input asset) caused by this trade.
    pub fn impact_pct(&self) -> f64 {
        (self.spot_after.value() / self.spot_before.value() - 1.0) * 100.0
    }
}

/// Returns `(delta_out, new_out_reserve)`. The new reserve is computed in
/// product form so it stays strictly positive for CP/CM even when the
/// output approaches the full reserve.
fn output_for_effective_input(
    pool: &PoolState,
    in_idx: usize,
    out_idx: usize,
    effective_in: f64,
) -> Result<(f64, f64)> {
    let b_in = pool.reserves()[in_idx].amount;
    let b_out = pool.reserves()[out_idx].amount;
    let new_out = match pool.kind() {
        PoolKind::ConstantProduct => b_out * b_in / (b_in + effective_in),
        PoolKind::ConstantSum => {
            if effective_in > b_out {
                return Err(AmmError::PoolExhausted {
                    requested: effective_in,
                    available: b_out,
                });
            }
            b_out - effective_in
        }
        PoolKind::ConstantMean => {
            let w_in = pool.reserves()[in_idx].weight;
            let w_out = pool.reserves()[out_idx].weight;
            b_out * (b_in / (b_in + effective_in)).powf(w_in / w_out)
        }
    };
    // A drained reserve would leave the pool without a spot price.
    if !(new_out > 0.0) {
        return Err(AmmError::PoolExhausted {
            requested: effective_in,
            available: b_out,
        });
    }
    Ok((b_out - new_out, new_out))
}

/// Execute a swap: sell `input_amount` of `input_asset` to the pool and
/// receive `output_asset`. Returns the full quote including the post-trade
/// pool state.
pub fn swap(
    pool: &PoolState,
    input_asset: &str,
    output_asset: &str,
    input_amount: Amount,
) -> Result<SwapQuote> {
    let delta_in = input_amount.value();
    if delta_in <= 0.0 {
        return Err(AmmError::NonPositiveInput);
    }
    let in_idx = pool.index_of(input_asset)?;
    let out_idx = pool.index_of(output_asset)?;
    if in_idx == out_idx {
        return Err(AmmError::ConfigInvalid(
            "input and output asset must differ".into(),
        ));
    }
    let gamma = pool.fee().gamma();
    let (delta_out, new_out) = output_for_effective_input(pool, in_idx, out_idx, gamma * delta_in)?;

    let spot_before = pool.spot_price(output_asset, input_asset)?;
    let mut amounts: Vec<f64> = pool.reserves().iter().map(|r| r.amount).collect();
    // Full input (fee included) stays in the pool.
    amounts[in_idx] += delta_in;
    amounts[out_idx] = new_out;
    let new_state = pool.with_amounts(&amounts)?;
    let spot_after = new_state.spot_price(output_asset, input_asset)?;

    Ok(SwapQuote {
        input_asset: input_asset.to_string(),
        output_asset: output_asset.to_string(),
        input_amount,
        output_amount: Amount::new(delta_out)?,
        fee_paid: Amount::new((1.0 - gamma) * delta_in)?,
        spot_before,
        spot_after,
        new_state,
    })
}

/// Output received for selling exactly `input_amount` of `input_asset`.
pub fn quote_output_for_exact_input(
    pool: &PoolState,
    input_asset: &str,
    output_asset: &str,
    input_amount: Amount,
) -> Result<Amount> {
    swap(pool, input_asset, output_asset, input_amount).map(|q| q.output_amount)
}

/// Input required to receive exactly `output_amount` of `output_asset`.
/// Inverse of [`quote_output_for_exact_input`]; a zero requested output
/// needs zero input.
pub fn quote_input_for_exact_output(
    pool: &PoolState,
    input_asset: &str,
    output_asset: &str,
    output_amount: Amount,
) -> Result<Amount> {
    let delta_out = output_amount.value();
    if delta_out == 0.0 {
        return Ok(Amount::ZERO);
    }
    let in_idx = pool.index_of(input_asset)?;
    let out_idx = pool.index_of(output_asset)?;
    if in_idx == out_idx {
        return Err(AmmError::ConfigInvalid(
            "input and output asset must differ".into(),
        ));
    }
    let b_in = pool.reserves()[in_idx].amount;
    let b_out = pool.reserves()[out_idx].amount;
    let gamma = pool.fee().gamma();
    let effective_in = match pool.kind() {
        PoolKind::ConstantProduct => {
            if delta_out >= b_out {
                return Err(AmmError::PoolExhausted {
                    requested: delta_out,
                    available: b_out,
                });
            }
            b_in * delta_out / (b_out - delta_out)
        }
        PoolKind::ConstantSum => {
            if delta_out > b_out {
                return Err(AmmError::PoolExhausted {
                    requested: delta_out,
                    available: b_out,
                });
            }
            delta_out
        }
        PoolKind::ConstantMean => {
            if delta_out >= b_out {
                return Err(AmmError::PoolExhausted {
                    requested: delta_out,
                    available: b_out,
                });
            }
            let w_in = pool.reserves()[in_idx].weight;
            let w_out = pool.reserves()[out_idx].weight;
            b_in * ((1.0 - delta_out / b_out).powf(-w_out / w_in) - 1.0)
        }
    };
    Amount::new(effective_in / gamma)
}
