//! The token-swap (intermediary-token) market maker: purchases and sales of
//! the intermediary token priced off fixed reserve ratios, and the composed
//! two-step asset swap.
//!
//! No fee parameter is modeled here; equivalence with the constant-product
//! engine holds at gamma = 1.

use crate::error::{AmmError, Result};
use crate::types::{Amount, Price, Side, TokenSwapState};
use crate::SwapQuote;

/// Price of one intermediary token denominated in the `side` reserve token:
/// `B / (S * RR)`.
pub fn intermediary_price(state: &TokenSwapState, side: Side) -> Price {
    let p = state.reserve(side) / (state.supply() * state.reserve_ratio(side));
    Price::new(p).expect("well-formed state yields a positive price")
}

/// Spot price of one `base`-side token denominated in the other reserve
/// token, via the intermediary leg.
fn cross_price(state: &TokenSwapState, base: Side) -> Price {
    let quote = base.other();
    let p = intermediary_price(state, quote).value() / intermediary_price(state, base).value();
    Price::new(p).expect("well-formed state yields a positive price")
}

/// Pay `pay_amount` of the `side` reserve token and mint intermediary
/// tokens: `minted = S * ((1 + pay/B)^RR - 1)`. Paying zero mints zero and
/// leaves the state unchanged.
pub fn purchase_intermediary(
    state: &TokenSwapState,
    side: Side,
    pay_amount: Amount,
) -> Result<(f64, TokenSwapState)> {
    let delta = pay_amount.value();
    if delta == 0.0 {
        return Ok((0.0, state.clone()));
    }
    if delta < 0.0 {
        return Err(AmmError::NonPositiveInput);
    }
    let reserve = state.reserve(side);
    let rr = state.reserve_ratio(side);
    let minted = state.supply() * ((1.0 + delta / reserve).powf(rr) - 1.0);
    let new_state = state.updated(side, reserve + delta, state.supply() + minted)?;
    Ok((minted, new_state))
}

/// Burn `burn_amount` intermediary tokens against the `side` reserve:
/// `received = B * (1 - (1 - burn/S)^(1/RR))` where `S` is the current
/// (post-mint) supply. Burning the whole supply drains the reserve.
pub fn sell_intermediary(
    state: &TokenSwapState,
    side: Side,
    burn_amount: f64,
) -> Result<(Amount, TokenSwapState)> {
    if burn_amount == 0.0 {
        return Ok((Amount::ZERO, state.clone()));
    }
    if burn_amount < 0.0 {
        return Err(AmmError::NonPositiveInput);
    }
    let supply = state.supply();
    if burn_amount > supply {
        return Err(AmmError::SupplyExceeded {
            requested: burn_amount,
            supply,
        });
    }
    let reserve = state.reserve(side);
    let rr = state.reserve_ratio(side);
    let received = reserve * (1.0 - (1.0 - burn_amount / supply).powf(1.0 / rr));
    let new_state = state.updated(side, reserve - received, supply - burn_amount)?;
    Ok((Amount::new(received)?, new_state))
}

/// Swap one reserve token for the other by composing a purchase of
/// intermediary tokens with an immediate sale on the opposite side. The
/// intermediary supply nets out, so only the two reserves move.
pub fn swap_via_intermediary(
    state: &TokenSwapState,
    input_side: Side,
    input_amount: Amount,
) -> Result<SwapQuote<TokenSwapState>> {
    if input_amount.value() < 0.0 {
        return Err(AmmError::NonPositiveInput);
    }
    let output_side = input_side.other();
    let spot_before = cross_price(state, output_side);
    let (minted, after_mint) = purchase_intermediary(state, input_side, input_amount)?;
    let (received, new_state) = sell_intermediary(&after_mint, output_side, minted)?;
    let spot_after = cross_price(&new_state, output_side);
    let side_name = |s: Side| match s {
        Side::A => "a".to_string(),
        Side::B => "b".to_string(),
    };
    Ok(SwapQuote {
        input_asset: side_name(input_side),
        output_asset: side_name(output_side),
        input_amount,
        output_amount: received,
        fee_paid: Amount::ZERO,
        spot_before,
        spot_after,
        new_state,
    })
}
