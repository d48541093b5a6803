//! LP share accounting: balanced deposits mint a proportional claim on the
//! reserves, redemptions pay out pro rata (including accrued fees).

use crate::error::{AmmError, Result};

const PROPORTION_TOL: f64 = 1e-9;

/// Shares minted for a balanced deposit. The first deposit into an empty
/// pool (`total_shares == 0`) mints the geometric mean of the deposited
/// amounts; later deposits mint `S * deposit_i / reserve_i`, which agrees
/// across legs because the deposit must be proportional to the reserves.
pub fn mint_shares(reserves: &[f64], deposit: &[f64], total_shares: f64) -> Result<f64> {
    if deposit.is_empty() || deposit.iter().any(|&d| !d.is_finite() || d <= 0.0) {
        return Err(AmmError::NonPositiveInput);
    }
    if total_shares == 0.0 {
        let product: f64 = deposit.iter().product();
        return Ok(product.powf(1.0 / deposit.len() as f64));
    }
    if reserves.len() != deposit.len() {
        return Err(AmmError::ConfigInvalid(
            "deposit legs must match reserve count".into(),
        ));
    }
    let ratio0 = deposit[0] / reserves[0];
    for (d, r) in deposit.iter().zip(reserves) {
        if ((d / r) - ratio0).abs() > PROPORTION_TOL * ratio0.max(1.0) {
            return Err(AmmError::UnbalancedDeposit);
        }
    }
    Ok(total_shares * ratio0)
}

/// Amounts paid out for burning `shares` of `total_shares`: the same
/// fraction of every reserve. Burning everything empties the pool exactly.
pub fn redeem_shares(reserves: &[f64], shares: f64, total_shares: f64) -> Result<Vec<f64>> {
    if !shares.is_finite() || shares <= 0.0 {
        return Err(AmmError::NonPositiveInput);
    }
    if shares > total_shares {
        return Err(AmmError::SharesExceeded {
            requested: shares,
            total: total_shares,
        });
    }
    let fraction = shares / total_shares;
    Ok(reserves.iter().map(|r| r * fraction).collect())
}
