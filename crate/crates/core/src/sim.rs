//! Deterministic agent-based simulator. An external reference price drives
//! an arbitrageur that levels the pool every tick; optional noise traders
//! overlay; portfolio marks record pool value, hold value, and realized
//! impermanent loss.
//!
//! Randomness comes from ChaCha8 seeded from the config (price path and
//! noise flow use separate streams derived from the same seed), with
//! standard normals drawn through the rand_distr Ziggurat sampler. Two runs
//! with identical configs produce bit-identical event logs.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::analytics::{arbitrage_to_price, pool_value_in_quote};
use crate::cfmm::swap;
use crate::error::{AmmError, Result};
use crate::shares::{mint_shares, redeem_shares};
use crate::types::{Amount, PoolConfig, PoolState, Price};

const NOISE_STREAM_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Reference price source.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriceProcessConfig {
    /// Replay a fixed series, one positive price per tick.
    CsvReplay { values: Vec<f64> },
    /// Geometric Brownian motion with per-step drift and volatility:
    /// `s_{t+1} = s_t * exp((mu - sigma^2/2) + sigma * z_t)`.
    Gbm { s0: f64, mu: f64, sigma: f64 },
}

/// Noise-trader flow: each tick one trade of a size drawn uniformly from
/// `[min_fraction, max_fraction]` of the input-side reserve, direction by
/// fair coin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub min_fraction: f64,
    pub max_fraction: f64,
}

/// Full simulation configuration; serializable so runs are reproducible
/// from the config file alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub pool: PoolConfig,
    pub price_process: PriceProcessConfig,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    pub ticks: u64,
    pub seed: u64,
}

/// One LP position: share count plus the entry snapshot used for
/// impermanent-loss accounting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpPosition {
    pub shares: f64,
    pub entry_reserves: Vec<f64>,
    pub entry_price: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimEventKind {
    Arb {
        ref_price: f64,
        base_delta: f64,
        quote_delta: f64,
    },
    Trade {
        input_asset: String,
        output_asset: String,
        input_amount: f64,
        output_amount: f64,
        fee_paid: f64,
    },
    LpDeposit {
        amounts: Vec<f64>,
        shares: f64,
    },
    LpWithdraw {
        amounts: Vec<f64>,
        shares: f64,
    },
    Mark {
        ref_price: f64,
        pool_value: f64,
        hold_value: f64,
        il_pct: f64,
        fees_cum: f64,
        invariant: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SimEvent {
    pub tick: u64,
    #[serde(flatten)]
    pub kind: SimEventKind,
}

/// One row of the per-tick summary table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryRow {
    pub tick: u64,
    pub ref_price: f64,
    pub pool_value: f64,
    pub hold_value: f64,
    pub il_pct: f64,
    pub fees_cum: f64,
}

/// A completed simulation: config echo, full event log, per-tick summary,
/// and terminal figures.
#[derive(Debug, Clone, Serialize)]
pub struct SimRun {
    pub config: SimConfig,
    pub events: Vec<SimEvent>,
    pub summary: Vec<SummaryRow>,
    pub final_state: PoolState,
    pub lp: LpPosition,
    pub final_il_pct: f64,
    pub fees_accrued: f64,
}

struct PricePath {
    current: f64,
    process: PriceProcessConfig,
    rng: ChaCha8Rng,
    replay_idx: usize,
}

impl PricePath {
    fn new(process: &PriceProcessConfig, seed: u64) -> Result<Self> {
        let current = match process {
            PriceProcessConfig::CsvReplay { values } => {
                if values.is_empty() || values.iter().any(|&v| !v.is_finite() || v <= 0.0) {
                    return Err(AmmError::ConfigInvalid(
                        "replay series must be non-empty and strictly positive".into(),
                    ));
                }
                values[0]
            }
            PriceProcessConfig::Gbm { s0, sigma, .. } => {
                if !(*s0 > 0.0) || *sigma < 0.0 {
                    return Err(AmmError::ConfigInvalid(
                        "gbm needs s0 > 0 and sigma >= 0".into(),
                    ));
                }
                *s0
            }
        };
        Ok(PricePath {
            current,
            process: process.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            replay_idx: 0,
        })
    }

    fn advance(&mut self) -> f64 {
        match &self.process {
            PriceProcessConfig::CsvReplay { values } => {
                // Hold the last value once the series is spent.
                self.replay_idx = (self.replay_idx + 1).min(values.len() - 1);
                self.current = values[self.replay_idx];
            }
            PriceProcessConfig::Gbm { mu, sigma, .. } => {
                let z: f64 = self.rng.sample(StandardNormal);
                self.current *= ((mu - 0.5 * sigma * sigma) + sigma * z).exp();
            }
        }
        self.current
    }
}

/// Run one simulation tick loop. Per tick: advance the reference price,
/// level the pool via arbitrage, apply the optional noise trade, then mark
/// pool value, hold value, and realized impermanent loss.
pub fn run_simulation(config: &SimConfig) -> Result<SimRun> {
    let pool0 = PoolState::try_from(config.pool.clone())?;
    if pool0.reserves().len() != 2 {
        return Err(AmmError::ConfigInvalid(
            "the simulator drives two-asset constant-product pools".into(),
        ));
    }
    let base = pool0.reserves()[0].asset.clone();
    let quote = pool0.reserves()[1].asset.clone();
    if let Some(noise) = &config.noise {
        if !(noise.min_fraction >= 0.0
            && noise.max_fraction >= noise.min_fraction
            && noise.max_fraction < 1.0)
        {
            return Err(AmmError::ConfigInvalid(
                "noise fractions must satisfy 0 <= min <= max < 1".into(),
            ));
        }
    }

    let mut path = PricePath::new(&config.price_process, config.seed)?;
    let mut noise_rng = ChaCha8Rng::seed_from_u64(config.seed ^ NOISE_STREAM_SALT);

    let entry_reserves: Vec<f64> = pool0.reserves().iter().map(|r| r.amount).collect();
    let total_shares = mint_shares(&[], &entry_reserves, 0.0)?;
    let lp = LpPosition {
        shares: total_shares,
        entry_reserves: entry_reserves.clone(),
        entry_price: path.current,
    };

    let mut pool = pool0;
    let mut events = Vec::new();
    let mut summary = Vec::new();
    let mut fees_cum = 0.0;
    // Signed agent inventories for the conservation ledger.
    let mut agents_base = 0.0;
    let mut agents_quote = 0.0;

    events.push(SimEvent {
        tick: 0,
        kind: SimEventKind::LpDeposit {
            amounts: entry_reserves.clone(),
            shares: total_shares,
        },
    });
    let mark = |tick: u64,
                pool: &PoolState,
                ref_price: f64,
                fees_cum: f64,
                events: &mut Vec<SimEvent>,
                summary: &mut Vec<SummaryRow>|
     -> Result<()> {
        let price = Price::new(ref_price)?;
        let pool_value = pool_value_in_quote(pool, price)?;
        let hold_value = entry_reserves[0] * ref_price + entry_reserves[1];
        let il_pct = (pool_value - hold_value) / hold_value * 100.0;
        events.push(SimEvent {
            tick,
            kind: SimEventKind::Mark {
                ref_price,
                pool_value,
                hold_value,
                il_pct,
                fees_cum,
                invariant: pool.invariant_value(),
            },
        });
        summary.push(SummaryRow {
            tick,
            ref_price,
            pool_value,
            hold_value,
            il_pct,
            fees_cum,
        });
        Ok(())
    };
    mark(0, &pool, path.current, fees_cum, &mut events, &mut summary)?;

    for tick in 1..=config.ticks {
        let ref_price = path.advance();

        let trade = arbitrage_to_price(&pool, Price::new(ref_price)?)?;
        if !trade.is_null() {
            agents_base -= trade.base_delta;
            agents_quote -= trade.quote_delta;
            events.push(SimEvent {
                tick,
                kind: SimEventKind::Arb {
                    ref_price,
                    base_delta: trade.base_delta,
                    quote_delta: trade.quote_delta,
                },
            });
            pool = trade.new_state;
        }

        if let Some(noise) = &config.noise {
            let sell_base: bool = noise_rng.random();
            let fraction = noise_rng.random_range(noise.min_fraction..=noise.max_fraction);
            let (input, output) = if sell_base {
                (base.as_str(), quote.as_str())
            } else {
                (quote.as_str(), base.as_str())
            };
            let size = fraction * pool.reserve(input)?.amount;
            if size > 0.0 {
                let q = swap(&pool, input, output, Amount::new(size)?)?;
                agents_base += if sell_base {
                    -q.input_amount.value()
                } else {
                    q.output_amount.value()
                };
                agents_quote += if sell_base {
                    q.output_amount.value()
                } else {
                    -q.input_amount.value()
                };
                // Fee marked in quote units at the current reference price.
                fees_cum += if sell_base {
                    q.fee_paid.value() * ref_price
                } else {
                    q.fee_paid.value()
                };
                events.push(SimEvent {
                    tick,
                    kind: SimEventKind::Trade {
                        input_asset: input.to_string(),
                        output_asset: output.to_string(),
                        input_amount: q.input_amount.value(),
                        output_amount: q.output_amount.value(),
                        fee_paid: q.fee_paid.value(),
                    },
                });
                pool = q.new_state;
            }
        }

        // Conservation: pool plus agent inventories must equal the initial
        // endowment at every mark.
        let drift_base = pool.reserves()[0].amount + agents_base - entry_reserves[0];
        let drift_quote = pool.reserves()[1].amount + agents_quote - entry_reserves[1];
        debug_assert!(drift_base.abs() < 1e-6 && drift_quote.abs() < 1e-6);

        mark(tick, &pool, ref_price, fees_cum, &mut events, &mut summary)?;
    }

    let final_amounts: Vec<f64> = pool.reserves().iter().map(|r| r.amount).collect();
    let withdraw = redeem_shares(&final_amounts, lp.shares, total_shares)?;
    events.push(SimEvent {
        tick: config.ticks,
        kind: SimEventKind::LpWithdraw {
            amounts: withdraw,
            shares: lp.shares,
        },
    });

    let final_il_pct = summary.last().map(|r| r.il_pct).unwrap_or(0.0);
    Ok(SimRun {
        config: config.clone(),
        events,
        summary,
        final_state: pool,
        lp,
        final_il_pct,
        fees_accrued: fees_cum,
    })
}

/// Mean absolute terminal impermanent loss per volatility level. Each
/// sigma runs `runs_per_sigma` independent simulations with seeds
/// `config.seed + run_index`.
pub fn volatility_sweep(
    config: &SimConfig,
    sigmas: &[f64],
    runs_per_sigma: u32,
) -> Result<Vec<(f64, f64)>> {
    if sigmas.windows(2).any(|w| w[0] > w[1]) || sigmas.iter().any(|&s| s < 0.0) {
        return Err(AmmError::ConfigInvalid(
            "sigmas must be non-negative and sorted".into(),
        ));
    }
    let (s0, mu) = match &config.price_process {
        PriceProcessConfig::Gbm { s0, mu, .. } => (*s0, *mu),
        PriceProcessConfig::CsvReplay { .. } => {
            return Err(AmmError::ConfigInvalid(
                "volatility sweeps need a gbm price process".into(),
            ))
        }
    };
    let mut table = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let mut acc = 0.0;
        for run in 0..runs_per_sigma {
            let mut cfg = config.clone();
            cfg.price_process = PriceProcessConfig::Gbm { s0, mu, sigma };
            cfg.seed = config.seed + run as u64;
            acc += run_simulation(&cfg)?.final_il_pct.abs();
        }
        table.push((sigma, acc / runs_per_sigma as f64));
    }
    Ok(table)
}

/// Write the event log as JSON lines, one event per line, full precision.
pub fn write_events_jsonl(run: &SimRun, path: &Path) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for event in &run.events {
        serde_json::to_writer(&mut out, event)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Write the per-tick summary as CSV with fixed 9-decimal formatting.
pub fn write_summary_csv(run: &SimRun, path: &Path) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "tick,ref_price,pool_value,hold_value,il_pct,fees_cum")?;
    for row in &run.summary {
        writeln!(
            out,
            "{},{:.9},{:.9},{:.9},{:.9},{:.9}",
            row.tick, row.ref_price, row.pool_value, row.hold_value, row.il_pct, row.fees_cum
        )?;
    }
    out.flush()
}

/// Load a replay price series from a file: one positive price per line,
/// optional `price` header, blank lines ignored.
pub fn load_replay_series(path: &Path) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path)
        .map_err(|e| AmmError::ConfigInvalid(format!("cannot open {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for line in std::io::BufReader::new(file).lines() {
        let line = line.map_err(|e| AmmError::ConfigInvalid(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.eq_ignore_ascii_case("price") {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| AmmError::ConfigInvalid(format!("bad price line: {line}")))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(AmmError::ConfigInvalid("empty replay series".into()));
    }
    Ok(values)
}
