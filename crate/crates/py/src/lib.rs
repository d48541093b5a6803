//! Python bindings: pools, token-swap states, analytics, curve derivation,
//! and the simulator, exposed as the `ammlab` extension module.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ammlab_core::analytics;
use ammlab_core::cfmm;
use ammlab_core::invariant_lab;
use ammlab_core::sim;
use ammlab_core::token_swap;
use ammlab_core::{Amount, FeeParam, PoolState, Price, Side, TokenSwapState};

fn err(e: ammlab_core::AmmError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_side(side: &str) -> PyResult<Side> {
    match side {
        "a" => Ok(Side::A),
        "b" => Ok(Side::B),
        other => Err(PyValueError::new_err(format!(
            "side must be 'a' or 'b', got '{other}'"
        ))),
    }
}

fn parse_direction(direction: &str) -> PyResult<analytics::Direction> {
    match direction {
        "buy" => Ok(analytics::Direction::BuyFromPool),
        "sell" => Ok(analytics::Direction::SellToPool),
        other => Err(PyValueError::new_err(format!(
            "direction must be 'buy' or 'sell', got '{other}'"
        ))),
    }
}

fn quote_to_dict<'py>(py: Python<'py>, q: &cfmm::SwapQuote) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("input_asset", &q.input_asset)?;
    d.set_item("output_asset", &q.output_asset)?;
    d.set_item("input_amount", q.input_amount.value())?;
    d.set_item("output_amount", q.output_amount.value())?;
    d.set_item("fee_paid", q.fee_paid.value())?;
    d.set_item("spot_before", q.spot_before.value())?;
    d.set_item("spot_after", q.spot_after.value())?;
    d.set_item("impact_pct", q.impact_pct())?;
    d.set_item("new_pool", Pool(q.new_state.clone()))?;
    Ok(d)
}

/// A constant-function pool (product, sum, or weighted mean).
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Pool(PoolState);

#[pymethods]
impl Pool {
    /// Build from the pool config JSON schema.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(Pool)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn reserves(&self) -> Vec<(String, f64, f64)> {
        self.0
            .reserves()
            .iter()
            .map(|r| (r.asset.clone(), r.amount, r.weight))
            .collect()
    }

    fn invariant_value(&self) -> f64 {
        self.0.invariant_value()
    }

    fn spot_price(&self, base: &str, quote: &str) -> PyResult<f64> {
        Ok(self.0.spot_price(base, quote).map_err(err)?.value())
    }

    /// Sell `amount` of `input_asset` for `output_asset`; returns the quote
    /// as a dict including the post-trade pool under "new_pool".
    fn swap<'py>(
        &self,
        py: Python<'py>,
        input_asset: &str,
        output_asset: &str,
        amount: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let q = cfmm::swap(
            &self.0,
            input_asset,
            output_asset,
            Amount::new(amount).map_err(err)?,
        )
        .map_err(err)?;
        quote_to_dict(py, &q)
    }

    fn quote_input_for_exact_output(
        &self,
        input_asset: &str,
        output_asset: &str,
        amount: f64,
    ) -> PyResult<f64> {
        Ok(cfmm::quote_input_for_exact_output(
            &self.0,
            input_asset,
            output_asset,
            Amount::new(amount).map_err(err)?,
        )
        .map_err(err)?
        .value())
    }

    /// Level the pool to an external reference price; returns
    /// (base_delta, quote_delta, new_pool).
    fn arbitrage_to_price(&self, target: f64) -> PyResult<(f64, f64, Pool)> {
        let trade =
            analytics::arbitrage_to_price(&self.0, Price::new(target).map_err(err)?).map_err(err)?;
        Ok((trade.base_delta, trade.quote_delta, Pool(trade.new_state)))
    }

    fn average_execution_price(&self, f: f64) -> PyResult<f64> {
        Ok(analytics::average_execution_price(&self.0, f)
            .map_err(err)?
            .value())
    }

    fn __repr__(&self) -> String {
        format!("Pool({})", serde_json::to_string(&self.0).unwrap_or_default())
    }
}

/// A token-swap market: two reserves bridged by an intermediary token.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct TokenSwap(TokenSwapState);

#[pymethods]
impl TokenSwap {
    #[new]
    fn new(reserve_a: f64, reserve_b: f64, supply: f64, rr_a: f64) -> PyResult<Self> {
        TokenSwapState::new(reserve_a, reserve_b, supply, rr_a, 1.0 - rr_a)
            .map(TokenSwap)
            .map_err(err)
    }

    fn reserve(&self, side: &str) -> PyResult<f64> {
        Ok(self.0.reserve(parse_side(side)?))
    }

    fn supply(&self) -> f64 {
        self.0.supply()
    }

    fn intermediary_price(&self, side: &str) -> PyResult<f64> {
        Ok(token_swap::intermediary_price(&self.0, parse_side(side)?).value())
    }

    /// Pay reserve tokens, mint intermediary tokens: (minted, new_state).
    fn purchase(&self, side: &str, amount: f64) -> PyResult<(f64, TokenSwap)> {
        let (minted, state) = token_swap::purchase_intermediary(
            &self.0,
            parse_side(side)?,
            Amount::new(amount).map_err(err)?,
        )
        .map_err(err)?;
        Ok((minted, TokenSwap(state)))
    }

    /// Burn intermediary tokens for reserve tokens: (received, new_state).
    fn sell(&self, side: &str, burn: f64) -> PyResult<(f64, TokenSwap)> {
        let (received, state) =
            token_swap::sell_intermediary(&self.0, parse_side(side)?, burn).map_err(err)?;
        Ok((received.value(), TokenSwap(state)))
    }

    /// Two-step swap through the intermediary: (output, new_state).
    fn swap(&self, input_side: &str, amount: f64) -> PyResult<(f64, TokenSwap)> {
        let q = token_swap::swap_via_intermediary(
            &self.0,
            parse_side(input_side)?,
            Amount::new(amount).map_err(err)?,
        )
        .map_err(err)?;
        Ok((q.output_amount.value(), TokenSwap(q.new_state)))
    }
}

#[pyfunction]
fn price_impact(f: f64, direction: &str) -> PyResult<f64> {
    analytics::price_impact(f, parse_direction(direction)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (xi, gamma = 1.0))]
fn impermanent_loss(xi: f64, gamma: f64) -> PyResult<f64> {
    analytics::impermanent_loss(xi, FeeParam::new(gamma).map_err(err)?).map_err(err)
}

#[pyfunction]
fn depth_loss(f: f64, direction: &str) -> PyResult<f64> {
    analytics::depth_loss(f, parse_direction(direction)?).map_err(err)
}

/// Integrate a pricing rule (a Python callable `p(x, y) -> price`) into its
/// trading curve. Returns (points, domain_exit) where points is a list of
/// (x, y, implied_price).
#[pyfunction]
#[pyo3(signature = (rule, x0, y0, x_end, steps = invariant_lab::DEFAULT_STEPS))]
fn derive_curve(
    py: Python<'_>,
    rule: Py<PyAny>,
    x0: f64,
    y0: f64,
    x_end: f64,
    steps: usize,
) -> PyResult<(Vec<(f64, f64, f64)>, bool)> {
    let eval = |x: f64, y: f64| -> f64 {
        rule.call1(py, (x, y))
            .and_then(|v| v.extract::<f64>(py))
            .unwrap_or(f64::NAN)
    };
    let sample = invariant_lab::derive_curve(eval, (x0, y0), x_end, steps).map_err(err)?;
    let points = sample
        .points()
        .iter()
        .map(|&(x, y)| {
            let price = invariant_lab::implied_price(&sample, x)
                .map(|p| p.value())
                .unwrap_or(f64::NAN);
            (x, y, price)
        })
        .collect();
    Ok((points, sample.domain_exit()))
}

/// Largest relative deviation of `candidate(x, y)` along a derived curve.
#[pyfunction]
fn invariant_deviation(
    py: Python<'_>,
    rule: Py<PyAny>,
    candidate: Py<PyAny>,
    x0: f64,
    y0: f64,
    x_end: f64,
    steps: usize,
) -> PyResult<f64> {
    let eval = |x: f64, y: f64| -> f64 {
        rule.call1(py, (x, y))
            .and_then(|v| v.extract::<f64>(py))
            .unwrap_or(f64::NAN)
    };
    let sample = invariant_lab::derive_curve(eval, (x0, y0), x_end, steps).map_err(err)?;
    Ok(invariant_lab::check_invariant_constancy(&sample, |x, y| {
        candidate
            .call1(py, (x, y))
            .and_then(|v| v.extract::<f64>(py))
            .unwrap_or(f64::NAN)
    }))
}

/// Run a simulation from a config JSON string; returns a dict with the
/// terminal figures and the per-tick summary.
#[pyfunction]
fn run_simulation<'py>(py: Python<'py>, config_json: &str) -> PyResult<Bound<'py, PyDict>> {
    let config: sim::SimConfig =
        serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let run = sim::run_simulation(&config).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("final_il_pct", run.final_il_pct)?;
    d.set_item("fees_accrued", run.fees_accrued)?;
    d.set_item("num_events", run.events.len())?;
    let summary: Vec<(u64, f64, f64, f64, f64, f64)> = run
        .summary
        .iter()
        .map(|r| (r.tick, r.ref_price, r.pool_value, r.hold_value, r.il_pct, r.fees_cum))
        .collect();
    d.set_item("summary", summary)?;
    d.set_item(
        "events_jsonl",
        run.events
            .iter()
            .map(|e| serde_json::to_string(e).unwrap())
            .collect::<Vec<_>>()
            .join("\n"),
    )?;
    Ok(d)
}

/// Mean absolute terminal impermanent loss per sigma:
/// list of (sigma, mean_abs_il_pct).
#[pyfunction]
fn volatility_sweep(config_json: &str, sigmas: Vec<f64>, runs: u32) -> PyResult<Vec<(f64, f64)>> {
    let config: sim::SimConfig =
        serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    sim::volatility_sweep(&config, &sigmas, runs).map_err(err)
}

#[pymodule]
fn ammlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Pool>()?;
    m.add_class::<TokenSwap>()?;
    m.add_function(wrap_pyfunction!(price_impact, m)?)?;
    m.add_function(wrap_pyfunction!(impermanent_loss, m)?)?;
    m.add_function(wrap_pyfunction!(depth_loss, m)?)?;
    m.add_function(wrap_pyfunction!(derive_curve, m)?)?;
    m.add_function(wrap_pyfunction!(invariant_deviation, m)?)?;
    m.add_function(wrap_pyfunction!(run_simulation, m)?)?;
    m.add_function(wrap_pyfunction!(volatility_sweep, m)?)?;
    Ok(())
}
