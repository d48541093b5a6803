//! Derive the trading curve implied by a pricing rule `p(x, y) = -dy/dx`
//! and check candidate closed-form invariants along it.
//!
//! The integrator is a fixed-step classical 4th-order scheme; outputs are
//! fully deterministic for a given rule, start point, and step count.

use crate::error::{AmmError, Result};
use crate::types::Price;

pub const DEFAULT_STEPS: usize = 10_000;

/// A sampled integral curve of a pricing rule. `x` is strictly increasing;
/// `y` strictly decreasing for positive rules.
#[derive(Debug, Clone)]
pub struct CurveSample {
    points: Vec<(f64, f64)>,
    domain_exit: bool,
}

impl CurveSample {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// True when integration stopped early because `y` was about to cross
    /// zero (e.g. constant-sum exhaustion).
    pub fn domain_exit(&self) -> bool {
        self.domain_exit
    }

    pub fn start(&self) -> (f64, f64) {
        self.points[0]
    }

    pub fn end(&self) -> (f64, f64) {
        *self.points.last().expect("sample is never empty")
    }
}

fn eval_rule(rule: &impl Fn(f64, f64) -> f64, x: f64, y: f64) -> Result<f64> {
    let p = rule(x, y);
    if !p.is_finite() || p <= 0.0 {
        return Err(AmmError::NonFiniteRule { x, y });
    }
    Ok(p)
}

/// Integrate `dy/dx = -p(x, y)` from `(x0, y0)` to `x_end` with `steps`
/// fixed RK4 steps. Returns a truncated sample (flagged `domain_exit`)
/// instead of erroring when `y` would leave the positive domain.
pub fn derive_curve(
    rule: impl Fn(f64, f64) -> f64,
    start: (f64, f64),
    x_end: f64,
    steps: usize,
) -> Result<CurveSample> {
    let (x0, y0) = start;
    if !(x0 > 0.0 && y0 > 0.0 && x_end > x0) || steps < 2 {
        return Err(AmmError::ConfigInvalid(
            "need x0 > 0, y0 > 0, x_end > x0, steps >= 2".into(),
        ));
    }
    let h = (x_end - x0) / steps as f64;
    let mut points = Vec::with_capacity(steps + 1);
    points.push((x0, y0));
    let mut y = y0;
    for i in 0..steps {
        let x = x0 + i as f64 * h;
        // Truncate (rather than error) if any stage leaves the positive
        // domain, so exhaustion is observable data.
        let step = (|| -> Result<Option<f64>> {
            let k1 = -eval_rule(&rule, x, y)?;
            let y2 = y + 0.5 * h * k1;
            if y2 <= 0.0 {
                return Ok(None);
            }
            let k2 = -eval_rule(&rule, x + 0.5 * h, y2)?;
            let y3 = y + 0.5 * h * k2;
            if y3 <= 0.0 {
                return Ok(None);
            }
            let k3 = -eval_rule(&rule, x + 0.5 * h, y3)?;
            let y4 = y + h * k3;
            if y4 <= 0.0 {
                return Ok(None);
            }
            let k4 = -eval_rule(&rule, x + h, y4)?;
            let y_next = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            Ok((y_next > 0.0).then_some(y_next))
        })()?;
        match step {
            Some(y_next) => {
                y = y_next;
                points.push((x0 + (i + 1) as f64 * h, y));
            }
            None => {
                return Ok(CurveSample {
                    points,
                    domain_exit: true,
                })
            }
        }
    }
    Ok(CurveSample {
        points,
        domain_exit: false,
    })
}

/// Max relative deviation of `candidate(x, y)` from its value at the start
/// of the sample. Small values mean the candidate is (numerically) an
/// invariant of the sampled curve.
pub fn check_invariant_constancy(
    sample: &CurveSample,
    candidate: impl Fn(f64, f64) -> f64,
) -> f64 {
    let (x0, y0) = sample.start();
    let reference = candidate(x0, y0);
    sample
        .points()
        .iter()
        .map(|&(x, y)| (candidate(x, y) - reference).abs() / reference.abs())
        .fold(0.0, f64::max)
}

/// Price implied by the sampled curve at `x`: the negated slope of the
/// parabola through the three nearest sample points, evaluated at `x`.
/// Reduces to a central finite difference at interior sample nodes.
pub fn implied_price(sample: &CurveSample, x: f64) -> Result<Price> {
    let pts = sample.points();
    let (x_first, _) = sample.start();
    let (x_last, _) = sample.end();
    if x < x_first || x > x_last || pts.len() < 3 {
        return Err(AmmError::OutOfRange(x));
    }
    let h = (x_last - x_first) / (pts.len() - 1) as f64;
    let i = (((x - x_first) / h).round() as usize).clamp(1, pts.len() - 2);
    let (x0, y0) = pts[i - 1];
    let (x1, y1) = pts[i];
    let (x2, y2) = pts[i + 1];
    let dydx = y0 * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    Price::new(-dydx)
}
