//! Outer searches over the marginal degradation cost and the swap price.
//!
//! All searches are exhaustive over caller-supplied grids; nothing assumes the
//! life-cycle value is unimodal. Grid points run in parallel on the current
//! rayon pool and are reported in grid order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lifecycle::{simulate_lifecycle, LifecycleError, LifecycleResult, Scenario};
use crate::scheduler::SwapTerms;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValuationError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid demand curve: {0}")]
    InvalidCurve(String),
    #[error("simulation at mu = {mu} failed: {source}")]
    Point { mu: f64, source: LifecycleError },
}

/// Linear inverse demand for swapped energy: `price = slope * demand + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandPriceCurve {
    pub slope: f64,
    pub intercept: f64,
}

impl DemandPriceCurve {
    pub fn new(slope: f64, intercept: f64) -> Result<Self, ValuationError> {
        let curve = Self { slope, intercept };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<(), ValuationError> {
        if !(self.slope < 0.0 && self.slope.is_finite()) {
            return Err(ValuationError::InvalidCurve(format!(
                "slope must be negative, got {}",
                self.slope
            )));
        }
        if !(self.intercept > 0.0 && self.intercept.is_finite()) {
            return Err(ValuationError::InvalidCurve(format!(
                "intercept must be positive, got {}",
                self.intercept
            )));
        }
        Ok(())
    }
}

/// Daily swap demand (MWh) at `price`; zero at and above the intercept.
pub fn demand_at_price(curve: &DemandPriceCurve, price: f64) -> f64 {
    ((price - curve.intercept) / curve.slope).max(0.0)
}

/// `start, start + step, ...` up to `end` inclusive.
pub fn range_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, ValuationError> {
    if !(step > 0.0 && start.is_finite() && end.is_finite() && end >= start) {
        return Err(ValuationError::InvalidGrid(format!(
            "range {start}:{end}:{step}"
        )));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// `{0, 5, ..., 100}` $/MWh-throughput.
pub fn default_mdc_grid() -> Vec<f64> {
    range_grid(0.0, 100.0, 5.0).expect("static grid")
}

/// `{0, 10, ..., 200}` $/MWh.
pub fn default_price_grid() -> Vec<f64> {
    range_grid(0.0, 200.0, 10.0).expect("static grid")
}

pub fn validate_grid(grid: &[f64], what: &str) -> Result<(), ValuationError> {
    if grid.is_empty() {
        return Err(ValuationError::InvalidGrid(format!("{what} grid is empty")));
    }
    if grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(ValuationError::InvalidGrid(format!(
            "{what} grid has negative or non-finite values"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ValuationError::InvalidGrid(format!(
            "{what} grid must be strictly increasing"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdcPoint {
    pub mu: f64,
    pub lb_star: f64,
    pub abu: f64,
    pub days_lived: usize,
    pub arbitrage_revenue: f64,
    pub reserve_revenue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdcSweepResult {
    pub grid: Vec<MdcPoint>,
    pub mu_star: f64,
    pub lb_at_star: f64,
    /// Full trajectories in grid order.
    #[serde(skip)]
    pub runs: Vec<LifecycleResult>,
}

impl MdcSweepResult {
    pub fn star_run(&self) -> &LifecycleResult {
        let idx = self
            .grid
            .iter()
            .position(|p| p.mu == self.mu_star)
            .expect("mu_star comes from the grid");
        &self.runs[idx]
    }
}

/// First index of the maximum; later points must be strictly larger to win.
fn argmax_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

pub fn optimize_mdc(
    scenario: &Scenario<'_>,
    grid: &[f64],
) -> Result<MdcSweepResult, ValuationError> {
    validate_grid(grid, "MDC")?;
    let runs: Vec<LifecycleResult> = grid
        .par_iter()
        .map(|&mu| {
            simulate_lifecycle(scenario, mu).map_err(|source| ValuationError::Point { mu, source })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_, _>>()?;
    let points: Vec<MdcPoint> = runs
        .iter()
        .map(|r| MdcPoint {
            mu: r.mu,
            lb_star: r.lb_star,
            abu: r.abu,
            days_lived: r.days_lived,
            arbitrage_revenue: r.arbitrage_revenue,
            reserve_revenue: r.reserve_revenue,
        })
        .collect();
    let star = argmax_first(points.iter().map(|p| p.lb_star));
    Ok(MdcSweepResult {
        mu_star: points[star].mu,
        lb_at_star: points[star].lb_star,
        grid: points,
        runs,
    })
}

/// Re-sweeps `[mu* - gap, mu* + gap]` at `step`, where `gap` is the larger
/// coarse spacing next to `mu*`. The bracket is clamped to the coarse grid's
/// range and always contains `mu*` itself.
pub fn refine_mdc(
    coarse: &MdcSweepResult,
    scenario: &Scenario<'_>,
    step: f64,
) -> Result<MdcSweepResult, ValuationError> {
    let mus: Vec<f64> = coarse.grid.iter().map(|p| p.mu).collect();
    validate_grid(&mus, "coarse MDC")?;
    let idx = mus
        .iter()
        .position(|&m| m == coarse.mu_star)
        .ok_or_else(|| ValuationError::InvalidGrid("mu_star not on the coarse grid".into()))?;
    let left = idx.checked_sub(1).map(|i| mus[idx] - mus[i]);
    let right = mus.get(idx + 1).map(|m| m - mus[idx]);
    let gap = match (left, right) {
        (Some(l), Some(r)) => l.max(r),
        (Some(g), None) | (None, Some(g)) => g,
        (None, None) => {
            return Err(ValuationError::InvalidGrid(
                "refinement needs at least two coarse points".into(),
            ))
        }
    };
    if !(step > 0.0 && step < gap) {
        return Err(ValuationError::InvalidGrid(format!(
            "refinement step {step} must lie in (0, {gap})"
        )));
    }
    let lo = (coarse.mu_star - gap).max(0.0).max(mus[0]);
    let hi = (coarse.mu_star + gap).min(mus[mus.len() - 1]);
    let below = ((coarse.mu_star - lo) / step + 1e-9).floor() as i64;
    let above = ((hi - coarse.mu_star) / step + 1e-9).floor() as i64;
    let fine: Vec<f64> = (-below..=above)
        .map(|i| coarse.mu_star + i as f64 * step)
        .collect();
    optimize_mdc(scenario, &fine)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapPricePoint {
    pub swap_price: f64,
    pub daily_swap_cap: f64,
    pub mu_star: f64,
    pub lb_star: f64,
    pub abu: f64,
    pub days_lived: usize,
}

fn price_point(
    scenario: &Scenario<'_>,
    price: f64,
    cap: f64,
    mdc_grid: &[f64],
) -> Result<(SwapPricePoint, MdcSweepResult), ValuationError> {
    let priced = Scenario {
        swap: SwapTerms {
            swap_price: price,
            daily_swap_cap: cap,
            labor_cost: scenario.swap.labor_cost,
        },
        ..*scenario
    };
    let sweep = optimize_mdc(&priced, mdc_grid)?;
    let star = sweep.star_run();
    let point = SwapPricePoint {
        swap_price: price,
        daily_swap_cap: cap,
        mu_star: sweep.mu_star,
        lb_star: sweep.lb_at_star,
        abu: star.abu,
        days_lived: star.days_lived,
    };
    Ok((point, sweep))
}

/// Re-optimizes the MDC at every swap price with a fixed daily swap cap.
pub fn sweep_swap_price(
    scenario: &Scenario<'_>,
    price_grid: &[f64],
    fixed_daily_cap: f64,
    mdc_grid: &[f64],
) -> Result<Vec<SwapPricePoint>, ValuationError> {
    validate_grid(price_grid, "price")?;
    validate_grid(mdc_grid, "MDC")?;
    if !(fixed_daily_cap >= 0.0 && fixed_daily_cap.is_finite()) {
        return Err(ValuationError::InvalidGrid(
            "daily swap cap must be non-negative".into(),
        ));
    }
    price_grid
        .iter()
        .map(|&p| price_point(scenario, p, fixed_daily_cap, mdc_grid).map(|(pt, _)| pt))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePriceResult {
    pub curve: DemandPriceCurve,
    pub price_star: f64,
    pub demand_star: f64,
    pub mu_star: f64,
    pub lb_star: f64,
    pub candidates: Vec<SwapPricePoint>,
}

/// Picks the swap price maximizing life-cycle value when daily demand follows
/// `curve`; ties go to the lower price.
pub fn optimize_price_for_curve(
    scenario: &Scenario<'_>,
    curve: &DemandPriceCurve,
    price_grid: &[f64],
    mdc_grid: &[f64],
) -> Result<CurvePriceResult, ValuationError> {
    curve.validate()?;
    validate_grid(price_grid, "price")?;
    validate_grid(mdc_grid, "MDC")?;
    let candidates: Vec<SwapPricePoint> = price_grid
        .iter()
        .map(|&p| price_point(scenario, p, demand_at_price(curve, p), mdc_grid).map(|(pt, _)| pt))
        .collect::<Result<_, _>>()?;
    let best = candidates[argmax_first(candidates.iter().map(|c| c.lb_star))];
    Ok(CurvePriceResult {
        curve: *curve,
        price_star: best.swap_price,
        demand_star: best.daily_swap_cap,
        mu_star: best.mu_star,
        lb_star: best.lb_star,
        candidates,
    })
}
