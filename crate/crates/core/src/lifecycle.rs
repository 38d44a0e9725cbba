//! Day-by-day life-cycle simulation under a fixed marginal degradation cost.
//!
//! Each day is scheduled with the degradation cost inflated to that year's
//! terms, the realized throughput is charged against the cycle-life budget,
//! and the day's profit is discounted into the life-cycle value. The run stops
//! on the first day the budget is spent.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::HourlyPriceSeries;
use crate::scheduler::{solve_day, BatterySpec, DayInput, SchedulerError, SwapTerms};

pub const DAYS_PER_YEAR: usize = 365;

/// Relative slack when testing whether the throughput budget is spent, so
/// that a budget reached exactly by repeated calendar fade is not missed by
/// rounding.
const BUDGET_REL_TOL: f64 = 1e-9;
/// Net profits above `-NET_PROFIT_TOL` count as non-negative.
const NET_PROFIT_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LifecycleError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("day {day}: {source}")]
    Day { day: usize, source: SchedulerError },
    #[error("throughput budget must be positive, got {0}")]
    ZeroBudget(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EconomicParams {
    pub discount_rate: f64,
    /// Fixed O&M, $ per kW of power capacity per year.
    pub fixed_om_per_kw_year: f64,
    pub horizon_cap_years: u32,
    /// Count the degradation cost as a cash outflow in yearly net profit.
    #[serde(default)]
    pub include_mdc_in_cashflow: bool,
}

impl Default for EconomicParams {
    fn default() -> Self {
        Self {
            discount_rate: 0.07,
            fixed_om_per_kw_year: 0.0,
            horizon_cap_years: 30,
            include_mdc_in_cashflow: false,
        }
    }
}

impl EconomicParams {
    pub fn validate(&self) -> Result<(), LifecycleError> {
        if !(self.discount_rate >= 0.0 && self.discount_rate.is_finite()) {
            return Err(LifecycleError::InvalidParams(
                "discount rate must be non-negative".into(),
            ));
        }
        if !(self.fixed_om_per_kw_year >= 0.0 && self.fixed_om_per_kw_year.is_finite()) {
            return Err(LifecycleError::InvalidParams(
                "fixed O&M must be non-negative".into(),
            ));
        }
        if self.horizon_cap_years < 1 {
            return Err(LifecycleError::InvalidParams(
                "horizon cap must be at least one year".into(),
            ));
        }
        Ok(())
    }

    /// `(1 + r)^-κ` with `κ = floor(day / 365)`.
    pub fn discount_factor(&self, day_index: usize) -> f64 {
        (1.0 + self.discount_rate).powi(-(year_number(day_index) as i32))
    }
}

/// Zero-based year number of a day.
pub fn year_number(day_index: usize) -> usize {
    day_index / DAYS_PER_YEAR
}

/// Lifetime throughput budget: charge and discharge of every full cycle both
/// count, so `D = cycles * 2 * capacity`.
pub fn total_budget(spec: &BatterySpec) -> f64 {
    spec.cycle_life * 2.0 * spec.energy_capacity_mwh
}

/// Calendar fade expressed as throughput per day: the share of the usable
/// fade range lost per year, times the budget, spread over 365 days.
pub fn calendar_throughput_per_day(spec: &BatterySpec) -> f64 {
    total_budget(spec) * (spec.calendar_fade_per_year / (1.0 - spec.eol_capacity_fraction))
        / DAYS_PER_YEAR as f64
}

/// Life-cycle MDC restated in the terms of the year containing `day_index`.
pub fn adjusted_mdc(mu: f64, day_index: usize, econ: &EconomicParams) -> f64 {
    mu * (1.0 + econ.discount_rate).powi(year_number(day_index) as i32)
}

/// Average benefit of usage: life-cycle value per MWh of throughput budget.
pub fn abu(lb_star: f64, budget: f64) -> Result<f64, LifecycleError> {
    if budget.is_nan() || budget <= 0.0 {
        return Err(LifecycleError::ZeroBudget(budget));
    }
    Ok(lb_star / budget)
}

/// Cumulative throughput against the lifetime budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradationLedger {
    pub cumulative_throughput: f64,
    pub total_budget: f64,
    eol_capacity_fraction: f64,
}

impl DegradationLedger {
    pub fn new(spec: &BatterySpec) -> Self {
        Self {
            cumulative_throughput: 0.0,
            total_budget: total_budget(spec),
            eol_capacity_fraction: spec.eol_capacity_fraction,
        }
    }

    /// Linear in throughput from 1 down to the end-of-life fraction.
    pub fn soh(&self) -> f64 {
        let used = self.cumulative_throughput / self.total_budget;
        (1.0 - (1.0 - self.eol_capacity_fraction) * used).clamp(self.eol_capacity_fraction, 1.0)
    }

    pub fn record(&mut self, throughput: f64) {
        self.cumulative_throughput += throughput;
    }

    pub fn exhausted(&self) -> bool {
        self.cumulative_throughput >= self.total_budget * (1.0 - BUDGET_REL_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    BudgetExhausted,
    HorizonCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DaySummary {
    pub day: usize,
    /// SOH at the start of the day.
    pub soh: f64,
    pub amdc: f64,
    pub discount_factor: f64,
    pub throughput: f64,
    pub cumulative_throughput: f64,
    pub arbitrage_revenue: f64,
    pub swap_revenue: f64,
    pub reserve_revenue: f64,
    pub swap_labor_cost: f64,
    pub degradation_cost: f64,
    pub swapped_energy: f64,
    pub sb_star: f64,
    pub soc_end: f64,
}

impl DaySummary {
    pub fn operating_cash(&self) -> f64 {
        self.arbitrage_revenue + self.swap_revenue + self.reserve_revenue - self.swap_labor_cost
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YearCashFlow {
    /// One-based.
    pub year: usize,
    pub days: usize,
    pub operating_cash: f64,
    pub degradation_cost: f64,
    pub om_cost: f64,
    pub net_profit: f64,
    pub discounted_net: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EolReport {
    pub physical_eol_year: usize,
    pub economic_eol_year: usize,
    pub yearly: Vec<YearCashFlow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifecycleResult {
    pub mu: f64,
    pub lb_star: f64,
    pub abu: f64,
    pub total_budget: f64,
    pub calendar_throughput_per_day: f64,
    pub final_cumulative_throughput: f64,
    pub days_lived: usize,
    pub end_reason: EndReason,
    pub physical_eol_year: usize,
    pub economic_eol_year: usize,
    /// Discounted life-cycle totals.
    pub arbitrage_revenue: f64,
    pub swap_revenue: f64,
    pub reserve_revenue: f64,
    pub swap_labor_cost: f64,
    pub degradation_cost: f64,
    pub yearly: Vec<YearCashFlow>,
    pub soh_series: Vec<f64>,
    pub daily_log: Vec<DaySummary>,
}

/// Inputs shared by every trajectory of a study.
#[derive(Debug, Clone, Copy)]
pub struct Scenario<'a> {
    pub battery: BatterySpec,
    pub economics: EconomicParams,
    pub prices: &'a HourlyPriceSeries,
    pub swap: SwapTerms,
    pub reserve_enabled: bool,
}

impl Scenario<'_> {
    pub fn validate(&self) -> Result<(), LifecycleError> {
        let wrap = |e: SchedulerError| LifecycleError::InvalidParams(e.to_string());
        self.battery.validate().map_err(wrap)?;
        self.swap.validate().map_err(wrap)?;
        self.economics.validate()
    }
}

pub fn simulate_lifecycle(
    scenario: &Scenario<'_>,
    mu: f64,
) -> Result<LifecycleResult, LifecycleError> {
    scenario.validate()?;
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(LifecycleError::InvalidParams(format!(
            "MDC must be non-negative, got {mu}"
        )));
    }
    let spec = &scenario.battery;
    let econ = &scenario.economics;
    let calendar = calendar_throughput_per_day(spec);
    let mut ledger = DegradationLedger::new(spec);
    let max_days = DAYS_PER_YEAR * econ.horizon_cap_years as usize;

    let mut soc = 0.0_f64;
    let mut lb_star = 0.0;
    let mut totals = [0.0_f64; 5];
    let mut soh_series = Vec::new();
    let mut daily_log = Vec::new();
    let mut end_reason = EndReason::HorizonCap;

    for day in 0..max_days {
        let soh = ledger.soh();
        let capacity_now = soh * spec.energy_capacity_mwh;
        soc = soc.clamp(0.0, capacity_now);
        let amdc = adjusted_mdc(mu, day, econ);
        let prices = scenario.prices.day(day);
        let input = DayInput {
            battery: *spec,
            lmp: prices.lmp.to_vec(),
            reserve_price: prices.reserve.to_vec(),
            amdc,
            swap: scenario.swap,
            soc_start: soc,
            capacity_now,
            calendar_throughput: calendar,
            reserve_enabled: scenario.reserve_enabled,
        };
        let schedule = solve_day(&input).map_err(|source| LifecycleError::Day { day, source })?;
        let delta = econ.discount_factor(day);
        lb_star += delta * schedule.sb_star;
        for (acc, v) in totals.iter_mut().zip([
            schedule.arbitrage_revenue,
            schedule.swap_revenue,
            schedule.reserve_revenue,
            schedule.swap_labor_cost,
            schedule.degradation_cost,
        ]) {
            *acc += delta * v;
        }
        ledger.record(schedule.throughput_today);
        soc = schedule.soc_end();
        soh_series.push(soh);
        daily_log.push(DaySummary {
            day,
            soh,
            amdc,
            discount_factor: delta,
            throughput: schedule.throughput_today,
            cumulative_throughput: ledger.cumulative_throughput,
            arbitrage_revenue: schedule.arbitrage_revenue,
            swap_revenue: schedule.swap_revenue,
            reserve_revenue: schedule.reserve_revenue,
            swap_labor_cost: schedule.swap_labor_cost,
            degradation_cost: schedule.degradation_cost,
            swapped_energy: schedule.hours.iter().map(|h| h.swap_out).sum(),
            sb_star: schedule.sb_star,
            soc_end: soc,
        });
        if ledger.exhausted() {
            end_reason = EndReason::BudgetExhausted;
            break;
        }
    }

    let budget = ledger.total_budget;
    let mut result = LifecycleResult {
        mu,
        lb_star,
        abu: abu(lb_star, budget)?,
        total_budget: budget,
        calendar_throughput_per_day: calendar,
        final_cumulative_throughput: ledger.cumulative_throughput,
        days_lived: daily_log.len(),
        end_reason,
        physical_eol_year: 0,
        economic_eol_year: 0,
        arbitrage_revenue: totals[0],
        swap_revenue: totals[1],
        reserve_revenue: totals[2],
        swap_labor_cost: totals[3],
        degradation_cost: totals[4],
        yearly: Vec::new(),
        soh_series,
        daily_log,
    };
    let eol = eol_analysis(&result, spec, econ);
    result.physical_eol_year = eol.physical_eol_year;
    result.economic_eol_year = eol.economic_eol_year;
    result.yearly = eol.yearly;
    Ok(result)
}

/// Yearly cash flows and end-of-life years for a finished trajectory.
///
/// Operating cash is market and swap revenue net of labor; degradation cost
/// is excluded unless `include_mdc_in_cashflow` is set. O&M in a partial
/// final year is prorated by days elapsed. The economic end of life is the
/// last year before the first year with negative net profit, or the physical
/// end of life when no such year exists.
pub fn eol_analysis(
    result: &LifecycleResult,
    spec: &BatterySpec,
    econ: &EconomicParams,
) -> EolReport {
    let om_per_year = econ.fixed_om_per_kw_year * spec.power_limit_mw * 1000.0;
    let mut yearly: Vec<YearCashFlow> = Vec::new();
    for summary in &result.daily_log {
        let year = year_number(summary.day) + 1;
        if yearly.last().map(|y| y.year) != Some(year) {
            yearly.push(YearCashFlow {
                year,
                days: 0,
                operating_cash: 0.0,
                degradation_cost: 0.0,
                om_cost: 0.0,
                net_profit: 0.0,
                discounted_net: 0.0,
            });
        }
        let y = yearly.last_mut().expect("pushed above");
        y.days += 1;
        y.operating_cash += summary.operating_cash();
        y.degradation_cost += summary.degradation_cost;
    }
    for y in &mut yearly {
        y.om_cost = om_per_year * y.days as f64 / DAYS_PER_YEAR as f64;
        y.net_profit = y.operating_cash - y.om_cost;
        if econ.include_mdc_in_cashflow {
            y.net_profit -= y.degradation_cost;
        }
        y.discounted_net = y.net_profit * econ.discount_factor((y.year - 1) * DAYS_PER_YEAR);
    }

    let physical_eol_year = result.days_lived.saturating_sub(1) / DAYS_PER_YEAR + 1;
    let economic_eol_year = yearly
        .iter()
        .find(|y| y.net_profit < -NET_PROFIT_TOL)
        .map_or(physical_eol_year, |y| y.year - 1);
    EolReport {
        physical_eol_year,
        economic_eol_year,
        yearly,
    }
}
