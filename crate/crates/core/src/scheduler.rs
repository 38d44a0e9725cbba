//! Daily co-optimization of charging, discharging, swapping and reserve.
//!
//! One day is a linear program over hourly decisions. The objective is
//! market revenue (energy arbitrage, swap sales, reserve capacity) minus swap
//! labor minus degradation priced at the adjusted marginal degradation cost
//! `amdc` per MWh of throughput.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{self, LinearProgram, LpError, LpStatus, Relation};

/// Per-MWh throughput penalty that selects the least-throughput optimum.
/// Removed from every reported profit figure.
pub const TIE_BREAK_PENALTY: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchedulerError {
    #[error("invalid day input: {0}")]
    InvalidInput(String),
    #[error("daily LP infeasible although the idle schedule is always feasible")]
    Infeasible,
    #[error("daily LP unbounded")]
    Unbounded,
    #[error("LP solver failed: {0}")]
    Lp(#[from] LpError),
    #[error("schedule inconsistent with input: {0}")]
    Inconsistent(String),
}

/// Physical battery parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatterySpec {
    /// Usable energy at beginning of life, MWh.
    pub energy_capacity_mwh: f64,
    /// Maximum energy charged or discharged in one hour, MWh.
    pub power_limit_mw: f64,
    /// One-way charge/discharge efficiency.
    pub efficiency: f64,
    /// Fraction of stored energy lost per hour.
    pub self_discharge: f64,
    /// Full-equivalent cycles at 100% depth of discharge until end of life.
    pub cycle_life: f64,
    /// Capacity fraction left at physical end of life.
    pub eol_capacity_fraction: f64,
    /// Calendar capacity loss per year, as a fraction of initial capacity.
    pub calendar_fade_per_year: f64,
}

impl BatterySpec {
    /// 2.7 MWh / 2.7 MW station, 95% efficiency, 2000 cycles to 80%, 1%/yr
    /// calendar fade.
    pub fn reference_station() -> Self {
        Self {
            energy_capacity_mwh: 2.7,
            power_limit_mw: 2.7,
            efficiency: 0.95,
            self_discharge: 0.0,
            cycle_life: 2000.0,
            eol_capacity_fraction: 0.8,
            calendar_fade_per_year: 0.01,
        }
    }

    pub fn validate(&self) -> Result<(), SchedulerError> {
        let bad = |msg: &str| Err(SchedulerError::InvalidInput(msg.to_string()));
        if !(self.energy_capacity_mwh > 0.0 && self.energy_capacity_mwh.is_finite()) {
            return bad("energy capacity must be positive");
        }
        if !(self.power_limit_mw >= 0.0 && self.power_limit_mw.is_finite()) {
            return bad("power limit must be non-negative");
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return bad("efficiency must lie in (0, 1]");
        }
        if !(self.self_discharge >= 0.0 && self.self_discharge < 1.0) {
            return bad("self-discharge must lie in [0, 1)");
        }
        if !(self.cycle_life > 0.0 && self.cycle_life.is_finite()) {
            return bad("cycle life must be positive");
        }
        if !(self.eol_capacity_fraction > 0.0 && self.eol_capacity_fraction < 1.0) {
            return bad("end-of-life capacity fraction must lie in (0, 1)");
        }
        if !(self.calendar_fade_per_year >= 0.0 && self.calendar_fade_per_year.is_finite()) {
            return bad("calendar fade must be non-negative");
        }
        Ok(())
    }
}

/// Swap price ($/MWh), daily swap demand cap (MWh) and labor cost per MWh
/// swapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwapTerms {
    pub swap_price: f64,
    pub daily_swap_cap: f64,
    pub labor_cost: f64,
}

impl SwapTerms {
    /// Swap channel closed.
    pub fn none(labor_cost: f64) -> Self {
        Self {
            swap_price: 0.0,
            daily_swap_cap: 0.0,
            labor_cost,
        }
    }

    pub fn validate(&self) -> Result<(), SchedulerError> {
        if !(self.daily_swap_cap >= 0.0 && self.daily_swap_cap.is_finite()) {
            return Err(SchedulerError::InvalidInput(
                "daily swap cap must be non-negative".into(),
            ));
        }
        if !(self.labor_cost >= 0.0 && self.labor_cost.is_finite()) {
            return Err(SchedulerError::InvalidInput(
                "labor cost must be non-negative".into(),
            ));
        }
        if !self.swap_price.is_finite() {
            return Err(SchedulerError::InvalidInput(
                "swap price must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Everything needed to schedule one day. `lmp` and `reserve_price` usually
/// hold 24 hours; shorter horizons are accepted for testing.
#[derive(Debug, Clone, PartialEq)]
pub struct DayInput {
    pub battery: BatterySpec,
    pub lmp: Vec<f64>,
    pub reserve_price: Vec<f64>,
    /// Adjusted marginal degradation cost for this day, $/MWh-throughput.
    pub amdc: f64,
    pub swap: SwapTerms,
    pub soc_start: f64,
    /// SOH-derated energy capacity, MWh.
    pub capacity_now: f64,
    /// Calendar-equivalent throughput charged today, MWh.
    pub calendar_throughput: f64,
    pub reserve_enabled: bool,
}

impl DayInput {
    pub fn hours(&self) -> usize {
        self.lmp.len()
    }

    pub fn validate(&self) -> Result<(), SchedulerError> {
        self.battery.validate()?;
        self.swap.validate()?;
        let bad = |msg: String| Err(SchedulerError::InvalidInput(msg));
        if self.lmp.is_empty() {
            return bad("no hours to schedule".into());
        }
        if self.reserve_price.len() != self.lmp.len() {
            return bad(format!(
                "{} reserve prices for {} hours",
                self.reserve_price.len(),
                self.lmp.len()
            ));
        }
        if self
            .lmp
            .iter()
            .chain(&self.reserve_price)
            .any(|v| !v.is_finite())
        {
            return bad("non-finite price".into());
        }
        if self.reserve_price.iter().any(|&r| r < 0.0) {
            return bad("negative reserve price".into());
        }
        if !(self.amdc >= 0.0 && self.amdc.is_finite()) {
            return bad(format!("amdc must be non-negative, got {}", self.amdc));
        }
        if !(self.capacity_now > 0.0 && self.capacity_now.is_finite()) {
            return bad("capacity must be positive".into());
        }
        if !(self.soc_start >= 0.0 && self.soc_start <= self.capacity_now) {
            return bad(format!(
                "soc_start {} outside [0, {}]",
                self.soc_start, self.capacity_now
            ));
        }
        if !(self.calendar_throughput >= 0.0 && self.calendar_throughput.is_finite()) {
            return bad("calendar throughput must be non-negative".into());
        }
        Ok(())
    }
}

/// Column positions of the daily LP: charge, discharge, swap and SOC blocks of
/// `hours` columns each, then reserve when enabled.
#[derive(Debug, Clone, Copy)]
pub struct VarLayout {
    pub hours: usize,
    pub reserve: bool,
}

impl VarLayout {
    pub fn charge(&self, h: usize) -> usize {
        h
    }
    pub fn discharge(&self, h: usize) -> usize {
        self.hours + h
    }
    pub fn swap(&self, h: usize) -> usize {
        2 * self.hours + h
    }
    pub fn soc(&self, h: usize) -> usize {
        3 * self.hours + h
    }
    pub fn reserve(&self, h: usize) -> Option<usize> {
        self.reserve.then_some(4 * self.hours + h)
    }
    pub fn num_vars(&self) -> usize {
        if self.reserve {
            5 * self.hours
        } else {
            4 * self.hours
        }
    }
}

pub fn build_daily_lp(input: &DayInput) -> Result<LinearProgram, SchedulerError> {
    input.validate()?;
    let b = &input.battery;
    let layout = VarLayout {
        hours: input.hours(),
        reserve: input.reserve_enabled,
    };
    let mu = input.amdc;
    let eta = b.efficiency;
    let keep = 1.0 - b.self_discharge;
    let power = b.power_limit_mw;
    let cap = input.capacity_now;
    // Σ r ≤ cap_day together with r_h ≤ capacity implies this tighter bound.
    let swap_upper = cap.min(input.swap.daily_swap_cap);
    let swap_margin = input.swap.swap_price - input.swap.labor_cost;

    let mut lp = LinearProgram::new(layout.num_vars());
    lp.objective_offset = -mu * input.calendar_throughput;
    for h in 0..layout.hours {
        let price = input.lmp[h];
        let (c, d, r, s) = (
            layout.charge(h),
            layout.discharge(h),
            layout.swap(h),
            layout.soc(h),
        );
        lp.objective[c] = -price - mu - TIE_BREAK_PENALTY;
        lp.objective[d] = price - mu - TIE_BREAK_PENALTY;
        lp.objective[r] = swap_margin - mu - TIE_BREAK_PENALTY;
        lp.set_bounds(c, 0.0, power);
        lp.set_bounds(d, 0.0, power);
        lp.set_bounds(r, 0.0, swap_upper);
        lp.set_bounds(s, 0.0, cap);

        // E_h - keep·E_{h-1} - η c_h + d_h/η + r_h/η = 0 (E_{-1} = soc_start)
        let mut terms = vec![(s, 1.0), (c, -eta), (d, 1.0 / eta), (r, 1.0 / eta)];
        let rhs = if h == 0 {
            keep * input.soc_start
        } else {
            terms.push((layout.soc(h - 1), -keep));
            0.0
        };
        lp.add_row(&terms, Relation::Eq, rhs);

        if let Some(q) = layout.reserve(h) {
            lp.objective[q] = input.reserve_price[h];
            lp.set_bounds(q, 0.0, power);
            lp.add_row(&[(q, 1.0), (d, 1.0)], Relation::Le, power);
            lp.add_row(&[(q, 1.0), (s, -eta)], Relation::Le, 0.0);
        }
    }
    if swap_upper > 0.0 {
        let terms: Vec<(usize, f64)> = (0..layout.hours).map(|h| (layout.swap(h), 1.0)).collect();
        lp.add_row(&terms, Relation::Le, input.swap.daily_swap_cap);
    }
    Ok(lp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourDispatch {
    pub charge: f64,
    pub discharge: f64,
    pub swap_out: f64,
    pub reserve_offer: f64,
    pub soc_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailySchedule {
    pub hours: Vec<HourDispatch>,
    /// Energy arbitrage plus swap sales plus reserve capacity payments.
    pub market_revenue: f64,
    pub arbitrage_revenue: f64,
    pub swap_revenue: f64,
    pub reserve_revenue: f64,
    pub swap_labor_cost: f64,
    pub degradation_cost: f64,
    pub sb_star: f64,
    /// Active throughput plus the calendar term, MWh.
    pub throughput_today: f64,
}

impl DailySchedule {
    pub fn soc_end(&self) -> f64 {
        self.hours.last().map_or(0.0, |h| h.soc_end)
    }

    pub fn active_throughput(&self) -> f64 {
        self.hours
            .iter()
            .map(|h| h.charge + h.discharge + h.swap_out)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfitBreakdown {
    pub arbitrage_revenue: f64,
    pub swap_revenue: f64,
    pub reserve_revenue: f64,
    pub revenue: f64,
    pub labor: f64,
    pub degradation: f64,
    pub sb_star: f64,
}

fn breakdown(hours: &[HourDispatch], input: &DayInput) -> ProfitBreakdown {
    let mut arbitrage = 0.0;
    let mut swapped = 0.0;
    let mut reserve = 0.0;
    let mut active = 0.0;
    for (h, d) in hours.iter().enumerate() {
        arbitrage += input.lmp[h] * (d.discharge - d.charge);
        swapped += d.swap_out;
        reserve += input.reserve_price[h] * d.reserve_offer;
        active += d.charge + d.discharge + d.swap_out;
    }
    let swap_revenue = input.swap.swap_price * swapped;
    let revenue = arbitrage + swap_revenue + reserve;
    let labor = input.swap.labor_cost * swapped;
    let degradation = input.amdc * (active + input.calendar_throughput);
    ProfitBreakdown {
        arbitrage_revenue: arbitrage,
        swap_revenue,
        reserve_revenue: reserve,
        revenue,
        labor,
        degradation,
        sb_star: revenue - labor - degradation,
    }
}

/// Recomputes the profit components from the schedule's quantities and
/// checks them, and the SOC path, against what the schedule reports.
pub fn decompose_profit(
    schedule: &DailySchedule,
    input: &DayInput,
) -> Result<ProfitBreakdown, SchedulerError> {
    if schedule.hours.len() != input.hours() {
        return Err(SchedulerError::Inconsistent(format!(
            "{} scheduled hours for a {}-hour day",
            schedule.hours.len(),
            input.hours()
        )));
    }
    let b = &input.battery;
    let mut prev = input.soc_start;
    for (h, d) in schedule.hours.iter().enumerate() {
        let expected = (1.0 - b.self_discharge) * prev + b.efficiency * d.charge
            - (d.discharge + d.swap_out) / b.efficiency;
        if (expected - d.soc_end).abs() > 1e-6 {
            return Err(SchedulerError::Inconsistent(format!(
                "hour {h}: soc {} but balance gives {expected}",
                d.soc_end
            )));
        }
        prev = d.soc_end;
    }
    let p = breakdown(&schedule.hours, input);
    let checks = [
        ("market_revenue", schedule.market_revenue, p.revenue),
        ("swap_labor_cost", schedule.swap_labor_cost, p.labor),
        ("degradation_cost", schedule.degradation_cost, p.degradation),
        ("sb_star", schedule.sb_star, p.sb_star),
    ];
    for (name, reported, recomputed) in checks {
        if (reported - recomputed).abs() > 1e-6 * recomputed.abs().max(1.0) {
            return Err(SchedulerError::Inconsistent(format!(
                "{name} reported {reported}, recomputed {recomputed}"
            )));
        }
    }
    Ok(p)
}

pub fn solve_day(input: &DayInput) -> Result<DailySchedule, SchedulerError> {
    let lp = build_daily_lp(input)?;
    let sol = lp::solve_lp(&lp, lp::DEFAULT_TOL)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(SchedulerError::Infeasible),
        LpStatus::Unbounded => return Err(SchedulerError::Unbounded),
    }
    let layout = VarLayout {
        hours: input.hours(),
        reserve: input.reserve_enabled,
    };
    let hours: Vec<HourDispatch> = (0..layout.hours)
        .map(|h| HourDispatch {
            charge: sol.x[layout.charge(h)],
            discharge: sol.x[layout.discharge(h)],
            swap_out: sol.x[layout.swap(h)],
            reserve_offer: layout.reserve(h).map_or(0.0, |q| sol.x[q]),
            soc_end: sol.x[layout.soc(h)],
        })
        .collect();
    let p = breakdown(&hours, input);
    let active: f64 = hours
        .iter()
        .map(|d| d.charge + d.discharge + d.swap_out)
        .sum();
    let lp_value = sol.objective_value + TIE_BREAK_PENALTY * active;
    if (lp_value - p.sb_star).abs() > 1e-6 * p.sb_star.abs().max(1.0) {
        return Err(SchedulerError::Inconsistent(format!(
            "LP objective {lp_value} disagrees with profit decomposition {}",
            p.sb_star
        )));
    }
    Ok(DailySchedule {
        hours,
        market_revenue: p.revenue,
        arbitrage_revenue: p.arbitrage_revenue,
        swap_revenue: p.swap_revenue,
        reserve_revenue: p.reserve_revenue,
        swap_labor_cost: p.labor,
        degradation_cost: p.degradation,
        sb_star: p.sb_star,
        throughput_today: active + input.calendar_throughput,
    })
}
