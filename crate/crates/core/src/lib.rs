//! Battery swapping station valuation.
//!
//! - [`market`]: hourly LMP and reserve price series.
//! - [`lp`]: dense bounded-variable simplex plus a brute-force vertex oracle.
//! - [`scheduler`]: the daily charge / discharge / swap / reserve LP.
//! - [`lifecycle`]: day-by-day aging, discounting and end-of-life analysis.
//! - [`valuation`]: grid searches over the degradation cost and swap price.

pub mod lifecycle;
pub mod lp;
pub mod market;
pub mod scheduler;
pub mod valuation;

pub use lifecycle::{
    abu, adjusted_mdc, calendar_throughput_per_day, eol_analysis, simulate_lifecycle, total_budget,
    DaySummary, DegradationLedger, EconomicParams, EndReason, EolReport, LifecycleError,
    LifecycleResult, Scenario, YearCashFlow,
};
pub use market::{
    load_price_series, synth_price_series, write_series, ColumnSchema, HourlyPriceSeries,
    MarketError, PricePattern,
};
pub use scheduler::{
    build_daily_lp, decompose_profit, solve_day, BatterySpec, DailySchedule, DayInput,
    SchedulerError, SwapTerms,
};
pub use valuation::{
    demand_at_price, optimize_mdc, optimize_price_for_curve, range_grid, refine_mdc,
    sweep_swap_price, validate_grid, CurvePriceResult, DemandPriceCurve, MdcPoint, MdcSweepResult,
    SwapPricePoint, ValuationError,
};
