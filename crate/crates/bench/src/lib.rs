//! Fixtures shared by the benchmarks.

use swapval_core::{
    synth_price_series, BatterySpec, DayInput, EconomicParams, HourlyPriceSeries, PricePattern,
    SwapTerms,
};

pub fn sine_year(seed: u64) -> HourlyPriceSeries {
    let pattern = PricePattern::DailySine {
        mean: 40.0,
        amplitude: 25.0,
        noise: 10.0,
    };
    synth_price_series(&pattern, 365, seed)
        .and_then(|s| s.with_constant_reserve(1.0))
        .expect("valid pattern")
}

pub fn swap_terms() -> SwapTerms {
    SwapTerms {
        swap_price: 120.0,
        daily_swap_cap: 2.7,
        labor_cost: 10.0,
    }
}

pub fn economics() -> EconomicParams {
    EconomicParams::default()
}

/// First day of [`sine_year`] for the reference station.
pub fn reference_day(reserve_enabled: bool) -> DayInput {
    let prices = sine_year(7);
    let day = prices.day(0);
    let battery = BatterySpec::reference_station();
    DayInput {
        battery,
        lmp: day.lmp.to_vec(),
        reserve_price: day.reserve.to_vec(),
        amdc: 35.0,
        swap: swap_terms(),
        soc_start: 0.0,
        capacity_now: battery.energy_capacity_mwh,
        calendar_throughput: 0.0,
        reserve_enabled,
    }
}
