use swapval_core::lifecycle::{EolReport, DAYS_PER_YEAR};
use swapval_core::*;

fn year_of(pattern: PricePattern) -> HourlyPriceSeries {
    synth_price_series(&pattern, 365, 11).unwrap()
}

fn scenario(prices: &HourlyPriceSeries, battery: BatterySpec, swap: SwapTerms) -> Scenario<'_> {
    Scenario {
        battery,
        economics: EconomicParams::default(),
        prices,
        swap,
        reserve_enabled: true,
    }
}

/// Reference station with a short cycle life so whole lives take weeks.
fn short_lived() -> BatterySpec {
    BatterySpec {
        cycle_life: 150.0,
        ..BatterySpec::reference_station()
    }
}

fn spiky() -> HourlyPriceSeries {
    year_of(PricePattern::TwoLevel {
        low: 20.0,
        high: 150.0,
        split_hour: 20,
    })
}

#[test]
fn calendar_only_life() {
    let prices = year_of(PricePattern::Flat { level: 0.0 });
    let sc = scenario(
        &prices,
        BatterySpec::reference_station(),
        SwapTerms::none(10.0),
    );
    let r = simulate_lifecycle(&sc, 0.0).unwrap();
    assert_eq!(r.days_lived, 7300);
    assert_eq!(r.lb_star, 0.0);
    assert_eq!(r.end_reason, EndReason::BudgetExhausted);
    assert_eq!(r.physical_eol_year, 20);

    // a prohibitive MDC changes nothing physically; only the calendar term is charged
    let r = simulate_lifecycle(&sc, 1e6).unwrap();
    assert_eq!(r.days_lived, 7300);
    let q = calendar_throughput_per_day(&sc.battery);
    let expected = -1e6 * q * 7300.0;
    assert!((r.lb_star - expected).abs() <= 1e-9 * expected.abs());
}

#[test]
fn horizon_cap_is_reported() {
    let prices = year_of(PricePattern::Flat { level: 0.0 });
    let mut sc = scenario(
        &prices,
        BatterySpec {
            calendar_fade_per_year: 0.0,
            ..BatterySpec::reference_station()
        },
        SwapTerms::none(10.0),
    );
    sc.economics.horizon_cap_years = 2;
    let r = simulate_lifecycle(&sc, 1e6).unwrap();
    assert_eq!(r.end_reason, EndReason::HorizonCap);
    assert_eq!(r.days_lived, 2 * DAYS_PER_YEAR);
    assert_eq!(r.final_cumulative_throughput, 0.0);
}

#[test]
fn budget_law_discounting_and_soh() {
    let prices = spiky();
    let battery = short_lived();
    let sc = scenario(
        &prices,
        battery,
        SwapTerms {
            swap_price: 120.0,
            daily_swap_cap: 1.0,
            labor_cost: 10.0,
        },
    );
    for mu in [0.0, 20.0, 45.0] {
        let r = simulate_lifecycle(&sc, mu).unwrap();
        let d = total_budget(&battery);
        let q = calendar_throughput_per_day(&battery);
        let max_daily = 24.0 * (2.0 * battery.power_limit_mw + battery.energy_capacity_mwh) + q;
        assert_eq!(r.end_reason, EndReason::BudgetExhausted);
        assert!(r.final_cumulative_throughput >= d * (1.0 - 1e-9));
        assert!(r.final_cumulative_throughput <= d + max_daily);

        let recomputed: f64 = r
            .daily_log
            .iter()
            .map(|s| (1.07f64).powi(-((s.day / 365) as i32)) * s.sb_star)
            .sum();
        assert!((recomputed - r.lb_star).abs() <= 1e-6 * r.lb_star.abs().max(1.0));
        assert_eq!(r.abu, r.lb_star / d);

        assert_eq!(r.soh_series[0], 1.0);
        assert!(r.soh_series.windows(2).all(|w| w[1] <= w[0]));
        let last = *r.soh_series.last().unwrap();
        let one_day_fade = (1.0 - battery.eol_capacity_fraction) * max_daily / d;
        assert!(
            last >= battery.eol_capacity_fraction
                && last - battery.eol_capacity_fraction <= one_day_fade
        );

        // every day's throughput covers at least the calendar term
        assert!(r.daily_log.iter().all(|s| s.throughput >= q - 1e-12));
    }
}

#[test]
fn life_grows_with_mdc() {
    let prices = year_of(PricePattern::TwoLevel {
        low: 10.0,
        high: 90.0,
        split_hour: 12,
    });
    let sc = scenario(&prices, short_lived(), SwapTerms::none(10.0));
    let runs: Vec<_> = (0..=20)
        .map(|i| simulate_lifecycle(&sc, 5.0 * i as f64).unwrap())
        .collect();
    for pair in runs.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        assert!(hi.days_lived >= lo.days_lived, "mu {} -> {}", lo.mu, hi.mu);
        for (a, b) in lo.daily_log.iter().zip(&hi.daily_log) {
            assert!(b.cumulative_throughput <= a.cumulative_throughput + 1e-9);
        }
    }
}

#[test]
fn swapping_shortens_life_at_low_mdc() {
    let prices = spiky();
    let battery = short_lived();
    let with = scenario(
        &prices,
        battery,
        SwapTerms {
            swap_price: 160.0,
            daily_swap_cap: 2.7,
            labor_cost: 10.0,
        },
    );
    let without = scenario(&prices, battery, SwapTerms::none(10.0));
    let a = simulate_lifecycle(&with, 0.0).unwrap();
    let b = simulate_lifecycle(&without, 0.0).unwrap();
    assert!(a.days_lived <= b.days_lived);
    assert!(a.swap_revenue > 0.0);
}

fn eol_for(r: &LifecycleResult, spec: &BatterySpec, om: f64, include_mdc: bool) -> EolReport {
    let econ = EconomicParams {
        fixed_om_per_kw_year: om,
        include_mdc_in_cashflow: include_mdc,
        ..EconomicParams::default()
    };
    eol_analysis(r, spec, &econ)
}

#[test]
fn economic_life_never_exceeds_physical() {
    let prices = year_of(PricePattern::DailySine {
        mean: 40.0,
        amplitude: 25.0,
        noise: 3.0,
    });
    let battery = BatterySpec {
        cycle_life: 600.0,
        ..BatterySpec::reference_station()
    };
    let sc = scenario(&prices, battery, SwapTerms::none(10.0));
    let r = simulate_lifecycle(&sc, 10.0).unwrap();
    assert!(r.physical_eol_year >= 2, "need a multi-year life");

    let zero = eol_for(&r, &battery, 0.0, false);
    assert_eq!(zero.economic_eol_year, zero.physical_eol_year);
    assert!(zero.yearly.iter().all(|y| y.operating_cash >= -1e-6));

    let mut last = zero.economic_eol_year;
    for om in [0.0, 4.0, 8.0, 16.0, 24.0, 30.0, 60.0] {
        let e = eol_for(&r, &battery, om, false);
        assert!(e.economic_eol_year <= e.physical_eol_year);
        assert!(e.economic_eol_year <= last, "economic life grew with O&M");
        last = e.economic_eol_year;
        let with_mdc = eol_for(&r, &battery, om, true);
        assert!(with_mdc.economic_eol_year <= e.economic_eol_year);
    }

    let never = eol_for(&r, &battery, 1e6, false);
    assert_eq!(never.economic_eol_year, 0);

    // partial final year pays prorated O&M
    let e = eol_for(&r, &battery, 16.0, false);
    let final_year = e.yearly.last().unwrap();
    let full = 16.0 * 2.7 * 1000.0;
    assert!((final_year.om_cost - full * final_year.days as f64 / 365.0).abs() < 1e-6);
    assert_eq!(e.yearly.iter().map(|y| y.days).sum::<usize>(), r.days_lived);
}

#[test]
fn invalid_mdc_rejected() {
    let prices = spiky();
    let sc = scenario(&prices, short_lived(), SwapTerms::none(10.0));
    assert!(matches!(
        simulate_lifecycle(&sc, -1.0),
        Err(LifecycleError::InvalidParams(_))
    ));
}

#[test]
fn amdc_and_abu_arithmetic() {
    let econ = EconomicParams::default();
    let mut factor = 1.0;
    for year in 0..30usize {
        for day in [year * 365, year * 365 + 200, year * 365 + 364] {
            let got = adjusted_mdc(35.0, day, &econ);
            assert!((got - 35.0 * factor).abs() <= 1e-12 * got);
        }
        factor *= 1.07;
    }
    assert_eq!(abu(123.0, 10800.0).unwrap(), 123.0 / 10800.0);
}
