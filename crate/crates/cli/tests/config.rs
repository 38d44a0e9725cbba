use proptest::prelude::*;
use swapval_cli::{CliError, EconomicsConfig, Flags, Grids, PriceSource, ScenarioConfig};
use swapval_core::{BatterySpec, ColumnSchema, DemandPriceCurve, PricePattern, SwapTerms};

#[test]
fn paper_defaults_match_reference_station() {
    let cfg = ScenarioConfig::paper_defaults();
    assert_eq!(cfg.battery, BatterySpec::reference_station());
    assert_eq!(cfg.economics.discount_rate, 0.07);
    assert_eq!(cfg.swap.labor_cost, 10.0);
    assert_eq!(cfg.grids.mdc_grid.len(), 21);
    assert_eq!(cfg.grids.price_grid.last(), Some(&200.0));
    cfg.validate().unwrap();
    assert_eq!(ScenarioConfig::load("paper-defaults").unwrap(), cfg);
}

#[test]
fn unknown_fields_rejected() {
    let mut value: serde_json::Value =
        serde_json::from_str(&ScenarioConfig::paper_defaults().to_json()).unwrap();
    value["battery"]["voltage"] = 800.into();
    assert!(matches!(
        ScenarioConfig::from_json(&value.to_string()),
        Err(CliError::Config(_))
    ));
}

#[test]
fn missing_price_file_is_data_error() {
    let mut cfg = ScenarioConfig::paper_defaults();
    cfg.prices = PriceSource::File {
        path: "/definitely/missing.csv".into(),
        columns: ColumnSchema::default(),
    };
    let err = cfg.validate().unwrap_err();
    assert!(matches!(err, CliError::Data(_)));
    assert!(err.to_string().contains("/definitely/missing.csv"));
}

#[test]
fn nested_invariants_checked() {
    let mut cfg = ScenarioConfig::paper_defaults();
    cfg.battery.efficiency = 1.5;
    assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
    let mut cfg = ScenarioConfig::paper_defaults();
    cfg.grids.mdc_grid = vec![5.0, 5.0];
    assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
    let mut cfg = ScenarioConfig::paper_defaults();
    cfg.demand_curves = vec![DemandPriceCurve {
        slope: 2.0,
        intercept: 10.0,
    }];
    assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        Just(0.0),
        any::<f64>().prop_filter("finite", |v| v.is_finite())
    ]
}

fn pattern() -> impl Strategy<Value = PricePattern> {
    prop_oneof![
        finite().prop_map(|level| PricePattern::Flat { level }),
        (finite(), finite(), 0..24usize).prop_map(|(low, high, split_hour)| {
            PricePattern::TwoLevel {
                low,
                high,
                split_hour,
            }
        }),
        (finite(), finite(), finite()).prop_map(|(mean, amplitude, noise)| {
            PricePattern::DailySine {
                mean,
                amplitude,
                noise,
            }
        }),
    ]
}

fn prices() -> impl Strategy<Value = PriceSource> {
    prop_oneof![
        (
            "[a-z/._ -]{1,30}",
            "[a-z_]{1,8}",
            "[a-z_]{1,8}",
            "[a-z_]{1,8}"
        )
            .prop_map(|(path, hour, lmp, reserve)| PriceSource::File {
                path: path.into(),
                columns: ColumnSchema { hour, lmp, reserve },
            }),
        (pattern(), any::<i64>(), any::<u64>(), finite()).prop_map(
            |(pattern, days, seed, reserve_price)| PriceSource::Synthetic {
                pattern,
                days,
                seed,
                reserve_price
            }
        ),
    ]
}

prop_compose! {
    fn config()(
        b in prop::array::uniform7(finite()),
        e in (finite(), finite(), any::<u32>()),
        s in (finite(), finite(), finite()),
        curves in prop::collection::vec((finite(), finite()), 0..4),
        prices in prices(),
        flags in (any::<bool>(), any::<bool>()),
        mdc_grid in prop::collection::vec(finite(), 0..30),
        price_grid in prop::collection::vec(finite(), 0..30),
    ) -> ScenarioConfig {
        ScenarioConfig {
            battery: BatterySpec {
                energy_capacity_mwh: b[0],
                power_limit_mw: b[1],
                efficiency: b[2],
                self_discharge: b[3],
                cycle_life: b[4],
                eol_capacity_fraction: b[5],
                calendar_fade_per_year: b[6],
            },
            economics: EconomicsConfig {
                discount_rate: e.0,
                fixed_om_per_kw_year: e.1,
                horizon_cap_years: e.2,
            },
            swap: SwapTerms { swap_price: s.0, daily_swap_cap: s.1, labor_cost: s.2 },
            demand_curves: curves
                .into_iter()
                .map(|(slope, intercept)| DemandPriceCurve { slope, intercept })
                .collect(),
            prices,
            flags: Flags { reserve_enabled: flags.0, include_mdc_in_cashflow: flags.1 },
            grids: Grids { mdc_grid, price_grid },
        }
    }
}

proptest! {
    #[test]
    fn config_round_trip(cfg in config()) {
        let text = cfg.to_json();
        prop_assert_eq!(ScenarioConfig::from_json(&text).unwrap(), cfg);
    }
}
