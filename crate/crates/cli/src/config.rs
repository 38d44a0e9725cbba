//! Scenario configuration: one JSON document per study.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swapval_core::{
    load_price_series, synth_price_series, validate_grid, BatterySpec, ColumnSchema,
    DemandPriceCurve, EconomicParams, HourlyPriceSeries, PricePattern, SwapTerms,
};

use crate::error::CliError;

pub const PAPER_DEFAULTS: &str = "paper-defaults";
const PAPER_DEFAULTS_JSON: &str = include_str!("../presets/paper-defaults.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub battery: BatterySpec,
    pub economics: EconomicsConfig,
    pub swap: SwapTerms,
    /// Used by `optimize-curve-price`.
    #[serde(default)]
    pub demand_curves: Vec<DemandPriceCurve>,
    pub prices: PriceSource,
    pub flags: Flags,
    pub grids: Grids,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomicsConfig {
    pub discount_rate: f64,
    pub fixed_om_per_kw_year: f64,
    pub horizon_cap_years: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PriceSource {
    /// CSV with hour, LMP and reserve columns. Relative paths resolve against
    /// the config file's directory.
    File {
        path: PathBuf,
        #[serde(default)]
        columns: ColumnSchema,
    },
    Synthetic {
        pattern: PricePattern,
        days: i64,
        seed: u64,
        /// Flat reserve price, $/MW-h.
        #[serde(default)]
        reserve_price: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    pub reserve_enabled: bool,
    pub include_mdc_in_cashflow: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub mdc_grid: Vec<f64>,
    pub price_grid: Vec<f64>,
}

impl ScenarioConfig {
    pub fn paper_defaults() -> Self {
        serde_json::from_str(PAPER_DEFAULTS_JSON).expect("embedded preset parses")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// `paper-defaults` or a path. File-backed price paths are made absolute
    /// relative to the config's directory.
    pub fn load(spec: &str) -> Result<Self, CliError> {
        if spec == PAPER_DEFAULTS {
            return Ok(Self::paper_defaults());
        }
        let path = Path::new(spec);
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if let PriceSource::File { path: prices, .. } = &mut cfg.prices {
            if prices.is_relative() {
                if let Some(dir) = path.parent() {
                    *prices = dir.join(&*prices);
                }
            }
        }
        Ok(cfg)
    }

    pub fn economic_params(&self) -> EconomicParams {
        EconomicParams {
            discount_rate: self.economics.discount_rate,
            fixed_om_per_kw_year: self.economics.fixed_om_per_kw_year,
            horizon_cap_years: self.economics.horizon_cap_years,
            include_mdc_in_cashflow: self.flags.include_mdc_in_cashflow,
        }
    }

    /// Checks every nested invariant and that a referenced price file exists.
    pub fn validate(&self) -> Result<(), CliError> {
        self.battery.validate()?;
        self.economic_params().validate()?;
        self.swap.validate()?;
        for curve in &self.demand_curves {
            curve.validate()?;
        }
        validate_grid(&self.grids.mdc_grid, "MDC")?;
        validate_grid(&self.grids.price_grid, "price")?;
        match &self.prices {
            PriceSource::File { path, .. } => {
                if !path.is_file() {
                    return Err(CliError::Data(format!(
                        "price file {} does not exist",
                        path.display()
                    )));
                }
            }
            PriceSource::Synthetic {
                days,
                reserve_price,
                ..
            } => {
                if *days < 1 {
                    return Err(CliError::Config(format!(
                        "days must be positive, got {days}"
                    )));
                }
                if !(*reserve_price >= 0.0 && reserve_price.is_finite()) {
                    return Err(CliError::Config(
                        "reserve price must be non-negative".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn load_prices(&self) -> Result<HourlyPriceSeries, CliError> {
        match &self.prices {
            PriceSource::File { path, columns } => Ok(load_price_series(path, columns)?),
            PriceSource::Synthetic {
                pattern,
                days,
                seed,
                reserve_price,
            } => {
                Ok(synth_price_series(pattern, *days, *seed)?
                    .with_constant_reserve(*reserve_price)?)
            }
        }
    }
}
