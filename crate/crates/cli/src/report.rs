//! JSON and CSV emitters. Field order is fixed by the row structs and floats
//! use shortest round-trip formatting, so identical inputs give identical
//! bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use swapval_core::{
    CurvePriceResult, DaySummary, EndReason, EolReport, LifecycleResult, MdcPoint, MdcSweepResult,
    SwapPricePoint, YearCashFlow,
};

use crate::config::ScenarioConfig;
use crate::error::CliError;

pub struct ReportWriter {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl ReportWriter {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv<T: Serialize>(
        &mut self,
        name: &str,
        rows: impl IntoIterator<Item = T>,
    ) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let io_err = |source: csv::Error| CliError::Write {
            path: path.clone(),
            source: source.into(),
        };
        let mut w = csv::Writer::from_path(&path).map_err(io_err)?;
        for row in rows {
            w.serialize(row).map_err(io_err)?;
        }
        w.flush().map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    pub fn finish(self) -> Vec<PathBuf> {
        self.written
    }
}

/// Everything in a [`LifecycleResult`] except the per-day vectors, which go
/// to CSV.
#[derive(Serialize)]
pub struct LifecycleSummary<'a> {
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
    pub arbitrage_revenue: f64,
    pub swap_revenue: f64,
    pub reserve_revenue: f64,
    pub swap_labor_cost: f64,
    pub degradation_cost: f64,
    pub yearly: &'a [YearCashFlow],
}

impl<'a> From<&'a LifecycleResult> for LifecycleSummary<'a> {
    fn from(r: &'a LifecycleResult) -> Self {
        Self {
            mu: r.mu,
            lb_star: r.lb_star,
            abu: r.abu,
            total_budget: r.total_budget,
            calendar_throughput_per_day: r.calendar_throughput_per_day,
            final_cumulative_throughput: r.final_cumulative_throughput,
            days_lived: r.days_lived,
            end_reason: r.end_reason,
            physical_eol_year: r.physical_eol_year,
            economic_eol_year: r.economic_eol_year,
            arbitrage_revenue: r.arbitrage_revenue,
            swap_revenue: r.swap_revenue,
            reserve_revenue: r.reserve_revenue,
            swap_labor_cost: r.swap_labor_cost,
            degradation_cost: r.degradation_cost,
            yearly: &r.yearly,
        }
    }
}

#[derive(Serialize)]
struct SohRow {
    day: usize,
    soh: f64,
}

#[derive(Serialize)]
struct SohByMuRow {
    mu: f64,
    day: usize,
    soh: f64,
}

#[derive(Serialize)]
struct LifecycleReport<'a> {
    config: &'a ScenarioConfig,
    result: LifecycleSummary<'a>,
}

/// `lifecycle.json`, `soh.csv`, `daily_log.csv`, `yearly.csv`.
pub fn emit_lifecycle(
    w: &mut ReportWriter,
    config: &ScenarioConfig,
    result: &LifecycleResult,
) -> Result<(), CliError> {
    w.json(
        "lifecycle.json",
        &LifecycleReport {
            config,
            result: result.into(),
        },
    )?;
    w.csv("soh.csv", soh_rows(result))?;
    w.csv::<&DaySummary>("daily_log.csv", &result.daily_log)?;
    w.csv::<&YearCashFlow>("yearly.csv", &result.yearly)
}

fn soh_rows(result: &LifecycleResult) -> impl Iterator<Item = SohRow> + '_ {
    result
        .soh_series
        .iter()
        .enumerate()
        .map(|(day, &soh)| SohRow { day, soh })
}

#[derive(Serialize)]
struct MdcSweepReport<'a> {
    config: &'a ScenarioConfig,
    mu_star: f64,
    lb_star: f64,
    abu: f64,
    days_lived: usize,
    grid: &'a [MdcPoint],
    #[serde(skip_serializing_if = "Option::is_none")]
    refined: Option<RefinedReport<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline: Option<BaselineReport<'a>>,
}

#[derive(Serialize)]
struct RefinedReport<'a> {
    mu_star: f64,
    lb_star: f64,
    grid: &'a [MdcPoint],
}

#[derive(Serialize)]
struct BaselineReport<'a> {
    mu_star: f64,
    lb_star: f64,
    abu: f64,
    days_lived: usize,
    grid: &'a [MdcPoint],
}

/// `mdc_sweep.json`, `mdc_sweep.csv`, `soh_by_mu.csv`; plus
/// `mdc_sweep_refined.csv` and `mdc_sweep_baseline.csv` when present.
pub fn emit_mdc_sweep(
    w: &mut ReportWriter,
    config: &ScenarioConfig,
    sweep: &MdcSweepResult,
    refined: Option<&MdcSweepResult>,
    baseline: Option<&MdcSweepResult>,
) -> Result<(), CliError> {
    let star = sweep.star_run();
    w.json(
        "mdc_sweep.json",
        &MdcSweepReport {
            config,
            mu_star: sweep.mu_star,
            lb_star: sweep.lb_at_star,
            abu: star.abu,
            days_lived: star.days_lived,
            grid: &sweep.grid,
            refined: refined.map(|r| RefinedReport {
                mu_star: r.mu_star,
                lb_star: r.lb_at_star,
                grid: &r.grid,
            }),
            baseline: baseline.map(|b| BaselineReport {
                mu_star: b.mu_star,
                lb_star: b.lb_at_star,
                abu: b.star_run().abu,
                days_lived: b.star_run().days_lived,
                grid: &b.grid,
            }),
        },
    )?;
    w.csv::<&MdcPoint>("mdc_sweep.csv", &sweep.grid)?;
    w.csv(
        "soh_by_mu.csv",
        sweep.runs.iter().flat_map(|run| {
            soh_rows(run).map(|r| SohByMuRow {
                mu: run.mu,
                day: r.day,
                soh: r.soh,
            })
        }),
    )?;
    if let Some(r) = refined {
        w.csv::<&MdcPoint>("mdc_sweep_refined.csv", &r.grid)?;
    }
    if let Some(b) = baseline {
        w.csv::<&MdcPoint>("mdc_sweep_baseline.csv", &b.grid)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PriceSweepReport<'a> {
    config: &'a ScenarioConfig,
    daily_swap_cap: f64,
    baseline: BaselinePoint,
    points: &'a [SwapPricePoint],
}

/// Best no-swap operation, for comparison against every price.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BaselinePoint {
    pub mu_star: f64,
    pub lb_star: f64,
    pub abu: f64,
    pub days_lived: usize,
}

impl From<&MdcSweepResult> for BaselinePoint {
    fn from(s: &MdcSweepResult) -> Self {
        Self {
            mu_star: s.mu_star,
            lb_star: s.lb_at_star,
            abu: s.star_run().abu,
            days_lived: s.star_run().days_lived,
        }
    }
}

/// `price_sweep.json`, `price_sweep.csv`.
pub fn emit_price_sweep(
    w: &mut ReportWriter,
    config: &ScenarioConfig,
    daily_swap_cap: f64,
    baseline: BaselinePoint,
    points: &[SwapPricePoint],
) -> Result<(), CliError> {
    w.json(
        "price_sweep.json",
        &PriceSweepReport {
            config,
            daily_swap_cap,
            baseline,
            points,
        },
    )?;
    w.csv("price_sweep.csv", points)
}

#[derive(Serialize)]
struct CurvePriceRow {
    slope: f64,
    intercept: f64,
    price_star: f64,
    demand_star: f64,
    mu_star: f64,
    lb_star: f64,
}

#[derive(Serialize)]
struct CurveCandidateRow {
    slope: f64,
    intercept: f64,
    swap_price: f64,
    demand: f64,
    mu_star: f64,
    lb_star: f64,
    abu: f64,
    days_lived: usize,
}

#[derive(Serialize)]
struct CurvePriceReport<'a> {
    config: &'a ScenarioConfig,
    curves: &'a [CurvePriceResult],
}

/// `curve_prices.json`, `curve_prices.csv`, `curve_candidates.csv`.
pub fn emit_curve_prices(
    w: &mut ReportWriter,
    config: &ScenarioConfig,
    results: &[CurvePriceResult],
) -> Result<(), CliError> {
    w.json(
        "curve_prices.json",
        &CurvePriceReport {
            config,
            curves: results,
        },
    )?;
    w.csv(
        "curve_prices.csv",
        results.iter().map(|r| CurvePriceRow {
            slope: r.curve.slope,
            intercept: r.curve.intercept,
            price_star: r.price_star,
            demand_star: r.demand_star,
            mu_star: r.mu_star,
            lb_star: r.lb_star,
        }),
    )?;
    w.csv(
        "curve_candidates.csv",
        results.iter().flat_map(|r| {
            r.candidates.iter().map(|c| CurveCandidateRow {
                slope: r.curve.slope,
                intercept: r.curve.intercept,
                swap_price: c.swap_price,
                demand: c.daily_swap_cap,
                mu_star: c.mu_star,
                lb_star: c.lb_star,
                abu: c.abu,
                days_lived: c.days_lived,
            })
        }),
    )
}

/// One operation model at one O&M level.
#[derive(Debug, Clone, Serialize)]
pub struct EolCase {
    pub model: &'static str,
    pub om_per_kw_year: f64,
    pub mu: f64,
    pub days_lived: usize,
    pub report: EolReport,
}

#[derive(Serialize)]
struct EolRow {
    model: &'static str,
    om_per_kw_year: f64,
    mu: f64,
    days_lived: usize,
    physical_eol_year: usize,
    economic_eol_year: usize,
}

#[derive(Serialize)]
struct CashFlowRow {
    model: &'static str,
    om_per_kw_year: f64,
    year: usize,
    days: usize,
    operating_cash: f64,
    degradation_cost: f64,
    om_cost: f64,
    net_profit: f64,
    discounted_net: f64,
}

#[derive(Serialize)]
struct EolJson<'a> {
    config: &'a ScenarioConfig,
    cases: &'a [EolCase],
}

/// `eol.json`, `eol.csv`, `eol_cashflows.csv`.
pub fn emit_eol(
    w: &mut ReportWriter,
    config: &ScenarioConfig,
    cases: &[EolCase],
) -> Result<(), CliError> {
    w.json("eol.json", &EolJson { config, cases })?;
    w.csv(
        "eol.csv",
        cases.iter().map(|c| EolRow {
            model: c.model,
            om_per_kw_year: c.om_per_kw_year,
            mu: c.mu,
            days_lived: c.days_lived,
            physical_eol_year: c.report.physical_eol_year,
            economic_eol_year: c.report.economic_eol_year,
        }),
    )?;
    w.csv(
        "eol_cashflows.csv",
        cases.iter().flat_map(|c| {
            c.report.yearly.iter().map(|y| CashFlowRow {
                model: c.model,
                om_per_kw_year: c.om_per_kw_year,
                year: y.year,
                days: y.days,
                operating_cash: y.operating_cash,
                degradation_cost: y.degradation_cost,
                om_cost: y.om_cost,
                net_profit: y.net_profit,
                discounted_net: y.discounted_net,
            })
        }),
    )
}
