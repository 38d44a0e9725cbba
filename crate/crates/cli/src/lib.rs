//! `swapval` command-line tool: loads a scenario, runs one of the studies and
//! writes JSON plus plot-ready CSV into an output directory.

pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use swapval_core::{
    eol_analysis, optimize_mdc, optimize_price_for_curve, range_grid, refine_mdc,
    simulate_lifecycle, sweep_swap_price, DemandPriceCurve, EconomicParams, HourlyPriceSeries,
    LifecycleResult, Scenario, SwapTerms,
};

pub use config::{EconomicsConfig, Flags, Grids, PriceSource, ScenarioConfig, PAPER_DEFAULTS};
pub use error::{CliError, EXIT_CONFIG, EXIT_DATA, EXIT_SOLVER};
use report::{BaselinePoint, EolCase, ReportWriter};

pub const THREADS_ENV: &str = "SWAPVAL_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "swapval",
    version,
    about = "Life-cycle valuation of a battery swapping station"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One lifecycle at a fixed degradation cost.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Marginal degradation cost, $/MWh-throughput.
        #[arg(long)]
        mu: f64,
    },
    /// Grid search for the degradation cost maximizing life-cycle profit.
    OptimizeMdc {
        #[command(flatten)]
        common: CommonArgs,
        /// Re-sweep around the best grid point at this step.
        #[arg(long)]
        refine: Option<f64>,
        /// Also run the same sweep with swapping disabled.
        #[arg(long)]
        baseline: bool,
    },
    /// Re-optimize the degradation cost at every swap price (fixed daily cap).
    SweepPrice {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Best swap price for each demand-price curve.
    OptimizeCurvePrice {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Economic vs physical end of life across fixed O&M levels, with and
    /// without swapping.
    Eol {
        #[command(flatten)]
        common: CommonArgs,
        /// O&M levels, `a:b:step` or a comma list ($/kW-year).
        #[arg(long, default_value = "0,8,16,24,30")]
        om_grid: String,
        /// Use this degradation cost instead of optimizing it per model.
        #[arg(long)]
        mu: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario JSON path, or `paper-defaults`.
    #[arg(long, default_value = PAPER_DEFAULTS)]
    pub config: String,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Price CSV replacing the configured price source.
    #[arg(long)]
    pub prices: Option<PathBuf>,
    #[arg(long)]
    pub hour_column: Option<String>,
    #[arg(long)]
    pub lmp_column: Option<String>,
    #[arg(long)]
    pub reserve_column: Option<String>,
    /// Seed for synthetic prices.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub no_reserve: bool,
    /// Fixed O&M, $/kW-year.
    #[arg(long)]
    pub om: Option<f64>,
    /// `a:b:step`
    #[arg(long)]
    pub mdc_grid: Option<String>,
    /// `a:b:step`
    #[arg(long)]
    pub price_grid: Option<String>,
    /// Demand-price curve `k,b` (price = k * demand + b); repeatable.
    #[arg(long = "curve", allow_hyphen_values = true)]
    pub curves: Vec<String>,
}

impl CommonArgs {
    /// Loads the config and applies command-line overrides.
    pub fn resolve(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = ScenarioConfig::load(&self.config)?;
        if let Some(path) = &self.prices {
            cfg.prices = PriceSource::File {
                path: path.clone(),
                columns: Default::default(),
            };
        }
        if let PriceSource::File { columns, .. } = &mut cfg.prices {
            if let Some(c) = &self.hour_column {
                columns.hour = c.clone();
            }
            if let Some(c) = &self.lmp_column {
                columns.lmp = c.clone();
            }
            if let Some(c) = &self.reserve_column {
                columns.reserve = c.clone();
            }
        }
        if let Some(s) = self.seed {
            if let PriceSource::Synthetic { seed, .. } = &mut cfg.prices {
                *seed = s;
            }
        }
        if self.no_reserve {
            cfg.flags.reserve_enabled = false;
        }
        if let Some(om) = self.om {
            cfg.economics.fixed_om_per_kw_year = om;
        }
        if let Some(g) = &self.mdc_grid {
            cfg.grids.mdc_grid = parse_range(g)?;
        }
        if let Some(g) = &self.price_grid {
            cfg.grids.price_grid = parse_range(g)?;
        }
        if !self.curves.is_empty() {
            cfg.demand_curves = self
                .curves
                .iter()
                .map(|c| parse_curve(c))
                .collect::<Result<_, _>>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `a:b:step`, inclusive of `b`.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Config(format!("expected a:b:step, got `{text}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    Ok(range_grid(v[0], v[1], v[2])?)
}

/// `a:b:step` or `x,y,z`.
pub fn parse_list_or_range(text: &str) -> Result<Vec<f64>, CliError> {
    if text.contains(':') {
        return parse_range(text);
    }
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad number `{p}` in `{text}`")))
        })
        .collect()
}

pub fn parse_curve(text: &str) -> Result<DemandPriceCurve, CliError> {
    let bad = || CliError::Config(format!("expected k,b for --curve, got `{text}`"));
    let (k, b) = text.split_once(',').ok_or_else(bad)?;
    let k: f64 = k.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok(DemandPriceCurve::new(k, b)?)
}

struct Loaded {
    cfg: ScenarioConfig,
    prices: HourlyPriceSeries,
    econ: EconomicParams,
}

impl Loaded {
    fn new(common: &CommonArgs) -> Result<Self, CliError> {
        let cfg = common.resolve()?;
        let prices = cfg.load_prices()?;
        let econ = cfg.economic_params();
        Ok(Self { cfg, prices, econ })
    }

    fn scenario(&self, swap: SwapTerms) -> Scenario<'_> {
        Scenario {
            battery: self.cfg.battery,
            economics: self.econ,
            prices: &self.prices,
            swap,
            reserve_enabled: self.cfg.flags.reserve_enabled,
        }
    }

    fn no_swap(&self) -> SwapTerms {
        SwapTerms::none(self.cfg.swap.labor_cost)
    }
}

/// Runs a parsed command and returns the files written.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match cli.command {
        Command::Simulate { common, mu } => {
            let ld = Loaded::new(&common)?;
            let result = simulate_lifecycle(&ld.scenario(ld.cfg.swap), mu)?;
            let mut w = ReportWriter::new(&common.out)?;
            report::emit_lifecycle(&mut w, &ld.cfg, &result)?;
            Ok(w.finish())
        }
        Command::OptimizeMdc {
            common,
            refine,
            baseline,
        } => {
            let ld = Loaded::new(&common)?;
            let scenario = ld.scenario(ld.cfg.swap);
            let sweep = optimize_mdc(&scenario, &ld.cfg.grids.mdc_grid)?;
            let refined = refine
                .map(|step| refine_mdc(&sweep, &scenario, step))
                .transpose()?;
            let base = if baseline {
                Some(optimize_mdc(
                    &ld.scenario(ld.no_swap()),
                    &ld.cfg.grids.mdc_grid,
                )?)
            } else {
                None
            };
            let mut w = ReportWriter::new(&common.out)?;
            report::emit_mdc_sweep(&mut w, &ld.cfg, &sweep, refined.as_ref(), base.as_ref())?;
            Ok(w.finish())
        }
        Command::SweepPrice { common } => {
            let ld = Loaded::new(&common)?;
            let cap = ld.cfg.swap.daily_swap_cap;
            let points = sweep_swap_price(
                &ld.scenario(ld.cfg.swap),
                &ld.cfg.grids.price_grid,
                cap,
                &ld.cfg.grids.mdc_grid,
            )?;
            let base = optimize_mdc(&ld.scenario(ld.no_swap()), &ld.cfg.grids.mdc_grid)?;
            let mut w = ReportWriter::new(&common.out)?;
            report::emit_price_sweep(&mut w, &ld.cfg, cap, BaselinePoint::from(&base), &points)?;
            Ok(w.finish())
        }
        Command::OptimizeCurvePrice { common } => {
            let ld = Loaded::new(&common)?;
            if ld.cfg.demand_curves.is_empty() {
                return Err(CliError::Config(
                    "no demand curves: pass --curve k,b or set demand_curves".into(),
                ));
            }
            let scenario = ld.scenario(ld.cfg.swap);
            let results = ld
                .cfg
                .demand_curves
                .iter()
                .map(|curve| {
                    optimize_price_for_curve(
                        &scenario,
                        curve,
                        &ld.cfg.grids.price_grid,
                        &ld.cfg.grids.mdc_grid,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut w = ReportWriter::new(&common.out)?;
            report::emit_curve_prices(&mut w, &ld.cfg, &results)?;
            Ok(w.finish())
        }
        Command::Eol {
            common,
            om_grid,
            mu,
        } => {
            let ld = Loaded::new(&common)?;
            let oms = parse_list_or_range(&om_grid)?;
            if oms.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(CliError::Config("O&M levels must be non-negative".into()));
            }
            let mut cases = Vec::new();
            for (model, swap) in [("with_swap", ld.cfg.swap), ("no_swap", ld.no_swap())] {
                let scenario = ld.scenario(swap);
                let run: LifecycleResult = match mu {
                    Some(m) => simulate_lifecycle(&scenario, m)?,
                    None => {
                        let sweep = optimize_mdc(&scenario, &ld.cfg.grids.mdc_grid)?;
                        sweep.star_run().clone()
                    }
                };
                for &om in &oms {
                    let econ = EconomicParams {
                        fixed_om_per_kw_year: om,
                        ..ld.econ
                    };
                    cases.push(EolCase {
                        model,
                        om_per_kw_year: om,
                        mu: run.mu,
                        days_lived: run.days_lived,
                        report: eol_analysis(&run, &ld.cfg.battery, &econ),
                    });
                }
            }
            let mut w = ReportWriter::new(&common.out)?;
            report::emit_eol(&mut w, &ld.cfg, &cases)?;
            Ok(w.finish())
        }
    }
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

fn run_with_threads(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match thread_cap()? {
        None => run(cli),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            pool.install(|| run(cli))
        }
    }
}

fn report_error(err: &CliError) -> i32 {
    let record = serde_json::to_string(&err.record()).expect("error record serializes");
    eprintln!("{record}");
    err.exit_code()
}

/// Parses `argv` (program name first), runs it, and returns the exit code.
/// Failures print a one-line JSON record to stderr.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => return report_error(&CliError::Config(e.to_string().trim_end().to_string())),
    };
    match run_with_threads(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => report_error(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_range("0:100:5").unwrap().len(), 21);
        assert_eq!(parse_range(" 10 : 20 : 10 ").unwrap(), vec![10.0, 20.0]);
        assert!(parse_range("0:10").is_err());
        assert!(parse_range("0:10:0").is_err());
        assert_eq!(parse_list_or_range("0,8,16").unwrap(), vec![0.0, 8.0, 16.0]);
        assert_eq!(
            parse_list_or_range("0:30:15").unwrap(),
            vec![0.0, 15.0, 30.0]
        );
        assert!(parse_list_or_range("0,x").is_err());
    }

    #[test]
    fn curves() {
        let c = parse_curve("-10,180").unwrap();
        assert_eq!((c.slope, c.intercept), (-10.0, 180.0));
        assert!(parse_curve("-10").is_err());
        assert!(parse_curve("10,180").is_err());
    }

    #[test]
    fn curve_flag_accepts_negative_slope() {
        let cli =
            Cli::try_parse_from(["swapval", "optimize-curve-price", "--curve", "-5,90"]).unwrap();
        match cli.command {
            Command::OptimizeCurvePrice { common } => assert_eq!(common.curves, ["-5,90"]),
            other => panic!("{other:?}"),
        }
    }
}
