//! Hourly energy and reserve prices: CSV ingestion, validation, synthesis.

use std::fs::File;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const HOURS_PER_DAY: usize = 24;

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("cannot open price file {path}: {source}")]
    Open {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("column `{0}` not found in header")]
    MissingColumn(String),
    #[error("line {line}: column `{column}` has non-numeric value `{value}`")]
    NotNumeric {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: negative reserve price {value}")]
    NegativeReserve { line: u64, value: f64 },
    #[error("line {line}: non-finite {column} value")]
    NonFinite { line: u64, column: &'static str },
    #[error("line {line}: duplicate hour {hour}")]
    DuplicateHour { line: u64, hour: usize },
    #[error("hour {hour} missing (series must run 0..{len} without gaps)")]
    MissingHour { hour: usize, len: usize },
    #[error("row count {0} not multiple of 24")]
    NotWholeDays(usize),
    #[error("price series is empty")]
    Empty,
    #[error("days must be positive, got {0}")]
    NonPositiveDays(i64),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
}

/// Column names used when reading a price CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSchema {
    pub hour: String,
    pub lmp: String,
    pub reserve: String,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        Self {
            hour: "hour".into(),
            lmp: "lmp_usd_per_mwh".into(),
            reserve: "reserve_usd_per_mw".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HourRecord {
    pub hour_index: usize,
    pub lmp: f64,
    pub reserve_price: f64,
}

/// Whole days of hourly LMP ($/MWh) and reserve ($/MW-h) prices. Hour
/// indices are implicit: position `i` is hour `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HourlyPriceSeries {
    lmp: Vec<f64>,
    reserve: Vec<f64>,
}

/// Borrowed view of one day's prices.
#[derive(Debug, Clone, Copy)]
pub struct DayPrices<'a> {
    pub lmp: &'a [f64],
    pub reserve: &'a [f64],
}

impl HourlyPriceSeries {
    pub fn new(lmp: Vec<f64>, reserve: Vec<f64>) -> Result<Self, MarketError> {
        let series = Self { lmp, reserve };
        series.validate()?;
        Ok(series)
    }

    /// Checks the series invariants. Lines in errors are 1-based data rows
    /// offset by the header, matching what [`load_price_series`] reports.
    pub fn validate(&self) -> Result<(), MarketError> {
        if self.lmp.is_empty() {
            return Err(MarketError::Empty);
        }
        if self.lmp.len() != self.reserve.len() {
            return Err(MarketError::MissingHour {
                hour: self.lmp.len().min(self.reserve.len()),
                len: self.lmp.len().max(self.reserve.len()),
            });
        }
        for (i, (&l, &r)) in self.lmp.iter().zip(&self.reserve).enumerate() {
            let line = i as u64 + 2;
            if !l.is_finite() {
                return Err(MarketError::NonFinite {
                    line,
                    column: "lmp",
                });
            }
            if !r.is_finite() {
                return Err(MarketError::NonFinite {
                    line,
                    column: "reserve",
                });
            }
            if r < 0.0 {
                return Err(MarketError::NegativeReserve { line, value: r });
            }
        }
        if !self.lmp.len().is_multiple_of(HOURS_PER_DAY) {
            return Err(MarketError::NotWholeDays(self.lmp.len()));
        }
        Ok(())
    }

    pub fn len_hours(&self) -> usize {
        self.lmp.len()
    }

    pub fn num_days(&self) -> usize {
        self.lmp.len() / HOURS_PER_DAY
    }

    pub fn lmp(&self) -> &[f64] {
        &self.lmp
    }

    pub fn reserve(&self) -> &[f64] {
        &self.reserve
    }

    pub fn records(&self) -> impl Iterator<Item = HourRecord> + '_ {
        self.lmp.iter().zip(&self.reserve).enumerate().map(
            |(hour_index, (&lmp, &reserve_price))| HourRecord {
                hour_index,
                lmp,
                reserve_price,
            },
        )
    }

    /// Prices for `day`, tiling the series when `day` runs past its end.
    pub fn day(&self, day: usize) -> DayPrices<'_> {
        let d = day % self.num_days();
        let range = d * HOURS_PER_DAY..(d + 1) * HOURS_PER_DAY;
        DayPrices {
            lmp: &self.lmp[range.clone()],
            reserve: &self.reserve[range],
        }
    }

    /// Replaces every reserve price with `price`.
    pub fn with_constant_reserve(mut self, price: f64) -> Result<Self, MarketError> {
        self.reserve.iter_mut().for_each(|r| *r = price);
        self.validate()?;
        Ok(self)
    }
}

pub fn load_price_series(
    path: impl AsRef<Path>,
    schema: &ColumnSchema,
) -> Result<HourlyPriceSeries, MarketError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| MarketError::Open {
        path: path.to_path_buf(),
        source,
    })?;
    let csv_err = |source| MarketError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader.headers().map_err(csv_err)?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| MarketError::MissingColumn(name.to_string()))
    };
    let (hour_col, lmp_col, reserve_col) = (
        column(&schema.hour)?,
        column(&schema.lmp)?,
        column(&schema.reserve)?,
    );

    let mut rows: Vec<(usize, f64, f64, u64)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(i as u64 + 2, |p| p.line());
        let cell = |col: usize, name: &str| -> Result<&str, MarketError> {
            record.get(col).ok_or_else(|| MarketError::NotNumeric {
                line,
                column: name.to_string(),
                value: String::new(),
            })
        };
        let number = |col: usize, name: &str| -> Result<f64, MarketError> {
            let raw = cell(col, name)?;
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| MarketError::NotNumeric {
                    line,
                    column: name.to_string(),
                    value: raw.to_string(),
                })
        };
        let raw_hour = cell(hour_col, &schema.hour)?;
        let hour = raw_hour
            .parse::<usize>()
            .map_err(|_| MarketError::NotNumeric {
                line,
                column: schema.hour.clone(),
                value: raw_hour.to_string(),
            })?;
        let lmp = number(lmp_col, &schema.lmp)?;
        let reserve = number(reserve_col, &schema.reserve)?;
        if reserve < 0.0 {
            return Err(MarketError::NegativeReserve {
                line,
                value: reserve,
            });
        }
        rows.push((hour, lmp, reserve, line));
    }
    if rows.is_empty() {
        return Err(MarketError::Empty);
    }

    rows.sort_by_key(|r| (r.0, r.3));
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(MarketError::DuplicateHour {
                line: w[1].3,
                hour: w[1].0,
            });
        }
    }
    let len = rows.len();
    if let Some((expected, _)) = rows.iter().enumerate().find(|(i, r)| r.0 != *i) {
        return Err(MarketError::MissingHour {
            hour: expected,
            len,
        });
    }
    if !len.is_multiple_of(HOURS_PER_DAY) {
        return Err(MarketError::NotWholeDays(len));
    }
    HourlyPriceSeries::new(
        rows.iter().map(|r| r.1).collect(),
        rows.iter().map(|r| r.2).collect(),
    )
}

/// Writes the series with the default column names. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_series(series: &HourlyPriceSeries, path: impl AsRef<Path>) -> Result<(), MarketError> {
    let path = path.as_ref();
    let csv_err = |source| MarketError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
    let schema = ColumnSchema::default();
    writer
        .write_record([&schema.hour, &schema.lmp, &schema.reserve])
        .map_err(csv_err)?;
    for rec in series.records() {
        writer
            .write_record([
                rec.hour_index.to_string(),
                rec.lmp.to_string(),
                rec.reserve_price.to_string(),
            ])
            .map_err(csv_err)?;
    }
    writer.flush().map_err(|e| csv_err(e.into()))?;
    Ok(())
}

/// Synthetic daily price shapes used for fixtures and scenario studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PricePattern {
    Flat {
        level: f64,
    },
    /// `low` for hours before `split_hour`, `high` from it on.
    TwoLevel {
        low: f64,
        high: f64,
        split_hour: usize,
    },
    /// `mean - amplitude * cos(2π (h - 4) / 24)`: trough at 04:00, peak at
    /// 16:00. `noise` adds seeded uniform jitter in `[-noise, noise]`.
    DailySine {
        mean: f64,
        amplitude: f64,
        #[serde(default)]
        noise: f64,
    },
}

pub fn synth_price_series(
    pattern: &PricePattern,
    days: i64,
    seed: u64,
) -> Result<HourlyPriceSeries, MarketError> {
    if days < 1 {
        return Err(MarketError::NonPositiveDays(days));
    }
    let hours = days as usize * HOURS_PER_DAY;
    let lmp: Vec<f64> = match *pattern {
        PricePattern::Flat { level } => vec![level; hours],
        PricePattern::TwoLevel {
            low,
            high,
            split_hour,
        } => {
            if split_hour > HOURS_PER_DAY {
                return Err(MarketError::InvalidPattern(format!(
                    "split hour {split_hour} outside 0..=24"
                )));
            }
            (0..hours)
                .map(|h| {
                    if h % HOURS_PER_DAY < split_hour {
                        low
                    } else {
                        high
                    }
                })
                .collect()
        }
        PricePattern::DailySine {
            mean,
            amplitude,
            noise,
        } => {
            if amplitude < 0.0 || noise < 0.0 {
                return Err(MarketError::InvalidPattern(
                    "amplitude and noise must be non-negative".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..hours)
                .map(|h| {
                    let phase = 2.0 * std::f64::consts::PI * ((h % HOURS_PER_DAY) as f64 - 4.0)
                        / HOURS_PER_DAY as f64;
                    let jitter = if noise > 0.0 {
                        rng.random_range(-noise..=noise)
                    } else {
                        0.0
                    };
                    mean - amplitude * phase.cos() + jitter
                })
                .collect()
        }
    };
    HourlyPriceSeries::new(lmp, vec![0.0; hours])
}
