//! Construction of growth/value regression datasets from a monthly
//! 25-portfolio returns file.
//!
//! Expected layout: a CSV with a `date` column (`YYYYMM` or `YYYY-MM`),
//! twenty-five portfolio return columns named `ME{i}_BM{j}` for size
//! quintile `i` and book-to-market quintile `j` (`BM1` lowest), a market
//! excess return column, and a risk-free rate column. Returns are in
//! percent; missing-value sentinels (`-99.99` and below) are rejected
//! when they fall inside the requested range.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{display_path, read_csv_table, IoError};

/// Calendar month, ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Option<Self> {
        if (1..=12).contains(&month) {
            Some(Self { year, month })
        } else {
            None
        }
    }

    /// Accepts `YYYY-MM` or `YYYYMM`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((y, m)) = s.split_once('-') {
            return Self::new(y.parse().ok()?, m.parse().ok()?);
        }
        if s.len() == 6 && s.chars().all(|c| c.is_ascii_digit()) {
            return Self::new(s[..4].parse().ok()?, s[4..].parse().ok()?);
        }
        None
    }

    pub fn next(self) -> Self {
        if self.month == 12 {
            Self { year: self.year + 1, month: 1 }
        } else {
            Self { year: self.year, month: self.month + 1 }
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// Which portfolio series to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortfolioTarget {
    /// Average of the five lowest book-to-market portfolios, in excess of
    /// the risk-free rate.
    Growth,
    /// Average of the five highest book-to-market portfolios, in excess
    /// of the risk-free rate.
    Value,
    /// Value minus growth.
    ValueMinusGrowth,
}

impl PortfolioTarget {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "g" | "growth" => Some(Self::Growth),
            "v" | "value" => Some(Self::Value),
            "vmg" | "v-g" | "value_minus_growth" => Some(Self::ValueMinusGrowth),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Growth => "G",
            Self::Value => "V",
            Self::ValueMinusGrowth => "VmG",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PortfolioSpec {
    pub source: PathBuf,
    #[serde(default = "default_market_column")]
    pub market_column: String,
    #[serde(default = "default_riskfree_column")]
    pub riskfree_column: String,
    pub target: PortfolioTarget,
    #[serde(default = "default_start")]
    pub start: YearMonth,
    #[serde(default = "default_end")]
    pub end: YearMonth,
}

fn default_market_column() -> String {
    "mkt_rf".into()
}

fn default_riskfree_column() -> String {
    "rf".into()
}

fn default_start() -> YearMonth {
    YearMonth { year: 1952, month: 1 }
}

fn default_end() -> YearMonth {
    YearMonth { year: 2019, month: 12 }
}

/// The built regression series.
#[derive(Debug, Clone)]
pub struct PortfolioDataset {
    pub dates: Vec<YearMonth>,
    /// Excess return of the target portfolio.
    pub excess_return: Vec<f64>,
    /// Market excess return.
    pub market_excess: Vec<f64>,
}

const SENTINEL_FLOOR: f64 = -99.0;

fn quintile_columns(bm: usize) -> Vec<String> {
    (1..=5).map(|me| format!("ME{me}_BM{bm}")).collect()
}

/// Averages the named columns at `row`.
fn average(row: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| row[i]).sum::<f64>() / idx.len() as f64
}

/// Builds the target series over the requested date range.
pub fn build_portfolio_dataset(spec: &PortfolioSpec) -> Result<PortfolioDataset, IoError> {
    if spec.start > spec.end {
        return Err(IoError::DateRange {
            reason: format!("start {} is after end {}", spec.start, spec.end),
        });
    }
    let path = spec.source.as_path();
    let table = read_csv_table(path)?;
    let growth_idx: Vec<usize> = quintile_columns(1)
        .iter()
        .map(|c| table.column_index(c, path))
        .collect::<Result<_, _>>()?;
    let value_idx: Vec<usize> = quintile_columns(5)
        .iter()
        .map(|c| table.column_index(c, path))
        .collect::<Result<_, _>>()?;
    // All 25 grid columns must resolve even if unused by the target.
    for bm in 2..=4 {
        for c in quintile_columns(bm) {
            table.column_index(&c, path)?;
        }
    }
    let mkt_idx = table.column_index(&spec.market_column, path)?;
    let rf_idx = table.column_index(&spec.riskfree_column, path)?;

    let mut dates = Vec::new();
    let mut excess_return = Vec::new();
    let mut market_excess = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        let line = i + 2;
        let date = YearMonth::parse(&table.raw_first_column[i]).ok_or_else(|| {
            super::parse_err(path, line, format!("bad date '{}'", table.raw_first_column[i]))
        })?;
        if date < spec.start || date > spec.end {
            continue;
        }
        if row[1..].iter().any(|&v| v <= SENTINEL_FLOOR) {
            return Err(super::parse_err(
                path,
                line,
                "missing-value sentinel inside the requested range",
            ));
        }
        let rf = row[rf_idx];
        let g = average(row, &growth_idx) - rf;
        let v = average(row, &value_idx) - rf;
        let y = match spec.target {
            PortfolioTarget::Growth => g,
            PortfolioTarget::Value => v,
            PortfolioTarget::ValueMinusGrowth => v - g,
        };
        dates.push(date);
        excess_return.push(y);
        market_excess.push(row[mkt_idx]);
    }
    if dates.is_empty() {
        return Err(IoError::DateRange {
            reason: format!(
                "no rows of {} fall within {}..{}",
                display_path(path),
                spec.start,
                spec.end
            ),
        });
    }
    Ok(PortfolioDataset { dates, excess_return, market_excess })
}

/// Writes the built series as a regression dataset: date, excess target
/// return, an explicit intercept column of ones, and the market excess
/// return.
pub fn write_portfolio_dataset(ds: &PortfolioDataset, path: &Path) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path).map_err(std::io::Error::other)?;
    w.write_record(["date", "excess_return", "const", "mkt_excess"])
        .map_err(std::io::Error::other)?;
    for t in 0..ds.dates.len() {
        w.write_record(&[
            ds.dates[t].to_string(),
            ds.excess_return[t].to_string(),
            "1".to_string(),
            ds.market_excess[t].to_string(),
        ])
        .map_err(std::io::Error::other)?;
    }
    w.flush()?;
    Ok(())
}
