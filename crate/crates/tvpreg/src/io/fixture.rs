//! Seeded generator for the bundled synthetic 25-portfolio fixture.
//!
//! The fixture mimics the documented ingestion layout (monthly dates,
//! `ME{i}_BM{j}` grid in percent, market excess return, risk-free rate)
//! with a known construction: zero intercepts, book-to-market-dependent
//! betas that drift slowly over time, and Gaussian noise. No real market
//! data is vendored.

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use super::portfolio::YearMonth;
use super::IoError;
use crate::rng::{derive_rng, stream};

/// Months covered by the fixture; contains the default 1952-01..2019-12
/// estimation range with margin on both sides.
pub const FIXTURE_START: YearMonth = YearMonth { year: 1950, month: 1 };
pub const FIXTURE_END: YearMonth = YearMonth { year: 2021, month: 12 };

/// Base market sensitivity per book-to-market quintile (`BM1` = growth).
const BASE_BETA: [f64; 5] = [1.15, 1.05, 1.00, 0.95, 0.85];
/// Amplitude of the slow sensitivity drift per quintile; the spread
/// between quintiles makes the value-minus-growth slope time varying.
const BETA_AMPLITUDE: [f64; 5] = [0.05, 0.08, 0.10, 0.15, 0.25];

/// Writes the synthetic fixture CSV. Deterministic in `seed`.
pub fn write_synthetic_fixture(path: &Path, seed: u64) -> Result<(), IoError> {
    let mut months = Vec::new();
    let mut ym = FIXTURE_START;
    while ym <= FIXTURE_END {
        months.push(ym);
        ym = ym.next();
    }
    let n = months.len();
    let mut rng = derive_rng(seed, &[stream::FIXTURE]);

    let mut w = csv::Writer::from_path(path).map_err(std::io::Error::other)?;
    let mut header = vec!["date".to_string()];
    for bm in 1..=5 {
        for me in 1..=5 {
            header.push(format!("ME{me}_BM{bm}"));
        }
    }
    header.push("mkt_rf".into());
    header.push("rf".into());
    w.write_record(&header).map_err(std::io::Error::other)?;

    for (k, date) in months.iter().enumerate() {
        let u = (k + 1) as f64 / n as f64;
        let mkt: f64 = 0.6 + 4.4 * rng.sample::<f64, _>(StandardNormal);
        let rf = 0.3 + 0.1 * (2.0 * std::f64::consts::PI * u).sin().abs();
        let mut rec = vec![date.to_string()];
        for bm in 1..=5usize {
            for me in 1..=5usize {
                let beta = BASE_BETA[bm - 1]
                    + BETA_AMPLITUDE[bm - 1] * (2.0 * std::f64::consts::PI * u).sin()
                    + 0.02 * me as f64;
                let noise: f64 = 1.2 * rng.sample::<f64, _>(StandardNormal);
                let ret = rf + beta * mkt + noise;
                rec.push(format!("{ret:.4}"));
            }
        }
        rec.push(format!("{mkt:.4}"));
        rec.push(format!("{rf:.4}"));
        w.write_record(&rec).map_err(std::io::Error::other)?;
    }
    w.flush().map_err(IoError::Io)?;
    Ok(())
}

/// Seed used for the checked-in fixture file.
pub const BUNDLED_FIXTURE_SEED: u64 = 10;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_synthetic_fixture(&a, 5).unwrap();
        write_synthetic_fixture(&b, 5).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn bundled_fixture_matches_generator() {
        let bundled = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic_25_portfolios.csv");
        let dir = tempfile::tempdir().unwrap();
        let fresh = dir.path().join("fresh.csv");
        write_synthetic_fixture(&fresh, BUNDLED_FIXTURE_SEED).unwrap();
        assert_eq!(
            std::fs::read(bundled).expect("bundled fixture present"),
            std::fs::read(&fresh).unwrap()
        );
    }
}
