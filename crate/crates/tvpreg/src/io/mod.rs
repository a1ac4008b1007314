//! File formats and ingestion: dataset CSVs, estimate/band outputs,
//! portfolio construction, plot-data flattening, and the run
//! configuration schema.

pub mod config;
pub mod fixture;
pub mod plotdata;
pub mod portfolio;

use std::path::Path;

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::estimator::{TimeSeriesData, TvpEstimate};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at {path}:{line}: {reason}")]
    Parse { path: String, line: usize, reason: String },

    #[error("layout error in {path}: {reason}")]
    Layout { path: String, reason: String },

    #[error("date range error: {reason}")]
    DateRange { reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn parse_err(path: &Path, line: usize, reason: impl Into<String>) -> IoError {
    IoError::Parse { path: display_path(path), line, reason: reason.into() }
}

pub(crate) fn display_path(path: &Path) -> String {
    path.display().to_string()
}

/// A parsed CSV with a header row and float columns. The first column is
/// also kept raw (and parses to NaN when non-numeric) so date-like row
/// identifiers survive.
#[derive(Debug)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub raw_first_column: Vec<String>,
}

/// Reads a CSV of numeric columns (see [`CsvTable`] for the first-column
/// exception).
pub fn read_csv_table(path: &Path) -> Result<CsvTable, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_err(path, 0, e.to_string()))?;
    let headers: Vec<String> =
        reader.headers().map_err(|e| parse_err(path, 0, e.to_string()))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    let mut raw_first_column = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(|e| parse_err(path, line, e.to_string()))?;
        if record.len() != headers.len() {
            return Err(parse_err(
                path,
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        raw_first_column.push(record.get(0).unwrap_or("").to_string());
        let mut row = Vec::with_capacity(record.len());
        for (col, field) in record.iter().enumerate() {
            match field.parse::<f64>() {
                Ok(v) => row.push(v),
                Err(_) if col == 0 => row.push(f64::NAN),
                Err(_) => {
                    return Err(parse_err(
                        path,
                        line,
                        format!("column '{}': not a number: '{field}'", headers[col]),
                    ))
                }
            }
        }
        rows.push(row);
    }
    Ok(CsvTable { headers, rows, raw_first_column })
}

impl CsvTable {
    pub fn column_index(&self, name: &str, path: &Path) -> Result<usize, IoError> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| IoError::Layout {
            path: display_path(path),
            reason: format!("column '{name}' not found (available: {})", self.headers.join(", ")),
        })
    }
}

/// Assembles regression data from a parsed table: one response column,
/// named regressor columns, and an optional injected intercept column
/// (prepended).
pub fn dataset_from_table(
    table: &CsvTable,
    path: &Path,
    response: &str,
    regressors: &[String],
    intercept: bool,
) -> Result<TimeSeriesData, IoError> {
    let y_idx = table.column_index(response, path)?;
    let reg_idx: Vec<usize> =
        regressors.iter().map(|r| table.column_index(r, path)).collect::<Result<_, _>>()?;
    let t_len = table.rows.len();
    let p = reg_idx.len() + intercept as usize;
    let mut x = Array2::zeros((t_len, p));
    let mut y = Array1::zeros(t_len);
    for (t, row) in table.rows.iter().enumerate() {
        y[t] = row[y_idx];
        let mut j = 0;
        if intercept {
            x[(t, 0)] = 1.0;
            j = 1;
        }
        for &ri in &reg_idx {
            x[(t, j)] = row[ri];
            j += 1;
        }
    }
    TimeSeriesData::new(y, x).map_err(|e| IoError::Layout {
        path: display_path(path),
        reason: format!("data unusable for estimation: {e}"),
    })
}

/// Writes the per-`t` coefficient estimates (plus residuals and boundary
/// flags). Floats use the shortest round-trip representation.
pub fn write_estimates_csv(
    est: &TvpEstimate,
    names: &[String],
    path: &Path,
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path).map_err(std::io::Error::other)?;
    let p = est.beta_hat.ncols();
    let mut header = vec!["t".to_string()];
    header.extend(names.iter().map(|n| format!("beta_{n}")));
    header.push("residual".into());
    header.push("boundary".into());
    w.write_record(&header).map_err(std::io::Error::other)?;
    for t in 0..est.beta_hat.nrows() {
        let mut rec = vec![t.to_string()];
        for j in 0..p {
            rec.push(est.beta_hat[(t, j)].to_string());
        }
        rec.push(est.residuals[t].to_string());
        rec.push((est.boundary[t] as u8).to_string());
        w.write_record(&rec).map_err(std::io::Error::other)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the pointwise confidence bands.
pub fn write_bands_csv(est: &TvpEstimate, names: &[String], path: &Path) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path).map_err(std::io::Error::other)?;
    let p = est.beta_hat.ncols();
    let mut header = vec!["t".to_string()];
    for n in names {
        header.push(format!("lower_{n}"));
        header.push(format!("upper_{n}"));
    }
    w.write_record(&header).map_err(std::io::Error::other)?;
    for t in 0..est.beta_hat.nrows() {
        let mut rec = vec![t.to_string()];
        for j in 0..p {
            rec.push(est.ci_lower[(t, j)].to_string());
            rec.push(est.ci_upper[(t, j)].to_string());
        }
        w.write_record(&rec).map_err(std::io::Error::other)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_table_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        std::fs::write(&path, "date,y,x\n195201,1.5,0.3\n195202,-0.25,1.0\n").unwrap();
        let table = read_csv_table(&path).unwrap();
        assert_eq!(table.headers, vec!["date", "y", "x"]);
        assert_eq!(table.rows[1][1], -0.25);
        assert_eq!(table.raw_first_column[0], "195201");
        assert!(table.column_index("missing", &path).is_err());

        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "y,x\n1.0,oops\n").unwrap();
        match read_csv_table(&bad) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn dataset_builds_with_intercept() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let mut body = String::from("y,x\n");
        for t in 0..10 {
            body.push_str(&format!("{},{}\n", t as f64 * 0.1, (t as f64).sin()));
        }
        std::fs::write(&path, body).unwrap();
        let table = read_csv_table(&path).unwrap();
        let data = dataset_from_table(&table, &path, "y", &["x".to_string()], true).unwrap();
        assert_eq!(data.num_regressors(), 2);
        assert_eq!(data.regressors()[(3, 0)], 1.0);
    }
}
