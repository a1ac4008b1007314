//! Flattening of estimate, band, and selection-curve files into a tidy
//! long format (`series, x, value, flag`) for external plotting tools.
//! No rendering happens here.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_csv_table, IoError};

/// One tidy row. `flag` carries series-specific markers: the boundary
/// indicator for estimates and bands, and the per-curve minimum marker
/// for selection curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TidyRow {
    pub series: String,
    pub x: f64,
    pub value: f64,
    pub flag: u8,
}

/// Flattens an estimates file (`t, beta_*, residual, boundary`).
pub fn tidy_from_estimates(path: &Path) -> Result<Vec<TidyRow>, IoError> {
    let table = read_csv_table(path)?;
    let t_idx = table.column_index("t", path)?;
    let boundary_idx = table.column_index("boundary", path)?;
    let mut rows = Vec::new();
    for record in &table.rows {
        let flag = record[boundary_idx] as u8;
        for (j, header) in table.headers.iter().enumerate() {
            if j == t_idx || j == boundary_idx {
                continue;
            }
            rows.push(TidyRow {
                series: header.clone(),
                x: record[t_idx],
                value: record[j],
                flag,
            });
        }
    }
    Ok(rows)
}

/// Flattens a bands file (`t, lower_*, upper_*`).
pub fn tidy_from_bands(path: &Path) -> Result<Vec<TidyRow>, IoError> {
    let table = read_csv_table(path)?;
    let t_idx = table.column_index("t", path)?;
    let mut rows = Vec::new();
    for record in &table.rows {
        for (j, header) in table.headers.iter().enumerate() {
            if j == t_idx {
                continue;
            }
            rows.push(TidyRow { series: header.clone(), x: record[t_idx], value: record[j], flag: 0 });
        }
    }
    Ok(rows)
}

/// Flattens a selection-curve file (`m, gamma, cv`), marking each
/// leave-out order's minimizer with `flag = 1`.
pub fn tidy_from_cv_curve(path: &Path) -> Result<Vec<TidyRow>, IoError> {
    let table = read_csv_table(path)?;
    let m_idx = table.column_index("m", path)?;
    let g_idx = table.column_index("gamma", path)?;
    let cv_idx = table.column_index("cv", path)?;
    let mut rows: Vec<TidyRow> = table
        .rows
        .iter()
        .map(|r| TidyRow {
            series: format!("cv_m{}", r[m_idx] as i64),
            x: r[g_idx],
            value: r[cv_idx],
            flag: 0,
        })
        .collect();
    // Mark per-series minima (ties toward the smaller rate).
    let mut series: Vec<String> = rows.iter().map(|r| r.series.clone()).collect();
    series.dedup();
    for s in series {
        let mut best: Option<usize> = None;
        for (i, r) in rows.iter().enumerate() {
            if r.series != s {
                continue;
            }
            if best.map_or(true, |b| r.value < rows[b].value) {
                best = Some(i);
            }
        }
        if let Some(b) = best {
            rows[b].flag = 1;
        }
    }
    Ok(rows)
}

pub fn write_tidy(rows: &[TidyRow], path: &Path) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path).map_err(std::io::Error::other)?;
    w.write_record(["series", "x", "value", "flag"]).map_err(std::io::Error::other)?;
    for r in rows {
        w.write_record(&[r.series.clone(), r.x.to_string(), r.value.to_string(), r.flag.to_string()])
            .map_err(std::io::Error::other)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_tidy(path: &Path) -> Result<Vec<TidyRow>, IoError> {
    let mut r = csv::Reader::from_path(path).map_err(std::io::Error::other)?;
    let mut out = Vec::new();
    for (i, rec) in r.deserialize::<TidyRow>().enumerate() {
        out.push(rec.map_err(|e| super::parse_err(path, i + 2, e.to_string()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cv_curve_minima_are_marked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cv.csv");
        std::fs::write(
            &path,
            "m,gamma,cv\n0,-0.5,0.9\n0,-0.4,0.8\n0,-0.3,0.95\n1,-0.5,0.7\n1,-0.4,0.75\n",
        )
        .unwrap();
        let rows = tidy_from_cv_curve(&path).unwrap();
        let m0_min: Vec<&TidyRow> =
            rows.iter().filter(|r| r.series == "cv_m0" && r.flag == 1).collect();
        assert_eq!(m0_min.len(), 1);
        assert_eq!(m0_min[0].x, -0.4);
        let m1_min: Vec<&TidyRow> =
            rows.iter().filter(|r| r.series == "cv_m1" && r.flag == 1).collect();
        assert_eq!(m1_min[0].x, -0.5);
    }

    #[test]
    fn tidy_round_trips() {
        let rows = vec![
            TidyRow { series: "beta_x".into(), x: 3.0, value: 0.123_456_789_012_345_68, flag: 1 },
            TidyRow { series: "beta_x".into(), x: 4.0, value: -2.5e-17, flag: 0 },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tidy.csv");
        write_tidy(&rows, &path).unwrap();
        let back = read_tidy(&path).unwrap();
        assert_eq!(rows, back);
    }
}
