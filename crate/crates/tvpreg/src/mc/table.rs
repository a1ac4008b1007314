//! Rendering of experiment results as aligned text grids and as
//! machine-readable CSV rows.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::mc::McResult;

/// Row/column arrangement of the rendered grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableLayout {
    /// Rows are bandwidth choices; column blocks are MSE then coverage
    /// across sample sizes (coverage taken at the first eval point).
    RatesBySampleSize,
    /// Rows are result labels; column blocks are pointwise MSE then
    /// coverage across eval points (single sample size per row block).
    PointwiseByEval,
    /// One line per cell with every recorded statistic.
    Custom,
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.3}"),
        None => "NA".into(),
    }
}

/// Renders the result grid as aligned text.
pub fn render_table(result: &McResult, layout: TableLayout) -> String {
    match layout {
        TableLayout::RatesBySampleSize => render_rates_by_sample_size(result),
        TableLayout::PointwiseByEval => render_pointwise_by_eval(result),
        TableLayout::Custom => render_custom(result),
    }
}

fn unique_rows(result: &McResult) -> Vec<String> {
    let mut rows = Vec::new();
    for c in &result.cells {
        if !rows.contains(&c.row) {
            rows.push(c.row.clone());
        }
    }
    rows
}

fn unique_sizes(result: &McResult) -> Vec<usize> {
    let mut sizes = Vec::new();
    for c in &result.cells {
        if !sizes.contains(&c.sample_size) {
            sizes.push(c.sample_size);
        }
    }
    sizes
}

fn render_grid(header: Vec<String>, body: Vec<Vec<String>>) -> String {
    let ncol = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &body {
        for (k, cell) in row.iter().enumerate() {
            widths[k] = widths[k].max(cell.len());
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: &[String], widths: &[usize]| -> String {
        let mut line = String::new();
        for k in 0..ncol {
            if k > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{:>width$}", cells[k], width = widths[k]));
        }
        line.push('\n');
        line
    };
    out.push_str(&fmt_row(&header, &widths));
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (ncol - 1)));
    out.push('\n');
    for row in &body {
        out.push_str(&fmt_row(row, &widths));
    }
    out
}

fn render_rates_by_sample_size(result: &McResult) -> String {
    let rows = unique_rows(result);
    let sizes = unique_sizes(result);
    let mut header = vec!["bandwidth".to_string()];
    for t in &sizes {
        header.push(format!("MSE T={t}"));
    }
    for t in &sizes {
        header.push(format!("CR T={t}"));
    }
    let mut body = Vec::new();
    for r in &rows {
        let mut line = vec![r.clone()];
        for t in &sizes {
            line.push(fmt_opt(result.cell(r, *t).and_then(|c| c.mean_mse_path)));
        }
        for t in &sizes {
            line.push(fmt_opt(
                result.cell(r, *t).and_then(|c| c.points.first()).and_then(|p| p.coverage),
            ));
        }
        body.push(line);
    }
    render_grid(header, body)
}

fn render_pointwise_by_eval(result: &McResult) -> String {
    let rows = unique_rows(result);
    let sizes = unique_sizes(result);
    let taus: Vec<f64> =
        result.cells.first().map(|c| c.points.iter().map(|p| p.tau).collect()).unwrap_or_default();
    let mut out = String::new();
    for t_len in &sizes {
        out.push_str(&format!("T = {t_len}\n"));
        let mut header = vec!["row".to_string()];
        for tau in &taus {
            header.push(format!("MSE tau={tau}"));
        }
        for tau in &taus {
            header.push(format!("CR tau={tau}"));
        }
        let mut body = Vec::new();
        for r in &rows {
            let mut line = vec![r.clone()];
            if let Some(cell) = result.cell(r, *t_len) {
                for p in &cell.points {
                    line.push(fmt_opt(p.mse));
                }
                for p in &cell.points {
                    line.push(fmt_opt(p.coverage));
                }
            } else {
                for _ in 0..2 * taus.len() {
                    line.push("NA".into());
                }
            }
            body.push(line);
        }
        out.push_str(&render_grid(header, body));
        out.push('\n');
    }
    out
}

fn render_custom(result: &McResult) -> String {
    let mut out = String::new();
    out.push_str("row  T  mse_path  points\n");
    for c in &result.cells {
        out.push_str(&format!(
            "{}  {}  {}  {}\n",
            c.row,
            c.sample_size,
            fmt_opt(c.mean_mse_path),
            c.points
                .iter()
                .map(|p| format!(
                    "tau={}: mse={} cr={}",
                    p.tau,
                    fmt_opt(p.mse),
                    fmt_opt(p.coverage)
                ))
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    out
}

/// One long-format CSV record of a result cell statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub row: String,
    pub sample_size: usize,
    pub metric: String,
    pub eval_point: Option<f64>,
    pub value: Option<f64>,
    pub mc_se: Option<f64>,
}

/// Flattens a result into long-format records (one per statistic).
pub fn result_records(result: &McResult) -> Vec<ResultRecord> {
    let mut records = Vec::new();
    for c in &result.cells {
        if c.mean_mse_path.is_some() {
            records.push(ResultRecord {
                row: c.row.clone(),
                sample_size: c.sample_size,
                metric: "mse_path".into(),
                eval_point: None,
                value: c.mean_mse_path,
                mc_se: c.mse_path_se,
            });
        }
        for p in &c.points {
            if p.mse.is_some() {
                records.push(ResultRecord {
                    row: c.row.clone(),
                    sample_size: c.sample_size,
                    metric: "mse_point".into(),
                    eval_point: Some(p.tau),
                    value: p.mse,
                    mc_se: p.mse_se,
                });
            }
            records.push(ResultRecord {
                row: c.row.clone(),
                sample_size: c.sample_size,
                metric: "coverage".into(),
                eval_point: Some(p.tau),
                value: p.coverage,
                mc_se: p.coverage_se,
            });
        }
        if let Some(g) = c.mean_selected_gamma {
            records.push(ResultRecord {
                row: c.row.clone(),
                sample_size: c.sample_size,
                metric: "mean_selected_gamma".into(),
                eval_point: None,
                value: Some(g),
                mc_se: None,
            });
        }
    }
    records
}

/// Writes long-format records as CSV. Floats use the shortest exact
/// decimal representation, so a read-back reproduces them bit for bit.
pub fn write_result_csv(result: &McResult, path: &Path) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for rec in result_records(result) {
        w.serialize(&rec)?;
    }
    w.flush()
}

/// Reads back records written by [`write_result_csv`].
pub fn read_result_csv(path: &Path) -> std::io::Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.deserialize::<ResultRecord>() {
        out.push(rec.map_err(std::io::Error::other)?);
    }
    Ok(out)
}

/// Writes the run manifest next to result files: config digest, master
/// seed, replication count, and crate version.
pub fn write_manifest(result: &McResult, path: &Path) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "config_digest = {:#018x}", result.config_digest)?;
    writeln!(f, "master_seed = {}", result.master_seed)?;
    writeln!(f, "replications = {}", result.replications)?;
    writeln!(f, "version = {}", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
