//! Command-line front end: estimation runs, bandwidth-selection reports,
//! portfolio construction, dataset simulation, experiment presets, and
//! plot-data flattening. Commands are deterministic given their inputs,
//! config, and seed.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bandwidth::{
    bootstrap_select_gamma, cv_select_gamma, default_scale_grid, select_scale_c, BootstrapConfig,
    GammaGrid, SelectionResult,
};
use crate::error::{EstimatorError, McError, SelectionError};
use crate::estimator::{estimate_path, Bandwidth, TimeSeriesData};
use crate::io::config::{load_config, BandwidthMode, ConfigError, EstimateConfig, FileConfig};
use crate::io::plotdata::{tidy_from_bands, tidy_from_cv_curve, tidy_from_estimates, write_tidy};
use crate::io::portfolio::{
    build_portfolio_dataset, write_portfolio_dataset, PortfolioSpec, PortfolioTarget, YearMonth,
};
use crate::io::{dataset_from_table, read_csv_table, IoError};
use crate::kernels::Kernel;
use crate::mc::presets::{
    local_level_h_grid, local_level_mse_curve, mixed_smooth_jump_benchmark, neglected_break_study,
    random_walk_benchmark,
};
use crate::mc::table::{render_table, write_manifest, write_result_csv, TableLayout};
use crate::mc::{run_experiment, McResult};
use crate::rng::{derive_seed, stream};

pub const ENV_SEED: &str = "TVPREG_SEED";
pub const ENV_OUTPUT_DIR: &str = "TVPREG_OUTPUT_DIR";

/// Kernel estimation of time-varying regression coefficients.
#[derive(Debug, Parser)]
#[command(name = "tvpreg", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a coefficient path (with optional bandwidth selection).
    Estimate(ConfigArgs),
    /// Run bandwidth selection only and write the selection report.
    SelectBandwidth(ConfigArgs),
    /// Build a growth/value regression dataset from a 25-portfolio file.
    BuildPortfolios(BuildPortfoliosArgs),
    /// Draw one dataset from a configured generating process.
    Simulate(ConfigArgs),
    /// Run a Monte Carlo experiment (preset or config-driven).
    Mc(McArgs),
    /// Flatten estimate/band/selection files into tidy plot rows.
    Plotdata(PlotdataArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildPortfoliosArgs {
    /// 25-portfolio monthly returns CSV.
    #[arg(long)]
    pub source: PathBuf,
    /// Target series: g, v, or vmg.
    #[arg(long)]
    pub target: String,
    /// Output dataset path.
    #[arg(long)]
    pub output: PathBuf,
    /// First month (YYYY-MM), default 1952-01.
    #[arg(long)]
    pub start: Option<String>,
    /// Last month (YYYY-MM), default 2019-12.
    #[arg(long)]
    pub end: Option<String>,
    #[arg(long, default_value = "mkt_rf")]
    pub market_column: String,
    #[arg(long, default_value = "rf")]
    pub riskfree_column: String,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Named preset: table1-desk, table3-desk, table5-desk, appendixB.
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// TOML config with an [mc] section.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (required with --preset).
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Override the replication count.
    #[arg(long)]
    pub replications: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    #[arg(long)]
    pub estimates: Option<PathBuf>,
    #[arg(long)]
    pub bands: Option<PathBuf>,
    #[arg(long)]
    pub cv_curve: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
}

/// Command failures with stable exit codes: 2 for configuration, 3 for
/// input parsing, 4 for numerical failures, 1 for other I/O.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Config(_) => "config",
            CliError::Parse(_) => "parse",
            CliError::Numerical(_) => "numerical",
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io(inner) => CliError::Io(inner.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<EstimatorError> for CliError {
    fn from(e: EstimatorError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<SelectionError> for CliError {
    fn from(e: SelectionError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::InvalidConfig(msg) => CliError::Config(msg),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn env_seed_override(seed: u64) -> u64 {
    match std::env::var(ENV_SEED) {
        Ok(v) => v.parse().unwrap_or(seed),
        Err(_) => seed,
    }
}

fn env_output_override(dir: PathBuf) -> PathBuf {
    match std::env::var(ENV_OUTPUT_DIR) {
        Ok(v) if !v.is_empty() => PathBuf::from(v),
        _ => dir,
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate(args) => cmd_estimate(&args.config),
        Command::SelectBandwidth(args) => cmd_select_bandwidth(&args.config),
        Command::BuildPortfolios(args) => cmd_build_portfolios(&args),
        Command::Simulate(args) => cmd_simulate(&args.config),
        Command::Mc(args) => cmd_mc(&args),
        Command::Plotdata(args) => cmd_plotdata(&args),
    }
}

fn estimate_section(path: &Path) -> Result<EstimateConfig, CliError> {
    let cfg: FileConfig = load_config(path)?;
    let mut est = cfg
        .estimate
        .ok_or_else(|| CliError::Config("missing [estimate] section".into()))?;
    est.seed = env_seed_override(est.seed);
    est.output_dir = env_output_override(est.output_dir.clone());
    if est.regressors.is_empty() && !est.intercept {
        return Err(CliError::Config("no regressors configured".into()));
    }
    Ok(est)
}

fn load_dataset(est: &EstimateConfig) -> Result<(TimeSeriesData, Vec<String>), CliError> {
    let table = read_csv_table(&est.input)?;
    let data =
        dataset_from_table(&table, &est.input, &est.response, &est.regressors, est.intercept)?;
    let mut names = Vec::new();
    if est.intercept {
        names.push("const".to_string());
    }
    names.extend(est.regressors.iter().cloned());
    Ok((data, names))
}

fn kernel_from_config(est: &EstimateConfig) -> Result<Kernel, CliError> {
    Kernel::from_name(&est.kernel)
        .ok_or_else(|| CliError::Config(format!("unknown kernel '{}'", est.kernel)))
}

struct SelectedBandwidth {
    bandwidth: Bandwidth,
    selection: Option<SelectionResult>,
    rejected: Vec<f64>,
}

fn resolve_bandwidth(
    est: &EstimateConfig,
    data: &TimeSeriesData,
    kernel: Kernel,
) -> Result<SelectedBandwidth, CliError> {
    let t_len = data.num_obs();
    match &est.bandwidth {
        BandwidthMode::Fixed { c, gamma } => Ok(SelectedBandwidth {
            bandwidth: Bandwidth::new(*c, *gamma, t_len)?,
            selection: None,
            rejected: Vec::new(),
        }),
        BandwidthMode::Cv { grid, leave_out, select_scale, c_grid } => {
            let grid = GammaGrid::new(grid.clone())?;
            let mut sel = cv_select_gamma(data, &grid, *leave_out, kernel)?;
            let c_hat = if *select_scale {
                let cg = c_grid.clone().unwrap_or_else(default_scale_grid);
                select_scale_c(data, sel.gamma_hat, &cg, kernel)?
            } else {
                1.0
            };
            sel.c_hat = c_hat;
            let bw = Bandwidth::new(c_hat, sel.gamma_hat, t_len)?;
            Ok(SelectedBandwidth { bandwidth: bw, selection: Some(sel), rejected: Vec::new() })
        }
        BandwidthMode::Bootstrap {
            grid,
            draws,
            tolerance,
            selection_confidence,
            select_scale,
            c_grid,
        } => {
            let grid = GammaGrid::new(grid.clone())?;
            let cfg = BootstrapConfig::new(
                *draws,
                selection_confidence.unwrap_or(est.confidence),
                *tolerance,
                derive_seed(est.seed, &[stream::SELECTION]),
            )?;
            let mut sel = bootstrap_select_gamma(data, &grid, &cfg, kernel)?;
            let rejected: Vec<f64> = grid
                .values()
                .iter()
                .copied()
                .filter(|g| !sel.upsilon.contains(g))
                .collect();
            let c_hat = if *select_scale {
                let cg = c_grid.clone().unwrap_or_else(default_scale_grid);
                select_scale_c(data, sel.gamma_hat, &cg, kernel)?
            } else {
                1.0
            };
            sel.c_hat = c_hat;
            let bw = Bandwidth::new(c_hat, sel.gamma_hat, t_len)?;
            Ok(SelectedBandwidth { bandwidth: bw, selection: Some(sel), rejected })
        }
    }
}

/// Coverage screen rendered with larger rates first, entries only where
/// `gamma2 <= gamma1`.
pub fn render_cr_table(sel: &SelectionResult) -> String {
    let mut gammas: Vec<f64> = Vec::new();
    for cell in &sel.cr_matrix {
        if !gammas.contains(&cell.gamma1) {
            gammas.push(cell.gamma1);
        }
    }
    gammas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut out = String::from("mean coverage of the refit intervals, by (gamma1, gamma2)\n");
    out.push_str("gamma1 \\ gamma2");
    for g2 in &gammas {
        out.push_str(&format!("  {g2:>7}"));
    }
    out.push('\n');
    for g1 in &gammas {
        out.push_str(&format!("{g1:>15}"));
        for g2 in &gammas {
            let cell = sel
                .cr_matrix
                .iter()
                .find(|c| c.gamma1 == *g1 && c.gamma2 == *g2)
                .map(|c| format!("{:.3}", c.rate))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!("  {cell:>7}"));
        }
        out.push('\n');
    }
    out
}

fn write_cr_matrix_csv(sel: &SelectionResult, path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(std::io::Error::other)?;
    w.write_record(["gamma1", "gamma2", "cr"]).map_err(std::io::Error::other)?;
    for cell in &sel.cr_matrix {
        w.write_record(&[
            cell.gamma1.to_string(),
            cell.gamma2.to_string(),
            cell.rate.to_string(),
        ])
        .map_err(std::io::Error::other)?;
    }
    w.flush().map_err(std::io::Error::other)?;
    Ok(())
}

fn write_cv_curves(
    data: &TimeSeriesData,
    grid: &GammaGrid,
    kernel: Kernel,
    ms: &[usize],
    path: &Path,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(std::io::Error::other)?;
    w.write_record(["m", "gamma", "cv"]).map_err(std::io::Error::other)?;
    for &m in ms {
        let sel = cv_select_gamma(data, grid, m, kernel)?;
        for (gamma, cv) in &sel.cv_curve {
            w.write_record(&[m.to_string(), gamma.to_string(), cv.to_string()])
                .map_err(std::io::Error::other)?;
        }
    }
    w.flush().map_err(std::io::Error::other)?;
    Ok(())
}

fn cmd_estimate(config_path: &Path) -> Result<(), CliError> {
    let est = estimate_section(config_path)?;
    let kernel = kernel_from_config(&est)?;
    let (data, names) = load_dataset(&est)?;
    std::fs::create_dir_all(&est.output_dir)?;

    let selected = resolve_bandwidth(&est, &data, kernel)?;
    let bw = selected.bandwidth;
    let result = estimate_path(&data, &bw, kernel, est.confidence)?;

    crate::io::write_estimates_csv(&result, &names, &est.output_dir.join("estimates.csv"))?;
    crate::io::write_bands_csv(&result, &names, &est.output_dir.join("bands.csv"))?;

    let mut report = String::new();
    report.push_str(&format!("input = {}\n", est.input.display()));
    report.push_str(&format!(
        "observations = {}, coefficients = {}\n",
        data.num_obs(),
        data.num_regressors()
    ));
    report.push_str(&format!("kernel = {}\n", kernel.name()));
    report.push_str(&format!(
        "bandwidth: c = {}, gamma = {}, h = {:.6}, half_window = {}\n",
        bw.c(),
        bw.gamma(),
        bw.h(),
        bw.half_window()
    ));
    report.push_str(&format!("confidence level = {}\n", 1.0 - est.confidence));
    report.push_str(&format!("ssr = {}\n", result.ssr()));
    report.push_str(&format!(
        "boundary points = {}\n",
        result.boundary.iter().filter(|b| **b).count()
    ));
    if let Some(sel) = &selected.selection {
        report.push_str(&format!("selected gamma = {}\n", sel.gamma_hat));
        report.push_str(&format!("selected c = {}\n", sel.c_hat));
        if !sel.cr_matrix.is_empty() {
            report.push_str(&format!(
                "accepted rates = [{}]\n",
                sel.upsilon.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
            ));
            report.push_str(&format!(
                "rejected rates = [{}]\n",
                selected.rejected.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
            ));
            report.push('\n');
            report.push_str(&render_cr_table(sel));
            write_cr_matrix_csv(sel, &est.output_dir.join("cr_matrix.csv"))?;
        }
        if !sel.cv_curve.is_empty() {
            let mut w = csv::Writer::from_path(est.output_dir.join("cv_curve.csv"))
                .map_err(std::io::Error::other)?;
            w.write_record(["m", "gamma", "cv"]).map_err(std::io::Error::other)?;
            let m = match &est.bandwidth {
                BandwidthMode::Cv { leave_out, .. } => *leave_out,
                _ => 0,
            };
            for (gamma, cv) in &sel.cv_curve {
                w.write_record(&[m.to_string(), gamma.to_string(), cv.to_string()])
                    .map_err(std::io::Error::other)?;
            }
            w.flush().map_err(std::io::Error::other)?;
        }
    }
    std::fs::write(est.output_dir.join("report.txt"), report)?;
    println!(
        "estimate: wrote estimates.csv, bands.csv, report.txt to {}",
        est.output_dir.display()
    );
    Ok(())
}

fn cmd_select_bandwidth(config_path: &Path) -> Result<(), CliError> {
    let est = estimate_section(config_path)?;
    let kernel = kernel_from_config(&est)?;
    let (data, _) = load_dataset(&est)?;
    std::fs::create_dir_all(&est.output_dir)?;

    let grid_values = match &est.bandwidth {
        BandwidthMode::Cv { grid, .. } | BandwidthMode::Bootstrap { grid, .. } => grid.clone(),
        BandwidthMode::Fixed { .. } => {
            return Err(CliError::Config(
                "select-bandwidth needs a cv or bootstrap bandwidth mode".into(),
            ))
        }
    };
    let grid = GammaGrid::new(grid_values)?;
    write_cv_curves(&data, &grid, kernel, &[0, 1, 2], &est.output_dir.join("cv_curve.csv"))?;

    let selected = resolve_bandwidth(&est, &data, kernel)?;
    let sel = selected.selection.expect("selection mode");
    let mut report = String::new();
    report.push_str(&format!("selected gamma = {}\n", sel.gamma_hat));
    report.push_str(&format!("selected c = {}\n", sel.c_hat));
    if !sel.cr_matrix.is_empty() {
        report.push_str(&format!(
            "accepted rates = [{}]\n",
            sel.upsilon.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
        ));
        report.push_str(&format!(
            "rejected rates = [{}]\n",
            selected.rejected.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
        ));
        report.push('\n');
        report.push_str(&render_cr_table(&sel));
        write_cr_matrix_csv(&sel, &est.output_dir.join("cr_matrix.csv"))?;
    }
    std::fs::write(est.output_dir.join("selection_report.txt"), report)?;
    println!("select-bandwidth: wrote selection_report.txt to {}", est.output_dir.display());
    Ok(())
}

fn cmd_build_portfolios(args: &BuildPortfoliosArgs) -> Result<(), CliError> {
    let target = PortfolioTarget::parse(&args.target)
        .ok_or_else(|| CliError::Config(format!("unknown target '{}'", args.target)))?;
    let parse_ym = |s: &Option<String>, fallback: YearMonth| -> Result<YearMonth, CliError> {
        match s {
            Some(v) => YearMonth::parse(v)
                .ok_or_else(|| CliError::Config(format!("bad month '{v}', expected YYYY-MM"))),
            None => Ok(fallback),
        }
    };
    let spec = PortfolioSpec {
        source: args.source.clone(),
        market_column: args.market_column.clone(),
        riskfree_column: args.riskfree_column.clone(),
        target,
        start: parse_ym(&args.start, YearMonth { year: 1952, month: 1 })?,
        end: parse_ym(&args.end, YearMonth { year: 2019, month: 12 })?,
    };
    let ds = build_portfolio_dataset(&spec)?;
    if let Some(parent) = args.output.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    write_portfolio_dataset(&ds, &args.output)?;
    println!(
        "build-portfolios: {} rows of {} written to {}",
        ds.dates.len(),
        target.name(),
        args.output.display()
    );
    Ok(())
}

fn cmd_simulate(config_path: &Path) -> Result<(), CliError> {
    let cfg: FileConfig = load_config(config_path)?;
    let mut sim_cfg =
        cfg.simulate.ok_or_else(|| CliError::Config("missing [simulate] section".into()))?;
    sim_cfg.seed = env_seed_override(sim_cfg.seed);
    sim_cfg.output_dir = env_output_override(sim_cfg.output_dir.clone());
    let sim = crate::dgp::simulate_dataset(&sim_cfg.dgp, sim_cfg.sample_size, sim_cfg.seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    std::fs::create_dir_all(&sim_cfg.output_dir)?;

    let p = sim.data.num_regressors();
    let mut w = csv::Writer::from_path(sim_cfg.output_dir.join("dataset.csv"))
        .map_err(std::io::Error::other)?;
    let mut header = vec!["y".to_string()];
    header.extend((0..p).map(|j| format!("x{j}")));
    w.write_record(&header).map_err(std::io::Error::other)?;
    for t in 0..sim.data.num_obs() {
        let mut rec = vec![sim.data.response()[t].to_string()];
        for j in 0..p {
            rec.push(sim.data.regressors()[(t, j)].to_string());
        }
        w.write_record(&rec).map_err(std::io::Error::other)?;
    }
    w.flush().map_err(std::io::Error::other)?;

    let mut w2 = csv::Writer::from_path(sim_cfg.output_dir.join("true_paths.csv"))
        .map_err(std::io::Error::other)?;
    let header2: Vec<String> = (0..p).map(|j| format!("beta{j}")).collect();
    w2.write_record(&header2).map_err(std::io::Error::other)?;
    for t in 0..sim.data.num_obs() {
        let rec: Vec<String> = (0..p).map(|j| sim.true_paths[(t, j)].to_string()).collect();
        w2.write_record(&rec).map_err(std::io::Error::other)?;
    }
    w2.flush().map_err(std::io::Error::other)?;
    println!("simulate: wrote dataset.csv and true_paths.csv to {}", sim_cfg.output_dir.display());
    Ok(())
}

fn cmd_mc(args: &McArgs) -> Result<(), CliError> {
    match (&args.preset, &args.config) {
        (Some(preset), None) => {
            let out_dir = env_output_override(
                args.output_dir
                    .clone()
                    .ok_or_else(|| CliError::Config("--preset requires --output-dir".into()))?,
            );
            std::fs::create_dir_all(&out_dir)?;
            let seed = env_seed_override(args.seed.unwrap_or(20_240_801));
            let reps = args.replications.unwrap_or(500);
            run_mc_preset(preset, reps, seed, &out_dir)
        }
        (None, Some(config_path)) => {
            let cfg: FileConfig = load_config(config_path)?;
            let mut section =
                cfg.mc.ok_or_else(|| CliError::Config("missing [mc] section".into()))?;
            section.output_dir = env_output_override(section.output_dir.clone());
            section.experiment.master_seed = env_seed_override(section.experiment.master_seed);
            if let Some(r) = args.replications {
                section.experiment.replications = r;
            }
            if let Some(s) = args.seed {
                section.experiment.master_seed = s;
            }
            std::fs::create_dir_all(&section.output_dir)?;
            let layout = match section.layout.as_deref() {
                None | Some("rates") => TableLayout::RatesBySampleSize,
                Some("pointwise") => TableLayout::PointwiseByEval,
                Some("custom") => TableLayout::Custom,
                Some(other) => {
                    return Err(CliError::Config(format!("unknown layout '{other}'")))
                }
            };
            let result = run_experiment(&section.experiment)?;
            write_mc_outputs(&result, layout, &section.output_dir)
        }
        _ => Err(CliError::Config("pass exactly one of --preset or --config".into())),
    }
}

fn write_mc_outputs(result: &McResult, layout: TableLayout, dir: &Path) -> Result<(), CliError> {
    write_result_csv(result, &dir.join("result.csv")).map_err(CliError::from)?;
    std::fs::write(dir.join("table.txt"), render_table(result, layout))?;
    write_manifest(result, &dir.join("manifest.txt"))?;
    println!("mc: wrote result.csv, table.txt, manifest.txt to {}", dir.display());
    Ok(())
}

fn run_mc_preset(preset: &str, reps: usize, seed: u64, dir: &Path) -> Result<(), CliError> {
    match preset {
        "table1-desk" => {
            let cfg = random_walk_benchmark(vec![100, 200, 400, 800], reps, 100, seed);
            let result = run_experiment(&cfg)?;
            write_mc_outputs(&result, TableLayout::RatesBySampleSize, dir)
        }
        "table3-desk" => {
            let result = neglected_break_study(
                &[0.1, 0.2, 0.3, 0.4],
                vec![100, 200, 400, 800],
                reps,
                seed,
                false,
            )?;
            write_mc_outputs(&result, TableLayout::PointwiseByEval, dir)
        }
        "table5-desk" => {
            let cfg = mixed_smooth_jump_benchmark(vec![100, 200, 400, 800], reps, 100, seed, false);
            let result = run_experiment(&cfg)?;
            write_mc_outputs(&result, TableLayout::RatesBySampleSize, dir)
        }
        "appendixB" | "appendix-b" => {
            let t_len = 2000;
            let curve_reps = if reps == 500 { 5000 } else { reps };
            let points =
                local_level_mse_curve(t_len, &local_level_h_grid(), 1.0, 1.0, curve_reps, seed)?;
            let mut w = csv::Writer::from_path(dir.join("mse_curve.csv"))
                .map_err(std::io::Error::other)?;
            w.write_record(["h", "empirical_mse", "mc_se", "theoretical_mse"])
                .map_err(std::io::Error::other)?;
            for p in &points {
                w.write_record(&[
                    p.h.to_string(),
                    p.empirical_mse.to_string(),
                    p.mc_se.to_string(),
                    p.theoretical_mse.to_string(),
                ])
                .map_err(std::io::Error::other)?;
            }
            w.flush().map_err(std::io::Error::other)?;
            let opt = crate::mc::theory::mse_minimizing_bandwidth(t_len, 1.0, 1.0)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            std::fs::write(
                dir.join("report.txt"),
                format!(
                    "T = {t_len}\nreplications = {curve_reps}\nseed = {seed}\nh_min = {}\nscale c = {}\n",
                    opt.h_min, opt.c
                ),
            )?;
            println!("mc: wrote mse_curve.csv and report.txt to {}", dir.display());
            Ok(())
        }
        other => Err(CliError::Config(format!(
            "unknown preset '{other}' (expected table1-desk, table3-desk, table5-desk, appendixB)"
        ))),
    }
}

fn cmd_plotdata(args: &PlotdataArgs) -> Result<(), CliError> {
    let mut rows = Vec::new();
    if let Some(p) = &args.estimates {
        rows.extend(tidy_from_estimates(p)?);
    }
    if let Some(p) = &args.bands {
        rows.extend(tidy_from_bands(p)?);
    }
    if let Some(p) = &args.cv_curve {
        rows.extend(tidy_from_cv_curve(p)?);
    }
    if args.estimates.is_none() && args.bands.is_none() && args.cv_curve.is_none() {
        return Err(CliError::Config(
            "pass at least one of --estimates, --bands, --cv-curve".into(),
        ));
    }
    if let Some(parent) = args.output.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    write_tidy(&rows, &args.output)?;
    println!("plotdata: {} rows written to {}", rows.len(), args.output.display());
    Ok(())
}
