//! Monte Carlo experiment runner: simulates a configured data-generating
//! process, estimates the coefficient path at fixed and data-selected
//! bandwidths, and aggregates path MSE, pointwise MSE, and interval
//! coverage with Monte Carlo standard errors.

pub mod presets;
pub mod table;
pub mod theory;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandwidth::{
    bootstrap_select_gamma, cv_select_gamma, BootstrapConfig, GammaGrid, SelectionResult,
};
use crate::dgp::{fraction_to_count, simulate_dataset, DatasetSpec};
use crate::error::McError;
use crate::estimator::{
    fit_path, global_sandwich_covariance, local_sandwich_covariance, normal_quantile_two_sided,
    Bandwidth, TimeSeriesData,
};
use crate::kernels::Kernel;
use crate::rng::{derive_seed, stream};

/// How a bandwidth is chosen within each replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum BandwidthChoice {
    Fixed {
        c: f64,
        gamma: f64,
    },
    /// Leave-`(2m+1)`-out cross-validation over the grid with unit scale.
    CrossValidation {
        grid: GammaGrid,
        leave_out: usize,
    },
    /// Coverage-based wild-bootstrap rate selection. `selection_q` is the
    /// miscoverage level of the inner bootstrap intervals, which may
    /// differ from the experiment's reporting level.
    Bootstrap {
        grid: GammaGrid,
        draws: usize,
        tolerance_q: f64,
        selection_q: f64,
    },
}

pub(crate) fn trim_float(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.into()
    }
}

impl BandwidthChoice {
    /// Row label used in rendered tables and CSV output.
    pub fn label(&self) -> String {
        match self {
            BandwidthChoice::Fixed { c, gamma } => {
                if (c - 1.0).abs() < 1e-12 {
                    trim_float(*gamma)
                } else {
                    format!("{}*T^{}", trim_float(*c), trim_float(*gamma))
                }
            }
            BandwidthChoice::CrossValidation { .. } => "CV".into(),
            BandwidthChoice::Bootstrap { .. } => "Boot".into(),
        }
    }
}

/// Which per-cell statistics the runner records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricFlags {
    pub mse_path: bool,
    pub mse_pointwise: bool,
    pub coverage: bool,
}

/// Variance estimator used for pointwise intervals: full-sample moments
/// for covariance-stationary designs, or kernel-weighted local moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceEstimator {
    Global,
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub dgp: DatasetSpec,
    pub sample_sizes: Vec<usize>,
    pub bandwidths: Vec<BandwidthChoice>,
    pub replications: usize,
    /// Sample fractions at which pointwise metrics are evaluated.
    pub eval_points: Vec<f64>,
    pub metrics: MetricFlags,
    pub variance: VarianceEstimator,
    pub kernel: Kernel,
    pub confidence_q: f64,
    pub master_seed: u64,
}

impl McConfig {
    pub fn validate(&self) -> Result<(), McError> {
        if self.replications == 0 {
            return Err(McError::InvalidConfig("need at least one replication".into()));
        }
        if self.sample_sizes.is_empty() || self.bandwidths.is_empty() {
            return Err(McError::InvalidConfig("need sample sizes and bandwidths".into()));
        }
        if self.eval_points.iter().any(|&f| !(f > 0.0 && f < 1.0)) {
            return Err(McError::InvalidConfig("eval fractions must lie in (0, 1)".into()));
        }
        if (self.metrics.coverage || self.metrics.mse_pointwise) && self.eval_points.is_empty() {
            return Err(McError::InvalidConfig(
                "pointwise metrics require at least one eval point".into(),
            ));
        }
        if !(self.confidence_q > 0.0 && self.confidence_q < 1.0) {
            return Err(McError::InvalidConfig("confidence q must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Stable digest of the configuration for run manifests.
    pub fn digest(&self) -> u64 {
        let bytes = serde_json::to_vec(self).expect("serializable config");
        let mut acc: u64 = 0xcbf2_9ce4_8422_2325;
        for b in bytes {
            acc ^= b as u64;
            acc = acc.wrapping_mul(0x1000_0000_01b3);
        }
        acc
    }
}

/// Pointwise statistics at one eval fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointStats {
    pub tau: f64,
    pub mse: Option<f64>,
    pub mse_se: Option<f64>,
    /// `None` when every replication produced a degenerate (zero-width)
    /// interval.
    pub coverage: Option<f64>,
    pub coverage_se: Option<f64>,
}

/// Aggregated statistics for one `(row, sample size)` cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellStats {
    pub row: String,
    pub sample_size: usize,
    pub mean_mse_path: Option<f64>,
    pub mse_path_se: Option<f64>,
    pub points: Vec<PointStats>,
    pub mean_selected_gamma: Option<f64>,
    pub failures: usize,
    pub wall_time_s: f64,
}

// Wall time is bookkeeping, not part of the reproducibility contract.
impl PartialEq for CellStats {
    fn eq(&self, other: &Self) -> bool {
        self.row == other.row
            && self.sample_size == other.sample_size
            && self.mean_mse_path == other.mean_mse_path
            && self.mse_path_se == other.mse_path_se
            && self.points == other.points
            && self.mean_selected_gamma == other.mean_selected_gamma
            && self.failures == other.failures
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub cells: Vec<CellStats>,
    pub replications: usize,
    pub master_seed: u64,
    pub config_digest: u64,
}

impl McResult {
    pub fn cell(&self, row: &str, sample_size: usize) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.row == row && c.sample_size == sample_size)
    }

    /// Total failed replication-cells; acceptance runs require zero.
    pub fn total_failures(&self) -> usize {
        self.cells.iter().map(|c| c.failures).sum()
    }
}

struct RepOutcome {
    mse_path: Option<f64>,
    point_sq_err: Vec<Option<f64>>,
    point_covered: Vec<Option<bool>>,
    selected_gamma: Option<f64>,
}

/// Compensated (Kahan) accumulator; aggregation must not depend on the
/// parallel schedule, so sums run over an index-ordered buffer.
#[derive(Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

fn mean_and_se(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mut s = KahanSum::default();
    for &v in values {
        s.add(v);
    }
    let mean = s.value() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let mut sq = KahanSum::default();
    for &v in values {
        sq.add((v - mean) * (v - mean));
    }
    let var = sq.value() / (n - 1.0);
    (Some(mean), Some((var / n).sqrt()))
}

fn resolve_bandwidth(
    choice: &BandwidthChoice,
    choice_idx: usize,
    data: &TimeSeriesData,
    kernel: Kernel,
    rep_seed: u64,
) -> Result<(Bandwidth, Option<f64>), String> {
    let t_len = data.num_obs();
    match choice {
        BandwidthChoice::Fixed { c, gamma } => {
            let bw = Bandwidth::new(*c, *gamma, t_len).map_err(|e| e.to_string())?;
            Ok((bw, None))
        }
        BandwidthChoice::CrossValidation { grid, leave_out } => {
            let sel: SelectionResult =
                cv_select_gamma(data, grid, *leave_out, kernel).map_err(|e| e.to_string())?;
            let bw = Bandwidth::from_rate(sel.gamma_hat, t_len).map_err(|e| e.to_string())?;
            Ok((bw, Some(sel.gamma_hat)))
        }
        BandwidthChoice::Bootstrap { grid, draws, tolerance_q, selection_q } => {
            let cfg = BootstrapConfig {
                draws: *draws,
                confidence_q: *selection_q,
                tolerance_q: *tolerance_q,
                seed: derive_seed(rep_seed, &[stream::SELECTION, choice_idx as u64]),
                multiplier: crate::bandwidth::WildMultiplier::GaussianWild,
                coverage: crate::bandwidth::CoverageRule::JointAcrossCoefficients,
            };
            let sel = bootstrap_select_gamma(data, grid, &cfg, kernel).map_err(|e| e.to_string())?;
            let bw = Bandwidth::from_rate(sel.gamma_hat, t_len).map_err(|e| e.to_string())?;
            Ok((bw, Some(sel.gamma_hat)))
        }
    }
}

fn run_one_rep(
    cfg: &McConfig,
    t_len: usize,
    rep: usize,
    z: f64,
) -> Vec<Result<RepOutcome, String>> {
    let rep_seed = derive_seed(cfg.master_seed, &[stream::REPLICATION, t_len as u64, rep as u64]);
    let sim = match simulate_dataset(&cfg.dgp, t_len, rep_seed) {
        Ok(s) => s,
        Err(e) => {
            return (0..cfg.bandwidths.len())
                .map(|_| Err(format!("simulation failed: {e}")))
                .collect();
        }
    };
    let p = sim.data.num_regressors();
    let eval_idx: Vec<usize> =
        cfg.eval_points.iter().map(|&tau| fraction_to_count(tau, t_len) - 1).collect();

    cfg.bandwidths
        .iter()
        .enumerate()
        .map(|(ci, choice)| {
            let (bw, selected) = resolve_bandwidth(choice, ci, &sim.data, cfg.kernel, rep_seed)?;
            let fit = fit_path(&sim.data, &bw, cfg.kernel).map_err(|e| e.to_string())?;

            let mse_path = if cfg.metrics.mse_path {
                let mut acc = KahanSum::default();
                for t in 0..t_len {
                    for j in 0..p {
                        let d = fit.beta[(t, j)] - sim.true_paths[(t, j)];
                        acc.add(d * d);
                    }
                }
                Some(acc.value() / t_len as f64)
            } else {
                None
            };

            let mut point_sq_err = Vec::with_capacity(eval_idx.len());
            let mut point_covered = Vec::with_capacity(eval_idx.len());
            for &ti in &eval_idx {
                if cfg.metrics.mse_pointwise {
                    let mut sq = 0.0;
                    for j in 0..p {
                        let d = fit.beta[(ti, j)] - sim.true_paths[(ti, j)];
                        sq += d * d;
                    }
                    point_sq_err.push(Some(sq));
                } else {
                    point_sq_err.push(None);
                }
                if cfg.metrics.coverage {
                    let cov = match cfg.variance {
                        VarianceEstimator::Global => global_sandwich_covariance(
                            &sim.data,
                            &fit.residuals,
                            cfg.kernel,
                            bw.h(),
                        ),
                        VarianceEstimator::Local => local_sandwich_covariance(
                            &sim.data,
                            &fit.residuals,
                            ti,
                            &bw,
                            cfg.kernel,
                        ),
                    }
                    .map_err(|e| e.to_string())?;
                    let mut degenerate = true;
                    let mut all_cover = true;
                    for j in 0..p {
                        let se = cov[j * p + j].max(0.0).sqrt();
                        if se > 1e-14 * (1.0 + fit.beta[(ti, j)].abs()) {
                            degenerate = false;
                        }
                        if (fit.beta[(ti, j)] - sim.true_paths[(ti, j)]).abs() > z * se {
                            all_cover = false;
                        }
                    }
                    // Numerically zero-width intervals carry no coverage
                    // information and are reported as missing.
                    point_covered.push(if degenerate { None } else { Some(all_cover) });
                } else {
                    point_covered.push(None);
                }
            }

            Ok(RepOutcome { mse_path, point_sq_err, point_covered, selected_gamma: selected })
        })
        .collect()
}

/// Runs the configured experiment. Replications are simulated and scored
/// in parallel on deterministic substreams; aggregation order is fixed by
/// replication index, so results are identical for any worker count.
pub fn run_experiment(cfg: &McConfig) -> Result<McResult, McError> {
    cfg.validate()?;
    let z = normal_quantile_two_sided(cfg.confidence_q);
    let mut cells = Vec::new();

    for &t_len in &cfg.sample_sizes {
        let started = std::time::Instant::now();
        let per_rep: Vec<Vec<Result<RepOutcome, String>>> = (0..cfg.replications)
            .into_par_iter()
            .map(|rep| run_one_rep(cfg, t_len, rep, z))
            .collect();
        let elapsed = started.elapsed().as_secs_f64();

        for (ci, choice) in cfg.bandwidths.iter().enumerate() {
            let mut mse_values = Vec::new();
            let mut selected = Vec::new();
            let mut point_sq: Vec<Vec<f64>> = vec![Vec::new(); cfg.eval_points.len()];
            let mut point_cov: Vec<(usize, usize)> = vec![(0, 0); cfg.eval_points.len()];
            let mut failures = 0usize;
            for rep_outcomes in &per_rep {
                match &rep_outcomes[ci] {
                    Ok(out) => {
                        if let Some(m) = out.mse_path {
                            mse_values.push(m);
                        }
                        if let Some(g) = out.selected_gamma {
                            selected.push(g);
                        }
                        for (k, v) in out.point_sq_err.iter().enumerate() {
                            if let Some(sq) = v {
                                point_sq[k].push(*sq);
                            }
                        }
                        for (k, v) in out.point_covered.iter().enumerate() {
                            if let Some(c) = v {
                                point_cov[k].0 += *c as usize;
                                point_cov[k].1 += 1;
                            }
                        }
                    }
                    Err(_) => failures += 1,
                }
            }

            let (mean_mse_path, mse_path_se) = mean_and_se(&mse_values);
            let points = cfg
                .eval_points
                .iter()
                .enumerate()
                .map(|(k, &tau)| {
                    let (mse, mse_se) = mean_and_se(&point_sq[k]);
                    let (covered, total) = point_cov[k];
                    let (coverage, coverage_se) = if total > 0 {
                        let rate = covered as f64 / total as f64;
                        (Some(rate), Some((rate * (1.0 - rate) / total as f64).sqrt()))
                    } else {
                        (None, None)
                    };
                    PointStats { tau, mse, mse_se, coverage, coverage_se }
                })
                .collect();
            let (mean_selected_gamma, _) = mean_and_se(&selected);

            cells.push(CellStats {
                row: choice.label(),
                sample_size: t_len,
                mean_mse_path: if cfg.metrics.mse_path { mean_mse_path } else { None },
                mse_path_se: if cfg.metrics.mse_path { mse_path_se } else { None },
                points,
                mean_selected_gamma: if selected.is_empty() { None } else { mean_selected_gamma },
                failures,
                wall_time_s: elapsed,
            });
        }
    }

    Ok(McResult {
        cells,
        replications: cfg.replications,
        master_seed: cfg.master_seed,
        config_digest: cfg.digest(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{ErrorSpec, RegressorSpec, RwDriver, SmoothFunction, TvpSpec};

    fn tiny_config() -> McConfig {
        McConfig {
            dgp: DatasetSpec::single(
                TvpSpec::RescaledRandomWalk {
                    mu: 0.0,
                    driver: RwDriver::Gaussian { sd: 1.0 },
                    scale_exponent: 0.5,
                },
                RegressorSpec::ar1_default(),
                ErrorSpec::Iid { sigma: 1.0 },
            ),
            sample_sizes: vec![100],
            bandwidths: vec![
                BandwidthChoice::Fixed { c: 1.0, gamma: -0.5 },
                BandwidthChoice::Fixed { c: 1.0, gamma: -0.2 },
            ],
            replications: 40,
            eval_points: vec![0.5],
            metrics: MetricFlags { mse_path: true, mse_pointwise: false, coverage: true },
            variance: VarianceEstimator::Global,
            kernel: Kernel::Epanechnikov,
            confidence_q: 0.05,
            master_seed: 314,
        }
    }

    #[test]
    fn runner_is_deterministic_and_labels_cells() {
        let cfg = tiny_config();
        let r1 = run_experiment(&cfg).unwrap();
        let r2 = run_experiment(&cfg).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.cell("-0.5", 100).is_some());
        assert!(r1.cell("-0.2", 100).is_some());
        assert_eq!(r1.total_failures(), 0);
        let cell = r1.cell("-0.5", 100).unwrap();
        assert!(cell.mean_mse_path.unwrap() > 0.0);
        let cov = cell.points[0].coverage.unwrap();
        assert!(cov > 0.5 && cov <= 1.0);
    }

    #[test]
    fn noiseless_single_replication_reports_na_coverage() {
        let mut cfg = tiny_config();
        cfg.dgp = DatasetSpec::single(
            TvpSpec::Smooth { f: SmoothFunction::Polynomial { coefficients: vec![2.0] } },
            RegressorSpec::ar1_default(),
            ErrorSpec::Iid { sigma: 0.0 },
        );
        cfg.replications = 1;
        cfg.bandwidths = vec![BandwidthChoice::Fixed { c: 1.0, gamma: -0.5 }];
        let r = run_experiment(&cfg).unwrap();
        let cell = r.cell("-0.5", 100).unwrap();
        assert!(cell.mean_mse_path.unwrap() < 1e-18);
        assert_eq!(cell.points[0].coverage, None);
        assert_eq!(cell.failures, 0);
    }

    #[test]
    fn mse_decreases_with_sample_size() {
        let mut cfg = tiny_config();
        cfg.sample_sizes = vec![100, 400];
        cfg.replications = 60;
        cfg.bandwidths = vec![BandwidthChoice::Fixed { c: 1.0, gamma: -0.5 }];
        let r = run_experiment(&cfg).unwrap();
        let small = r.cell("-0.5", 100).unwrap().mean_mse_path.unwrap();
        let large = r.cell("-0.5", 400).unwrap().mean_mse_path.unwrap();
        assert!(large < small, "mse should shrink with T: {small} -> {large}");
    }

    #[test]
    fn config_validation_rejects_bad_settings() {
        let mut cfg = tiny_config();
        cfg.replications = 0;
        assert!(run_experiment(&cfg).is_err());
        let mut cfg2 = tiny_config();
        cfg2.eval_points = vec![1.5];
        assert!(run_experiment(&cfg2).is_err());
    }

    #[test]
    fn labels_render_compactly() {
        assert_eq!(BandwidthChoice::Fixed { c: 1.0, gamma: -0.5 }.label(), "-0.5");
        assert_eq!(BandwidthChoice::Fixed { c: 1.0, gamma: -1.0 / 3.0 }.label(), "-0.333");
        assert_eq!(BandwidthChoice::Fixed { c: 0.8, gamma: -0.5 }.label(), "0.8*T^-0.5");
        let grid = GammaGrid::selection_default();
        assert_eq!(
            BandwidthChoice::CrossValidation { grid: grid.clone(), leave_out: 1 }.label(),
            "CV"
        );
        assert_eq!(
            BandwidthChoice::Bootstrap { grid, draws: 100, tolerance_q: 0.1, selection_q: 0.1 }
                .label(),
            "Boot"
        );
    }
}
