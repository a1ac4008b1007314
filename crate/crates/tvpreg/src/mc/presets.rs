//! Ready-made experiment designs used by the CLI presets and the
//! acceptance suite: random-walk coefficient benchmarks, neglected-break
//! bias studies, a mixed smooth-plus-jump design, and the local-level
//! bandwidth-optimality curve.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandwidth::GammaGrid;
use crate::dgp::{
    fraction_to_count, simulate_dataset, DatasetSpec, ErrorSpec, RegressorSpec, RwDriver,
    SmoothFunction, TvpSpec,
};
use crate::error::McError;
use crate::estimator::{local_constant_estimate, Bandwidth};
use crate::kernels::Kernel;
use crate::mc::theory::mse_theoretical_local_level;
use crate::mc::{
    run_experiment, BandwidthChoice, McConfig, McResult, MetricFlags, VarianceEstimator,
};
use crate::rng::{derive_seed, stream};

/// Random-walk coefficient on an AR(1) regressor.
pub fn random_walk_dgp(lognormal_driver: bool, garch_errors: bool) -> DatasetSpec {
    let driver =
        if lognormal_driver { RwDriver::LogNormal } else { RwDriver::Gaussian { sd: 1.0 } };
    let error = if garch_errors { ErrorSpec::garch_default() } else { ErrorSpec::Iid { sigma: 1.0 } };
    DatasetSpec::single(
        TvpSpec::RescaledRandomWalk { mu: 0.0, driver, scale_exponent: 0.5 },
        RegressorSpec::ar1_default(),
        error,
    )
}

/// Random walk plus an abrupt mid-sample level shift of size `2 T^{-alpha}`.
pub fn neglected_break_dgp(alpha: f64, garch_errors: bool) -> DatasetSpec {
    let error = if garch_errors { ErrorSpec::garch_default() } else { ErrorSpec::Iid { sigma: 1.0 } };
    DatasetSpec::single(
        TvpSpec::Mixture {
            components: vec![
                TvpSpec::RescaledRandomWalk {
                    mu: 0.0,
                    driver: RwDriver::Gaussian { sd: 1.0 },
                    scale_exponent: 0.5,
                },
                TvpSpec::StructuralBreak {
                    break_fractions: vec![0.5],
                    levels: vec![0.0, 2.0],
                    alpha,
                    delta: 1.0,
                },
            ],
        },
        RegressorSpec::ar1_default(),
        error,
    )
}

/// Smooth linear trend with a jump of size `1.5 T^{-0.4}` at mid-sample.
pub fn mixed_smooth_jump_dgp(garch_errors: bool) -> DatasetSpec {
    let error = if garch_errors { ErrorSpec::garch_default() } else { ErrorSpec::Iid { sigma: 1.0 } };
    DatasetSpec::single(
        TvpSpec::Mixture {
            components: vec![
                TvpSpec::Smooth { f: SmoothFunction::Polynomial { coefficients: vec![0.0, 1.0] } },
                TvpSpec::StructuralBreak {
                    break_fractions: vec![0.5],
                    levels: vec![0.0, 1.5],
                    alpha: 0.4,
                    delta: 1.0,
                },
            ],
        },
        RegressorSpec::ar1_default(),
        error,
    )
}

/// Fixed-rate rows `{-0.2, -0.33, -0.5, -0.55, -0.6, -0.7}` plus CV and
/// bootstrap selector rows.
pub fn benchmark_bandwidth_rows(selector_draws: usize) -> Vec<BandwidthChoice> {
    let mut rows: Vec<BandwidthChoice> = [-0.2, -1.0 / 3.0, -0.5, -0.55, -0.6, -0.7]
        .iter()
        .map(|&gamma| BandwidthChoice::Fixed { c: 1.0, gamma })
        .collect();
    rows.push(BandwidthChoice::CrossValidation {
        grid: GammaGrid::from_range(-0.5, -0.2, 0.02).expect("valid grid"),
        leave_out: 1,
    });
    rows.push(BandwidthChoice::Bootstrap {
        grid: GammaGrid::selection_default(),
        draws: selector_draws,
        tolerance_q: 0.10,
        selection_q: 0.10,
    });
    rows
}

/// Desk-scale random-walk benchmark across sample sizes, path MSE plus
/// mid-sample coverage under full-sample variance moments.
pub fn random_walk_benchmark(
    sample_sizes: Vec<usize>,
    replications: usize,
    selector_draws: usize,
    master_seed: u64,
) -> McConfig {
    McConfig {
        dgp: random_walk_dgp(false, false),
        sample_sizes,
        bandwidths: benchmark_bandwidth_rows(selector_draws),
        replications,
        eval_points: vec![0.5],
        metrics: MetricFlags { mse_path: true, mse_pointwise: false, coverage: true },
        variance: VarianceEstimator::Global,
        kernel: Kernel::Epanechnikov,
        confidence_q: 0.05,
        master_seed,
    }
}

/// Neglected-break study: pointwise MSE and coverage near the break at
/// `h = T^{-1/2}`, kernel-weighted variance moments. One result row per
/// break exponent. All exponents share the same random draws (the break
/// component is deterministic), so cells outside the break window are
/// identical across rows and differences isolate the break size.
pub fn neglected_break_study(
    alphas: &[f64],
    sample_sizes: Vec<usize>,
    replications: usize,
    master_seed: u64,
    garch_errors: bool,
) -> Result<McResult, McError> {
    let mut merged: Option<McResult> = None;
    for &alpha in alphas {
        let cfg = McConfig {
            dgp: neglected_break_dgp(alpha, garch_errors),
            sample_sizes: sample_sizes.clone(),
            bandwidths: vec![BandwidthChoice::Fixed { c: 1.0, gamma: -0.5 }],
            replications,
            eval_points: vec![0.4, 0.45, 0.5, 0.55, 0.6],
            metrics: MetricFlags { mse_path: false, mse_pointwise: true, coverage: true },
            variance: VarianceEstimator::Local,
            kernel: Kernel::Epanechnikov,
            confidence_q: 0.05,
            master_seed,
        };
        let mut result = run_experiment(&cfg)?;
        for cell in &mut result.cells {
            cell.row = format!("alpha={}", super::trim_float(alpha));
        }
        match &mut merged {
            None => merged = Some(result),
            Some(m) => m.cells.extend(result.cells),
        }
    }
    Ok(merged.expect("at least one alpha"))
}

/// Mixed smooth-plus-jump benchmark: path MSE plus coverage at the break
/// point for fixed rates and both selectors.
pub fn mixed_smooth_jump_benchmark(
    sample_sizes: Vec<usize>,
    replications: usize,
    selector_draws: usize,
    master_seed: u64,
    garch_errors: bool,
) -> McConfig {
    let mut rows: Vec<BandwidthChoice> = [-0.2, -1.0 / 3.0, -0.5]
        .iter()
        .map(|&gamma| BandwidthChoice::Fixed { c: 1.0, gamma })
        .collect();
    rows.push(BandwidthChoice::CrossValidation {
        grid: GammaGrid::from_range(-0.5, -0.2, 0.02).expect("valid grid"),
        leave_out: 1,
    });
    rows.push(BandwidthChoice::Bootstrap {
        grid: GammaGrid::selection_default(),
        draws: selector_draws,
        tolerance_q: 0.10,
        selection_q: 0.10,
    });
    McConfig {
        dgp: mixed_smooth_jump_dgp(garch_errors),
        sample_sizes,
        bandwidths: rows,
        replications,
        eval_points: vec![0.5],
        metrics: MetricFlags { mse_path: true, mse_pointwise: false, coverage: true },
        variance: VarianceEstimator::Global,
        kernel: Kernel::Epanechnikov,
        confidence_q: 0.05,
        master_seed,
    }
}

/// One point of the local-level bandwidth-risk curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub h: f64,
    pub empirical_mse: f64,
    pub mc_se: f64,
    pub theoretical_mse: f64,
}

/// Empirical versus closed-form MSE of the uniform-kernel estimator at
/// the sample midpoint in the local-level model `y_t = beta_t + eps_t`
/// with a rescaled-random-walk level. Shared replications across the
/// bandwidth grid.
pub fn local_level_mse_curve(
    t_len: usize,
    h_grid: &[f64],
    sigma_u: f64,
    sigma_eps: f64,
    replications: usize,
    master_seed: u64,
) -> Result<Vec<CurvePoint>, McError> {
    if h_grid.is_empty() {
        return Err(McError::InvalidConfig("empty bandwidth grid".into()));
    }
    let spec = DatasetSpec::single(
        TvpSpec::RescaledRandomWalk {
            mu: 0.0,
            driver: RwDriver::Gaussian { sd: sigma_u },
            scale_exponent: 0.5,
        },
        RegressorSpec::Constant,
        ErrorSpec::Iid { sigma: sigma_eps },
    );
    let mid = fraction_to_count(0.5, t_len) - 1;
    let bandwidths: Vec<Bandwidth> = h_grid
        .iter()
        .map(|&h| Bandwidth::from_absolute(h, t_len).map_err(McError::Estimator))
        .collect::<Result<_, _>>()?;

    let sq_errs: Vec<Vec<f64>> = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let seed = derive_seed(master_seed, &[stream::REPLICATION, t_len as u64, rep as u64]);
            let sim = simulate_dataset(&spec, t_len, seed).expect("valid local-level spec");
            bandwidths
                .iter()
                .map(|bw| {
                    let est = local_constant_estimate(&sim.data, mid, bw, Kernel::Uniform)
                        .expect("intercept design is nonsingular");
                    let d = est[0] - sim.true_paths[(mid, 0)];
                    d * d
                })
                .collect()
        })
        .collect();

    let n = replications as f64;
    let mut out = Vec::with_capacity(h_grid.len());
    for (k, &h) in h_grid.iter().enumerate() {
        let mut sum = super::KahanSum::default();
        for rep in 0..replications {
            sum.add(sq_errs[rep][k]);
        }
        let mean = sum.value() / n;
        let mut sq = super::KahanSum::default();
        for rep in 0..replications {
            let d = sq_errs[rep][k] - mean;
            sq.add(d * d);
        }
        let se = if replications > 1 { (sq.value() / (n - 1.0) / n).sqrt() } else { 0.0 };
        let theory = mse_theoretical_local_level(h, t_len, sigma_u * sigma_u, sigma_eps * sigma_eps)
            .map_err(|e| McError::InvalidConfig(e.to_string()))?;
        out.push(CurvePoint { h, empirical_mse: mean, mc_se: se, theoretical_mse: theory });
    }
    Ok(out)
}

/// The `{0.01, 0.02, ..., 0.30}` bandwidth grid for the local-level
/// curve.
pub fn local_level_h_grid() -> Vec<f64> {
    (1..=30).map(|k| 0.01 * k as f64).collect()
}
