//! Statistical behavior of the data-driven bandwidth selectors at
//! moderate replication counts, plus the fixture-driven estimation
//! pipeline through the library API.

use std::path::Path;

use tvpreg::bandwidth::GammaGrid;
use tvpreg::estimator::{estimate_path, Bandwidth, TimeSeriesData};
use tvpreg::io::portfolio::{build_portfolio_dataset, PortfolioSpec, PortfolioTarget, YearMonth};
use tvpreg::kernels::Kernel;
use tvpreg::mc::presets::random_walk_dgp;
use tvpreg::mc::{
    run_experiment, BandwidthChoice, McConfig, MetricFlags, VarianceEstimator,
};

/// The leave-out cross-validation row tracks the MSE of the fixed rate
/// near the criterion's minimizer on random-walk data, and the selected
/// rates concentrate around it.
#[test]
fn cv_selector_tracks_low_mse_rate() {
    let cfg = McConfig {
        dgp: random_walk_dgp(false, false),
        sample_sizes: vec![400],
        bandwidths: vec![
            BandwidthChoice::Fixed { c: 1.0, gamma: -1.0 / 3.0 },
            BandwidthChoice::CrossValidation {
                grid: GammaGrid::from_range(-0.5, -0.2, 0.02).unwrap(),
                leave_out: 1,
            },
        ],
        replications: 150,
        eval_points: vec![0.5],
        metrics: MetricFlags { mse_path: true, mse_pointwise: false, coverage: true },
        variance: VarianceEstimator::Global,
        kernel: Kernel::Epanechnikov,
        confidence_q: 0.05,
        master_seed: 818_283,
    };
    let result = run_experiment(&cfg).unwrap();
    assert_eq!(result.total_failures(), 0);
    let fixed = result.cell("-0.333", 400).unwrap();
    let cv = result.cell("CV", 400).unwrap();
    let mse_gap = (cv.mean_mse_path.unwrap() - fixed.mean_mse_path.unwrap()).abs();
    assert!(mse_gap <= 0.006, "cv mse gap {mse_gap}");
    let mean_rate = cv.mean_selected_gamma.unwrap();
    assert!(
        (-0.45..=-0.25).contains(&mean_rate),
        "selected rates should concentrate near the criterion minimizer, got {mean_rate}"
    );
}

/// The cross-validated scale lands within one grid step of the scale
/// minimizing the true path risk on a smooth design (risk curve computed
/// by brute force against the known coefficient path).
#[test]
fn scale_selection_tracks_risk_minimizer() {
    use tvpreg::bandwidth::{default_scale_grid, select_scale_c};
    use tvpreg::dgp::{simulate_dataset, DatasetSpec, ErrorSpec, RegressorSpec, SmoothFunction, TvpSpec};
    use tvpreg::estimator::fit_path;

    let t_len = 400usize;
    let gamma = -1.0 / 3.0;
    let spec = DatasetSpec::single(
        TvpSpec::Smooth { f: SmoothFunction::BumpTrend },
        RegressorSpec::ar1_default(),
        ErrorSpec::Iid { sigma: 1.0 },
    );
    let grid = default_scale_grid();

    // Brute-force risk curve: mean path MSE against the true path.
    let mut risk = vec![0.0f64; grid.len()];
    let reps = 60;
    for rep in 0..reps {
        let sim = simulate_dataset(&spec, t_len, 9_000 + rep).unwrap();
        for (k, &c) in grid.iter().enumerate() {
            let bw = Bandwidth::new(c, gamma, t_len).unwrap();
            let fit = fit_path(&sim.data, &bw, Kernel::Epanechnikov).unwrap();
            let mut mse = 0.0;
            for t in 0..t_len {
                let d = fit.beta[(t, 0)] - sim.true_paths[(t, 0)];
                mse += d * d;
            }
            risk[k] += mse / t_len as f64;
        }
    }
    let best = risk
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(k, _)| grid[k])
        .unwrap();

    // Median selected scale across independent datasets.
    let mut selected: Vec<f64> = (0..15)
        .map(|rep| {
            let sim = simulate_dataset(&spec, t_len, 20_000 + rep).unwrap();
            select_scale_c(&sim.data, gamma, &grid, Kernel::Epanechnikov).unwrap()
        })
        .collect();
    selected.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = selected[selected.len() / 2];
    assert!(
        (median - best).abs() <= 0.05 + 1e-12,
        "median selected scale {median} vs risk minimizer {best}"
    );
}

fn fixture_dataset(target: PortfolioTarget) -> TimeSeriesData {
    let spec = PortfolioSpec {
        source: Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures/synthetic_25_portfolios.csv"),
        market_column: "mkt_rf".into(),
        riskfree_column: "rf".into(),
        target,
        start: YearMonth::new(1952, 1).unwrap(),
        end: YearMonth::new(2019, 12).unwrap(),
    };
    let ds = build_portfolio_dataset(&spec).unwrap();
    let t_len = ds.excess_return.len();
    let mut x = ndarray::Array2::zeros((t_len, 2));
    for t in 0..t_len {
        x[(t, 0)] = 1.0;
        x[(t, 1)] = ds.market_excess[t];
    }
    TimeSeriesData::new(ndarray::Array1::from_vec(ds.excess_return), x).unwrap()
}

/// The fixture's intercept path is identically zero by construction, so
/// the estimated intercept band should cover zero away from the sample
/// edges at a mid-range bandwidth.
#[test]
fn fixture_intercept_band_covers_zero() {
    let data = fixture_dataset(PortfolioTarget::ValueMinusGrowth);
    let t_len = data.num_obs();
    assert_eq!(t_len, 816);
    let bw = Bandwidth::new(1.0, -1.0 / 3.0, t_len).unwrap();
    let est = estimate_path(&data, &bw, Kernel::Epanechnikov, 0.05).unwrap();
    let mut misses = 0usize;
    let mut interior = 0usize;
    for t in 0..t_len {
        if est.boundary[t] {
            continue;
        }
        interior += 1;
        if est.ci_lower[(t, 0)] > 0.0 || est.ci_upper[(t, 0)] < 0.0 {
            misses += 1;
        }
    }
    assert!(interior > 500);
    assert_eq!(
        misses, 0,
        "intercept band should cover zero at all interior points, missed {misses}/{interior}"
    );
    // The market-slope path must track the fixture's built-in drift:
    // value-minus-growth sensitivity is negative on average.
    let mean_slope: f64 =
        (0..t_len).map(|t| est.beta_hat[(t, 1)]).sum::<f64>() / t_len as f64;
    assert!(mean_slope < -0.1, "mean slope {mean_slope}");
}
