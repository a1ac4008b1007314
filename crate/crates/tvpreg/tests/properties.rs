//! Randomized property checks for the estimator and kernel layers.

use ndarray::{Array1, Array2};
use proptest::prelude::*;

use tvpreg::estimator::{fit_path, local_constant_estimate, Bandwidth, TimeSeriesData};
use tvpreg::kernels::Kernel;

fn kernel_strategy() -> impl Strategy<Value = Kernel> {
    prop_oneof![Just(Kernel::Epanechnikov), Just(Kernel::Uniform)]
}

fn data_strategy(t_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        proptest::collection::vec(-3.0f64..3.0, t_len),
        proptest::collection::vec(-3.0f64..3.0, t_len),
    )
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        .. ProptestConfig::default()
    })]

    #[test]
    fn kernel_axioms(x in -3.0f64..3.0, k in kernel_strategy()) {
        let v = k.evaluate(x);
        prop_assert!(v >= 0.0);
        prop_assert_eq!(v, k.evaluate(-x));
        if x.abs() > 1.0 {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn normal_equations_are_orthogonal(
        (y, xs) in data_strategy(60),
        gamma in -0.7f64..-0.2,
        k in kernel_strategy(),
        t in 0usize..60,
    ) {
        let data = TimeSeriesData::single_regressor(y.clone(), xs.clone()).unwrap();
        let bw = Bandwidth::from_rate(gamma, 60).unwrap();
        let Ok(beta) = local_constant_estimate(&data, t, &bw, k) else {
            // Singular local windows are legitimate rejections.
            return Ok(());
        };
        let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let denom = bw.denom();
        let mut moment = 0.0;
        for i in 0..60usize {
            if i.abs_diff(t) > bw.half_window() {
                continue;
            }
            let w = k.evaluate((t as f64 - i as f64) / denom);
            moment += w * xs[i] * (y[i] - xs[i] * beta[0]);
        }
        prop_assert!(moment.abs() <= 1e-8 * y_norm.max(1.0));
    }

    #[test]
    fn estimates_are_affine_equivariant(
        (y, xs) in data_strategy(50),
        a in prop_oneof![(-4.0f64..-0.25), (0.25f64..4.0)],
        t in 0usize..50,
    ) {
        let data = TimeSeriesData::single_regressor(y.clone(), xs.clone()).unwrap();
        let bw = Bandwidth::from_rate(-0.4, 50).unwrap();
        let Ok(base) = local_constant_estimate(&data, t, &bw, Kernel::Epanechnikov) else {
            return Ok(());
        };
        let scaled_y =
            TimeSeriesData::single_regressor(y.iter().map(|v| a * v).collect(), xs.clone())
                .unwrap();
        let est_y = local_constant_estimate(&scaled_y, t, &bw, Kernel::Epanechnikov).unwrap();
        prop_assert!((est_y[0] - a * base[0]).abs() <= 1e-10 * (1.0 + base[0].abs() * a.abs()));

        let scaled_x =
            TimeSeriesData::single_regressor(y.clone(), xs.iter().map(|v| a * v).collect())
                .unwrap();
        let est_x = local_constant_estimate(&scaled_x, t, &bw, Kernel::Epanechnikov).unwrap();
        prop_assert!((est_x[0] - base[0] / a).abs() <= 1e-10 * (1.0 + base[0].abs()));
    }

    #[test]
    fn estimates_only_depend_on_the_window(
        (y, xs) in data_strategy(80),
        t in 0usize..80,
        bump in -5.0f64..5.0,
    ) {
        let bw = Bandwidth::from_rate(-0.5, 80).unwrap();
        let data = TimeSeriesData::single_regressor(y.clone(), xs.clone()).unwrap();
        let Ok(base) = local_constant_estimate(&data, t, &bw, Kernel::Epanechnikov) else {
            return Ok(());
        };
        let mut y2 = y.clone();
        let k = bw.half_window();
        let mut touched = false;
        if t + k + 1 < 80 {
            y2[t + k + 1] += bump;
            touched = true;
        }
        if t > k {
            y2[t - k - 1] -= bump;
            touched = true;
        }
        prop_assume!(touched);
        let data2 = TimeSeriesData::single_regressor(y2, xs.clone()).unwrap();
        let est = local_constant_estimate(&data2, t, &bw, Kernel::Epanechnikov).unwrap();
        prop_assert_eq!(est[0].to_bits(), base[0].to_bits());
    }

    #[test]
    fn confidence_bands_bracket_the_estimate(
        (y, xs) in data_strategy(40),
        q in 0.01f64..0.2,
    ) {
        let mut x = Array2::zeros((40, 1));
        for t in 0..40 {
            x[(t, 0)] = xs[t];
        }
        let data = TimeSeriesData::new(Array1::from_vec(y), x).unwrap();
        let bw = Bandwidth::from_rate(-0.4, 40).unwrap();
        let Ok(est) = tvpreg::estimator::estimate_path(&data, &bw, Kernel::Epanechnikov, q) else {
            return Ok(());
        };
        for t in 0..40 {
            prop_assert!(est.ci_lower[(t, 0)] <= est.beta_hat[(t, 0)] + 1e-12);
            prop_assert!(est.beta_hat[(t, 0)] <= est.ci_upper[(t, 0)] + 1e-12);
            // Sandwich must stay symmetric and positive semidefinite.
            let cov = &est.cov_hat[t];
            prop_assert!(cov[0] >= -1e-18);
        }
        // Residuals from the path fit agree with a direct pass.
        let fit = fit_path(&data, &bw, Kernel::Epanechnikov).unwrap();
        for t in 0..40 {
            prop_assert_eq!(fit.residuals[t].to_bits(), est.residuals[t].to_bits());
        }
    }
}
