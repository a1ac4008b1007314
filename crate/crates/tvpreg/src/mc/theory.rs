//! Closed-form asymptotic risk of the kernel estimator when the
//! coefficient follows a rescaled random walk, and the implied
//! MSE-minimizing bandwidth.

use ndarray::Array2;

use crate::error::TheoryError;
use crate::linalg;

/// Leading-order MSE of the uniform-kernel estimator in the local-level
/// model: `sigma_u^2 h / 6 + sigma_eps^2 / (2 T h)`.
pub fn mse_theoretical_local_level(
    h: f64,
    t_len: usize,
    sigma_u2: f64,
    sigma_eps2: f64,
) -> Result<f64, TheoryError> {
    if !(h > 0.0) || !(sigma_u2 > 0.0) || !(sigma_eps2 > 0.0) || t_len == 0 {
        return Err(TheoryError::InvalidInput(
            "bandwidth, variances, and sample length must be positive".into(),
        ));
    }
    Ok(sigma_u2 / 6.0 * h + sigma_eps2 / (2.0 * t_len as f64) / h)
}

/// The bandwidth minimizing the local-level MSE and its scale constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthOptimum {
    pub h_min: f64,
    /// Scale in `h_min = c T^{-1/2}`.
    pub c: f64,
}

/// `h_min = sqrt(3 sigma_eps^2 / sigma_u^2) T^{-1/2}`; the `T^{-1/2}`
/// exponent is structural.
pub fn mse_minimizing_bandwidth(
    t_len: usize,
    sigma_u2: f64,
    sigma_eps2: f64,
) -> Result<BandwidthOptimum, TheoryError> {
    if !(sigma_u2 > 0.0) || !(sigma_eps2 > 0.0) || t_len == 0 {
        return Err(TheoryError::InvalidInput(
            "variances and sample length must be positive".into(),
        ));
    }
    let c = (3.0 * sigma_eps2 / sigma_u2).sqrt();
    Ok(BandwidthOptimum { h_min: c / (t_len as f64).sqrt(), c })
}

/// Stationary-design plug-in moments for [`mse_theoretical_general`]:
/// `Lambda = Omega`, `LambdaBar = Omega / 2`, `Xi = Omega^2 / 6`.
pub fn stationary_plugins(omega: &Array2<f64>) -> (Array2<f64>, Array2<f64>, Array2<f64>) {
    let lambda = omega.clone();
    let lambda_bar = omega.mapv(|v| v / 2.0);
    let xi = omega.dot(omega).mapv(|v| v / 6.0);
    (lambda, lambda_bar, xi)
}

/// Multivariate leading-order MSE for random-walk coefficients:
/// `(sigma_u^2 h / 4) tr[Om^{-1}(L Lb + Lb L - 2 Xi) Om^{-1}]
///  + (sigma_eps^2 / (2 T h)) tr[Om^{-1}]`.
/// The inner matrix must be positive definite and `Omega` invertible.
pub fn mse_theoretical_general(
    h: f64,
    t_len: usize,
    sigma_u2: f64,
    sigma_eps2: f64,
    omega: &Array2<f64>,
    lambda: &Array2<f64>,
    lambda_bar: &Array2<f64>,
    xi: &Array2<f64>,
) -> Result<f64, TheoryError> {
    if !(h > 0.0) || !(sigma_u2 > 0.0) || !(sigma_eps2 > 0.0) || t_len == 0 {
        return Err(TheoryError::InvalidInput(
            "bandwidth, variances, and sample length must be positive".into(),
        ));
    }
    let p = omega.nrows();
    for (name, m) in [("omega", omega), ("lambda", lambda), ("lambda_bar", lambda_bar), ("xi", xi)]
    {
        if m.nrows() != p || m.ncols() != p {
            return Err(TheoryError::InvalidInput(format!("{name} must be {p} x {p}")));
        }
    }
    let flat = |m: &Array2<f64>| -> Vec<f64> { m.iter().copied().collect() };
    let om = flat(omega);
    let lam = flat(lambda);
    let lam_bar = flat(lambda_bar);
    let xi_f = flat(xi);

    let mut inner = linalg::mat_mul(&lam, &lam_bar, p);
    let ba = linalg::mat_mul(&lam_bar, &lam, p);
    for i in 0..p * p {
        inner[i] += ba[i] - 2.0 * xi_f[i];
    }
    let eigs = linalg::sym_eigenvalues(&inner, p);
    if eigs.first().copied().unwrap_or(0.0) <= 0.0 {
        return Err(TheoryError::InvalidInput(
            "inner moment combination is not positive definite".into(),
        ));
    }

    let mut om_inv = vec![0.0; p * p];
    let mut work = vec![0.0; p * p];
    match linalg::invert_sym_with_cond(&om, p, &mut om_inv, &mut work) {
        Some(cond) if cond <= crate::estimator::CONDITION_LIMIT => {}
        _ => {
            return Err(TheoryError::InvalidInput("omega is not invertible".into()));
        }
    }

    let oi = linalg::mat_mul(&om_inv, &inner, p);
    let oio = linalg::mat_mul(&oi, &om_inv, p);
    let tr_walk: f64 = (0..p).map(|i| oio[i * p + i]).sum();
    let tr_inv: f64 = (0..p).map(|i| om_inv[i * p + i]).sum();
    Ok(sigma_u2 * h / 4.0 * tr_walk + sigma_eps2 / (2.0 * t_len as f64 * h) * tr_inv)
}
