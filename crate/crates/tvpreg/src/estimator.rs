//! Local-constant (kernel-weighted least squares) estimation of
//! time-varying coefficients, with leave-out variants, sandwich variance
//! estimators, and pointwise confidence intervals.
//!
//! Conventions
//! -----------
//! - Time indices are zero-based throughout the crate.
//! - The weight placed on observation `i` when estimating at `t` is
//!   `K((t - i) / (T h))`; weights vanish for `|t - i| > floor(T h)`, so
//!   estimation only ever touches the window `[t - m, t + m]` with
//!   `m = floor(T h)`, clipped to the sample. Estimates whose window is
//!   clipped carry a boundary flag; inference at flagged points is
//!   reported but should be treated with caution.
//! - Sandwich covariances exploit the cancellation
//!   `Omega^{-1} Sigma Omega^{-1} / (T h) = G^{-1} S G^{-1}`, where
//!   `G = sum K x x'` and `S = sum K^2 eps^2 x x'` are the raw
//!   (unnormalized) window sums.

use ndarray::{Array1, Array2};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::EstimatorError;
use crate::kernels::Kernel;
use crate::linalg;

/// Condition-number threshold above which a weighted Gram matrix is
/// treated as numerically singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// `floor(x)` with a tiny nudge so products like `2000 * 0.03`, which
/// land a few ulps below the intended integer, floor to it.
fn floor_with_dust_guard(x: f64) -> usize {
    (x + 1e-9).floor() as usize
}

/// Observed response and regressor matrix for `t = 0..T-1`.
#[derive(Debug, Clone)]
pub struct TimeSeriesData {
    y: Array1<f64>,
    x: Array2<f64>,
}

impl TimeSeriesData {
    /// Builds a dataset, validating shape (`T >= 2p`) and finiteness.
    pub fn new(y: Array1<f64>, x: Array2<f64>) -> Result<Self, EstimatorError> {
        let t_len = y.len();
        let p = x.ncols();
        if x.nrows() != t_len {
            return Err(EstimatorError::InvalidData {
                reason: format!("response has {} rows but regressors have {}", t_len, x.nrows()),
            });
        }
        if p == 0 {
            return Err(EstimatorError::InvalidData {
                reason: "at least one regressor column is required".into(),
            });
        }
        if t_len < 2 * p {
            return Err(EstimatorError::InvalidData {
                reason: format!("sample length {} is below 2p = {}", t_len, 2 * p),
            });
        }
        if y.iter().any(|v| !v.is_finite()) || x.iter().any(|v| !v.is_finite()) {
            return Err(EstimatorError::InvalidData {
                reason: "non-finite entries in the data".into(),
            });
        }
        Ok(Self { y, x })
    }

    /// Convenience constructor for a single regressor column.
    pub fn single_regressor(y: Vec<f64>, x: Vec<f64>) -> Result<Self, EstimatorError> {
        let t_len = x.len();
        let x = Array2::from_shape_vec((t_len, 1), x).expect("shape");
        Self::new(Array1::from_vec(y), x)
    }

    pub fn num_obs(&self) -> usize {
        self.y.len()
    }

    pub fn num_regressors(&self) -> usize {
        self.x.ncols()
    }

    pub fn response(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn regressors(&self) -> &Array2<f64> {
        &self.x
    }
}

/// Bandwidth `h = c T^gamma` together with the implied half window
/// `floor(T h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth {
    c: f64,
    gamma: f64,
    t_len: usize,
    h: f64,
    half_window: usize,
}

impl Bandwidth {
    /// `c > 0`, `gamma` in (-1, 0]. `gamma = 0` keeps the window at the
    /// full sample and is honored only by the uniform kernel (enforced at
    /// estimation time). Fails when the implied half window is below one
    /// observation.
    pub fn new(c: f64, gamma: f64, t_len: usize) -> Result<Self, EstimatorError> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(EstimatorError::InvalidBandwidth {
                reason: format!("scale c must be positive, got {c}"),
            });
        }
        if !(gamma > -1.0 && gamma <= 0.0) {
            return Err(EstimatorError::InvalidBandwidth {
                reason: format!("rate gamma must lie in (-1, 0], got {gamma}"),
            });
        }
        if t_len < 2 {
            return Err(EstimatorError::InvalidBandwidth {
                reason: "sample length must be at least 2".into(),
            });
        }
        let h = c * (t_len as f64).powf(gamma);
        let half_window = floor_with_dust_guard(t_len as f64 * h);
        if half_window < 1 {
            return Err(EstimatorError::InvalidBandwidth {
                reason: format!(
                    "degenerate window: floor(T h) = 0 for T = {t_len}, c = {c}, gamma = {gamma}"
                ),
            });
        }
        Ok(Self { c, gamma, t_len, h, half_window })
    }

    /// Bandwidth with unit scale, `h = T^gamma`.
    pub fn from_rate(gamma: f64, t_len: usize) -> Result<Self, EstimatorError> {
        Self::new(1.0, gamma, t_len)
    }

    /// Bandwidth holding `h` exactly as given (the rate is back-solved
    /// for bookkeeping). `h` must lie in `(1/T, 1)`.
    pub fn from_absolute(h: f64, t_len: usize) -> Result<Self, EstimatorError> {
        if t_len < 2 || !(h > 1.0 / t_len as f64 && h < 1.0) {
            return Err(EstimatorError::InvalidBandwidth {
                reason: format!("absolute bandwidth {h} must lie in (1/T, 1) for T = {t_len}"),
            });
        }
        let gamma = h.ln() / (t_len as f64).ln();
        let half_window = floor_with_dust_guard(t_len as f64 * h);
        if half_window < 1 {
            return Err(EstimatorError::InvalidBandwidth {
                reason: format!("degenerate window for h = {h}, T = {t_len}"),
            });
        }
        Ok(Self { c: 1.0, gamma, t_len, h, half_window })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn sample_len(&self) -> usize {
        self.t_len
    }

    /// `floor(T h)`: observations up to this distance receive nonzero
    /// weight.
    pub fn half_window(&self) -> usize {
        self.half_window
    }

    /// `T h` as a real number (the kernel argument denominator).
    pub fn denom(&self) -> f64 {
        self.t_len as f64 * self.h
    }

    fn window(&self, t: usize) -> (usize, usize) {
        let lo = t.saturating_sub(self.half_window);
        let hi = (t + self.half_window).min(self.t_len - 1);
        (lo, hi)
    }

    /// True when the symmetric window around `t` is clipped by the
    /// sample edge.
    pub fn is_boundary(&self, t: usize) -> bool {
        t < self.half_window || t + self.half_window > self.t_len - 1
    }
}

fn check_kernel_bandwidth(bw: &Bandwidth, kernel: Kernel) -> Result<(), EstimatorError> {
    if bw.gamma() == 0.0 && kernel != Kernel::Uniform {
        return Err(EstimatorError::InvalidBandwidth {
            reason: "gamma = 0 (full-sample window) is only defined for the uniform kernel".into(),
        });
    }
    Ok(())
}

/// Reusable per-fit buffers; `p` is small so these are a few hundred
/// bytes at most.
struct Scratch {
    gram: Vec<f64>,
    inv: Vec<f64>,
    work: Vec<f64>,
    rhs: Vec<f64>,
    beta: Vec<f64>,
}

impl Scratch {
    fn new(p: usize) -> Self {
        Self {
            gram: vec![0.0; p * p],
            inv: vec![0.0; p * p],
            work: vec![0.0; p * p],
            rhs: vec![0.0; p],
            beta: vec![0.0; p],
        }
    }
}

/// Accumulates `gram = sum_i w_i x_i x_i'` and `rhs = sum_i w_i x_i y_i`
/// over the window at `t`, skipping indices in `exclude` (inclusive).
/// Returns the number of observations with nonzero weight.
fn accumulate(
    x: &Array2<f64>,
    y: &[f64],
    t: usize,
    bw: &Bandwidth,
    kernel: Kernel,
    exclude: Option<(usize, usize)>,
    gram: &mut [f64],
    rhs: &mut [f64],
) -> usize {
    let p = x.ncols();
    gram.fill(0.0);
    rhs.fill(0.0);
    let denom = bw.denom();
    let (lo, hi) = bw.window(t);
    let mut used = 0usize;
    for i in lo..=hi {
        if let Some((elo, ehi)) = exclude {
            if i >= elo && i <= ehi {
                continue;
            }
        }
        let w = kernel.evaluate((t as f64 - i as f64) / denom);
        if w == 0.0 {
            continue;
        }
        used += 1;
        let xi = x.row(i);
        for a in 0..p {
            let wxa = w * xi[a];
            rhs[a] += wxa * y[i];
            let row = a * p;
            for b in 0..p {
                gram[row + b] += wxa * xi[b];
            }
        }
    }
    used
}

fn solve_from_scratch(
    t: usize,
    p: usize,
    scratch: &mut Scratch,
) -> Result<(), EstimatorError> {
    match linalg::invert_sym_with_cond(&scratch.gram, p, &mut scratch.inv, &mut scratch.work) {
        Some(cond) if cond <= CONDITION_LIMIT => {
            linalg::mat_vec(&scratch.inv, &scratch.rhs, p, &mut scratch.beta);
            Ok(())
        }
        Some(cond) => Err(EstimatorError::SingularGram { t, condition_estimate: cond }),
        None => Err(EstimatorError::SingularGram { t, condition_estimate: f64::INFINITY }),
    }
}

/// Local constant estimate of the coefficient vector at time `t`.
pub fn local_constant_estimate(
    data: &TimeSeriesData,
    t: usize,
    bw: &Bandwidth,
    kernel: Kernel,
) -> Result<Vec<f64>, EstimatorError> {
    check_kernel_bandwidth(bw, kernel)?;
    let p = data.num_regressors();
    let mut scratch = Scratch::new(p);
    accumulate(
        &data.x,
        data.y.as_slice().expect("contiguous"),
        t,
        bw,
        kernel,
        None,
        &mut scratch.gram,
        &mut scratch.rhs,
    );
    solve_from_scratch(t, p, &mut scratch)?;
    Ok(scratch.beta)
}

/// Local constant estimate at `t` with observations `s` in
/// `[t - m, t + m]` excluded from the window.
pub fn leave_out_estimate(
    data: &TimeSeriesData,
    t: usize,
    bw: &Bandwidth,
    kernel: Kernel,
    m: usize,
) -> Result<Vec<f64>, EstimatorError> {
    check_kernel_bandwidth(bw, kernel)?;
    let p = data.num_regressors();
    let mut scratch = Scratch::new(p);
    let exclude = (t.saturating_sub(m), t + m);
    let used = accumulate(
        &data.x,
        data.y.as_slice().expect("contiguous"),
        t,
        bw,
        kernel,
        Some(exclude),
        &mut scratch.gram,
        &mut scratch.rhs,
    );
    if used == 0 {
        return Err(EstimatorError::EmptyWindow { t });
    }
    solve_from_scratch(t, p, &mut scratch)?;
    Ok(scratch.beta)
}

/// First-pass output: coefficient path, residuals, and boundary flags.
#[derive(Debug, Clone)]
pub struct PathFit {
    pub beta: Array2<f64>,
    pub residuals: Array1<f64>,
    pub boundary: Vec<bool>,
}

/// Fits the coefficient path at every `t` and computes residuals
/// `eps_t = y_t - x_t' beta_t`.
pub fn fit_path(
    data: &TimeSeriesData,
    bw: &Bandwidth,
    kernel: Kernel,
) -> Result<PathFit, EstimatorError> {
    check_kernel_bandwidth(bw, kernel)?;
    let t_len = data.num_obs();
    let p = data.num_regressors();
    let y = data.y.as_slice().expect("contiguous");
    let mut beta = Array2::zeros((t_len, p));
    let mut residuals = Array1::zeros(t_len);
    let mut boundary = vec![false; t_len];
    let mut scratch = Scratch::new(p);
    for t in 0..t_len {
        accumulate(&data.x, y, t, bw, kernel, None, &mut scratch.gram, &mut scratch.rhs);
        solve_from_scratch(t, p, &mut scratch)?;
        let mut fitted = 0.0;
        for j in 0..p {
            beta[(t, j)] = scratch.beta[j];
            fitted += data.x[(t, j)] * scratch.beta[j];
        }
        residuals[t] = y[t] - fitted;
        boundary[t] = bw.is_boundary(t);
    }
    Ok(PathFit { beta, residuals, boundary })
}

/// Kernel-weighted moment matrices at `t`:
/// `Omega_t = (T h)^{-1} sum K x x'` and
/// `Sigma_t = (T h)^{-1} sum K^2 eps^2 x x'` (row-major `p x p`).
pub fn local_variance_components(
    data: &TimeSeriesData,
    residuals: &Array1<f64>,
    t: usize,
    bw: &Bandwidth,
    kernel: Kernel,
) -> (Vec<f64>, Vec<f64>) {
    let p = data.num_regressors();
    let denom = bw.denom();
    let (lo, hi) = bw.window(t);
    let mut omega = vec![0.0; p * p];
    let mut sigma = vec![0.0; p * p];
    for i in lo..=hi {
        let w = kernel.evaluate((t as f64 - i as f64) / denom);
        if w == 0.0 {
            continue;
        }
        let e2 = residuals[i] * residuals[i];
        let xi = data.x.row(i);
        for a in 0..p {
            for b in 0..p {
                let xx = xi[a] * xi[b];
                omega[a * p + b] += w * xx;
                sigma[a * p + b] += w * w * e2 * xx;
            }
        }
    }
    for v in omega.iter_mut() {
        *v /= denom;
    }
    for v in sigma.iter_mut() {
        *v /= denom;
    }
    (omega, sigma)
}

fn sandwich_from_raw_sums(
    t: usize,
    p: usize,
    gram: &[f64],
    s: &[f64],
) -> Result<Vec<f64>, EstimatorError> {
    let mut inv = vec![0.0; p * p];
    let mut work = vec![0.0; p * p];
    match linalg::invert_sym_with_cond(gram, p, &mut inv, &mut work) {
        Some(cond) if cond <= CONDITION_LIMIT => {
            let gs = linalg::mat_mul(&inv, s, p);
            let mut cov = linalg::mat_mul(&gs, &inv, p);
            // Enforce exact symmetry against rounding.
            for a in 0..p {
                for b in (a + 1)..p {
                    let v = 0.5 * (cov[a * p + b] + cov[b * p + a]);
                    cov[a * p + b] = v;
                    cov[b * p + a] = v;
                }
            }
            Ok(cov)
        }
        Some(cond) => Err(EstimatorError::SingularGram { t, condition_estimate: cond }),
        None => Err(EstimatorError::SingularGram { t, condition_estimate: f64::INFINITY }),
    }
}

/// Sandwich covariance of the estimate at `t` using kernel-weighted
/// moments: `Omega_t^{-1} Sigma_t Omega_t^{-1} / (T h)`, computed as
/// `G^{-1} S G^{-1}` on the raw window sums.
pub fn local_sandwich_covariance(
    data: &TimeSeriesData,
    residuals: &Array1<f64>,
    t: usize,
    bw: &Bandwidth,
    kernel: Kernel,
) -> Result<Vec<f64>, EstimatorError> {
    let p = data.num_regressors();
    let denom = bw.denom();
    let (lo, hi) = bw.window(t);
    let mut gram = vec![0.0; p * p];
    let mut s = vec![0.0; p * p];
    for i in lo..=hi {
        let w = kernel.evaluate((t as f64 - i as f64) / denom);
        if w == 0.0 {
            continue;
        }
        let e2 = residuals[i] * residuals[i];
        let xi = data.x.row(i);
        for a in 0..p {
            for b in 0..p {
                let xx = xi[a] * xi[b];
                gram[a * p + b] += w * xx;
                s[a * p + b] += w * w * e2 * xx;
            }
        }
    }
    sandwich_from_raw_sums(t, p, &gram, &s)
}

/// Sandwich covariance built from full-sample moments for covariance-
/// stationary designs: `Omega = T^{-1} sum x x'`,
/// `Sigma = ∫K^2 · T^{-1} sum eps^2 x x'`, and covariance
/// `Omega^{-1} Sigma Omega^{-1} / (T h)`.
pub fn global_sandwich_covariance(
    data: &TimeSeriesData,
    residuals: &Array1<f64>,
    kernel: Kernel,
    h: f64,
) -> Result<Vec<f64>, EstimatorError> {
    let p = data.num_regressors();
    let t_len = data.num_obs() as f64;
    let mut omega = vec![0.0; p * p];
    let mut meat = vec![0.0; p * p];
    for i in 0..data.num_obs() {
        let e2 = residuals[i] * residuals[i];
        let xi = data.x.row(i);
        for a in 0..p {
            for b in 0..p {
                let xx = xi[a] * xi[b];
                omega[a * p + b] += xx;
                meat[a * p + b] += e2 * xx;
            }
        }
    }
    for v in omega.iter_mut() {
        *v /= t_len;
    }
    let kappa = kernel.l2_norm_squared();
    for v in meat.iter_mut() {
        *v *= kappa / t_len;
    }
    let mut inv = vec![0.0; p * p];
    let mut work = vec![0.0; p * p];
    match linalg::invert_sym_with_cond(&omega, p, &mut inv, &mut work) {
        Some(cond) if cond <= CONDITION_LIMIT => {
            let gs = linalg::mat_mul(&inv, &meat, p);
            let mut cov = linalg::mat_mul(&gs, &inv, p);
            let scale = 1.0 / (t_len * h);
            for v in cov.iter_mut() {
                *v *= scale;
            }
            for a in 0..p {
                for b in (a + 1)..p {
                    let v = 0.5 * (cov[a * p + b] + cov[b * p + a]);
                    cov[a * p + b] = v;
                    cov[b * p + a] = v;
                }
            }
            Ok(cov)
        }
        Some(cond) => Err(EstimatorError::SingularGram { t: 0, condition_estimate: cond }),
        None => Err(EstimatorError::SingularGram { t: 0, condition_estimate: f64::INFINITY }),
    }
}

/// Full estimation output: coefficient path, sandwich covariances,
/// residuals, and pointwise confidence bands at level `1 - q`.
#[derive(Debug, Clone)]
pub struct TvpEstimate {
    pub beta_hat: Array2<f64>,
    /// Per-`t` sandwich covariance, row-major `p x p`.
    pub cov_hat: Vec<Vec<f64>>,
    pub residuals: Array1<f64>,
    pub ci_lower: Array2<f64>,
    pub ci_upper: Array2<f64>,
    pub boundary: Vec<bool>,
    pub confidence_q: f64,
}

impl TvpEstimate {
    /// Residual sum of squares of the fitted path.
    pub fn ssr(&self) -> f64 {
        self.residuals.iter().map(|e| e * e).sum()
    }
}

/// Standard-normal quantile `z_{1 - q/2}` for two-sided level `1 - q`.
pub fn normal_quantile_two_sided(q: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    n.inverse_cdf(1.0 - q / 2.0)
}

/// Two-pass estimation: fit the path, then build per-`t` sandwich
/// covariances from the first-pass residuals and form confidence bands.
pub fn estimate_path(
    data: &TimeSeriesData,
    bw: &Bandwidth,
    kernel: Kernel,
    confidence_q: f64,
) -> Result<TvpEstimate, EstimatorError> {
    if !(confidence_q > 0.0 && confidence_q < 1.0) {
        return Err(EstimatorError::InvalidData {
            reason: format!("confidence level q must lie in (0, 1), got {confidence_q}"),
        });
    }
    let fit = fit_path(data, bw, kernel)?;
    let t_len = data.num_obs();
    let p = data.num_regressors();
    let z = normal_quantile_two_sided(confidence_q);
    let mut cov_hat = Vec::with_capacity(t_len);
    let mut ci_lower = Array2::zeros((t_len, p));
    let mut ci_upper = Array2::zeros((t_len, p));
    for t in 0..t_len {
        let cov = local_sandwich_covariance(data, &fit.residuals, t, bw, kernel)?;
        for j in 0..p {
            let se = cov[j * p + j].max(0.0).sqrt();
            ci_lower[(t, j)] = fit.beta[(t, j)] - z * se;
            ci_upper[(t, j)] = fit.beta[(t, j)] + z * se;
        }
        cov_hat.push(cov);
    }
    Ok(TvpEstimate {
        beta_hat: fit.beta,
        cov_hat,
        residuals: fit.residuals,
        ci_lower,
        ci_upper,
        boundary: fit.boundary,
        confidence_q,
    })
}

/// Per-`t` condition estimates of the weighted Gram matrix. Infinite
/// entries mark windows with no usable variation; values above
/// [`CONDITION_LIMIT`] would be rejected by the estimators.
pub fn gram_condition_report(data: &TimeSeriesData, bw: &Bandwidth, kernel: Kernel) -> Vec<f64> {
    let t_len = data.num_obs();
    let p = data.num_regressors();
    let y = data.y.as_slice().expect("contiguous");
    let mut scratch = Scratch::new(p);
    let mut report = Vec::with_capacity(t_len);
    for t in 0..t_len {
        accumulate(&data.x, y, t, bw, kernel, None, &mut scratch.gram, &mut scratch.rhs);
        let cond = linalg::invert_sym_with_cond(&scratch.gram, p, &mut scratch.inv, &mut scratch.work)
            .unwrap_or(f64::INFINITY);
        report.push(cond);
    }
    report
}

/// Design-side precomputation for repeated refits on the same regressors
/// with different responses (the wild-bootstrap hot path): per-`t` Gram
/// inverses are computed once, so each refit reduces to accumulating the
/// weighted response moments.
pub(crate) struct PrecomputedDesign {
    pub p: usize,
    pub t_len: usize,
    pub gram_inv: Vec<f64>,
    pub boundary: Vec<bool>,
    pub bw: Bandwidth,
    pub kernel: Kernel,
}

impl PrecomputedDesign {
    pub fn build(
        x: &Array2<f64>,
        bw: &Bandwidth,
        kernel: Kernel,
    ) -> Result<Self, EstimatorError> {
        check_kernel_bandwidth(bw, kernel)?;
        let t_len = x.nrows();
        let p = x.ncols();
        let mut gram = vec![0.0; p * p];
        let mut inv = vec![0.0; p * p];
        let mut work = vec![0.0; p * p];
        let mut gram_inv = vec![0.0; t_len * p * p];
        let mut boundary = vec![false; t_len];
        let denom = bw.denom();
        for t in 0..t_len {
            gram.fill(0.0);
            let (lo, hi) = bw.window(t);
            for i in lo..=hi {
                let w = kernel.evaluate((t as f64 - i as f64) / denom);
                if w == 0.0 {
                    continue;
                }
                let xi = x.row(i);
                for a in 0..p {
                    let wxa = w * xi[a];
                    for b in 0..p {
                        gram[a * p + b] += wxa * xi[b];
                    }
                }
            }
            match linalg::invert_sym_with_cond(&gram, p, &mut inv, &mut work) {
                Some(cond) if cond <= CONDITION_LIMIT => {
                    gram_inv[t * p * p..(t + 1) * p * p].copy_from_slice(&inv);
                }
                Some(cond) => {
                    return Err(EstimatorError::SingularGram { t, condition_estimate: cond })
                }
                None => {
                    return Err(EstimatorError::SingularGram {
                        t,
                        condition_estimate: f64::INFINITY,
                    })
                }
            }
            boundary[t] = bw.is_boundary(t);
        }
        Ok(Self { p, t_len, gram_inv, boundary, bw: *bw, kernel })
    }

    /// Fits the whole path for response `y`, writing coefficients into
    /// `beta` (length `T * p`) and residuals into `residuals`.
    pub fn fit_into(&self, x: &Array2<f64>, y: &[f64], beta: &mut [f64], residuals: &mut [f64]) {
        let p = self.p;
        let denom = self.bw.denom();
        let mut rhs = vec![0.0; p];
        for t in 0..self.t_len {
            rhs.fill(0.0);
            let (lo, hi) = self.bw.window(t);
            for i in lo..=hi {
                let w = self.kernel.evaluate((t as f64 - i as f64) / denom);
                if w == 0.0 {
                    continue;
                }
                let wy = w * y[i];
                let xi = x.row(i);
                for a in 0..p {
                    rhs[a] += wy * xi[a];
                }
            }
            let ginv = &self.gram_inv[t * p * p..(t + 1) * p * p];
            let mut fitted = 0.0;
            let xt = x.row(t);
            for a in 0..p {
                let mut s = 0.0;
                for b in 0..p {
                    s += ginv[a * p + b] * rhs[b];
                }
                beta[t * p + a] = s;
                fitted += xt[a] * s;
            }
            residuals[t] = y[t] - fitted;
        }
    }

    /// Standard errors of the path fit from the sandwich covariance
    /// `G^{-1} S G^{-1}` with `S = sum K^2 eps^2 x x'`; writes `se`
    /// (length `T * p`).
    pub fn sandwich_se_into(&self, x: &Array2<f64>, residuals: &[f64], se: &mut [f64]) {
        let p = self.p;
        let denom = self.bw.denom();
        let mut s = vec![0.0; p * p];
        let mut gs = vec![0.0; p * p];
        for t in 0..self.t_len {
            s.fill(0.0);
            let (lo, hi) = self.bw.window(t);
            for i in lo..=hi {
                let w = self.kernel.evaluate((t as f64 - i as f64) / denom);
                if w == 0.0 {
                    continue;
                }
                let we = w * residuals[i];
                let w2e2 = we * we;
                let xi = x.row(i);
                for a in 0..p {
                    let va = w2e2 * xi[a];
                    for b in 0..p {
                        s[a * p + b] += va * xi[b];
                    }
                }
            }
            let ginv = &self.gram_inv[t * p * p..(t + 1) * p * p];
            // gs = G^{-1} S; diag(cov) = row_a(gs) . col_a(G^{-1}).
            for a in 0..p {
                for b in 0..p {
                    let mut acc = 0.0;
                    for k in 0..p {
                        acc += ginv[a * p + k] * s[k * p + b];
                    }
                    gs[a * p + b] = acc;
                }
            }
            for a in 0..p {
                let mut acc = 0.0;
                for b in 0..p {
                    acc += gs[a * p + b] * ginv[b * p + a];
                }
                se[t * p + a] = acc.max(0.0).sqrt();
            }
        }
    }
}
