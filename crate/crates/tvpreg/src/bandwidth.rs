//! Data-driven selection of the bandwidth rate `gamma` (leave-out
//! cross-validation and a coverage-based wild-bootstrap procedure) and of
//! the scale constant `c`, plus the admissible-range algebra linking
//! bandwidth rates to path-smoothness exponents.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EstimatorError, RangeError, SelectionError};
use crate::estimator::{
    normal_quantile_two_sided, Bandwidth, PrecomputedDesign, TimeSeriesData,
};
use crate::kernels::Kernel;
use crate::linalg;
use crate::rng::{derive_rng, stream};

/// Sorted candidate rates, all within (-1, 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaGrid {
    values: Vec<f64>,
}

impl GammaGrid {
    pub fn new(values: Vec<f64>) -> Result<Self, SelectionError> {
        if values.is_empty() {
            return Err(SelectionError::InvalidGrid("grid must be nonempty".into()));
        }
        for w in values.windows(2) {
            if !(w[0] < w[1]) {
                return Err(SelectionError::InvalidGrid(
                    "grid values must be strictly increasing".into(),
                ));
            }
        }
        if values.iter().any(|&g| !(g > -1.0 && g < 0.0)) {
            return Err(SelectionError::InvalidGrid(
                "grid values must lie in (-1, 0)".into(),
            ));
        }
        Ok(Self { values })
    }

    /// Evenly spaced grid over `[lo, hi]` with the given step.
    pub fn from_range(lo: f64, hi: f64, step: f64) -> Result<Self, SelectionError> {
        if !(step > 0.0) || !(lo < hi) {
            return Err(SelectionError::InvalidGrid("need lo < hi and step > 0".into()));
        }
        let mut values = Vec::new();
        let n = ((hi - lo) / step).round() as usize;
        for k in 0..=n {
            let v = lo + step * k as f64;
            if v <= hi + 1e-12 {
                values.push(v.min(hi));
            }
        }
        Self::new(values)
    }

    /// The four-point rate grid used by the coverage-based selector in
    /// the experiment harness.
    pub fn selection_default() -> Self {
        Self::new(vec![-0.5, -0.4, -1.0 / 3.0, -0.2]).expect("valid grid")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The most conservative candidate (the fallback when no rate passes
    /// the coverage screen).
    pub fn lower(&self) -> f64 {
        self.values[0]
    }
}

/// Distribution of the wild-bootstrap multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WildMultiplier {
    GaussianWild,
}

/// How a draw's coverage at time `t` is counted across coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageRule {
    /// A draw covers at `t` only if every coefficient interval covers.
    JointAcrossCoefficients,
    /// Indicators averaged over coefficients.
    PerCoefficientAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Number of bootstrap draws (at least 50).
    pub draws: usize,
    /// Nominal interval level is `1 - confidence_q`.
    pub confidence_q: f64,
    /// Coverage screen threshold is `1 - tolerance_q`.
    pub tolerance_q: f64,
    pub seed: u64,
    pub multiplier: WildMultiplier,
    pub coverage: CoverageRule,
}

impl BootstrapConfig {
    pub fn new(draws: usize, confidence_q: f64, tolerance_q: f64, seed: u64) -> Result<Self, SelectionError> {
        let cfg = Self {
            draws,
            confidence_q,
            tolerance_q,
            seed,
            multiplier: WildMultiplier::GaussianWild,
            coverage: CoverageRule::JointAcrossCoefficients,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SelectionError> {
        if self.draws < 50 {
            return Err(SelectionError::InvalidConfig(format!(
                "need at least 50 bootstrap draws, got {}",
                self.draws
            )));
        }
        if !(self.confidence_q > 0.0 && self.confidence_q < 1.0) {
            return Err(SelectionError::InvalidConfig(format!(
                "confidence q must lie in (0, 1), got {}",
                self.confidence_q
            )));
        }
        if !(self.tolerance_q > 0.0 && self.tolerance_q < 1.0) {
            return Err(SelectionError::InvalidConfig(format!(
                "tolerance must lie in (0, 1), got {}",
                self.tolerance_q
            )));
        }
        Ok(())
    }
}

/// One mean-coverage entry of the rate screen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrCell {
    pub gamma1: f64,
    pub gamma2: f64,
    pub rate: f64,
}

/// Per-time-point coverage for one `(gamma1, gamma2)` pair; `excluded`
/// marks boundary points left out of the mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrDiagnostics {
    pub gamma1: f64,
    pub gamma2: f64,
    pub per_t: Vec<f64>,
    pub excluded: Vec<bool>,
}

/// Output of the rate/scale selectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub gamma_hat: f64,
    /// Rates passing the coverage screen against every smaller rate.
    pub upsilon: Vec<f64>,
    pub cr_matrix: Vec<CrCell>,
    pub cv_curve: Vec<(f64, f64)>,
    pub c_hat: f64,
    pub diagnostics: Vec<CrDiagnostics>,
}

impl SelectionResult {
    fn empty() -> Self {
        Self {
            gamma_hat: f64::NAN,
            upsilon: Vec::new(),
            cr_matrix: Vec::new(),
            cv_curve: Vec::new(),
            c_hat: 1.0,
            diagnostics: Vec::new(),
        }
    }
}

/// Leave-`(2m+1)`-out prediction criterion
/// `CV = T^{-1} sum_t (y_t - x_t' beta_{-t,m})^2` at the given bandwidth.
pub fn cv_criterion(
    data: &TimeSeriesData,
    bw: &Bandwidth,
    kernel: Kernel,
    m: usize,
) -> Result<f64, EstimatorError> {
    let t_len = data.num_obs();
    let p = data.num_regressors();
    let x = data.regressors();
    let y = data.response();
    let denom = bw.denom();
    let half = bw.half_window();
    let mut gram = vec![0.0; p * p];
    let mut inv = vec![0.0; p * p];
    let mut work = vec![0.0; p * p];
    let mut rhs = vec![0.0; p];
    let mut beta = vec![0.0; p];
    let mut total = 0.0;
    for t in 0..t_len {
        gram.fill(0.0);
        rhs.fill(0.0);
        let lo = t.saturating_sub(half);
        let hi = (t + half).min(t_len - 1);
        let elo = t.saturating_sub(m);
        let ehi = t + m;
        let mut used = 0usize;
        for i in lo..=hi {
            if i >= elo && i <= ehi {
                continue;
            }
            let w = kernel.evaluate((t as f64 - i as f64) / denom);
            if w == 0.0 {
                continue;
            }
            used += 1;
            for a in 0..p {
                let wxa = w * x[(i, a)];
                rhs[a] += wxa * y[i];
                for b in 0..p {
                    gram[a * p + b] += wxa * x[(i, b)];
                }
            }
        }
        if used == 0 {
            return Err(EstimatorError::EmptyWindow { t });
        }
        match linalg::invert_sym_with_cond(&gram, p, &mut inv, &mut work) {
            Some(cond) if cond <= crate::estimator::CONDITION_LIMIT => {
                linalg::mat_vec(&inv, &rhs, p, &mut beta);
            }
            Some(cond) => {
                return Err(EstimatorError::SingularGram { t, condition_estimate: cond })
            }
            None => {
                return Err(EstimatorError::SingularGram { t, condition_estimate: f64::INFINITY })
            }
        }
        let mut fitted = 0.0;
        for a in 0..p {
            fitted += x[(t, a)] * beta[a];
        }
        let e = y[t] - fitted;
        total += e * e;
    }
    Ok(total / t_len as f64)
}

/// Criterion values below the interpolation-dust floor are
/// indistinguishable from an exact fit and compare as equal, so ties
/// resolve to the conservative end of the grid.
fn cv_dust_floor(data: &TimeSeriesData) -> f64 {
    let t_len = data.num_obs() as f64;
    let rms = (data.response().iter().map(|y| y * y).sum::<f64>() / t_len).sqrt();
    let noise = 1e-13 * (1.0 + rms);
    noise * noise
}

/// Picks the rate minimizing the leave-`(2m+1)`-out criterion over the
/// grid, with `h = T^gamma`. Ties break toward the smaller (more
/// conservative) rate.
pub fn cv_select_gamma(
    data: &TimeSeriesData,
    grid: &GammaGrid,
    m: usize,
    kernel: Kernel,
) -> Result<SelectionResult, SelectionError> {
    let t_len = data.num_obs();
    let floor = cv_dust_floor(data);
    let mut result = SelectionResult::empty();
    let mut best: Option<(f64, f64)> = None;
    for &gamma in grid.values() {
        let bw = Bandwidth::from_rate(gamma, t_len)
            .map_err(|source| SelectionError::AtGamma { gamma, source })?;
        let cv = cv_criterion(data, &bw, kernel, m)
            .map_err(|source| SelectionError::AtGamma { gamma, source })?;
        result.cv_curve.push((gamma, cv));
        let snapped = if cv <= floor { 0.0 } else { cv };
        if best.map_or(true, |(_, b)| snapped < b) {
            best = Some((gamma, snapped));
        }
    }
    result.gamma_hat = best.expect("nonempty grid").0;
    Ok(result)
}

/// Picks the scale constant minimizing the leave-one-out criterion at
/// `h = c T^gamma_hat`. Ties break toward the smaller scale.
pub fn select_scale_c(
    data: &TimeSeriesData,
    gamma_hat: f64,
    c_grid: &[f64],
    kernel: Kernel,
) -> Result<f64, SelectionError> {
    if c_grid.is_empty() {
        return Err(SelectionError::InvalidGrid("scale grid must be nonempty".into()));
    }
    let mut sorted = c_grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let t_len = data.num_obs();
    let floor = cv_dust_floor(data);
    let mut best: Option<(f64, f64)> = None;
    for &c in &sorted {
        let bw = Bandwidth::new(c, gamma_hat, t_len)
            .map_err(|source| SelectionError::AtGamma { gamma: gamma_hat, source })?;
        let cv = cv_criterion(data, &bw, kernel, 0)
            .map_err(|source| SelectionError::AtGamma { gamma: gamma_hat, source })?;
        let snapped = if cv <= floor { 0.0 } else { cv };
        if best.map_or(true, |(_, b)| snapped < b) {
            best = Some((c, snapped));
        }
    }
    Ok(best.expect("nonempty grid").0)
}

/// The scale grid `{0.5, 0.55, ..., 1.5}`.
pub fn default_scale_grid() -> Vec<f64> {
    (0..=20).map(|k| 0.5 + 0.05 * k as f64).collect()
}

/// Coverage-based rate selection by fixed-design wild bootstrap.
///
/// For each candidate `gamma1`: fit the path at `h1 = T^{gamma1}`,
/// resample `y*_t = x_t' beta_t(gamma1) + eta_t eps_t(gamma1)` with
/// standard-normal multipliers, refit at every `gamma2 <= gamma1`, and
/// count how often the refit's normal interval (using its own sandwich
/// standard error) covers `beta_t(gamma1)`. A rate passes when the mean
/// coverage over non-boundary `t` stays at or above `1 - tolerance_q`
/// against every smaller rate; the selected rate is the largest passing
/// one, falling back to the grid minimum when none pass.
pub fn bootstrap_select_gamma(
    data: &TimeSeriesData,
    grid: &GammaGrid,
    cfg: &BootstrapConfig,
    kernel: Kernel,
) -> Result<SelectionResult, SelectionError> {
    cfg.validate()?;
    let t_len = data.num_obs();
    let p = data.num_regressors();
    let x = data.regressors();
    let y = data.response().as_slice().expect("contiguous");
    let z = normal_quantile_two_sided(cfg.confidence_q);
    let n_grid = grid.values().len();

    // Designs at every candidate rate are response-independent and shared
    // across draws.
    let mut designs = Vec::with_capacity(n_grid);
    for &gamma in grid.values() {
        let bw = Bandwidth::from_rate(gamma, t_len)
            .map_err(|source| SelectionError::AtGamma { gamma, source })?;
        let design = PrecomputedDesign::build(x, &bw, kernel)
            .map_err(|source| SelectionError::AtGamma { gamma, source })?;
        designs.push(design);
    }

    let mut result = SelectionResult::empty();
    let mut passes = vec![false; n_grid];

    for g1 in 0..n_grid {
        let gamma1 = grid.values()[g1];
        let mut beta1 = vec![0.0; t_len * p];
        let mut resid1 = vec![0.0; t_len];
        designs[g1].fit_into(x, y, &mut beta1, &mut resid1);

        // Coverage counts per (gamma2, t); integer accumulation keeps the
        // reduction order-independent across threads.
        let counts: Vec<Vec<u32>> = (0..cfg.draws)
            .into_par_iter()
            .map(|draw| {
                let mut rng = derive_rng(
                    cfg.seed,
                    &[stream::BOOTSTRAP, gamma1.to_bits(), draw as u64],
                );
                let mut y_star = vec![0.0; t_len];
                for t in 0..t_len {
                    let eta: f64 = match cfg.multiplier {
                        WildMultiplier::GaussianWild => rng.sample(StandardNormal),
                    };
                    let mut fitted = 0.0;
                    for a in 0..p {
                        fitted += x[(t, a)] * beta1[t * p + a];
                    }
                    y_star[t] = fitted + eta * resid1[t];
                }
                let mut beta_star = vec![0.0; t_len * p];
                let mut resid_star = vec![0.0; t_len];
                let mut se_star = vec![0.0; t_len * p];
                let mut per_g2 = vec![vec![0u32; t_len]; g1 + 1];
                for g2 in 0..=g1 {
                    designs[g2].fit_into(x, &y_star, &mut beta_star, &mut resid_star);
                    designs[g2].sandwich_se_into(x, &resid_star, &mut se_star);
                    for t in 0..t_len {
                        match cfg.coverage {
                            CoverageRule::JointAcrossCoefficients => {
                                let mut all = true;
                                for a in 0..p {
                                    let idx = t * p + a;
                                    if (beta_star[idx] - beta1[idx]).abs() > z * se_star[idx] {
                                        all = false;
                                        break;
                                    }
                                }
                                if all {
                                    per_g2[g2][t] += 1;
                                }
                            }
                            CoverageRule::PerCoefficientAverage => {
                                // Counted per coefficient; normalized by p
                                // during aggregation.
                                for a in 0..p {
                                    let idx = t * p + a;
                                    if (beta_star[idx] - beta1[idx]).abs() <= z * se_star[idx] {
                                        per_g2[g2][t] += 1;
                                    }
                                }
                            }
                        }
                    }
                }
                per_g2
            })
            .reduce(
                || vec![vec![0u32; t_len]; g1 + 1],
                |mut acc, item| {
                    for (a, b) in acc.iter_mut().zip(item) {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                    }
                    acc
                },
            );

        let per_draw_units = match cfg.coverage {
            CoverageRule::JointAcrossCoefficients => cfg.draws as f64,
            CoverageRule::PerCoefficientAverage => (cfg.draws * p) as f64,
        };
        let mut all_pass = true;
        for g2 in 0..=g1 {
            let gamma2 = grid.values()[g2];
            let mut per_t = Vec::with_capacity(t_len);
            let mut excluded = Vec::with_capacity(t_len);
            let mut sum = 0.0;
            let mut included = 0usize;
            for t in 0..t_len {
                let rate_t = counts[g2][t] as f64 / per_draw_units;
                let skip = designs[g1].boundary[t] || designs[g2].boundary[t];
                per_t.push(rate_t);
                excluded.push(skip);
                if !skip {
                    sum += rate_t;
                    included += 1;
                }
            }
            let rate = if included > 0 { sum / included as f64 } else { f64::NAN };
            result.cr_matrix.push(CrCell { gamma1, gamma2, rate });
            result.diagnostics.push(CrDiagnostics { gamma1, gamma2, per_t, excluded });
            if !(rate >= 1.0 - cfg.tolerance_q) {
                all_pass = false;
            }
        }
        passes[g1] = all_pass;
    }

    for (g1, &pass) in passes.iter().enumerate() {
        if pass {
            result.upsilon.push(grid.values()[g1]);
        }
    }
    result.gamma_hat = result.upsilon.last().copied().unwrap_or_else(|| grid.lower());
    Ok(result)
}

/// Smoothness-class flavor: type-A classes bound the local oscillation by
/// `(a_T / T)^alpha`; type-B classes bound it by `T^{-alpha}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothnessClass {
    TypeA,
    TypeB,
}

/// Open interval of bandwidth rates `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRange {
    pub lower: f64,
    pub upper: f64,
}

impl GammaRange {
    pub fn is_empty(&self) -> bool {
        !(self.lower < self.upper)
    }

    pub fn contains(&self, gamma: f64) -> bool {
        gamma > self.lower && gamma < self.upper
    }
}

/// Open half line of smoothness exponents `(lower, infinity)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaRange {
    pub lower: f64,
}

impl AlphaRange {
    pub fn contains(&self, alpha: f64) -> bool {
        alpha > self.lower
    }
}

/// Rates under which a path of smoothness `alpha` is estimated without
/// asymptotic bias: type-A gives `(-1, -1/(2 alpha + 1))`, type-B gives
/// `(-1, min(2 alpha - 1, 0))`.
pub fn admissible_gamma_range(
    alpha: f64,
    class: SmoothnessClass,
) -> Result<GammaRange, RangeError> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(RangeError::InvalidAlpha(alpha));
    }
    let upper = match class {
        SmoothnessClass::TypeA => -1.0 / (2.0 * alpha + 1.0),
        SmoothnessClass::TypeB => (2.0 * alpha - 1.0).min(0.0),
    };
    Ok(GammaRange { lower: -1.0, upper })
}

/// Smoothness exponents estimable without asymptotic bias at rate
/// `gamma`: type-A gives `(-(1 + 1/gamma)/2, inf)`, type-B gives
/// `((1 + gamma)/2, inf)`. Inverse map of [`admissible_gamma_range`].
pub fn admissible_alpha_set(gamma: f64, class: SmoothnessClass) -> Result<AlphaRange, RangeError> {
    if !(gamma > -1.0 && gamma < 0.0) {
        return Err(RangeError::InvalidGamma(gamma));
    }
    let lower = match class {
        SmoothnessClass::TypeA => -(1.0 + 1.0 / gamma) / 2.0,
        SmoothnessClass::TypeB => (1.0 + gamma) / 2.0,
    };
    Ok(AlphaRange { lower })
}
