//! Seeded generators for coefficient paths across the smoothness
//! spectrum (smooth functions, rescaled random walks, abrupt breaks,
//! threshold switches, additive mixtures) and for the regressor/error
//! processes used by the experiment harness.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{LogNormal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::DgpError;
use crate::estimator::TimeSeriesData;
use crate::rng::{derive_rng, derive_seed, stream};

/// Built-in catalog of deterministic smooth paths, evaluated at `u = t/T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SmoothFunction {
    /// `2u + exp(-16 (u - 1/2)^2)`.
    BumpTrend,
    /// `(sin(pi u) + cos(2 pi u) + sin(3 pi u) + cos(4 pi u)) / 4`.
    FourierMix,
    /// Polynomial in `u` with `coefficients[k]` multiplying `u^k`.
    Polynomial { coefficients: Vec<f64> },
}

impl SmoothFunction {
    /// Look up a named catalog entry.
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "bump_trend" => Some(SmoothFunction::BumpTrend),
            "fourier_mix" => Some(SmoothFunction::FourierMix),
            _ => None,
        }
    }

    pub fn evaluate(&self, u: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            SmoothFunction::BumpTrend => 2.0 * u + (-16.0 * (u - 0.5) * (u - 0.5)).exp(),
            SmoothFunction::FourierMix => {
                ((PI * u).sin() + (2.0 * PI * u).cos() + (3.0 * PI * u).sin()
                    + (4.0 * PI * u).cos())
                    / 4.0
            }
            SmoothFunction::Polynomial { coefficients } => {
                let mut acc = 0.0;
                for &c in coefficients.iter().rev() {
                    acc = acc * u + c;
                }
                acc
            }
        }
    }
}

/// Increment distribution of a rescaled random walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RwDriver {
    /// `u_t ~ N(0, sd^2)`; `sd = 0` degenerates to a constant path.
    Gaussian { sd: f64 },
    /// `u_t = exp(Z)`, `Z ~ N(0, 1)`; kept raw (mean `e^{1/2}`), not
    /// centered.
    LogNormal,
}

/// Source of the switching variable `q_t` in threshold paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ThresholdDriver {
    IidNormal,
}

/// Generator description of one true coefficient path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "variant")]
pub enum TvpSpec {
    /// Deterministic path `f(t/T)`.
    Smooth { f: SmoothFunction },
    /// `mu + T^{-scale_exponent} * sum_{i<=t} u_i`.
    RescaledRandomWalk {
        mu: f64,
        driver: RwDriver,
        #[serde(default = "default_scale_exponent")]
        scale_exponent: f64,
    },
    /// Piecewise-constant path: level `delta * levels[s] / T^alpha` on
    /// segment `s`; segment `s` ends at observation `floor(breaks[s] T)`
    /// (one-based), so the jump to the next level lands at
    /// `floor(breaks[s] T) + 1`.
    StructuralBreak {
        break_fractions: Vec<f64>,
        levels: Vec<f64>,
        alpha: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    /// `theta1 + (delta_scale / T^alpha) * 1{q_t > threshold}`.
    Threshold {
        theta1: f64,
        delta_scale: f64,
        alpha: f64,
        threshold: f64,
        driver: ThresholdDriver,
    },
    /// Pointwise sum of component paths; component `k` draws from the
    /// substream [`mixture_component_seed`]`(seed, k)`.
    Mixture { components: Vec<TvpSpec> },
}

fn default_scale_exponent() -> f64 {
    0.5
}

fn default_delta() -> f64 {
    1.0
}

impl TvpSpec {
    pub fn validate(&self) -> Result<(), DgpError> {
        match self {
            TvpSpec::Smooth { .. } => Ok(()),
            TvpSpec::RescaledRandomWalk { driver, scale_exponent, .. } => {
                if !scale_exponent.is_finite() {
                    return Err(DgpError::InvalidSpec("scale exponent must be finite".into()));
                }
                if let RwDriver::Gaussian { sd } = driver {
                    if *sd < 0.0 || !sd.is_finite() {
                        return Err(DgpError::InvalidSpec(format!(
                            "random-walk driver sd must be nonnegative, got {sd}"
                        )));
                    }
                }
                Ok(())
            }
            TvpSpec::StructuralBreak { break_fractions, levels, alpha, delta } => {
                if levels.len() != break_fractions.len() + 1 {
                    return Err(DgpError::InvalidSpec(format!(
                        "{} levels require {} break fractions, got {}",
                        levels.len(),
                        levels.len().saturating_sub(1),
                        break_fractions.len()
                    )));
                }
                let mut prev = 0.0;
                for &f in break_fractions {
                    if !(f > prev && f < 1.0) {
                        return Err(DgpError::InvalidSpec(
                            "break fractions must be strictly increasing within (0, 1)".into(),
                        ));
                    }
                    prev = f;
                }
                if !(*alpha > 0.0) {
                    return Err(DgpError::InvalidSpec(format!(
                        "break magnitude exponent must be positive, got {alpha}"
                    )));
                }
                if !delta.is_finite() {
                    return Err(DgpError::InvalidSpec("delta must be finite".into()));
                }
                Ok(())
            }
            TvpSpec::Threshold { alpha, .. } => {
                if !(*alpha > 0.0) {
                    return Err(DgpError::InvalidSpec(format!(
                        "threshold effect exponent must be positive, got {alpha}"
                    )));
                }
                Ok(())
            }
            TvpSpec::Mixture { components } => {
                if components.is_empty() {
                    return Err(DgpError::InvalidSpec("mixture needs at least one component".into()));
                }
                components.iter().try_for_each(|c| c.validate())
            }
        }
    }
}

/// Seed for component `k` of a mixture generated under `seed`; exposed so
/// component paths can be regenerated standalone.
pub fn mixture_component_seed(seed: u64, k: usize) -> u64 {
    derive_seed(seed, &[stream::MIXTURE, k as u64])
}

/// Converts a sample fraction into a one-based observation count,
/// guarding against representation dust in products like `0.3 * T`.
pub(crate) fn fraction_to_count(fraction: f64, t_len: usize) -> usize {
    (fraction * t_len as f64 + 1e-9).floor() as usize
}

/// Generates the true coefficient path for `t = 1..T` (stored
/// zero-based). Deterministic in `(spec, t_len, seed)`.
pub fn generate_tvp_path(spec: &TvpSpec, t_len: usize, seed: u64) -> Result<Vec<f64>, DgpError> {
    if t_len < 2 {
        return Err(DgpError::InvalidSpec(format!("path length must be at least 2, got {t_len}")));
    }
    spec.validate()?;
    let t_f = t_len as f64;
    let path = match spec {
        TvpSpec::Smooth { f } => (1..=t_len).map(|t| f.evaluate(t as f64 / t_f)).collect(),
        TvpSpec::RescaledRandomWalk { mu, driver, scale_exponent } => {
            let scale = t_f.powf(-scale_exponent);
            let mut rng = derive_rng(seed, &[stream::TVP_PATH]);
            let mut path = Vec::with_capacity(t_len);
            let mut level = *mu;
            for _ in 0..t_len {
                let u: f64 = match driver {
                    RwDriver::Gaussian { sd } => {
                        let z: f64 = rng.sample(StandardNormal);
                        sd * z
                    }
                    RwDriver::LogNormal => {
                        rng.sample(LogNormal::new(0.0, 1.0).expect("valid lognormal"))
                    }
                };
                level += u * scale;
                path.push(level);
            }
            path
        }
        TvpSpec::StructuralBreak { break_fractions, levels, alpha, delta } => {
            let magnitude = delta * t_f.powf(-alpha);
            let mut ends: Vec<usize> =
                break_fractions.iter().map(|&f| fraction_to_count(f, t_len)).collect();
            ends.push(t_len);
            let mut path = Vec::with_capacity(t_len);
            let mut seg = 0usize;
            for t in 1..=t_len {
                while t > ends[seg] {
                    seg += 1;
                }
                path.push(levels[seg] * magnitude);
            }
            path
        }
        TvpSpec::Threshold { theta1, delta_scale, alpha, threshold, driver } => {
            let effect = delta_scale * t_f.powf(-alpha);
            let mut rng = derive_rng(seed, &[stream::THRESHOLD]);
            (0..t_len)
                .map(|_| {
                    let q: f64 = match driver {
                        ThresholdDriver::IidNormal => rng.sample(StandardNormal),
                    };
                    theta1 + if q > *threshold { effect } else { 0.0 }
                })
                .collect()
        }
        TvpSpec::Mixture { components } => {
            let mut path = vec![0.0; t_len];
            for (k, comp) in components.iter().enumerate() {
                let sub = generate_tvp_path(comp, t_len, mixture_component_seed(seed, k))?;
                for (acc, v) in path.iter_mut().zip(sub) {
                    *acc += v;
                }
            }
            path
        }
    };
    Ok(path)
}

/// Disturbance process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "variant")]
pub enum ErrorSpec {
    Iid {
        sigma: f64,
    },
    /// `eps_t = sigma_t u_t`, `sigma_t^2 = omega + arch eps_{t-1}^2 +
    /// garch sigma_{t-1}^2`; the recursion starts at the stationary
    /// variance and discards `burn_in` draws.
    Garch {
        omega: f64,
        arch: f64,
        garch: f64,
        burn_in: usize,
    },
}

impl ErrorSpec {
    /// The conditional-variance recursion used in the experiments:
    /// `sigma_t^2 = 0.1 + 0.3 eps_{t-1}^2 + 0.6 sigma_{t-1}^2`.
    pub fn garch_default() -> Self {
        ErrorSpec::Garch { omega: 0.1, arch: 0.3, garch: 0.6, burn_in: 500 }
    }

    pub fn validate(&self) -> Result<(), DgpError> {
        match self {
            ErrorSpec::Iid { sigma } => {
                if *sigma < 0.0 || !sigma.is_finite() {
                    return Err(DgpError::InvalidSpec(format!(
                        "noise sigma must be nonnegative, got {sigma}"
                    )));
                }
                Ok(())
            }
            ErrorSpec::Garch { omega, arch, garch, burn_in } => {
                if !(*omega > 0.0) || *arch < 0.0 || *garch < 0.0 {
                    return Err(DgpError::InvalidSpec("nonpositive variance parameters".into()));
                }
                if arch + garch >= 1.0 {
                    return Err(DgpError::InvalidSpec(format!(
                        "arch + garch must be below 1 for stationarity, got {}",
                        arch + garch
                    )));
                }
                if *burn_in < 200 {
                    return Err(DgpError::InvalidSpec(format!(
                        "burn-in must be at least 200, got {burn_in}"
                    )));
                }
                Ok(())
            }
        }
    }

    fn generate(&self, t_len: usize, seed: u64) -> Vec<f64> {
        let mut rng = derive_rng(seed, &[stream::ERROR]);
        match self {
            ErrorSpec::Iid { sigma } => (0..t_len)
                .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
                .collect(),
            ErrorSpec::Garch { omega, arch, garch, burn_in } => {
                let mut s2 = omega / (1.0 - arch - garch);
                let mut out = Vec::with_capacity(t_len);
                for k in 0..(burn_in + t_len) {
                    let z: f64 = rng.sample(StandardNormal);
                    let eps = s2.sqrt() * z;
                    if k >= *burn_in {
                        out.push(eps);
                    }
                    s2 = omega + arch * eps * eps + garch * s2;
                }
                out
            }
        }
    }
}

/// One regressor column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "variant")]
pub enum RegressorSpec {
    /// `x_t = phi x_{t-1} + innovation_sd z_t`, started from the
    /// stationary distribution.
    Ar1 { phi: f64, innovation_sd: f64 },
    /// Intercept column of ones.
    Constant,
    /// Fixed user-supplied column.
    Custom { values: Vec<f64> },
}

impl RegressorSpec {
    /// The autoregressive design used throughout the experiments.
    pub fn ar1_default() -> Self {
        RegressorSpec::Ar1 { phi: 0.5, innovation_sd: 1.0 }
    }

    pub fn validate(&self, t_len: usize) -> Result<(), DgpError> {
        match self {
            RegressorSpec::Ar1 { phi, innovation_sd } => {
                if phi.abs() >= 1.0 {
                    return Err(DgpError::InvalidSpec(format!(
                        "AR(1) coefficient must satisfy |phi| < 1, got {phi}"
                    )));
                }
                if *innovation_sd < 0.0 {
                    return Err(DgpError::InvalidSpec("negative innovation sd".into()));
                }
                Ok(())
            }
            RegressorSpec::Constant => Ok(()),
            RegressorSpec::Custom { values } => {
                if values.len() != t_len {
                    return Err(DgpError::InvalidSpec(format!(
                        "custom regressor has {} values for sample length {}",
                        values.len(),
                        t_len
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(DgpError::InvalidSpec("non-finite custom regressor".into()));
                }
                Ok(())
            }
        }
    }

    fn generate(&self, t_len: usize, seed: u64) -> Vec<f64> {
        match self {
            RegressorSpec::Ar1 { phi, innovation_sd } => {
                let mut rng = derive_rng(seed, &[stream::REGRESSOR]);
                let mut out = Vec::with_capacity(t_len);
                let stationary_sd = innovation_sd / (1.0 - phi * phi).sqrt();
                let mut x = stationary_sd * rng.sample::<f64, _>(StandardNormal);
                out.push(x);
                for _ in 1..t_len {
                    x = phi * x + innovation_sd * rng.sample::<f64, _>(StandardNormal);
                    out.push(x);
                }
                out
            }
            RegressorSpec::Constant => vec![1.0; t_len],
            RegressorSpec::Custom { values } => values.clone(),
        }
    }
}

/// Full dataset description: one `(path, regressor)` pair per column
/// plus a disturbance process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub coefficients: Vec<(TvpSpec, RegressorSpec)>,
    pub error: ErrorSpec,
}

impl DatasetSpec {
    pub fn single(tvp: TvpSpec, regressor: RegressorSpec, error: ErrorSpec) -> Self {
        Self { coefficients: vec![(tvp, regressor)], error }
    }
}

/// A simulated dataset together with the true coefficient paths used to
/// score estimators.
#[derive(Debug, Clone)]
pub struct SimulatedDataset {
    pub data: TimeSeriesData,
    pub true_paths: Array2<f64>,
}

/// Draws `y_t = x_t' beta_t + eps_t` with the coefficient paths,
/// regressors, and errors on independent substreams of `seed`.
pub fn simulate_dataset(
    spec: &DatasetSpec,
    t_len: usize,
    seed: u64,
) -> Result<SimulatedDataset, DgpError> {
    if spec.coefficients.is_empty() {
        return Err(DgpError::InvalidSpec("at least one coefficient column required".into()));
    }
    spec.error.validate()?;
    let p = spec.coefficients.len();
    let mut x = Array2::zeros((t_len, p));
    let mut paths = Array2::zeros((t_len, p));
    for (j, (tvp, reg)) in spec.coefficients.iter().enumerate() {
        reg.validate(t_len)?;
        let col_seed = derive_seed(seed, &[stream::TVP_PATH, j as u64]);
        let path = generate_tvp_path(tvp, t_len, col_seed)?;
        let xs = reg.generate(t_len, derive_seed(seed, &[stream::REGRESSOR, j as u64]));
        for t in 0..t_len {
            x[(t, j)] = xs[t];
            paths[(t, j)] = path[t];
        }
    }
    let eps = spec.error.generate(t_len, seed);
    let mut y = Array1::zeros(t_len);
    for t in 0..t_len {
        let mut v = eps[t];
        for j in 0..p {
            v += x[(t, j)] * paths[(t, j)];
        }
        y[t] = v;
    }
    let data = TimeSeriesData::new(y, x)
        .map_err(|e| DgpError::InvalidSpec(format!("simulated data invalid: {e}")))?;
    Ok(SimulatedDataset { data, true_paths: paths })
}

/// Outcome of the path-roughness probe.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeResult {
    Estimate { alpha_hat: f64, std_error: f64 },
    /// The path has no local oscillation (constant), so the log-log
    /// regression is undefined.
    NotApplicable,
}

/// Estimates the roughness exponent of a path by regressing the log mean
/// local oscillation `max_{|j-t|<=a} |beta_t - beta_j|` on `log(a/T)`
/// across window sizes. Diagnostic only.
pub fn holder_smoothness_probe(
    path: &[f64],
    window_fractions: &[f64],
) -> Result<ProbeResult, DgpError> {
    let t_len = path.len();
    if t_len < 500 {
        return Err(DgpError::InvalidSpec(format!(
            "probe needs at least 500 observations, got {t_len}"
        )));
    }
    let mut windows: Vec<usize> = window_fractions
        .iter()
        .map(|&f| {
            if !(f > 0.0 && f < 1.0) {
                Err(DgpError::InvalidSpec(format!("window fraction {f} outside (0, 1)")))
            } else {
                Ok(((f * t_len as f64).floor() as usize).max(1))
            }
        })
        .collect::<Result<_, _>>()?;
    windows.sort_unstable();
    windows.dedup();
    windows.retain(|&a| 2 * a < t_len);
    if windows.len() < 2 {
        return Err(DgpError::InvalidSpec(
            "need at least two distinct feasible window sizes".into(),
        ));
    }

    let mut xs = Vec::with_capacity(windows.len());
    let mut ys = Vec::with_capacity(windows.len());
    for &a in &windows {
        let mean_osc = mean_local_oscillation(path, a);
        if mean_osc <= 0.0 {
            return Ok(ProbeResult::NotApplicable);
        }
        xs.push((a as f64 / t_len as f64).ln());
        ys.push(mean_osc.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let fit = my + slope * (x - mx);
            (y - fit) * (y - fit)
        })
        .sum();
    let dof = (xs.len().saturating_sub(2)).max(1) as f64;
    let std_error = (rss / dof / sxx).sqrt();
    Ok(ProbeResult::Estimate { alpha_hat: slope, std_error })
}

/// Mean over interior `t` of `max_{|j-t|<=a} |path_t - path_j|`, using
/// monotonic-deque sliding extrema.
fn mean_local_oscillation(path: &[f64], a: usize) -> f64 {
    let t_len = path.len();
    let mut max_dq: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    let mut min_dq: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut right = 0usize;
    for t in a..(t_len - a) {
        let lo = t - a;
        let hi = t + a;
        while right <= hi {
            while let Some(&b) = max_dq.back() {
                if path[b] <= path[right] {
                    max_dq.pop_back();
                } else {
                    break;
                }
            }
            max_dq.push_back(right);
            while let Some(&b) = min_dq.back() {
                if path[b] >= path[right] {
                    min_dq.pop_back();
                } else {
                    break;
                }
            }
            min_dq.push_back(right);
            right += 1;
        }
        while let Some(&f) = max_dq.front() {
            if f < lo {
                max_dq.pop_front();
            } else {
                break;
            }
        }
        while let Some(&f) = min_dq.front() {
            if f < lo {
                min_dq.pop_front();
            } else {
                break;
            }
        }
        let mx = path[*max_dq.front().unwrap()];
        let mn = path[*min_dq.front().unwrap()];
        sum += (mx - path[t]).max(path[t] - mn);
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn break_path_places_jump_after_floor() {
        let spec = TvpSpec::StructuralBreak {
            break_fractions: vec![0.5],
            levels: vec![0.0, 2.0],
            alpha: 0.2,
            delta: 1.0,
        };
        let path = generate_tvp_path(&spec, 100, 1).unwrap();
        let jump = 2.0 / 100f64.powf(0.2);
        assert_relative_eq!(jump, 0.796_214, epsilon = 1e-5);
        for (i, v) in path.iter().enumerate() {
            if i < 50 {
                assert_eq!(*v, 0.0, "pre-break level at index {i}");
            } else {
                assert_relative_eq!(*v, jump, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_variance_walk_is_constant() {
        let spec = TvpSpec::RescaledRandomWalk {
            mu: 1.25,
            driver: RwDriver::Gaussian { sd: 0.0 },
            scale_exponent: 0.5,
        };
        let path = generate_tvp_path(&spec, 64, 5).unwrap();
        assert!(path.iter().all(|v| *v == 1.25));
    }

    #[test]
    fn walk_increments_are_exact() {
        let spec = TvpSpec::RescaledRandomWalk {
            mu: 0.0,
            driver: RwDriver::Gaussian { sd: 1.0 },
            scale_exponent: 0.5,
        };
        let t_len = 200;
        let path = generate_tvp_path(&spec, t_len, 11).unwrap();
        // Increments reproduce the same normal draws times T^{-1/2}.
        let mut rng = derive_rng(11, &[stream::TVP_PATH]);
        let scale = (t_len as f64).powf(-0.5);
        let mut level = 0.0;
        for t in 0..t_len {
            let z: f64 = rng.sample(StandardNormal);
            level += z * scale;
            assert_eq!(path[t], level, "bitwise mismatch at {t}");
        }
    }

    #[test]
    fn terminal_walk_variance_matches_theory() {
        // Var(beta_T - mu) = T * Var(u) / T = 1 for the Gaussian driver.
        let t_len = 256;
        let reps = 20_000;
        let spec = TvpSpec::RescaledRandomWalk {
            mu: 0.0,
            driver: RwDriver::Gaussian { sd: 1.0 },
            scale_exponent: 0.5,
        };
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for r in 0..reps {
            let path = generate_tvp_path(&spec, t_len, 1000 + r as u64).unwrap();
            let v = path[t_len - 1];
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / reps as f64;
        let var = sumsq / reps as f64 - mean * mean;
        // se of a variance estimate over N Gaussians ~ sqrt(2/N).
        let se = (2.0 / reps as f64).sqrt();
        assert!((var - 1.0).abs() < 3.0 * se + 0.02, "terminal variance {var}");
    }

    #[test]
    fn mixture_is_pointwise_additive_under_pinned_substreams() {
        let a = TvpSpec::RescaledRandomWalk {
            mu: 0.5,
            driver: RwDriver::Gaussian { sd: 1.0 },
            scale_exponent: 0.5,
        };
        let b = TvpSpec::Smooth { f: SmoothFunction::BumpTrend };
        let mix = TvpSpec::Mixture { components: vec![a.clone(), b.clone()] };
        let seed = 77;
        let t_len = 128;
        let combined = generate_tvp_path(&mix, t_len, seed).unwrap();
        let pa = generate_tvp_path(&a, t_len, mixture_component_seed(seed, 0)).unwrap();
        let pb = generate_tvp_path(&b, t_len, mixture_component_seed(seed, 1)).unwrap();
        for t in 0..t_len {
            assert_eq!(combined[t], pa[t] + pb[t]);
        }
    }

    #[test]
    fn threshold_path_switches_between_two_levels() {
        let spec = TvpSpec::Threshold {
            theta1: 0.5,
            delta_scale: 2.0,
            alpha: 0.25,
            threshold: 0.0,
            driver: ThresholdDriver::IidNormal,
        };
        let t_len = 4000;
        let path = generate_tvp_path(&spec, t_len, 13).unwrap();
        let effect = 2.0 / (t_len as f64).powf(0.25);
        let mut high = 0usize;
        for v in &path {
            if (*v - 0.5).abs() < 1e-15 {
                continue;
            }
            assert_relative_eq!(*v, 0.5 + effect, epsilon = 1e-12);
            high += 1;
        }
        // Standard-normal switching variable against a zero threshold:
        // roughly half the sample sits in the upper regime.
        let frac = high as f64 / t_len as f64;
        assert!((frac - 0.5).abs() < 0.05, "upper-regime fraction {frac}");
        // Deterministic in the seed.
        assert_eq!(path, generate_tvp_path(&spec, t_len, 13).unwrap());
    }

    #[test]
    fn smooth_catalog_values() {
        let f = SmoothFunction::from_name("bump_trend").unwrap();
        assert_relative_eq!(f.evaluate(0.5), 2.0 * 0.5 + 1.0, epsilon = 1e-15);
        let g = SmoothFunction::from_name("fourier_mix").unwrap();
        assert_relative_eq!(g.evaluate(0.5), (1.0 - 1.0 + (-1.0f64) + 1.0) / 4.0, epsilon = 1e-12);
        let lin = SmoothFunction::Polynomial { coefficients: vec![0.0, 2.0] };
        assert_relative_eq!(lin.evaluate(0.25), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn dataset_streams_are_independent() {
        let spec = DatasetSpec::single(
            TvpSpec::RescaledRandomWalk {
                mu: 0.0,
                driver: RwDriver::Gaussian { sd: 1.0 },
                scale_exponent: 0.5,
            },
            RegressorSpec::ar1_default(),
            ErrorSpec::Iid { sigma: 1.0 },
        );
        let sim1 = simulate_dataset(&spec, 100, 3).unwrap();
        let mut spec2 = spec.clone();
        spec2.error = ErrorSpec::Iid { sigma: 2.0 };
        let sim2 = simulate_dataset(&spec2, 100, 3).unwrap();
        // Same regressors and true paths, different noise.
        for t in 0..100 {
            assert_eq!(sim1.data.regressors()[(t, 0)], sim2.data.regressors()[(t, 0)]);
            assert_eq!(sim1.true_paths[(t, 0)], sim2.true_paths[(t, 0)]);
        }
        assert_ne!(sim1.data.response()[0], sim2.data.response()[0]);
    }

    #[test]
    fn noiseless_constant_dgp_reproduces_exact_regression() {
        let spec = DatasetSpec::single(
            TvpSpec::Smooth { f: SmoothFunction::Polynomial { coefficients: vec![1.5] } },
            RegressorSpec::ar1_default(),
            ErrorSpec::Iid { sigma: 0.0 },
        );
        let sim = simulate_dataset(&spec, 50, 9).unwrap();
        for t in 0..50 {
            assert_relative_eq!(
                sim.data.response()[t],
                1.5 * sim.data.regressors()[(t, 0)],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn garch_long_run_variance_matches_stationary_formula() {
        let spec = ErrorSpec::garch_default();
        spec.validate().unwrap();
        let eps = spec.generate(1_000_000, 17);
        let var = eps.iter().map(|e| e * e).sum::<f64>() / eps.len() as f64;
        // omega / (1 - arch - garch) = 1.
        assert!((var - 1.0).abs() < 0.05, "unconditional variance {var}");
    }

    #[test]
    fn ar1_autocorrelation_matches_phi() {
        let reg = RegressorSpec::ar1_default();
        let xs = reg.generate(100_000, 23);
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for t in 1..n {
            num += (xs[t] - mean) * (xs[t - 1] - mean);
        }
        for v in &xs {
            den += (v - mean) * (v - mean);
        }
        let rho = num / den;
        assert!((rho - 0.5).abs() < 0.02, "lag-1 autocorrelation {rho}");
    }

    #[test]
    fn probe_recovers_known_exponents() {
        // Linear path: exponent 1.
        let t_len = 4000;
        let lin = TvpSpec::Smooth { f: SmoothFunction::Polynomial { coefficients: vec![0.0, 2.0] } };
        let path = generate_tvp_path(&lin, t_len, 1).unwrap();
        match holder_smoothness_probe(&path, &[0.005, 0.01, 0.02, 0.04]).unwrap() {
            ProbeResult::Estimate { alpha_hat, .. } => {
                assert!((alpha_hat - 1.0).abs() < 0.15, "linear exponent {alpha_hat}")
            }
            ProbeResult::NotApplicable => panic!("probe should apply"),
        }

        // Rescaled Gaussian walk: exponent 1/2.
        let t_len = 10_000;
        let rw = TvpSpec::RescaledRandomWalk {
            mu: 0.0,
            driver: RwDriver::Gaussian { sd: 1.0 },
            scale_exponent: 0.5,
        };
        let path = generate_tvp_path(&rw, t_len, 2024).unwrap();
        match holder_smoothness_probe(&path, &[0.005, 0.01, 0.02, 0.04]).unwrap() {
            ProbeResult::Estimate { alpha_hat, .. } => {
                assert!((alpha_hat - 0.5).abs() < 0.15, "walk exponent {alpha_hat}")
            }
            ProbeResult::NotApplicable => panic!("probe should apply"),
        }

        // Constant path: no oscillation.
        let flat = vec![3.0; 1000];
        assert_eq!(
            holder_smoothness_probe(&flat, &[0.01, 0.02]).unwrap(),
            ProbeResult::NotApplicable
        );

        // Too-short path is a precondition failure.
        assert!(holder_smoothness_probe(&vec![0.0; 100], &[0.01, 0.02]).is_err());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let bad_break = TvpSpec::StructuralBreak {
            break_fractions: vec![0.7, 0.3],
            levels: vec![0.0, 1.0, 2.0],
            alpha: 0.2,
            delta: 1.0,
        };
        assert!(bad_break.validate().is_err());
        let bad_garch = ErrorSpec::Garch { omega: 0.1, arch: 0.5, garch: 0.5, burn_in: 500 };
        assert!(bad_garch.validate().is_err());
        let short_burn = ErrorSpec::Garch { omega: 0.1, arch: 0.3, garch: 0.6, burn_in: 100 };
        assert!(short_burn.validate().is_err());
        let bad_ar = RegressorSpec::Ar1 { phi: 1.0, innovation_sd: 1.0 };
        assert!(bad_ar.validate(10).is_err());
    }
}
