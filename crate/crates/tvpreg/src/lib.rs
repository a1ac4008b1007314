//! Kernel (local constant) estimation of time-varying coefficients in
//! linear models `y_t = x_t' beta_t + eps_t`.
//!
//! The crate provides:
//!
//! - [`estimator`]: the kernel-weighted least-squares path estimator with
//!   leave-out variants, sandwich variance estimators, and pointwise
//!   confidence bands;
//! - [`bandwidth`]: data-driven selection of the bandwidth rate by
//!   cross-validation or a coverage-based wild bootstrap, selection of
//!   the scale constant, and the algebra linking admissible rates to
//!   path-smoothness exponents;
//! - [`dgp`]: seeded generators for coefficient paths across the
//!   smoothness spectrum and for regressor/error processes;
//! - [`mc`]: a reproducible Monte Carlo harness with closed-form risk
//!   calculators and table/CSV emission;
//! - [`io`] and [`cli`]: CSV ingestion (including growth/value portfolio
//!   construction), a TOML run-configuration schema, and plot-data
//!   flattening behind the `tvpreg` binary.
//!
//! Estimation windows use bandwidths `h = c T^gamma`; an observation `i`
//! enters the estimate at `t` with weight `K((t - i)/(T h))`, which
//! vanishes beyond `floor(T h)` steps. All randomness flows through
//! derived substreams ([`rng`]), so every result is reproducible for any
//! worker-thread count.

pub mod bandwidth;
pub mod cli;
pub mod dgp;
pub mod error;
pub mod estimator;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod mc;
pub mod rng;

pub use bandwidth::{
    admissible_alpha_set, admissible_gamma_range, bootstrap_select_gamma, cv_select_gamma,
    select_scale_c, AlphaRange, BootstrapConfig, GammaGrid, GammaRange, SelectionResult,
    SmoothnessClass,
};
pub use dgp::{
    generate_tvp_path, holder_smoothness_probe, simulate_dataset, DatasetSpec, ErrorSpec,
    ProbeResult, RegressorSpec, TvpSpec,
};
pub use error::{DgpError, EstimatorError, McError, RangeError, SelectionError, TheoryError};
pub use estimator::{
    estimate_path, gram_condition_report, leave_out_estimate, local_constant_estimate, Bandwidth,
    TimeSeriesData, TvpEstimate,
};
pub use kernels::Kernel;
pub use mc::theory::{
    mse_minimizing_bandwidth, mse_theoretical_general, mse_theoretical_local_level,
};
pub use mc::{run_experiment, McConfig, McResult};
