//! Kernel weight functions on the compact support [-1, 1].
//!
//! The registry is closed to the two kernels used by the estimators:
//! the Epanechnikov kernel `K(x) = 0.75 (1 - x^2)` and the uniform
//! density `K(x) = 0.5` on [-1, 1]. Both integrate to one and vanish
//! outside the support, so a bandwidth `h` gives an effective window of
//! `2 * floor(T h) + 1` observations.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Epanechnikov,
    Uniform,
}

impl Kernel {
    pub const ALL: [Kernel; 2] = [Kernel::Epanechnikov, Kernel::Uniform];

    /// Kernel weight at `x`; exactly zero for `|x| > 1`.
    #[inline]
    pub fn evaluate(self, x: f64) -> f64 {
        if x.abs() > 1.0 {
            return 0.0;
        }
        match self {
            Kernel::Epanechnikov => 0.75 * (1.0 - x * x),
            Kernel::Uniform => 0.5,
        }
    }

    /// `∫_{-1}^{1} K(x)^2 dx`, evaluated analytically.
    pub fn l2_norm_squared(self) -> f64 {
        match self {
            // ∫ (0.75 (1 - x²))² dx = 0.5625 · 16/15
            Kernel::Epanechnikov => 0.6,
            Kernel::Uniform => 0.5,
        }
    }

    /// Bound on |K(x) - K(y)| / |x - y| over the support.
    pub fn lipschitz_bound(self) -> f64 {
        match self {
            Kernel::Epanechnikov => 1.5,
            Kernel::Uniform => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Uniform => "uniform",
        }
    }

    /// Look up a kernel by its configuration name.
    pub fn from_name(name: &str) -> Option<Kernel> {
        match name.trim().to_ascii_lowercase().as_str() {
            "epanechnikov" => Some(Kernel::Epanechnikov),
            "uniform" => Some(Kernel::Uniform),
            _ => None,
        }
    }
}

/// Composite Simpson quadrature of `f` over `[a, b]` with `n` intervals
/// (`n` even). Used to cross-check the analytic kernel constants.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 2 && n % 2 == 0, "interval count must be even");
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        s += f(x) * if i % 2 == 0 { 2.0 } else { 4.0 };
    }
    s * h / 3.0
}

/// Interval count used for quadrature cross-checks.
pub const QUADRATURE_INTERVALS: usize = 1 << 14;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn epanechnikov_values() {
        assert_eq!(Kernel::Epanechnikov.evaluate(0.0), 0.75);
        assert_eq!(Kernel::Epanechnikov.evaluate(1.0), 0.0);
        assert_eq!(Kernel::Epanechnikov.evaluate(-1.0), 0.0);
        assert_eq!(Kernel::Epanechnikov.evaluate(1.0000001), 0.0);
    }

    #[test]
    fn uniform_values() {
        assert_eq!(Kernel::Uniform.evaluate(0.3), 0.5);
        assert_eq!(Kernel::Uniform.evaluate(-0.99), 0.5);
        assert_eq!(Kernel::Uniform.evaluate(1.2), 0.0);
    }

    #[test]
    fn l2_norms_match_quadrature() {
        for k in Kernel::ALL {
            let quad = simpson(|x| k.evaluate(x) * k.evaluate(x), -1.0, 1.0, QUADRATURE_INTERVALS);
            assert_relative_eq!(k.l2_norm_squared(), quad, epsilon = 1e-8);
        }
        assert_relative_eq!(Kernel::Epanechnikov.l2_norm_squared(), 0.6, epsilon = 1e-15);
        assert_relative_eq!(Kernel::Uniform.l2_norm_squared(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn unit_integral_and_support() {
        for k in Kernel::ALL {
            let total = simpson(|x| k.evaluate(x), -1.0, 1.0, QUADRATURE_INTERVALS);
            assert_relative_eq!(total, 1.0, epsilon = 1e-6);
            // Grid sweep: nonnegative inside, zero outside.
            for i in 0..10_000 {
                let x = -2.0 + 4.0 * (i as f64) / 9_999.0;
                let v = k.evaluate(x);
                assert!(v >= 0.0);
                if x.abs() > 1.0 {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn symmetry_and_lipschitz_on_support() {
        for k in Kernel::ALL {
            let bound = k.lipschitz_bound();
            let n = 10_000;
            for i in 0..n {
                let x = -1.0 + 2.0 * (i as f64) / (n - 1) as f64;
                assert_eq!(k.evaluate(x), k.evaluate(-x));
                if i + 1 < n {
                    let x2 = -1.0 + 2.0 * ((i + 1) as f64) / (n - 1) as f64;
                    let slope = (k.evaluate(x2) - k.evaluate(x)).abs() / (x2 - x);
                    assert!(slope <= bound + 1e-9, "slope {slope} exceeds bound {bound}");
                }
            }
        }
    }

    #[test]
    fn registry_round_trips_names() {
        for k in Kernel::ALL {
            assert_eq!(Kernel::from_name(k.name()), Some(k));
        }
        assert_eq!(Kernel::from_name("Epanechnikov"), Some(Kernel::Epanechnikov));
        assert_eq!(Kernel::from_name("gaussian"), None);
    }
}
