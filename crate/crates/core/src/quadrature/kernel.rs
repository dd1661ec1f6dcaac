//! Riesz kernels and normalization constants.

use crate::error::{CalibError, Result};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

/// Parameters of the fractional operator: dimension, order, and the
/// normalization constant making the Fourier symbol equal `|xi|^{2s}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FracParams {
    pub n: u32,
    pub s: f64,
    pub c: f64,
}

impl FracParams {
    /// Build parameters with the symbol-normalized constant.
    pub fn new(n: u32, s: f64) -> Result<Self> {
        let c = normalization_constant(n, s)?;
        Ok(FracParams { n, s, c })
    }

    pub fn kernel_exponent(&self) -> f64 {
        self.n as f64 + 2.0 * self.s
    }
}

/// Normalization constant of the fractional Laplacian,
/// `4^s Gamma(n/2 + s) / (pi^{n/2} |Gamma(-s)|)`, which makes the operator
/// have Fourier symbol `|xi|^{2s}`.
///
/// Uses `|Gamma(-s)| = Gamma(1 - s) / s` to stay on positive arguments.
pub fn normalization_constant(n: u32, s: f64) -> Result<f64> {
    if !(n == 1 || n == 2) {
        return Err(CalibError::Domain(format!("dimension {n} unsupported (n must be 1 or 2)")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(CalibError::Domain(format!("fractional order s = {s} outside (0, 1)")));
    }
    let nf = n as f64;
    let c = 4.0_f64.powf(s) * gamma(nf / 2.0 + s) * s
        / (std::f64::consts::PI.powf(nf / 2.0) * gamma(1.0 - s));
    Ok(c)
}

/// Normalization constant of the fractional gradient in dimension one,
/// chosen so that the full-space quadratic forms of the gradient and of the
/// fractional Laplacian agree: `s / (2 Gamma(1 - s) sin(pi s / 2))`.
pub fn gradient_normalization_constant(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(CalibError::Domain(format!("fractional order s = {s} outside (0, 1)")));
    }
    Ok(s / (2.0 * gamma(1.0 - s) * (std::f64::consts::PI * s / 2.0).sin()))
}

/// Riesz kernel `c |z|^{-n-2s}` at displacement `z` (one-dimensional).
pub fn riesz_kernel(z: f64, p: &FracParams) -> Result<f64> {
    if z == 0.0 {
        return Err(CalibError::Domain("kernel singularity at z = 0".into()));
    }
    Ok(p.c * z.abs().powf(-p.kernel_exponent()))
}

/// Riesz kernel in dimension two at displacement `(z1, z2)`.
pub fn riesz_kernel_2d(z: [f64; 2], p: &FracParams) -> Result<f64> {
    let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
    if r == 0.0 {
        return Err(CalibError::Domain("kernel singularity at z = 0".into()));
    }
    Ok(p.c * r.powf(-p.kernel_exponent()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn half_laplacian_constant_is_one_over_pi() {
        let c = normalization_constant(1, 0.5).unwrap();
        assert_abs_diff_eq!(c, 1.0 / std::f64::consts::PI, epsilon = 1e-13);
    }

    #[test]
    fn kernel_values_at_unit_and_double_displacement() {
        let p = FracParams::new(1, 0.5).unwrap();
        assert_abs_diff_eq!(riesz_kernel(1.0, &p).unwrap(), 1.0 / std::f64::consts::PI, epsilon = 1e-13);
        assert_abs_diff_eq!(
            riesz_kernel(2.0, &p).unwrap(),
            1.0 / (4.0 * std::f64::consts::PI),
            epsilon = 1e-13
        );
    }

    #[test]
    fn kernel_singularity_is_a_domain_error() {
        let p = FracParams::new(1, 0.5).unwrap();
        assert!(riesz_kernel(0.0, &p).is_err());
    }

    #[test]
    fn constant_positive_and_continuous_in_s() {
        let mut prev: Option<f64> = None;
        for i in 1..40 {
            let s = i as f64 / 40.0;
            let c = normalization_constant(1, s).unwrap();
            assert!(c > 0.0, "c_(1,{s}) must be positive");
            if let Some(p) = prev {
                assert!((c - p).abs() < 0.5, "constant jumped between s grid points");
            }
            prev = Some(c);
        }
    }

    #[test]
    fn out_of_range_order_rejected() {
        assert!(normalization_constant(1, 0.0).is_err());
        assert!(normalization_constant(1, 1.0).is_err());
        assert!(normalization_constant(3, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn kernel_is_even(z in 0.01f64..50.0, s in 0.05f64..0.95) {
            let p = FracParams::new(1, s).unwrap();
            let a = riesz_kernel(z, &p).unwrap();
            let b = riesz_kernel(-z, &p).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a > 0.0);
        }
    }
}
