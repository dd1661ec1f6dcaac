//! Kernels, normalization constants, and singular-integral quadrature.

pub mod ambient;
pub mod fraclap;
pub mod kernel;
pub mod richardson;
pub mod scheme;
pub mod sum;

pub use ambient::{AmbientFunction, TailModel};
pub use fraclap::{frac_laplacian, frac_laplacian_eps, l1s_norm, FracLapEvaluator, L1sValue, OperatorValue};
pub use kernel::{
    gradient_normalization_constant, normalization_constant, riesz_kernel, riesz_kernel_2d, FracParams,
};
pub use richardson::{richardson_extrapolate, Extrapolated};
pub use scheme::{
    geometric_tail, radial_grid, simpson_grid, trapezoid_grid, LadderRung, QuadratureScheme, TailIntegral,
};
pub use sum::{gauss_legendre, gauss_legendre_integrate, pairwise_sum};
