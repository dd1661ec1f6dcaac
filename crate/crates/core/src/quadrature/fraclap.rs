//! Singular-integral quadrature for the fractional Laplacian.
//!
//! The principal value is handled by pairing each node `y = x + z` with its
//! mirror `2x - y = x - z`, so the singular part integrates the second
//! difference `2u(x) - u(x+z) - u(x-z)`, which is `O(z^2)` for smooth `u`.
//! Constants and affine functions therefore evaluate to exactly zero at
//! every truncation level.

use crate::error::{CalibError, Result};
use crate::quadrature::ambient::{AmbientFunction, TailModel};
use crate::quadrature::kernel::FracParams;
use crate::quadrature::richardson::richardson_extrapolate;
use crate::quadrature::scheme::{geometric_tail, radial_grid, LadderRung, QuadratureScheme};
use crate::quadrature::sum::pairwise_sum;

/// Extrapolated operator value with its ladder-based error estimate.
#[derive(Debug, Clone)]
pub struct OperatorValue {
    pub value: f64,
    pub error_estimate: f64,
    /// Ladder values that produced the extrapolation, finest last.
    pub rung_values: Vec<(f64, f64)>,
    pub warning: Option<String>,
}

/// Kernel-weighted radial nodes for one truncation rung, reusable across
/// evaluation points because the grid depends only on the rung and kernel.
pub struct PreparedRung {
    pub eps: f64,
    nodes: Vec<(f64, f64)>,
}

/// Reusable evaluator holding prepared rungs for a (scheme, params) pair.
pub struct FracLapEvaluator {
    params: FracParams,
    radius: f64,
    rungs: Vec<PreparedRung>,
    base: PreparedRung,
}

impl FracLapEvaluator {
    pub fn new(scheme: &QuadratureScheme, params: FracParams) -> Result<Self> {
        scheme.validate()?;
        if params.n != 1 {
            return Err(CalibError::Domain(
                "fractional Laplacian quadrature is one-dimensional".into(),
            ));
        }
        let prepare = |rung: &LadderRung| PreparedRung {
            eps: rung.eps,
            nodes: radial_grid(rung.eps, scheme.outer_radius, rung.h, scheme.near_window, scheme.far_spacing)
                .into_iter()
                .map(|(z, w)| (z, w * params.c * z.powf(-params.kernel_exponent())))
                .collect(),
        };
        Ok(FracLapEvaluator {
            params,
            radius: scheme.outer_radius,
            rungs: scheme.ladder.iter().map(&prepare).collect(),
            base: prepare(&scheme.base_rung()),
        })
    }

    /// Truncated operator at the scheme's own (eps, h).
    pub fn eval_eps(&self, u: &AmbientFunction, x: f64) -> Result<f64> {
        self.eval_rung(u, x, &self.base)
    }

    fn eval_rung(&self, u: &AmbientFunction, x: f64, rung: &PreparedRung) -> Result<f64> {
        let ux = u.eval(x);
        let terms: Vec<f64> = rung
            .nodes
            .iter()
            .map(|&(z, kw)| (2.0 * ux - u.eval(x + z) - u.eval(x - z)) * kw)
            .collect();
        let mut total = pairwise_sum(&terms);
        total += self.tail(u, x, ux)?;
        if !total.is_finite() {
            let bad = rung
                .nodes
                .iter()
                .find(|&&(z, _)| !u.eval(x + z).is_finite() || !u.eval(x - z).is_finite())
                .map(|&(z, _)| x + z);
            return Err(CalibError::Numeric(match bad {
                Some(y) => format!("non-finite evaluator value near y = {y}"),
                None => format!("non-finite quadrature total at x = {x}"),
            }));
        }
        Ok(total)
    }

    fn tail(&self, u: &AmbientFunction, x: f64, ux: f64) -> Result<f64> {
        let (s, c, r) = (self.params.s, self.params.c, self.radius);
        match u.tail() {
            TailModel::ConstantLimit { neg, pos } => {
                Ok(c * (2.0 * ux - pos - neg) * r.powf(-2.0 * s) / (2.0 * s))
            }
            TailModel::PowerGrowth { .. } => {
                let exponent = self.params.kernel_exponent();
                let t = geometric_tail(
                    |z| (2.0 * ux - u.eval(x + z) - u.eval(x - z)) * c * z.powf(-exponent),
                    r,
                    1.05,
                );
                if t.diverged {
                    return Err(CalibError::Numeric(format!(
                        "tail of the fractional Laplacian diverges for `{}` at x = {x}",
                        u.label()
                    )));
                }
                Ok(t.value)
            }
            TailModel::None => Ok(0.0),
        }
    }

    /// Estimate of the dropped tail when the function declares no model.
    fn dropped_tail_estimate(&self, u: &AmbientFunction, x: f64) -> f64 {
        match u.tail() {
            TailModel::None => {
                let r = self.radius;
                let ux = u.eval(x);
                let g = (2.0 * ux - u.eval(x + r) - u.eval(x - r)).abs()
                    * self.params.c
                    * r.powf(-self.params.kernel_exponent());
                g * r / (2.0 * self.params.s)
            }
            _ => 0.0,
        }
    }

    /// Principal-value operator: rung values corrected for the inner
    /// truncation, then Richardson-extrapolated over the ladder.
    pub fn eval(&self, u: &AmbientFunction, x: f64) -> Result<OperatorValue> {
        let (s, c) = (self.params.s, self.params.c);
        let mut ladder = Vec::with_capacity(self.rungs.len());
        for rung in &self.rungs {
            let raw = self.eval_rung(u, x, rung)?;
            // Analytic inner-disc correction from a second-difference
            // estimate of u'' at scale eps/2; raises the rung order from
            // 2 - 2s to min(4 - 2s, 2).
            let delta = 0.5 * rung.eps;
            let u2 = u.second_derivative(x, delta);
            let inner = -c * u2 * rung.eps.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s);
            ladder.push((rung.eps, raw + inner));
        }
        let fit = richardson_extrapolate(&ladder).map_err(CalibError::Config)?;
        let finest = ladder.last().expect("ladder nonempty").1;
        let error_estimate = (fit.limit - finest)
            .abs()
            .max(1e-14 * fit.limit.abs())
            .max(1e-15)
            + self.dropped_tail_estimate(u, x);
        Ok(OperatorValue {
            value: fit.limit,
            error_estimate,
            rung_values: ladder,
            warning: fit.warning,
        })
    }
}

/// Truncated fractional Laplacian `(-Delta)^s_eps u(x)` at the scheme's
/// `(eps, h)`: quadrature of `(u(x) - u(y)) K(x - y)` over `|x - y| > eps`,
/// with the tail beyond the outer radius supplied by the tail model.
pub fn frac_laplacian_eps(
    u: &AmbientFunction,
    x: f64,
    scheme: &QuadratureScheme,
    p: &FracParams,
) -> Result<f64> {
    if !u.contains_in_smooth_box(x) {
        return Err(CalibError::Domain(format!(
            "x = {x} outside the smooth neighborhood of `{}`",
            u.label()
        )));
    }
    FracLapEvaluator::new(scheme, *p)?.eval_eps(u, x)
}

/// Principal-value fractional Laplacian with ladder extrapolation.
pub fn frac_laplacian(
    u: &AmbientFunction,
    x: f64,
    scheme: &QuadratureScheme,
    p: &FracParams,
) -> Result<OperatorValue> {
    if !u.contains_in_smooth_box(x) {
        return Err(CalibError::Domain(format!(
            "x = {x} outside the smooth neighborhood of `{}`",
            u.label()
        )));
    }
    FracLapEvaluator::new(scheme, *p)?.eval(u, x)
}

/// Value and finiteness verdict of the weighted tail norm.
#[derive(Debug, Clone, Copy)]
pub struct L1sValue {
    pub value: f64,
    pub finite: bool,
}

/// The norm of `L^1_s`: integral of `|u(y)| / (1 + |y|^{n+2s})`.
///
/// Divergence is a reported state, not an error: a power-growth tail with
/// exponent >= 2s makes `finite` false and the value a truncated figure.
pub fn l1s_norm(u: &AmbientFunction, scheme: &QuadratureScheme, p: &FracParams) -> L1sValue {
    let exponent = p.kernel_exponent();
    let weight = |y: f64| 1.0 / (1.0 + y.abs().powf(exponent));
    let grid = radial_grid(
        0.0,
        scheme.outer_radius,
        scheme.h.max(1.0 / 256.0),
        scheme.near_window,
        scheme.far_spacing,
    );
    let terms: Vec<f64> = grid
        .iter()
        .map(|&(y, w)| (u.eval(y).abs() + u.eval(-y).abs()) * weight(y) * w)
        .collect();
    let mut value = pairwise_sum(&terms);

    match u.tail() {
        TailModel::PowerGrowth { exponent: growth } if growth >= 2.0 * p.s => {
            L1sValue { value, finite: false }
        }
        TailModel::None => L1sValue { value, finite: true },
        _ => {
            let t = geometric_tail(
                |y| (u.eval(y).abs() + u.eval(-y).abs()) * weight(y),
                scheme.outer_radius,
                1.05,
            );
            if t.diverged {
                return L1sValue { value: value + t.value, finite: false };
            }
            value += t.value;
            L1sValue { value, finite: true }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(s: f64) -> FracParams {
        FracParams::new(1, s).unwrap()
    }

    #[test]
    fn constants_are_annihilated_exactly() {
        let scheme = QuadratureScheme::desk(50.0);
        let u = AmbientFunction::constant(7.0);
        let p = params(0.5);
        for &x in &[-2.0, 0.0, 1.3] {
            assert_eq!(frac_laplacian_eps(&u, x, &scheme, &p).unwrap(), 0.0);
            let v = frac_laplacian(&u, x, &scheme, &p).unwrap();
            assert_eq!(v.value, 0.0);
        }
    }

    #[test]
    fn odd_integrand_vanishes_for_identity_at_origin() {
        let scheme = QuadratureScheme::desk(50.0);
        let u = AmbientFunction::closed("id", |y| y)
            .with_derivative(|_| 1.0)
            .with_tail(TailModel::PowerGrowth { exponent: 1.0 });
        let p = params(0.75);
        assert_eq!(frac_laplacian_eps(&u, 0.0, &scheme, &p).unwrap(), 0.0);
        // away from the origin the pairing cancels affine functions up to
        // floating-point rounding of (x + z) + (x - z)
        let v = frac_laplacian(&u, 0.7, &scheme, &p).unwrap();
        assert_abs_diff_eq!(v.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn truncated_operator_on_cosine_near_symbol() {
        let scheme = QuadratureScheme::with_ladder(4, 1e-3, 400.0).unwrap();
        let u = AmbientFunction::closed("cos", |y: f64| y.cos())
            .with_derivative(|y: f64| -y.sin())
            .with_tail(TailModel::ConstantLimit { neg: 0.0, pos: 0.0 });
        let p = params(0.5);
        let v = frac_laplacian_eps(&u, 0.0, &scheme, &p).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 5e-3);
    }

    #[test]
    fn pv_operator_matches_spectral_oracle_for_cosine() {
        let scheme = QuadratureScheme::desk(400.0);
        let u = AmbientFunction::closed("cos", |y: f64| y.cos())
            .with_derivative(|y: f64| -y.sin())
            .with_tail(TailModel::ConstantLimit { neg: 0.0, pos: 0.0 });
        for &s in &[0.25, 0.5, 0.75] {
            let p = params(s);
            let x = std::f64::consts::PI / 3.0;
            let v = frac_laplacian(&u, x, &scheme, &p).unwrap();
            let exact = x.cos();
            assert!(
                (v.value - exact).abs() <= v.error_estimate.max(5e-4),
                "s = {s}: got {} want {exact} (err est {})",
                v.value,
                v.error_estimate
            );
        }
    }

    #[test]
    fn peierls_nabarro_profile_satisfies_half_laplacian_identity() {
        let scheme = QuadratureScheme::desk(200.0);
        let u = AmbientFunction::closed("2atan", |y: f64| 2.0 * y.atan())
            .with_derivative(|y: f64| 2.0 / (1.0 + y * y))
            .with_tail(TailModel::ConstantLimit {
                neg: -std::f64::consts::PI,
                pos: std::f64::consts::PI,
            });
        let p = params(0.5);
        // odd function at an odd point
        let v0 = frac_laplacian(&u, 0.0, &scheme, &p).unwrap();
        assert_abs_diff_eq!(v0.value, 0.0, epsilon = 1e-9);
        // (-Delta)^{1/2} (2 arctan)(x) = sin(2 arctan x) = 2x / (1 + x^2)
        let v1 = frac_laplacian(&u, 1.0, &scheme, &p).unwrap();
        assert_abs_diff_eq!(v1.value, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn ladder_gaps_shrink_for_concave_bump() {
        // strictly concave near x, flat far away: second difference has a
        // definite sign, rung values converge monotonically
        let scheme = QuadratureScheme::desk(100.0);
        let u = AmbientFunction::closed("gauss", |y: f64| (-y * y).exp())
            .with_tail(TailModel::ConstantLimit { neg: 0.0, pos: 0.0 });
        let p = params(0.5);
        let v = frac_laplacian(&u, 0.0, &scheme, &p).unwrap();
        let raw: Vec<f64> = v.rung_values.iter().map(|&(_, v)| v).collect();
        let g1 = (raw[1] - raw[0]).abs();
        let g2 = (raw[2] - raw[1]).abs();
        let g3 = (raw[3] - raw[2]).abs();
        assert!(g2 < g1 && g3 < g2, "ladder gaps must shrink: {g1} {g2} {g3}");
    }

    #[test]
    fn l1s_of_constant_one_is_pi_for_half() {
        let scheme = QuadratureScheme::desk(100.0);
        let v = l1s_norm(&AmbientFunction::constant(1.0), &scheme, &params(0.5));
        assert!(v.finite);
        assert_abs_diff_eq!(v.value, std::f64::consts::PI, epsilon = 1e-3);
    }

    #[test]
    fn l1s_of_zero_vanishes() {
        let scheme = QuadratureScheme::desk(100.0);
        let v = l1s_norm(&AmbientFunction::constant(0.0), &scheme, &params(0.5));
        assert!(v.finite);
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn l1s_flags_linear_growth_with_small_s() {
        let scheme = QuadratureScheme::desk(100.0);
        let u = AmbientFunction::closed("id", |y| y)
            .with_tail(TailModel::PowerGrowth { exponent: 1.0 });
        let v = l1s_norm(&u, &scheme, &params(0.25));
        assert!(!v.finite);
        // with s = 3/4 the same function is integrable against the weight
        let v = l1s_norm(&u, &scheme, &params(0.75));
        assert!(v.finite);
    }

    #[test]
    fn non_finite_evaluator_is_reported() {
        let scheme = QuadratureScheme::desk(50.0);
        let u = AmbientFunction::closed("bad", |y: f64| if y > 3.0 { f64::NAN } else { y });
        let p = params(0.5);
        let err = frac_laplacian_eps(&u, 0.0, &scheme, &p);
        assert!(matches!(err, Err(CalibError::Numeric(_))));
    }

    #[test]
    fn determinism_across_thread_counts() {
        let scheme = QuadratureScheme::desk(100.0);
        let u = AmbientFunction::closed("2atan", |y: f64| 2.0 * y.atan())
            .with_tail(TailModel::ConstantLimit {
                neg: -std::f64::consts::PI,
                pos: std::f64::consts::PI,
            });
        let p = params(0.5);
        let run = || {
            let ev = FracLapEvaluator::new(&scheme, p).unwrap();
            let xs: Vec<f64> = (0..20).map(|i| -1.0 + i as f64 * 0.1).collect();
            use rayon::prelude::*;
            let vals: Vec<f64> = xs.par_iter().map(|&x| ev.eval(&u, x).unwrap().value).collect();
            pairwise_sum(&vals)
        };
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = pool1.install(run);
        let b = pool4.install(run);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
