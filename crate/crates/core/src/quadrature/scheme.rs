//! Truncation scheme and deterministic quadrature grids.

use crate::error::{CalibError, Result};
use serde::{Deserialize, Serialize};

/// One rung of the extrapolation ladder: inner cutoff and near-field spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub eps: f64,
    pub h: f64,
}

/// Truncation and resolution parameters for the singular quadratures.
///
/// The radial grid is uniform with spacing `h` on `[eps, eps + near_window]`
/// and uniform with spacing `far_spacing` from there to `outer_radius`;
/// contributions beyond `outer_radius` go through the tail model of the
/// integrand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureScheme {
    pub eps: f64,
    pub h: f64,
    pub outer_radius: f64,
    pub ladder: Vec<LadderRung>,
    pub near_window: f64,
    pub far_spacing: f64,
}

impl QuadratureScheme {
    /// Scheme with a geometric (eps, h) ladder of `rungs` entries ending at
    /// `eps_finest`, with `h = eps / 8` on every rung.
    pub fn with_ladder(rungs: usize, eps_finest: f64, outer_radius: f64) -> Result<Self> {
        if rungs < 2 {
            return Err(CalibError::Config(format!(
                "ladder too short: {rungs} entries (need >= 2)"
            )));
        }
        let mut ladder = Vec::with_capacity(rungs);
        for k in (0..rungs).rev() {
            let eps = eps_finest * 2f64.powi(k as i32);
            ladder.push(LadderRung { eps, h: eps / 8.0 });
        }
        let scheme = QuadratureScheme {
            eps: eps_finest,
            h: eps_finest / 8.0,
            outer_radius,
            ladder,
            near_window: 8.0,
            far_spacing: 0.25,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    /// Default desk-scale scheme: four rungs down to eps = 1/128.
    pub fn desk(outer_radius: f64) -> Self {
        QuadratureScheme::with_ladder(4, 1.0 / 128.0, outer_radius)
            .expect("desk scheme parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.h > 0.0 && self.outer_radius > 0.0) {
            return Err(CalibError::Config(
                "eps, h, outer_radius must all be positive".into(),
            ));
        }
        if self.eps < self.h {
            return Err(CalibError::Config(format!(
                "inner cutoff eps = {} must be >= grid spacing h = {}",
                self.eps, self.h
            )));
        }
        if self.ladder.len() < 2 {
            return Err(CalibError::Config(format!(
                "ladder too short: {} entries (need >= 2)",
                self.ladder.len()
            )));
        }
        for w in self.ladder.windows(2) {
            if !(w[1].eps < w[0].eps && w[1].h < w[0].h) {
                return Err(CalibError::Config(
                    "ladder entries must strictly decrease in both eps and h".into(),
                ));
            }
        }
        for rung in &self.ladder {
            if rung.eps < rung.h {
                return Err(CalibError::Config(format!(
                    "ladder rung has eps = {} < h = {}",
                    rung.eps, rung.h
                )));
            }
        }
        if !(self.near_window > 0.0 && self.far_spacing > 0.0) {
            return Err(CalibError::Config(
                "near_window and far_spacing must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Check the truncation radius against a domain the scheme is used with.
    pub fn check_covers(&self, omega: (f64, f64)) -> Result<()> {
        let diam = omega.1 - omega.0;
        if self.outer_radius <= diam || self.outer_radius <= omega.0.abs().max(omega.1.abs()) {
            return Err(CalibError::Config(format!(
                "outer radius {} must exceed the domain [{}, {}]",
                self.outer_radius, omega.0, omega.1
            )));
        }
        Ok(())
    }

    /// The single-rung view used by `frac_laplacian_eps`.
    pub fn base_rung(&self) -> LadderRung {
        LadderRung { eps: self.eps, h: self.h }
    }
}

/// Trapezoid nodes and weights on `[lo, hi]` with spacing close to
/// `target_h` and exact endpoints. Returns an empty grid for degenerate
/// intervals.
pub fn trapezoid_grid(lo: f64, hi: f64, target_h: f64) -> Vec<(f64, f64)> {
    if !(hi > lo) {
        return Vec::new();
    }
    let n = ((hi - lo) / target_h).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    let mut grid = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = if i == n { hi } else { lo + i as f64 * h };
        let w = if i == 0 || i == n { 0.5 * h } else { h };
        grid.push((x, w));
    }
    grid
}

/// Two-zone radial grid on `[eps, radius]`: spacing `h` on the near window,
/// `far_spacing` beyond it.
pub fn radial_grid(eps: f64, radius: f64, h: f64, near_window: f64, far_spacing: f64) -> Vec<(f64, f64)> {
    let split = (eps + near_window).min(radius);
    let mut grid = trapezoid_grid(eps, split, h);
    if split < radius {
        grid.extend(trapezoid_grid(split, radius, far_spacing));
    }
    grid
}

/// Composite Simpson nodes and weights on `[lo, hi]` with an even number of
/// subintervals of width close to `target_h`.
pub fn simpson_grid(lo: f64, hi: f64, target_h: f64) -> Vec<(f64, f64)> {
    if !(hi > lo) {
        return Vec::new();
    }
    let mut n = ((hi - lo) / target_h).ceil().max(2.0) as usize;
    if n % 2 == 1 {
        n += 1;
    }
    let h = (hi - lo) / n as f64;
    let mut grid = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = if i == n { hi } else { lo + i as f64 * h };
        let w = if i == 0 || i == n {
            h / 3.0
        } else if i % 2 == 1 {
            4.0 * h / 3.0
        } else {
            2.0 * h / 3.0
        };
        grid.push((x, w));
    }
    grid
}

/// Result of a geometric-grid tail integral.
#[derive(Debug, Clone, Copy)]
pub struct TailIntegral {
    pub value: f64,
    pub diverged: bool,
    /// Magnitude of the last geometric block, an estimate of what further
    /// extension could still contribute.
    pub remainder_estimate: f64,
}

/// Integrate `f` on `[start, infinity)` over a geometric grid of ratio
/// `ratio`, stopping when blocks become negligible relative to the running
/// total or flagging divergence when they stop shrinking.
pub fn geometric_tail<F: Fn(f64) -> f64>(f: F, start: f64, ratio: f64) -> TailIntegral {
    debug_assert!(ratio > 1.0);
    let mut lo = start;
    let mut f_lo = f(lo);
    let mut total = 0.0;
    let mut prev_block = f64::INFINITY;
    let mut growth_streak = 0u32;
    let max_radius = start.max(1.0) * 1e12;
    loop {
        let hi = lo * ratio;
        let f_hi = f(hi);
        let block = 0.5 * (f_lo + f_hi) * (hi - lo);
        total += block;
        if block.abs() >= prev_block.abs() && block.abs() > 0.0 {
            growth_streak += 1;
            if growth_streak >= 6 {
                return TailIntegral {
                    value: total,
                    diverged: true,
                    remainder_estimate: block.abs(),
                };
            }
        } else {
            growth_streak = 0;
        }
        let scale = total.abs().max(1e-300);
        if block.abs() < 1e-14 * scale && block.abs() < 1e-16 {
            return TailIntegral { value: total, diverged: false, remainder_estimate: block.abs() };
        }
        if hi > max_radius {
            return TailIntegral {
                value: total,
                diverged: false,
                remainder_estimate: block.abs(),
            };
        }
        prev_block = block;
        lo = hi;
        f_lo = f_hi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::sum::pairwise_sum;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trapezoid_grid_integrates_linear_exactly() {
        let grid = trapezoid_grid(0.0, 2.0, 0.3);
        let vals: Vec<f64> = grid.iter().map(|&(x, w)| w * (3.0 * x + 1.0)).collect();
        assert_abs_diff_eq!(pairwise_sum(&vals), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_grid_integrates_cubic_exactly() {
        let grid = simpson_grid(0.0, 1.0, 0.1);
        let vals: Vec<f64> = grid.iter().map(|&(x, w)| w * x.powi(3)).collect();
        assert_abs_diff_eq!(pairwise_sum(&vals), 0.25, epsilon = 1e-13);
    }

    #[test]
    fn geometric_tail_converges_on_power_decay() {
        // integral of z^{-2} from 10 to infinity = 0.1
        let t = geometric_tail(|z| z.powi(-2), 10.0, 1.05);
        assert!(!t.diverged);
        assert_abs_diff_eq!(t.value, 0.1, epsilon = 2e-4);
    }

    #[test]
    fn geometric_tail_flags_divergence() {
        let t = geometric_tail(|z| z.powf(-0.5), 10.0, 1.25);
        assert!(t.diverged);
    }

    #[test]
    fn ladder_validation_catches_bad_schemes() {
        assert!(QuadratureScheme::with_ladder(1, 0.01, 10.0).is_err());
        let mut s = QuadratureScheme::desk(50.0);
        s.ladder[1].eps = s.ladder[0].eps;
        assert!(s.validate().is_err());
        let mut s = QuadratureScheme::desk(50.0);
        s.eps = s.h / 2.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn scheme_coverage_check() {
        let s = QuadratureScheme::desk(50.0);
        assert!(s.check_covers((-1.0, 1.0)).is_ok());
        assert!(s.check_covers((-60.0, 60.0)).is_err());
    }
}
