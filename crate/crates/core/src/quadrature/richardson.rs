//! Richardson extrapolation for convergence ladders.

use serde::Serialize;

/// Outcome of extrapolating a ladder of (step, value) pairs.
#[derive(Debug, Clone, Serialize)]
pub struct Extrapolated {
    pub limit: f64,
    pub error_estimate: f64,
    pub order: f64,
    /// Set when the ladder was not monotone enough to fit a power law;
    /// the limit then falls back to the finest value with a conservative
    /// error bar.
    pub warning: Option<String>,
}

/// Fit `value ~ limit + C * step^order` to a ladder of (step, value) pairs.
///
/// Steps must be strictly decreasing. At least two entries are required;
/// with exactly two, a first-order-style estimate is returned (limit =
/// finest value, error = gap). With three or more, the order is fitted
/// from the last three entries and the limit extrapolated.
pub fn richardson_extrapolate(ladder: &[(f64, f64)]) -> Result<Extrapolated, String> {
    if ladder.len() < 2 {
        return Err(format!("ladder too short: {} entries (need >= 2)", ladder.len()));
    }
    for pair in ladder.windows(2) {
        if pair[1].0 >= pair[0].0 {
            return Err(format!(
                "ladder steps must strictly decrease: {} then {}",
                pair[0].0, pair[1].0
            ));
        }
    }

    let n = ladder.len();
    if n == 2 {
        let gap = (ladder[1].1 - ladder[0].1).abs();
        return Ok(Extrapolated {
            limit: ladder[1].1,
            error_estimate: gap.max(f64::EPSILON),
            order: f64::NAN,
            warning: Some("two-point ladder: no order fit".into()),
        });
    }

    let (h1, v1) = ladder[n - 3];
    let (h2, v2) = ladder[n - 2];
    let (h3, v3) = ladder[n - 1];
    let d12 = v1 - v2;
    let d23 = v2 - v3;
    let spread = ladder
        .iter()
        .map(|&(_, v)| v)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let full_spread = spread.1 - spread.0;

    // Constant ladder: already converged.
    if d12 == 0.0 && d23 == 0.0 {
        return Ok(Extrapolated {
            limit: v3,
            error_estimate: 0.0,
            order: f64::NAN,
            warning: None,
        });
    }

    // Non-Cauchy ladder (gaps not shrinking, or sign flip): report the finest
    // value with the full spread as a conservative error bar.
    if d12 == 0.0 || d23 == 0.0 || (d12 * d23) < 0.0 || d23.abs() >= d12.abs() {
        return Ok(Extrapolated {
            limit: v3,
            error_estimate: full_spread.max(d23.abs()),
            order: f64::NAN,
            warning: Some("non-monotone ladder: extrapolation skipped".into()),
        });
    }

    // Solve (h1^p - h2^p) / (h2^p - h3^p) = d12 / d23 for p by bisection.
    let target = d12 / d23;
    let ratio = |p: f64| {
        let a = h1.powf(p) - h2.powf(p);
        let b = h2.powf(p) - h3.powf(p);
        a / b
    };
    let g = |p: f64| ratio(p) - target;
    let (mut lo, mut hi) = (0.05, 12.0);
    let (glo, ghi) = (g(lo), g(hi));
    let order = if glo * ghi > 0.0 {
        // Fall back to the geometric-ratio estimate when the bracket fails.
        let r = h2 / h1;
        (d23 / d12).ln() / r.ln()
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(lo) * g(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        0.5 * (lo + hi)
    };

    if !order.is_finite() || order <= 0.0 {
        return Ok(Extrapolated {
            limit: v3,
            error_estimate: full_spread.max(d23.abs()),
            order: f64::NAN,
            warning: Some("order fit failed: extrapolation skipped".into()),
        });
    }

    // limit = v3 - C h3^p with C from the last two entries.
    let c = d23 / (h2.powf(order) - h3.powf(order));
    let limit = v3 - c * h3.powf(order);
    let error_estimate = (v3 - limit).abs().max(f64::EPSILON * v3.abs());
    Ok(Extrapolated {
        limit,
        error_estimate,
        order,
        warning: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_quadratic_ladder() {
        let ladder = vec![(1.0, 2.0), (0.5, 1.25), (0.25, 1.0625)];
        let r = richardson_extrapolate(&ladder).unwrap();
        assert_abs_diff_eq!(r.limit, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.order, 2.0, epsilon = 1e-6);
        assert!(r.warning.is_none());
    }

    #[test]
    fn constant_ladder_is_its_own_limit() {
        let ladder = vec![(1.0, 3.5), (0.5, 3.5), (0.25, 3.5)];
        let r = richardson_extrapolate(&ladder).unwrap();
        assert_eq!(r.limit, 3.5);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn non_monotone_ladder_warns() {
        let ladder = vec![(1.0, 1.0), (0.5, 2.0), (0.25, 1.5)];
        let r = richardson_extrapolate(&ladder).unwrap();
        assert!(r.warning.is_some());
        assert_eq!(r.limit, 1.5);
        assert!(r.error_estimate >= 0.5);
    }

    #[test]
    fn short_ladder_is_an_error() {
        assert!(richardson_extrapolate(&[(1.0, 1.0)]).is_err());
    }

    #[test]
    fn increasing_steps_are_an_error() {
        assert!(richardson_extrapolate(&[(0.25, 1.0), (0.5, 2.0), (1.0, 3.0)]).is_err());
    }

    #[test]
    fn fractional_order_ladder() {
        // v(h) = 1 + h^0.5
        let ladder: Vec<(f64, f64)> = [1.0, 0.5, 0.25, 0.125]
            .iter()
            .map(|&h: &f64| (h, 1.0 + h.powf(0.5)))
            .collect();
        let r = richardson_extrapolate(&ladder).unwrap();
        assert_abs_diff_eq!(r.limit, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(r.order, 0.5, epsilon = 1e-5);
    }
}
