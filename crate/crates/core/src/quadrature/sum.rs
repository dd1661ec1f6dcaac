//! Fixed-order reductions and Gauss-Legendre nodes.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Pairwise (tree) sum with a fixed association order.
///
/// The reduction order depends only on the slice length, never on thread
/// scheduling, so concurrent callers that assemble the same slice obtain
/// bit-identical results.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 64;
    if values.len() <= BASE {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre polynomial and memoized,
/// since the same small orders are requested across many quadrature calls.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().expect("gauss-legendre cache poisoned");
    if let Some(rule) = guard.get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    guard.insert(n, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-based initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate `f` over `[lo, hi]` with the `n`-point Gauss-Legendre rule.
///
/// Handles a reversed interval (`hi < lo`) with the usual sign convention.
pub fn gauss_legendre_integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    if lo == hi {
        return 0.0;
    }
    let rule = gauss_legendre(n);
    let c = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let terms: Vec<f64> = rule
        .0
        .iter()
        .zip(rule.1.iter())
        .map(|(&x, &w)| w * f(c + half * x))
        .collect();
    half * pairwise_sum(&terms)
}
