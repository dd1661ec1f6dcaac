//! Functions on the line with declared far-field behavior.

use crate::error::{CalibError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Declared behavior of a function beyond the quadrature truncation radius.
///
/// The model is declared per function: tail integrals are dominated by it
/// and must not be silently truncated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailModel {
    /// The function approaches constants (in the mean) at -infinity and
    /// +infinity; tails are integrated in closed form against the kernel.
    ConstantLimit { neg: f64, pos: f64 },
    /// `|u(y)|` grows or decays like `|y|^exponent`; tails are integrated
    /// numerically on a geometric grid of the extended model and the
    /// exponent decides divergence classifications.
    PowerGrowth { exponent: f64 },
    /// No tail information: contributions beyond the truncation radius are
    /// dropped and surfaced through the error estimate.
    None,
}

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A total function on the real line: closed form, or grid samples with a
/// tail extension. Carries what the quadrature needs to know about it: an
/// optional analytic derivative, the interval where second derivatives are
/// trustworthy, and the declared tail model.
#[derive(Clone)]
pub struct AmbientFunction {
    eval: Eval,
    deriv: Option<Eval>,
    tail: TailModel,
    smooth_box: (f64, f64),
    label: String,
}

impl fmt::Debug for AmbientFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AmbientFunction")
            .field("label", &self.label)
            .field("tail", &self.tail)
            .field("smooth_box", &self.smooth_box)
            .finish()
    }
}

impl AmbientFunction {
    pub fn closed<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        AmbientFunction {
            eval: Arc::new(f),
            deriv: None,
            tail: TailModel::None,
            smooth_box: (f64::NEG_INFINITY, f64::INFINITY),
            label: label.into(),
        }
    }

    pub fn with_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.deriv = Some(Arc::new(d));
        self
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_smooth_box(mut self, lo: f64, hi: f64) -> Self {
        self.smooth_box = (lo, hi);
        self
    }

    /// Constant function, tail model included.
    pub fn constant(c: f64) -> Self {
        AmbientFunction::closed(format!("const({c})"), move |_| c)
            .with_derivative(|_| 0.0)
            .with_tail(TailModel::ConstantLimit { neg: c, pos: c })
    }

    /// Grid-sampled function from strictly increasing abscissae, evaluated
    /// by cubic Hermite interpolation inside the sample box and by the tail
    /// model outside (constant edge value or anchored power law).
    pub fn from_samples(xs: Vec<f64>, values: Vec<f64>, tail: TailModel) -> Result<Self> {
        if xs.len() != values.len() || xs.len() < 2 {
            return Err(CalibError::Config(format!(
                "sampled function needs matching columns with >= 2 rows, got {} / {}",
                xs.len(),
                values.len()
            )));
        }
        for w in xs.windows(2) {
            if w[1] <= w[0] {
                return Err(CalibError::Config(format!(
                    "sample abscissae must strictly increase: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let lo = xs[0];
        let hi = *xs.last().unwrap();
        let interp = Arc::new(HermiteTable::new(xs, values, tail));
        let i2 = interp.clone();
        Ok(AmbientFunction {
            eval: Arc::new(move |x| interp.eval(x)),
            deriv: Some(Arc::new(move |x| i2.deriv(x))),
            tail,
            smooth_box: (lo, hi),
            label: "sampled".into(),
        })
    }

    /// Parse the two-column `x,value` CSV format (header row required,
    /// strictly increasing x). The tail model comes from the caller's
    /// config, not from the file.
    pub fn from_csv(text: &str, tail: TailModel) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| CalibError::Config("empty CSV".into()))?;
        if !header.to_lowercase().replace(' ', "").starts_with("x,value") {
            return Err(CalibError::Config(format!(
                "CSV header must be `x,value`, got `{header}`"
            )));
        }
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let x: f64 = parts
                .next()
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| CalibError::Config(format!("bad x on CSV row {}", i + 2)))?;
            let v: f64 = parts
                .next()
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| CalibError::Config(format!("bad value on CSV row {}", i + 2)))?;
            xs.push(x);
            vals.push(v);
        }
        Self::from_samples(xs, vals, tail)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// First derivative: analytic when provided, otherwise a central
    /// difference with magnitude-scaled step.
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.deriv {
            Some(d) => d(x),
            None => {
                let h = 1e-5 * x.abs().max(1.0);
                ((self.eval)(x + h) - (self.eval)(x - h)) / (2.0 * h)
            }
        }
    }

    /// Second derivative by a symmetric second difference.
    pub fn second_derivative(&self, x: f64, h: f64) -> f64 {
        ((self.eval)(x + h) + (self.eval)(x - h) - 2.0 * (self.eval)(x)) / (h * h)
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    pub fn smooth_box(&self) -> (f64, f64) {
        self.smooth_box
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains_in_smooth_box(&self, x: f64) -> bool {
        x >= self.smooth_box.0 && x <= self.smooth_box.1
    }
}

/// Cubic Hermite table with finite-difference slopes; C^1 inside the box,
/// extended outside by the declared tail model anchored at the edges.
struct HermiteTable {
    xs: Vec<f64>,
    vals: Vec<f64>,
    slopes: Vec<f64>,
    tail: TailModel,
}

impl HermiteTable {
    fn new(xs: Vec<f64>, vals: Vec<f64>, tail: TailModel) -> Self {
        let n = xs.len();
        let mut slopes = vec![0.0; n];
        for i in 0..n {
            if i == 0 {
                slopes[i] = (vals[1] - vals[0]) / (xs[1] - xs[0]);
            } else if i == n - 1 {
                slopes[i] = (vals[n - 1] - vals[n - 2]) / (xs[n - 1] - xs[n - 2]);
            } else {
                slopes[i] = (vals[i + 1] - vals[i - 1]) / (xs[i + 1] - xs[i - 1]);
            }
        }
        HermiteTable { xs, vals, slopes, tail }
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    fn extend(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let (edge_x, edge_v) = if x < self.xs[0] {
            (self.xs[0], self.vals[0])
        } else {
            (self.xs[n - 1], self.vals[n - 1])
        };
        match self.tail {
            TailModel::ConstantLimit { neg, pos } => {
                if x < self.xs[0] {
                    neg
                } else {
                    pos
                }
            }
            TailModel::PowerGrowth { exponent } => {
                if edge_x == 0.0 {
                    edge_v
                } else {
                    edge_v * (x.abs() / edge_x.abs()).powf(exponent)
                }
            }
            TailModel::None => edge_v,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        if x < self.xs[0] || x > *self.xs.last().unwrap() {
            return self.extend(x);
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.vals[i] + h10 * h * self.slopes[i] + h01 * self.vals[i + 1] + h11 * h * self.slopes[i + 1]
    }

    fn deriv(&self, x: f64) -> f64 {
        if x < self.xs[0] || x > *self.xs.last().unwrap() {
            let h = 1e-5 * x.abs().max(1.0);
            return (self.extend(x + h) - self.extend(x - h)) / (2.0 * h);
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.vals[i] + d10 * self.slopes[i] + d01 * self.vals[i + 1] + d11 * self.slopes[i + 1]
    }
}
