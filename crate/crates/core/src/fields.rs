//! Extremal fields, leaf-parameter inversion, and field validation.
//!
//! A field is a one-parameter family `t -> u^t` of functions on the line
//! whose graphs foliate a region `G` over the domain closure. The
//! leaf-parameter function inverts the foliation: `t(x, lambda)` is the
//! unique `t` with `u^t(x) = lambda`, recovered here by monotone bracketing.

use crate::error::{CalibError, Result};
use crate::quadrature::{l1s_norm, AmbientFunction, FracParams, QuadratureScheme, TailModel};
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

type Leaf = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// One-parameter family `(t, x) -> u^t(x)` with its parameter interval,
/// monotonicity flags, and the tail model shared by all leaves.
#[derive(Clone)]
pub struct ExtremalField {
    leaf: Leaf,
    dleaf_dt: Leaf,
    interval: (f64, f64),
    pub strict_in_domain: bool,
    pub nondecreasing_outside: bool,
    leaf_tail: TailModel,
    label: String,
}

impl fmt::Debug for ExtremalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtremalField")
            .field("label", &self.label)
            .field("interval", &self.interval)
            .finish()
    }
}

impl ExtremalField {
    pub fn new<L, D>(
        label: impl Into<String>,
        leaf: L,
        dleaf_dt: D,
        interval: (f64, f64),
        leaf_tail: TailModel,
    ) -> Self
    where
        L: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        ExtremalField {
            leaf: Arc::new(leaf),
            dleaf_dt: Arc::new(dleaf_dt),
            interval,
            strict_in_domain: true,
            nondecreasing_outside: true,
            leaf_tail,
            label: label.into(),
        }
    }

    pub fn leaf(&self, t: f64, x: f64) -> f64 {
        (self.leaf)(t, x)
    }

    pub fn dleaf_dt(&self, t: f64, x: f64) -> f64 {
        (self.dleaf_dt)(t, x)
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn leaf_tail(&self) -> TailModel {
        self.leaf_tail
    }

    /// The leaf `u^t` as a total ambient function, carrying the tail model
    /// that the quadrature needs.
    pub fn leaf_fn(&self, t: f64) -> AmbientFunction {
        let leaf = self.leaf.clone();
        AmbientFunction::closed(format!("{}@t={t}", self.label), move |x| leaf(t, x))
            .with_tail(self.leaf_tail)
    }
}

/// Family of translates `u^t(x) = profile(x + t)` of a strictly increasing
/// profile; the field used for monotone solutions.
pub fn make_translation_field(profile: &AmbientFunction, interval: (f64, f64)) -> Result<ExtremalField> {
    // sampled monotonicity check over a window wide enough for the interval
    let lo = -30.0 + interval.0;
    let hi = 30.0 + interval.1;
    let n = 600;
    let mut prev = profile.eval(lo);
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let v = profile.eval(x);
        if v < prev {
            return Err(CalibError::Validation(format!(
                "translation profile `{}` is not nondecreasing near x = {x}",
                profile.label()
            )));
        }
        prev = v;
    }
    let p1 = profile.clone();
    let p2 = profile.clone();
    Ok(ExtremalField::new(
        format!("translation({})", profile.label()),
        move |t, x| p1.eval(x + t),
        move |t, x| p2.derivative(x + t),
        interval,
        profile.tail(),
    ))
}

/// Constant-leaf field `u^t = t`; the fixture for one-sided calibration
/// checks. Its leaves are globally constant, so every quadrature tail
/// vanishes through the second-difference pairing.
pub fn make_constant_field(interval: (f64, f64)) -> ExtremalField {
    ExtremalField::new("constant", |t, _| t, |_, _| 1.0, interval, TailModel::None)
}

/// The linear field `u^t(x) = x + t` of extremals of the potential-free
/// energy.
pub fn linear_field(interval: (f64, f64)) -> ExtremalField {
    let profile = AmbientFunction::closed("id", |x| x)
        .with_derivative(|_| 1.0)
        .with_tail(TailModel::PowerGrowth { exponent: 1.0 });
    make_translation_field(&profile, interval).expect("identity profile is monotone")
}

/// The Peierls-Nabarro field `u^t(x) = 2 arctan(x + t)`.
pub fn peierls_nabarro_field(interval: (f64, f64)) -> ExtremalField {
    let profile = AmbientFunction::closed("2atan", |x: f64| 2.0 * x.atan())
        .with_derivative(|x: f64| 2.0 / (1.0 + x * x))
        .with_tail(TailModel::ConstantLimit {
            neg: -std::f64::consts::PI,
            pos: std::f64::consts::PI,
        });
    make_translation_field(&profile, interval).expect("arctan profile is monotone")
}

/// Monotone bounded field from the hyperbolic tangent profile.
pub fn tanh_field(interval: (f64, f64)) -> ExtremalField {
    let profile = AmbientFunction::closed("tanh", |x: f64| x.tanh())
        .with_derivative(|x: f64| 1.0 / x.cosh().powi(2))
        .with_tail(TailModel::ConstantLimit { neg: -1.0, pos: 1.0 });
    make_translation_field(&profile, interval).expect("tanh profile is monotone")
}

impl ExtremalField {
    /// Look up a built-in field by its config name.
    pub fn by_name(name: &str, interval: (f64, f64)) -> Result<ExtremalField> {
        match name {
            "peierls-nabarro" => Ok(peierls_nabarro_field(interval)),
            "linear" => Ok(linear_field(interval)),
            "constant" => Ok(make_constant_field(interval)),
            "tanh" => Ok(tanh_field(interval)),
            other => {
                if let Some(path) = other.strip_prefix("translation:") {
                    let text = std::fs::read_to_string(path)?;
                    let profile = AmbientFunction::from_csv(
                        &text,
                        TailModel::ConstantLimit { neg: 0.0, pos: 0.0 },
                    )?;
                    make_translation_field(&profile, interval)
                } else {
                    Err(CalibError::Config(format!(
                        "unknown field `{other}`; valid: peierls-nabarro | linear | constant | tanh | translation:<csv>"
                    )))
                }
            }
        }
    }
}

/// Leaf-parameter inversion: bisection bracketing followed by secant
/// polish, valid because leaves are ordered in `t`.
#[derive(Clone)]
pub struct LeafParam<'a> {
    pub field: &'a ExtremalField,
    pub tol: f64,
    pub max_iter: usize,
}

impl<'a> LeafParam<'a> {
    pub fn new(field: &'a ExtremalField) -> Self {
        LeafParam { field, tol: 1e-12, max_iter: 200 }
    }

    /// Solve `u^t(x) = lambda` for `t`. Errors when `(x, lambda)` lies
    /// outside the foliated region, i.e. lambda is not between the leaf
    /// values at the interval endpoints.
    pub fn leaf_parameter(&self, x: f64, lambda: f64) -> Result<f64> {
        let (t_lo, t_hi) = self.field.interval();
        let v_lo = self.field.leaf(t_lo, x);
        let v_hi = self.field.leaf(t_hi, x);
        let slack = self.tol * lambda.abs().max(1.0);
        if lambda < v_lo - slack || lambda > v_hi + slack {
            return Err(CalibError::OutsideFoliation { x, lambda });
        }
        if lambda <= v_lo {
            return Ok(t_lo);
        }
        if lambda >= v_hi {
            return Ok(t_hi);
        }

        let g = |t: f64| self.field.leaf(t, x) - lambda;
        let mut lo = t_lo;
        let mut hi = t_hi;
        let mut iterations = 0usize;
        // bisect until the bracket is small enough for the secant to take over
        while hi - lo > 1e-3 * (t_hi - t_lo) && iterations < self.max_iter {
            let mid = 0.5 * (lo + hi);
            if g(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            iterations += 1;
        }
        let tol_abs = self.tol * lambda.abs().max(1.0);
        let mut a = lo;
        let mut b = hi;
        let mut ga = g(a);
        let mut gb = g(b);
        while iterations < self.max_iter {
            if gb == ga {
                break;
            }
            let c = (b - gb * (b - a) / (gb - ga)).clamp(lo, hi);
            let gc = g(c);
            a = b;
            ga = gb;
            b = c;
            gb = gc;
            iterations += 1;
            if gc.abs() <= tol_abs {
                return Ok(c.clamp(t_lo, t_hi));
            }
        }
        // secant stalled; finish with bisection on the surviving bracket
        let mut lo2 = lo;
        let mut hi2 = hi;
        for _ in 0..200 {
            let mid = 0.5 * (lo2 + hi2);
            let gm = g(mid);
            if gm.abs() <= tol_abs || hi2 - lo2 < f64::EPSILON * (1.0 + lo2.abs()) {
                return Ok(mid);
            }
            if gm >= 0.0 {
                hi2 = mid;
            } else {
                lo2 = mid;
            }
        }
        Ok(0.5 * (lo2 + hi2))
    }

    /// Whether `(x, lambda)` lies inside the foliated region.
    pub fn in_foliation(&self, x: f64, lambda: f64) -> bool {
        let (t_lo, t_hi) = self.field.interval();
        lambda >= self.field.leaf(t_lo, x) && lambda <= self.field.leaf(t_hi, x)
    }
}

/// Scalar potential with its derivative.
#[derive(Clone)]
pub struct Potential {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    fprime: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Potential({})", self.label)
    }
}

impl Potential {
    pub fn new<F, D>(label: impl Into<String>, f: F, fprime: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Potential { f: Arc::new(f), fprime: Arc::new(fprime), label: label.into() }
    }

    pub fn zero() -> Self {
        Potential::new("zero", |_| 0.0, |_| 0.0)
    }

    /// `F(u) = 1 - cos u`, the periodic well of the Peierls-Nabarro model.
    pub fn cosine_well() -> Self {
        Potential::new("cosine-well", |u: f64| 1.0 - u.cos(), |u: f64| u.sin())
    }

    /// `F(u) = -u^2 / 2`, whose leaf residual on the constant field is `t`.
    pub fn neg_quadratic() -> Self {
        Potential::new("neg-quadratic", |u: f64| -0.5 * u * u, |u: f64| -u)
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "zero" => Ok(Potential::zero()),
            "cosine-well" => Ok(Potential::cosine_well()),
            "neg-quadratic" => Ok(Potential::neg_quadratic()),
            other => Err(CalibError::Config(format!(
                "unknown potential `{other}`; valid: zero | cosine-well | neg-quadratic"
            ))),
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn fprime(&self, u: f64) -> f64 {
        (self.fprime)(u)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Sampled consistency of `F'` with `F` by central differences.
    pub fn check_consistency(&self, lo: f64, hi: f64, samples: usize) -> Result<()> {
        let h = (hi - lo).max(1e-6) * 1e-5;
        for i in 0..=samples {
            let u = lo + (hi - lo) * i as f64 / samples as f64;
            let fd = (self.f(u + h) - self.f(u - h)) / (2.0 * h);
            let scale = self.fprime(u).abs().max(1.0);
            if (fd - self.fprime(u)).abs() > 1e-6 * scale {
                return Err(CalibError::Validation(format!(
                    "potential `{}`: F' inconsistent with F at u = {u}",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

/// Per-condition verdicts of the field validation.
#[derive(Debug, Clone, Serialize)]
pub struct FieldValidation {
    pub joint_continuity: ConditionVerdict,
    pub monotonicity: ConditionVerdict,
    pub uniform_bounds: ConditionVerdict,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionVerdict {
    pub pass: bool,
    pub detail: String,
}

/// Sampled validation of the field conditions: joint continuity on a grid,
/// strict monotonicity in `t` on the domain closure and nondecreasing
/// outside, and uniform bounds (sup of `|d_t u^t|`, finiteness of the tail
/// norm, and a second-difference bound on a neighborhood of the domain as
/// the Holder-regularity proxy).
///
/// Monotonicity almost everywhere cannot be certified from samples; the
/// verdict is explicitly a sampled one.
pub fn validate_field(
    field: &ExtremalField,
    omega: (f64, f64),
    scheme: &QuadratureScheme,
    p: &FracParams,
) -> FieldValidation {
    let (t_lo, t_hi) = field.interval();
    let nt = 24usize;
    let nx = 48usize;
    let margin = (omega.1 - omega.0).max(1.0);
    let far = scheme.outer_radius.min(30.0);

    // (i) joint continuity: adjacent-sample modulus must shrink with scale
    let modulus = |steps: usize| -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..=steps {
            let t = t_lo + (t_hi - t_lo) * i as f64 / steps as f64;
            for j in 0..steps {
                let x0 = omega.0 - margin + (omega.1 - omega.0 + 2.0 * margin) * j as f64 / steps as f64;
                let x1 = omega.0 - margin + (omega.1 - omega.0 + 2.0 * margin) * (j + 1) as f64 / steps as f64;
                worst = worst.max((field.leaf(t, x1) - field.leaf(t, x0)).abs());
            }
        }
        for j in 0..=steps {
            let x = omega.0 - margin + (omega.1 - omega.0 + 2.0 * margin) * j as f64 / steps as f64;
            for i in 0..steps {
                let t0 = t_lo + (t_hi - t_lo) * i as f64 / steps as f64;
                let t1 = t_lo + (t_hi - t_lo) * (i + 1) as f64 / steps as f64;
                worst = worst.max((field.leaf(t1, x) - field.leaf(t0, x)).abs());
            }
        }
        worst
    };
    let m1 = modulus(32);
    let m2 = modulus(64);
    let continuity_ok = m2 <= 0.75 * m1 + 1e-9;
    let joint_continuity = ConditionVerdict {
        pass: continuity_ok,
        detail: format!("sampled modulus {m1:.3e} at n=32 vs {m2:.3e} at n=64"),
    };

    // (ii) monotonicity in t: strict on the closure, nondecreasing outside
    let mut strict_ok = true;
    let mut outside_ok = true;
    let mut strict_detail = String::new();
    for j in 0..=nx {
        let x_in = omega.0 + (omega.1 - omega.0) * j as f64 / nx as f64;
        let x_out = if j % 2 == 0 {
            omega.1 + (far - omega.1) * j as f64 / nx as f64
        } else {
            omega.0 - (omega.0 + far) * j as f64 / nx as f64
        };
        for i in 0..nt {
            let t0 = t_lo + (t_hi - t_lo) * i as f64 / nt as f64;
            let t1 = t_lo + (t_hi - t_lo) * (i + 1) as f64 / nt as f64;
            if field.leaf(t1, x_in) <= field.leaf(t0, x_in) {
                strict_ok = false;
                if strict_detail.is_empty() {
                    strict_detail = format!("not strictly increasing at x = {x_in}, t in [{t0}, {t1}]");
                }
            }
            if field.leaf(t1, x_out) < field.leaf(t0, x_out) - 1e-12 {
                outside_ok = false;
            }
            if field.dleaf_dt(0.5 * (t0 + t1), x_in) < -1e-12 {
                strict_ok = false;
            }
        }
    }
    let monotonicity = ConditionVerdict {
        pass: strict_ok && outside_ok,
        detail: if strict_ok && outside_ok {
            format!("strict on [{}, {}], nondecreasing outside (sampled)", omega.0, omega.1)
        } else if strict_detail.is_empty() {
            "nondecreasing check failed outside the domain (sampled)".into()
        } else {
            strict_detail
        },
    };

    // (iii) uniform bounds over the compact parameter interval
    let mut sup_dt: f64 = 0.0;
    let mut l1s_ok = true;
    let mut sup_l1s: f64 = 0.0;
    let mut second_diff: f64 = 0.0;
    for i in 0..=8 {
        let t = t_lo + (t_hi - t_lo) * i as f64 / 8.0;
        for j in 0..=64 {
            let x = -far + 2.0 * far * j as f64 / 64.0;
            sup_dt = sup_dt.max(field.dleaf_dt(t, x).abs());
        }
        let leaf = field.leaf_fn(t);
        let norm = l1s_norm(&leaf, scheme, p);
        l1s_ok &= norm.finite;
        sup_l1s = sup_l1s.max(norm.value);
        // second differences on a neighborhood N strictly containing omega
        for j in 0..=32 {
            let x = (omega.0 - 0.5 * margin) + (omega.1 - omega.0 + margin) * j as f64 / 32.0;
            second_diff = second_diff.max(leaf.second_derivative(x, 1e-4).abs());
        }
    }
    let bounds_ok = l1s_ok && sup_dt.is_finite() && second_diff.is_finite() && second_diff < 1e8;
    let uniform_bounds = ConditionVerdict {
        pass: bounds_ok,
        detail: format!(
            "sup|d_t u| = {sup_dt:.3e}, sup L1s = {sup_l1s:.3e} (finite: {l1s_ok}), second-difference bound {second_diff:.3e}"
        ),
    };

    let passed = joint_continuity.pass && monotonicity.pass && uniform_bounds.pass;
    FieldValidation { joint_continuity, monotonicity, uniform_bounds, passed }
}
