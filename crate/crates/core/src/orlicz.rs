//! Orlicz functions: the catalog, convex conjugation, generalized inversion,
//! confidence-level scaling, and the Δ2 growth diagnostic.
//!
//! Every catalog entry is a finite-valued convex nondecreasing gauge with
//! `Φ(0) = 0`, normalized algebraically so that `Φ(1) = 1` exactly. Conjugates
//! may take the value `+∞`.

use std::collections::BTreeMap;
use std::f64::consts::E;

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::solve::{self, ConcaveMax};

/// Largest exponent fed to `exp` before saturating to `+∞`.
const EXP_SATURATION: f64 = 709.0;

fn exp_saturating(x: f64) -> f64 {
    if x > EXP_SATURATION {
        f64::INFINITY
    } else {
        x.exp()
    }
}

/// Pointwise-evaluable gauge on `[0, ∞)`. Implemented by [`OrliczFunction`]
/// and its confidence-scaled variant [`ScaledOrlicz`]; the norm and premium
/// engines are generic over this trait.
pub trait Gauge {
    fn eval(&self, x: f64) -> f64;

    /// Right derivative at `x ≥ 0` (used for dual warm starts).
    fn right_derivative(&self, x: f64) -> f64;

    /// `sup { x ≥ 0 : eval(x) ≤ y }`, computed by bisection on a bracket grown
    /// by doubling. Flat segments resolve toward the supremum.
    fn generalized_inverse(&self, y: f64) -> f64 {
        generalized_inverse_impl(&|x| self.eval(x), y)
    }
}

fn generalized_inverse_impl(eval: &dyn Fn(f64) -> f64, y: f64) -> f64 {
    debug_assert!(y >= 0.0);
    let mut hi = 1.0;
    let mut rounds = 0;
    while eval(hi) <= y {
        hi *= 2.0;
        rounds += 1;
        if rounds > 600 {
            return f64::INFINITY;
        }
    }
    if eval(0.0) > y {
        return 0.0;
    }
    let (lo, hi) = solve::bisect_boundary(|x| eval(x) > y, 0.0, hi, 1e-14, 300);
    // lo is the last point with Φ(lo) ≤ y; midpoint keeps the error two-sided
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Identity,
    Power { p: f64 },
    Exponential,
    SquareExponential,
    KinkedLinear { a: f64 },
    PiecewiseLinear { nodes: Vec<(f64, f64)> },
}

/// A finite-valued Orlicz function from the built-in catalog (or the
/// piecewise-linear constructor), with closed-form conjugate where available.
#[derive(Debug, Clone, PartialEq)]
pub struct OrliczFunction {
    shape: Shape,
    delta2: bool,
}

/// Serializable name + parameters, the form used by CLI configuration.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PhiDescriptor {
    pub name: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl OrliczFunction {
    /// `Φ(x) = x`.
    pub fn identity() -> Self {
        OrliczFunction {
            shape: Shape::Identity,
            delta2: true,
        }
    }

    /// `Φ(x) = x^p`, `p > 1`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "power exponent must be finite and > 1, got {p}"
            )));
        }
        Ok(OrliczFunction {
            shape: Shape::Power { p },
            delta2: true,
        })
    }

    /// `Φ(x) = (e^x − 1)/(e − 1)`; fails Δ2.
    pub fn exponential() -> Self {
        OrliczFunction {
            shape: Shape::Exponential,
            delta2: false,
        }
    }

    /// `Φ(x) = (e^{x²} − 1)/(e − 1)`; fails Δ2.
    pub fn square_exponential() -> Self {
        OrliczFunction {
            shape: Shape::SquareExponential,
            delta2: false,
        }
    }

    /// `Φ(x) = (x − a)⁺ / (1 − a)` with kink `a ∈ [0, 1)`.
    pub fn kinked_linear(a: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&a) {
            return Err(CoreError::InvalidParameter(format!(
                "kink must lie in [0, 1), got {a}"
            )));
        }
        Ok(OrliczFunction {
            shape: Shape::KinkedLinear { a },
            delta2: true,
        })
    }

    /// Convex piecewise-linear gauge through the given `(x, Φ(x))` nodes.
    /// Nodes must start at `(0, 0)`, have strictly increasing abscissae and
    /// nondecreasing nonnegative slopes, and interpolate `Φ(1) = 1`. Beyond
    /// the last node the final slope is extended.
    pub fn piecewise_linear(nodes: &[(f64, f64)]) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(CoreError::InvalidParameter(
                "piecewise-linear gauge needs at least two nodes".into(),
            ));
        }
        if nodes[0] != (0.0, 0.0) {
            return Err(CoreError::InvalidParameter(
                "piecewise-linear gauge must start at (0, 0)".into(),
            ));
        }
        let mut prev_slope = -1.0;
        for w in nodes.windows(2) {
            let (x0, v0) = w[0];
            let (x1, v1) = w[1];
            if !(x1 > x0) {
                return Err(CoreError::InvalidParameter(
                    "piecewise-linear abscissae must be strictly increasing".into(),
                ));
            }
            let slope = (v1 - v0) / (x1 - x0);
            if slope < 0.0 || slope + 1e-15 < prev_slope {
                return Err(CoreError::InvalidParameter(
                    "piecewise-linear gauge must be convex and nondecreasing".into(),
                ));
            }
            prev_slope = slope;
        }
        if prev_slope <= 0.0 {
            return Err(CoreError::InvalidParameter(
                "piecewise-linear gauge must be nonconstant".into(),
            ));
        }
        let f = OrliczFunction {
            shape: Shape::PiecewiseLinear {
                nodes: nodes.to_vec(),
            },
            // piecewise-linear growth is eventually linear
            delta2: true,
        };
        if (f.eval(1.0) - 1.0).abs() > 1e-12 {
            return Err(CoreError::InvalidParameter(format!(
                "piecewise-linear gauge must satisfy Φ(1) = 1, got Φ(1) = {}",
                f.eval(1.0)
            )));
        }
        Ok(f)
    }

    /// The default catalog: identity, power `p = 2`, exponential,
    /// square-exponential, and kinked-linear `a = 0.5`.
    pub fn catalog() -> Vec<OrliczFunction> {
        vec![
            OrliczFunction::identity(),
            OrliczFunction::power(2.0).expect("p = 2 is valid"),
            OrliczFunction::exponential(),
            OrliczFunction::square_exponential(),
            OrliczFunction::kinked_linear(0.5).expect("a = 0.5 is valid"),
        ]
    }

    /// Look up a gauge by configuration name. `power` takes `p` (default 2),
    /// `kinked-linear` takes `a` (default 0.5).
    pub fn by_name(name: &str, p: Option<f64>, a: Option<f64>) -> Result<Self> {
        match name {
            "identity" => Ok(OrliczFunction::identity()),
            "power" => OrliczFunction::power(p.unwrap_or(2.0)),
            "exponential" => Ok(OrliczFunction::exponential()),
            "square-exponential" => Ok(OrliczFunction::square_exponential()),
            "kinked-linear" => OrliczFunction::kinked_linear(a.unwrap_or(0.5)),
            other => Err(CoreError::InvalidParameter(format!(
                "unknown gauge '{other}'; valid names: identity, power, exponential, \
                 square-exponential, kinked-linear"
            ))),
        }
    }

    pub fn descriptor(&self) -> PhiDescriptor {
        let mut params = BTreeMap::new();
        let name = match &self.shape {
            Shape::Identity => "identity",
            Shape::Power { p } => {
                params.insert("p".to_string(), *p);
                "power"
            }
            Shape::Exponential => "exponential",
            Shape::SquareExponential => "square-exponential",
            Shape::KinkedLinear { a } => {
                params.insert("a".to_string(), *a);
                "kinked-linear"
            }
            Shape::PiecewiseLinear { nodes } => {
                params.insert("nodes".to_string(), nodes.len() as f64);
                "piecewise-linear"
            }
        };
        PhiDescriptor {
            name: name.to_string(),
            params,
        }
    }

    pub fn name(&self) -> String {
        self.descriptor().name
    }

    /// Declared Δ2 growth flag for this entry (an analytic fact per entry, not
    /// the outcome of a scan; see [`check_delta2`] for the consistency check).
    pub fn is_delta2(&self) -> bool {
        self.delta2
    }

    /// All catalog entries are finite-valued; conjugates need not be.
    pub fn finite_valued(&self) -> bool {
        true
    }

    /// The conjugate `Ψ(y) = sup_x { xy − Φ(x) }`, in closed form where the
    /// catalog provides one and by 1-D concave maximization otherwise.
    /// Returns `+∞` past the asymptotic slope of `Φ`.
    pub fn conjugate(&self, y: f64) -> f64 {
        debug_assert!(y >= 0.0);
        match &self.shape {
            Shape::Identity => {
                if y <= 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Shape::Power { p } => {
                // sup attained at x = (y/p)^{1/(p-1)}
                if y == 0.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / p) * y.powf(p / (p - 1.0)) / p.powf(1.0 / (p - 1.0))
                }
            }
            Shape::Exponential => {
                let c = 1.0 / (E - 1.0);
                if y <= c {
                    0.0
                } else {
                    y * (y * (E - 1.0)).ln() - y + c
                }
            }
            Shape::SquareExponential => {
                // stationary point solves 2x e^{x²} = y (e − 1); Newton on the
                // strictly increasing left side
                if y == 0.0 {
                    return 0.0;
                }
                let target = y * (E - 1.0);
                let mut x = (target / 2.0).max(1.0).ln().max(1e-8).sqrt();
                for _ in 0..60 {
                    let ex = exp_saturating(x * x);
                    let g = 2.0 * x * ex - target;
                    let dg = (2.0 + 4.0 * x * x) * ex;
                    let step = g / dg;
                    x -= step;
                    if x <= 0.0 {
                        x = 1e-12;
                    }
                    if step.abs() <= 1e-15 * x.max(1.0) {
                        break;
                    }
                }
                (x * y - self.eval(x)).max(0.0)
            }
            Shape::KinkedLinear { a } => {
                let slope = 1.0 / (1.0 - a);
                if y <= slope {
                    a * y
                } else {
                    f64::INFINITY
                }
            }
            Shape::PiecewiseLinear { nodes } => {
                // sup over kink points; +∞ past the terminal slope
                let (x_last, v_last) = *nodes.last().expect("validated nonempty");
                let terminal = {
                    let (x0, v0) = nodes[nodes.len() - 2];
                    (v_last - v0) / (x_last - x0)
                };
                if y > terminal {
                    return f64::INFINITY;
                }
                nodes
                    .iter()
                    .map(|&(x, v)| x * y - v)
                    .fold(0.0_f64, f64::max)
            }
        }
    }

    /// The conjugate by direct numeric Legendre transform (golden-section
    /// maximization on a doubling bracket, divergence declared at radius
    /// `1e8`). Exposed so the closed forms can be certified against it.
    pub fn conjugate_numeric(&self, y: f64) -> f64 {
        conjugate_numeric_of(&|x| self.eval(x), y)
    }

    /// Scale to the confidence level: `Φ_α = Φ / (1 − α)`.
    pub fn scaled(&self, alpha: f64) -> Result<ScaledOrlicz> {
        ScaledOrlicz::new(self.clone(), alpha)
    }
}

pub(crate) fn conjugate_numeric_of(eval: &dyn Fn(f64) -> f64, y: f64) -> f64 {
    match solve::maximize_concave(|x| x * y - eval(x), 1e8, 1e-12) {
        ConcaveMax::Attained { value } => value.max(0.0),
        ConcaveMax::Diverges => f64::INFINITY,
    }
}

impl Gauge for OrliczFunction {
    fn eval(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0, "gauges are evaluated on [0, ∞), got {x}");
        match &self.shape {
            Shape::Identity => x,
            Shape::Power { p } => x.powf(*p),
            Shape::Exponential => (exp_saturating(x) - 1.0) / (E - 1.0),
            Shape::SquareExponential => (exp_saturating(x * x) - 1.0) / (E - 1.0),
            Shape::KinkedLinear { a } => (x - a).max(0.0) / (1.0 - a),
            Shape::PiecewiseLinear { nodes } => {
                let (x_last, v_last) = *nodes.last().expect("validated nonempty");
                if x >= x_last {
                    let (x0, v0) = nodes[nodes.len() - 2];
                    let slope = (v_last - v0) / (x_last - x0);
                    return v_last + slope * (x - x_last);
                }
                let idx = nodes.partition_point(|&(nx, _)| nx <= x);
                let (x0, v0) = nodes[idx - 1];
                let (x1, v1) = nodes[idx];
                v0 + (v1 - v0) * (x - x0) / (x1 - x0)
            }
        }
    }

    fn right_derivative(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Identity => 1.0,
            Shape::Power { p } => p * x.powf(p - 1.0),
            Shape::Exponential => exp_saturating(x) / (E - 1.0),
            Shape::SquareExponential => 2.0 * x * exp_saturating(x * x) / (E - 1.0),
            Shape::KinkedLinear { a } => {
                if x < *a {
                    0.0
                } else {
                    1.0 / (1.0 - a)
                }
            }
            Shape::PiecewiseLinear { nodes } => {
                let (x_last, v_last) = *nodes.last().expect("validated nonempty");
                let (x0, v0) = nodes[nodes.len() - 2];
                if x >= x_last {
                    return (v_last - v0) / (x_last - x0);
                }
                let idx = nodes.partition_point(|&(nx, _)| nx <= x);
                let (xa, va) = nodes[idx - 1];
                let (xb, vb) = nodes[idx];
                (vb - va) / (xb - xa)
            }
        }
    }
}

/// `Φ_α = Φ / (1 − α)` for a confidence level `α ∈ (0, 1)`. Inherits the Δ2
/// flag from its base.
#[derive(Debug, Clone)]
pub struct ScaledOrlicz {
    base: OrliczFunction,
    alpha: f64,
}

impl ScaledOrlicz {
    pub fn new(base: OrliczFunction, alpha: f64) -> Result<Self> {
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(CoreError::InvalidParameter(format!(
                "confidence level must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(ScaledOrlicz { base, alpha })
    }

    pub fn base(&self) -> &OrliczFunction {
        &self.base
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_delta2(&self) -> bool {
        self.base.delta2
    }

    /// `Ψ_α(y) = Ψ((1 − α) y) / (1 − α)`, the conjugate of `Φ_α`.
    pub fn conjugate(&self, y: f64) -> f64 {
        self.base.conjugate((1.0 - self.alpha) * y) / (1.0 - self.alpha)
    }

    /// Conjugate of `Φ_α` by direct numeric Legendre transform of the scaled
    /// gauge, bypassing the scaling identity.
    pub fn conjugate_numeric(&self, y: f64) -> f64 {
        conjugate_numeric_of(&|x| self.eval(x), y)
    }
}

impl Gauge for ScaledOrlicz {
    fn eval(&self, x: f64) -> f64 {
        self.base.eval(x) / (1.0 - self.alpha)
    }

    fn right_derivative(&self, x: f64) -> f64 {
        self.base.right_derivative(x) / (1.0 - self.alpha)
    }
}

/// Conjugate-side view of a gauge: evaluates `Ψ` (or `Ψ_α`) pointwise, for the
/// Orlicz-norm machinery. May take `+∞`.
pub struct ConjugateGauge<'a> {
    eval: Box<dyn Fn(f64) -> f64 + 'a>,
}

impl<'a> ConjugateGauge<'a> {
    pub fn of(f: &'a OrliczFunction) -> Self {
        ConjugateGauge {
            eval: Box::new(move |y| f.conjugate(y)),
        }
    }

    pub fn of_scaled(f: &'a ScaledOrlicz) -> Self {
        ConjugateGauge {
            eval: Box::new(move |y| f.conjugate(y)),
        }
    }
}

impl Gauge for ConjugateGauge<'_> {
    fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    fn right_derivative(&self, _x: f64) -> f64 {
        unimplemented!("conjugate gauges are only evaluated pointwise")
    }
}

/// Outcome of the Δ2 growth scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Delta2Diagnostic {
    /// `max Φ(2x)/Φ(x)` over the sampled range (may be `+∞` under saturation).
    pub ratio_max: f64,
    /// Whether the scan agrees with the entry's declared flag.
    pub consistent: bool,
}

/// Scan `Φ(2x)/Φ(x)` over `samples` log-spaced points of `[x_lo, x_hi]`.
/// Declared-Δ2 entries must stay below `threshold`; declared non-Δ2 entries
/// must exceed it by the top of the range. The scan is a consistency
/// diagnostic, not a decision procedure: Δ2 is an asymptotic property.
pub fn check_delta2(
    f: &OrliczFunction,
    x_lo: f64,
    x_hi: f64,
    samples: usize,
    threshold: f64,
) -> Result<Delta2Diagnostic> {
    if !(0.0 < x_lo && x_lo < x_hi) || samples < 2 {
        return Err(CoreError::InvalidParameter(
            "Δ2 scan needs 0 < x_lo < x_hi and at least two samples".into(),
        ));
    }
    let log_lo = x_lo.ln();
    let log_hi = x_hi.ln();
    let mut ratio_max = f64::NEG_INFINITY;
    let mut seen_valid = false;
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let x = (log_lo + t * (log_hi - log_lo)).exp();
        let num = f.eval(2.0 * x);
        let den = f.eval(x);
        if den == 0.0 || (den.is_infinite() && num.is_infinite()) {
            continue;
        }
        seen_valid = true;
        ratio_max = ratio_max.max(num / den);
    }
    if !seen_valid {
        return Err(CoreError::DegenerateScan(format!(
            "Φ vanishes (or saturates) on all of [{x_lo}, {x_hi}]; raise x_lo above the kink"
        )));
    }
    let consistent = if f.is_delta2() {
        ratio_max <= threshold
    } else {
        ratio_max > threshold
    };
    Ok(Delta2Diagnostic {
        ratio_max,
        consistent,
    })
}

/// Default Δ2 scan threshold.
pub const DELTA2_DEFAULT_THRESHOLD: f64 = 1e6;
