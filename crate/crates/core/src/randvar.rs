//! Laws of random variables: finite discrete distributions and quantile
//! representations over `(0, 1)`, with transforms, expectations, modular
//! (gauge) expectations, and Orlicz-space membership scans.
//!
//! A `QuantileRV` stores its quantile function in two parametrizations — from
//! the lower endpoint (`t` small) and from the upper endpoint (`s = 1 − t`
//! small) — so tail integrals keep full precision arbitrarily close to 1.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::orlicz::Gauge;
use crate::quadrature::{self, ClosureIntegrand, CutPoint, IntegralValue, QuadConfig};
use crate::solve;

/// One atom of a discrete law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// A finite discrete law: atoms sorted by value, duplicates merged, strictly
/// positive probabilities summing to one within `1e-12`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteRV {
    atoms: Vec<Atom>,
}

impl DiscreteRV {
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(CoreError::InvalidDistribution("no atoms".into()));
        }
        let mut total = 0.0;
        for &(v, p) in pairs {
            if !v.is_finite() {
                return Err(CoreError::InvalidDistribution(format!(
                    "non-finite atom value {v}"
                )));
            }
            if !(p > 0.0) || !p.is_finite() {
                return Err(CoreError::InvalidDistribution(format!(
                    "atom probability must be positive and finite, got {p}"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(CoreError::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut sorted: Vec<(f64, f64)> = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
        let mut atoms: Vec<Atom> = Vec::with_capacity(sorted.len());
        for (v, p) in sorted {
            match atoms.last_mut() {
                Some(last) if last.value == v => last.prob += p,
                _ => atoms.push(Atom { value: v, prob: p }),
            }
        }
        Ok(DiscreteRV { atoms })
    }

    pub fn constant(c: f64) -> Self {
        DiscreteRV::new(&[(c, 1.0)]).expect("constants are valid")
    }

    /// Equal weights on the given values (duplicates merge).
    pub fn uniform(values: &[f64]) -> Result<Self> {
        let p = 1.0 / values.len() as f64;
        DiscreteRV::new(&values.iter().map(|&v| (v, p)).collect::<Vec<_>>())
    }

    /// `value · 1_A` with `P(A) = p`.
    pub fn scaled_indicator(value: f64, p: f64) -> Result<Self> {
        if !(0.0 < p && p < 1.0) {
            return Err(CoreError::InvalidDistribution(format!(
                "indicator mass must lie in (0, 1), got {p}"
            )));
        }
        DiscreteRV::new(&[(value, p), (0.0, 1.0 - p)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn min_value(&self) -> f64 {
        self.atoms.first().expect("nonempty").value
    }

    pub fn max_value(&self) -> f64 {
        self.atoms.last().expect("nonempty").value
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value * a.prob).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.value <= x + 1e-12 * x.abs().max(1.0))
            .map(|a| a.prob)
            .sum()
    }

    fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<DiscreteRV> {
        DiscreteRV::new(
            &self
                .atoms
                .iter()
                .map(|a| (f(a.value), a.prob))
                .collect::<Vec<_>>(),
        )
    }

    /// Replace each partition block by one atom at the block's
    /// probability-weighted mean, carrying the block's total probability.
    /// Blocks index into `atoms()`, must be disjoint, nonempty, and cover.
    pub fn coarsen(&self, partition: &[Vec<usize>]) -> Result<DiscreteRV> {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        for block in partition {
            if block.is_empty() {
                return Err(CoreError::InvalidPartition("empty block".into()));
            }
            for &i in block {
                if i >= n {
                    return Err(CoreError::InvalidPartition(format!(
                        "index {i} out of range ({n} atoms)"
                    )));
                }
                if seen[i] {
                    return Err(CoreError::InvalidPartition(format!(
                        "atom {i} appears in two blocks"
                    )));
                }
                seen[i] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(CoreError::InvalidPartition(
                "partition does not cover all atoms".into(),
            ));
        }
        let mut pairs = Vec::with_capacity(partition.len());
        for block in partition {
            let mass: f64 = block.iter().map(|&i| self.atoms[i].prob).sum();
            let mean: f64 = block
                .iter()
                .map(|&i| self.atoms[i].value * self.atoms[i].prob)
                .sum::<f64>()
                / mass;
            pairs.push((mean, mass));
        }
        DiscreteRV::new(&pairs)
    }

    /// Law equality within `tol`: merged-atom CDFs coincide at every atom of
    /// either law.
    pub fn same_law(&self, other: &DiscreteRV, tol: f64) -> bool {
        let mut points: Vec<f64> = self
            .atoms
            .iter()
            .chain(other.atoms.iter())
            .map(|a| a.value)
            .collect();
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        points.dedup();
        points
            .iter()
            .all(|&v| (self.cdf(v) - other.cdf(v)).abs() <= tol)
    }
}

/// Interior point where a quantile function jumps or kinks, kept in both
/// endpoint coordinates (`s = 1 − t`).
#[derive(Debug, Clone, Copy)]
pub struct Cut {
    pub t: f64,
    pub s: f64,
}

impl Cut {
    pub fn from_t(t: f64) -> Cut {
        Cut { t, s: 1.0 - t }
    }

    pub fn from_s(s: f64) -> Cut {
        Cut { t: 1.0 - s, s }
    }

    pub(crate) fn as_cut_point(&self) -> CutPoint {
        CutPoint { t: self.t, s: self.s }
    }
}

type QFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The law of `q(U)` for `U` uniform on `(0, 1)` and `q` nondecreasing.
#[derive(Clone)]
pub struct QuantileRV {
    label: String,
    lower: QFn,
    upper: QFn,
    cuts: Vec<Cut>,
}

impl fmt::Debug for QuantileRV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantileRV")
            .field("label", &self.label)
            .field("cuts", &self.cuts.len())
            .finish()
    }
}

impl QuantileRV {
    /// Build from the two endpoint views of the quantile function. The views
    /// must agree (`upper(s) = lower(1 − s)`) and be jointly nondecreasing;
    /// monotonicity is spot-checked on a grid.
    pub fn from_views(
        label: impl Into<String>,
        lower: impl Fn(f64) -> f64 + Send + Sync + 'static,
        upper: impl Fn(f64) -> f64 + Send + Sync + 'static,
        cuts: Vec<Cut>,
    ) -> Result<Self> {
        let rv = QuantileRV {
            label: label.into(),
            lower: Arc::new(lower),
            upper: Arc::new(upper),
            cuts,
        };
        rv.spot_check_monotone()?;
        Ok(rv)
    }

    fn spot_check_monotone(&self) -> Result<()> {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..=99 {
            let t = i as f64 / 100.0;
            let v = self.quantile(t);
            if !v.is_finite() {
                return Err(CoreError::InvalidDistribution(format!(
                    "quantile '{}' non-finite at interior point {t}",
                    self.label
                )));
            }
            if v + 1e-12 * v.abs().max(1.0) < prev {
                return Err(CoreError::InvalidDistribution(format!(
                    "quantile '{}' decreases near t = {t}",
                    self.label
                )));
            }
            prev = prev.max(v);
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn quantile(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0 && t < 1.0);
        if t <= 0.5 {
            (self.lower)(t)
        } else {
            // 1 − t is exact for t ∈ [0.5, 1]
            (self.upper)(1.0 - t)
        }
    }

    /// Quantile at `t = 1 − s`, full precision for tiny `s`.
    pub fn quantile_upper(&self, s: f64) -> f64 {
        debug_assert!(s > 0.0 && s < 1.0);
        if s <= 0.5 {
            (self.upper)(s)
        } else {
            (self.lower)(1.0 - s)
        }
    }

    fn compose(&self, label: String, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> QuantileRV {
        let f = Arc::new(f);
        let lo = Arc::clone(&self.lower);
        let up = Arc::clone(&self.upper);
        let f2 = Arc::clone(&f);
        QuantileRV {
            label,
            lower: Arc::new(move |t| f(lo(t))),
            upper: Arc::new(move |s| f2(up(s))),
            cuts: self.cuts.clone(),
        }
    }

    /// Boundary of `{t : q(t) ≤ level}`: `None` if the quantile stays on one
    /// side of `level` over essentially all of `(0, 1)`, otherwise the
    /// crossing point (refined in upper coordinates when it sits past 0.5).
    pub fn crossing(&self, level: f64) -> Option<Cut> {
        let eps = 1e-13;
        if self.quantile(eps) > level {
            return None;
        }
        if self.quantile_upper(eps) <= level {
            return None;
        }
        if self.quantile(0.5) > level {
            let (lo, _) =
                solve::bisect_boundary(|t| self.quantile(t) > level, eps, 0.5, 1e-15, 200);
            Some(Cut::from_t(lo))
        } else {
            // predicate in s-coordinates: q(1 − s) ≤ level, true for large s
            let (lo, _) = solve::bisect_boundary(
                |s| self.quantile_upper(s) <= level,
                0.0,
                0.5,
                1e-15,
                400,
            );
            Some(Cut::from_s(lo.max(f64::MIN_POSITIVE)))
        }
    }

    /// `P(X ≤ x)` via bisection on the quantile function.
    pub fn cdf(&self, x: f64) -> f64 {
        let eps = 1e-13;
        if self.quantile(eps) > x {
            return 0.0;
        }
        if self.quantile_upper(eps) <= x {
            return 1.0;
        }
        match self.crossing(x) {
            Some(cut) => cut.t,
            None => 1.0,
        }
    }
}

/// Atom-wise (discrete) or quantile-composed (continuous) transforms.
#[derive(Debug, Clone, Copy)]
pub enum Transform {
    Shift(f64),
    /// Nonnegative scaling.
    Scale(f64),
    /// `X ↦ (X − m)⁺`.
    PosPartShift(f64),
    /// `X ↦ X ∧ a`.
    Truncate(f64),
    Abs,
}

/// A law in either representation.
#[derive(Debug, Clone)]
pub enum RandomVariable {
    Discrete(DiscreteRV),
    Quantile(QuantileRV),
}

impl From<DiscreteRV> for RandomVariable {
    fn from(d: DiscreteRV) -> Self {
        RandomVariable::Discrete(d)
    }
}

impl From<QuantileRV> for RandomVariable {
    fn from(q: QuantileRV) -> Self {
        RandomVariable::Quantile(q)
    }
}

/// Orlicz-space membership verdicts. The scan bounds are finite, so a verdict
/// may be inconclusive when quadrature cannot certify a tail; `inconclusive`
/// is never silently folded into the booleans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpaceMembership {
    pub in_l_phi: bool,
    pub in_h_phi: bool,
    pub in_young: bool,
    pub inconclusive: bool,
}

impl RandomVariable {
    pub fn constant(c: f64) -> Self {
        RandomVariable::Discrete(DiscreteRV::constant(c))
    }

    pub fn as_discrete(&self) -> Option<&DiscreteRV> {
        match self {
            RandomVariable::Discrete(d) => Some(d),
            _ => None,
        }
    }

    /// `E[Φ(|X|/λ)]`: exact sum for discrete laws (saturating to `+∞` past
    /// floating-point range), adaptive quadrature with divergence detection
    /// for quantile laws.
    pub fn gauge_expectation(&self, g: &impl Gauge, lambda: f64) -> IntegralValue {
        self.gauge_expectation_with(g, lambda, &QuadConfig::default())
    }

    pub(crate) fn gauge_expectation_with(
        &self,
        g: &impl Gauge,
        lambda: f64,
        cfg: &QuadConfig,
    ) -> IntegralValue {
        assert!(lambda > 0.0, "gauge expectations need λ > 0");
        match self {
            RandomVariable::Discrete(d) => {
                let sum = d
                    .atoms
                    .iter()
                    .map(|a| a.prob * g.eval(a.value.abs() / lambda))
                    .sum::<f64>();
                IntegralValue::Finite(sum)
            }
            RandomVariable::Quantile(q) => {
                let cuts: Vec<CutPoint> = q.cuts.iter().map(|c| c.as_cut_point()).collect();
                let ql = q.clone();
                let qu = q.clone();
                let f = ClosureIntegrand {
                    lower: move |t: f64| g.eval(ql.quantile(t).abs() / lambda),
                    upper: move |s: f64| g.eval(qu.quantile_upper(s).abs() / lambda),
                };
                quadrature::integrate_unit(&f, 0.0, 1.0, &cuts, cfg)
            }
        }
    }

    /// Membership in `L^Φ` (finite modular for some λ, doubling scan to 2⁴⁰),
    /// the heart `H^Φ` (finite for every λ, halving scan to 2⁻²⁰), and the
    /// Young class (finite at λ = 1).
    pub fn membership(&self, g: &impl Gauge) -> SpaceMembership {
        if matches!(self, RandomVariable::Discrete(_)) {
            return SpaceMembership {
                in_l_phi: true,
                in_h_phi: true,
                in_young: true,
                inconclusive: false,
            };
        }
        let mut inconclusive = false;

        let in_young = match self.gauge_expectation(g, 1.0) {
            IntegralValue::Finite(v) => v.is_finite(),
            IntegralValue::Divergent => false,
            _ => {
                inconclusive = true;
                false
            }
        };

        let mut in_l_phi = in_young;
        if !in_l_phi {
            let mut lambda = 2.0;
            while lambda <= 2f64.powi(40) {
                match self.gauge_expectation(g, lambda) {
                    IntegralValue::Finite(v) if v.is_finite() => {
                        in_l_phi = true;
                        break;
                    }
                    IntegralValue::Divergent | IntegralValue::Finite(_) => {}
                    _ => inconclusive = true,
                }
                lambda *= 2.0;
            }
        }

        let mut in_h_phi = in_young;
        if in_h_phi {
            let mut lambda = 0.5;
            while lambda >= 2f64.powi(-20) {
                match self.gauge_expectation(g, lambda) {
                    IntegralValue::Finite(v) if v.is_finite() => {}
                    IntegralValue::Divergent | IntegralValue::Finite(_) => {
                        in_h_phi = false;
                        break;
                    }
                    _ => {
                        inconclusive = true;
                        in_h_phi = false;
                        break;
                    }
                }
                lambda *= 0.5;
            }
        }

        SpaceMembership {
            in_l_phi,
            in_h_phi,
            in_young,
            inconclusive,
        }
    }

    pub fn transform(&self, op: Transform) -> Result<RandomVariable> {
        match self {
            RandomVariable::Discrete(d) => {
                let mapped = match op {
                    Transform::Shift(c) => d.map_values(|v| v + c)?,
                    Transform::Scale(t) => {
                        if t < 0.0 {
                            return Err(CoreError::InvalidParameter(
                                "scale factor must be nonnegative".into(),
                            ));
                        }
                        d.map_values(|v| t * v)?
                    }
                    Transform::PosPartShift(m) => d.map_values(|v| (v - m).max(0.0))?,
                    Transform::Truncate(a) => d.map_values(|v| v.min(a))?,
                    Transform::Abs => d.map_values(f64::abs)?,
                };
                Ok(RandomVariable::Discrete(mapped))
            }
            RandomVariable::Quantile(q) => {
                let label = q.label.clone();
                let out = match op {
                    Transform::Shift(c) => q.compose(format!("{label}+{c}"), move |v| v + c),
                    Transform::Scale(t) => {
                        if t < 0.0 {
                            return Err(CoreError::InvalidParameter(
                                "scale factor must be nonnegative".into(),
                            ));
                        }
                        q.compose(format!("{t}*{label}"), move |v| t * v)
                    }
                    Transform::PosPartShift(m) => {
                        let mut out =
                            q.compose(format!("({label}-{m})^+"), move |v| (v - m).max(0.0));
                        if let Some(cut) = q.crossing(m) {
                            out.cuts.push(cut);
                        }
                        out
                    }
                    Transform::Truncate(a) => {
                        let mut out = q.compose(format!("{label}∧{a}"), move |v| v.min(a));
                        if let Some(cut) = q.crossing(a) {
                            out.cuts.push(cut);
                        }
                        out
                    }
                    Transform::Abs => abs_quantile(q)?,
                };
                Ok(RandomVariable::Quantile(out))
            }
        }
    }

    /// `E[X]`, with one-sided tail divergence reported as a signed infinity.
    pub fn expectation(&self) -> Result<f64> {
        match self {
            RandomVariable::Discrete(d) => Ok(d.mean()),
            RandomVariable::Quantile(q) => {
                let cfg = QuadConfig::default();
                let cuts: Vec<CutPoint> = q.cuts.iter().map(|c| c.as_cut_point()).collect();
                let sign_cut = q.crossing(0.0);
                let (neg_end, pos_start) = match &sign_cut {
                    Some(c) => (c.t, c.t),
                    None => {
                        if q.quantile(0.5) >= 0.0 {
                            (0.0, 0.0)
                        } else {
                            (1.0, 1.0)
                        }
                    }
                };
                let mut neg = 0.0;
                if neg_end > 0.0 {
                    let ql = q.clone();
                    let qu = q.clone();
                    let f = ClosureIntegrand {
                        lower: move |t: f64| (-ql.quantile(t)).max(0.0),
                        upper: move |s: f64| (-qu.quantile_upper(s)).max(0.0),
                    };
                    neg = match quadrature::integrate_unit(&f, 0.0, neg_end.min(1.0 - 1e-15).max(1e-15), &cuts, &cfg)
                    {
                        IntegralValue::Finite(v) => v,
                        IntegralValue::Divergent => f64::INFINITY,
                        _ => {
                            return Err(CoreError::Inconclusive {
                                context: format!("E[X⁻] of '{}'", q.label),
                            })
                        }
                    };
                }
                let mut pos = 0.0;
                if pos_start < 1.0 {
                    let ql = q.clone();
                    let qu = q.clone();
                    let f = ClosureIntegrand {
                        lower: move |t: f64| ql.quantile(t).max(0.0),
                        upper: move |s: f64| qu.quantile_upper(s).max(0.0),
                    };
                    pos = match quadrature::integrate_unit(
                        &f,
                        if pos_start == 0.0 { 0.0 } else { pos_start.max(1e-15) },
                        1.0,
                        &cuts,
                        &cfg,
                    ) {
                        IntegralValue::Finite(v) => v,
                        IntegralValue::Divergent => f64::INFINITY,
                        _ => {
                            return Err(CoreError::Inconclusive {
                                context: format!("E[X⁺] of '{}'", q.label),
                            })
                        }
                    };
                }
                if pos.is_infinite() && neg.is_infinite() {
                    return Err(CoreError::Inconclusive {
                        context: format!("E[X] of '{}': both tails diverge", q.label),
                    });
                }
                Ok(pos - neg)
            }
        }
    }

    /// Support bounds used to seed minimizer brackets: exact for discrete
    /// laws, `(q(ε), q(1−ε))` with `ε = 1e-9` for quantile laws.
    pub fn support_hint(&self) -> (f64, f64) {
        match self {
            RandomVariable::Discrete(d) => (d.min_value(), d.max_value()),
            RandomVariable::Quantile(q) => (q.quantile(1e-9), q.quantile_upper(1e-9)),
        }
    }

    /// True when the law is exactly the zero variable.
    pub fn is_zero(&self) -> bool {
        match self {
            RandomVariable::Discrete(d) => d.atoms.iter().all(|a| a.value == 0.0),
            RandomVariable::Quantile(q) => {
                q.quantile(1e-13) == 0.0 && q.quantile_upper(1e-13) == 0.0
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            RandomVariable::Discrete(d) => d.cdf(x),
            RandomVariable::Quantile(q) => q.cdf(x),
        }
    }
}

/// Law of `|X|` for a quantile representation. Single-signed laws transform
/// exactly; mixed-sign laws fall back to a numeric rearrangement (each
/// quantile evaluation solves `P(|X| ≤ x) = u` by nested bisection).
fn abs_quantile(q: &QuantileRV) -> Result<QuantileRV> {
    let eps = 1e-13;
    if q.quantile(eps) >= 0.0 {
        return Ok(q.compose(format!("|{}|", q.label), |v| v));
    }
    if q.quantile_upper(eps) <= 0.0 {
        let lo = Arc::clone(&q.lower);
        let up = Arc::clone(&q.upper);
        let mut cuts: Vec<Cut> = q.cuts.iter().map(|c| Cut::from_s(c.t)).collect();
        cuts.retain(|c| c.t > 0.0 && c.t < 1.0);
        return QuantileRV::from_views(
            format!("|{}|", q.label),
            move |t| -up(t),
            move |s| -lo(s),
            cuts,
        );
    }

    // mixed sign: G(x) = P(q ≤ x) − P(q < −x); invert numerically
    let base = q.clone();
    let measure_le = move |rv: &QuantileRV, x: f64| -> f64 { rv.cdf(x) };
    let g = {
        let rv = base.clone();
        move |x: f64| -> f64 {
            let plus = measure_le(&rv, x);
            let minus = if x == 0.0 {
                measure_le(&rv, -1e-300)
            } else {
                measure_le(&rv, -x)
            };
            (plus - minus).clamp(0.0, 1.0)
        }
    };
    let g = Arc::new(g);
    let quant_at = {
        let g = Arc::clone(&g);
        move |u: f64| -> f64 {
            // smallest x ≥ 0 with G(x) ≥ u
            let mut hi = 1.0;
            let mut rounds = 0;
            while g(hi) < u {
                hi *= 2.0;
                rounds += 1;
                if rounds > 200 {
                    return f64::INFINITY;
                }
            }
            let (_, first_true) = solve::bisect_boundary(|x| g(x) >= u, 0.0, hi, 1e-13, 200);
            first_true
        }
    };
    let qa = quant_at.clone();
    QuantileRV::from_views(
        format!("|{}|", q.label),
        move |t| quant_at(t),
        move |s| qa(1.0 - s),
        Vec::new(),
    )
}

/// Built-in quantile families addressable by name from configuration.
pub mod families {
    use super::*;

    /// `q(t) = scale · ln(1/(1−t))` — an exponential law, log-singular at 1.
    pub fn log_singular(scale: f64) -> Result<QuantileRV> {
        if !(scale > 0.0) {
            return Err(CoreError::InvalidParameter(
                "log-singular scale must be positive".into(),
            ));
        }
        QuantileRV::from_views(
            format!("log-singular(scale={scale})"),
            move |t: f64| -scale * (-t).ln_1p(),
            move |s: f64| scale * (1.0 / s).ln(),
            Vec::new(),
        )
    }

    /// `q(t) = scale · (1−t)^{−γ}` — a Pareto-type power tail at 1.
    pub fn power_tail(gamma: f64, scale: f64) -> Result<QuantileRV> {
        if !(gamma > 0.0) || !(scale > 0.0) {
            return Err(CoreError::InvalidParameter(
                "power-tail needs γ > 0 and scale > 0".into(),
            ));
        }
        QuantileRV::from_views(
            format!("power-tail(gamma={gamma},scale={scale})"),
            move |t: f64| scale * (1.0 - t).powf(-gamma),
            move |s: f64| scale * s.powf(-gamma),
            Vec::new(),
        )
    }

    /// Uniform law on `[lo, hi]`.
    pub fn bounded_uniform(lo: f64, hi: f64) -> Result<QuantileRV> {
        if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(CoreError::InvalidParameter(
                "bounded-uniform needs finite lo ≤ hi".into(),
            ));
        }
        let width = hi - lo;
        QuantileRV::from_views(
            format!("bounded-uniform({lo},{hi})"),
            move |t: f64| lo + width * t,
            move |s: f64| hi - width * s,
            Vec::new(),
        )
    }

    /// `scale · ln(1/U) · 1_{U ≤ window}`: the log-singular tail restricted to
    /// an event of probability `window`, zero elsewhere. Decreasing in the
    /// window, pointwise dominated by the full log-singular law.
    pub fn log_singular_window(window: f64, scale: f64) -> Result<QuantileRV> {
        if !(0.0 < window && window <= 1.0) || !(scale > 0.0) {
            return Err(CoreError::InvalidParameter(
                "window must lie in (0, 1], scale > 0".into(),
            ));
        }
        let cuts = if window < 1.0 {
            vec![Cut::from_s(window)]
        } else {
            Vec::new()
        };
        QuantileRV::from_views(
            format!("log-singular-window(q={window},scale={scale})"),
            move |t: f64| {
                if 1.0 - t <= window {
                    -scale * (-t).ln_1p()
                } else {
                    0.0
                }
            },
            move |s: f64| {
                if s <= window {
                    scale * (1.0 / s).ln()
                } else {
                    0.0
                }
            },
            cuts,
        )
    }

    /// Named lookup used by the CLI: `log-singular`, `power-tail`,
    /// `bounded-uniform`.
    pub fn by_name(
        name: &str,
        scale: Option<f64>,
        gamma: Option<f64>,
        lo: Option<f64>,
        hi: Option<f64>,
    ) -> Result<QuantileRV> {
        match name {
            "log-singular" => log_singular(scale.unwrap_or(1.0)),
            "power-tail" => power_tail(gamma.unwrap_or(0.25), scale.unwrap_or(1.0)),
            "bounded-uniform" => bounded_uniform(lo.unwrap_or(0.0), hi.unwrap_or(1.0)),
            other => Err(CoreError::InvalidParameter(format!(
                "unknown quantile family '{other}'; valid names: log-singular, power-tail, \
                 bounded-uniform"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::OrliczFunction;
    use std::f64::consts::E;

    #[test]
    fn discrete_constructor_merges_and_sorts() {
        let x = DiscreteRV::new(&[(2.0, 0.5), (1.0, 0.25), (1.0, 0.25)]).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x.atoms()[0], Atom { value: 1.0, prob: 0.5 });
        assert!(DiscreteRV::new(&[(1.0, 0.6), (2.0, 0.6)]).is_err());
        assert!(DiscreteRV::new(&[(1.0, -0.5), (2.0, 1.5)]).is_err());
    }

    #[test]
    fn gauge_expectation_of_zero_is_zero() {
        let zero = RandomVariable::constant(0.0);
        for f in OrliczFunction::catalog() {
            assert_eq!(
                zero.gauge_expectation(&f, 1.0),
                IntegralValue::Finite(0.0)
            );
        }
    }

    #[test]
    fn gauge_expectation_indicator_example() {
        // (1/4)·Φ(2) = 1 for Φ = x²
        let x: RandomVariable = DiscreteRV::scaled_indicator(1.0, 0.25).unwrap().into();
        let p2 = OrliczFunction::power(2.0).unwrap();
        match x.gauge_expectation(&p2, 0.5) {
            IntegralValue::Finite(v) => assert!((v - 1.0).abs() < 1e-14),
            other => panic!("expected finite, got {other:?}"),
        }
    }

    #[test]
    fn log_singular_modular_diverges_at_unit_scale() {
        let x: RandomVariable = families::log_singular(1.0).unwrap().into();
        let exp = OrliczFunction::exponential();
        assert!(x.gauge_expectation(&exp, 1.0).is_divergent());
        match x.gauge_expectation(&exp, 2.0) {
            // ∫ (u^{-1/2} − 1) du / (e − 1) = 1/(e − 1)
            IntegralValue::Finite(v) => {
                assert!((v - 1.0 / (E - 1.0)).abs() < 1e-9, "got {v}")
            }
            other => panic!("expected finite, got {other:?}"),
        }
    }

    #[test]
    fn membership_examples() {
        let exp = OrliczFunction::exponential();
        let d: RandomVariable = DiscreteRV::uniform(&[1.0, 2.0]).unwrap().into();
        let m = d.membership(&exp);
        assert!(m.in_l_phi && m.in_h_phi && m.in_young && !m.inconclusive);

        let x: RandomVariable = families::log_singular(1.0).unwrap().into();
        let m = x.membership(&exp);
        assert!(m.in_l_phi && !m.in_h_phi && !m.in_young);

        let half: RandomVariable = families::log_singular(0.5).unwrap().into();
        let m = half.membership(&exp);
        assert!(m.in_young, "E[Φ(X/1)] = 1/(e−1) is finite");
        assert!(m.in_l_phi && !m.in_h_phi);
    }

    #[test]
    fn membership_chain_holds() {
        let gauges = OrliczFunction::catalog();
        let vars: Vec<RandomVariable> = vec![
            DiscreteRV::uniform(&[-3.0, 0.0, 7.0]).unwrap().into(),
            families::log_singular(1.0).unwrap().into(),
            families::log_singular(0.5).unwrap().into(),
            families::bounded_uniform(-1.0, 4.0).unwrap().into(),
        ];
        for g in &gauges {
            for x in &vars {
                let m = x.membership(g);
                assert!(!m.in_h_phi || m.in_young, "H ⊆ Young fails");
                assert!(!m.in_young || m.in_l_phi, "Young ⊆ L fails");
            }
        }
    }

    #[test]
    fn delta2_gauges_have_matching_l_and_h() {
        let vars: Vec<RandomVariable> = vec![
            families::log_singular(1.0).unwrap().into(),
            families::power_tail(0.3, 1.0).unwrap().into(),
            families::bounded_uniform(0.0, 9.0).unwrap().into(),
        ];
        for g in OrliczFunction::catalog().iter().filter(|g| g.is_delta2()) {
            for x in &vars {
                let m = x.membership(g);
                assert!(!m.inconclusive);
                assert_eq!(m.in_l_phi, m.in_h_phi, "gauge {}", g.name());
            }
        }
    }

    #[test]
    fn gauge_expectation_is_nonincreasing_in_lambda() {
        let vars: Vec<RandomVariable> = vec![
            DiscreteRV::uniform(&[-2.0, 1.0, 5.0]).unwrap().into(),
            families::log_singular(0.5).unwrap().into(),
        ];
        let p2 = OrliczFunction::power(2.0).unwrap();
        for x in &vars {
            let mut prev = f64::INFINITY;
            for &lambda in &[0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
                if let IntegralValue::Finite(v) = x.gauge_expectation(&p2, lambda) {
                    assert!(v <= prev + 1e-9 * prev.max(1.0));
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn transform_examples() {
        let x: RandomVariable = DiscreteRV::new(&[(1.0, 0.5), (3.0, 0.5)]).unwrap().into();
        let shifted = x.transform(Transform::Shift(2.0)).unwrap();
        let d = shifted.as_discrete().unwrap();
        assert_eq!(d.atoms()[0].value, 3.0);
        assert_eq!(d.atoms()[1].value, 5.0);

        // m past the maximum kills the positive part
        let zeroed = x.transform(Transform::PosPartShift(5.0)).unwrap();
        assert!(zeroed.is_zero());

        let log: RandomVariable = families::log_singular(1.0).unwrap().into();
        let trunc = log.transform(Transform::Truncate(1.0)).unwrap();
        if let RandomVariable::Quantile(q) = &trunc {
            assert!(q.quantile_upper(1e-12) <= 1.0);
            assert!(!q.cuts().is_empty(), "truncation cut recorded");
        } else {
            panic!("expected quantile representation");
        }
    }

    #[test]
    fn transform_bounds_hold_atomwise() {
        let x: RandomVariable = DiscreteRV::uniform(&[-4.0, -1.0, 2.0, 6.0]).unwrap().into();
        let pos = x.transform(Transform::PosPartShift(1.0)).unwrap();
        for a in pos.as_discrete().unwrap().atoms() {
            assert!(a.value >= 0.0);
        }
        let tr = x.transform(Transform::Truncate(1.5)).unwrap();
        for a in tr.as_discrete().unwrap().atoms() {
            assert!(a.value <= 1.5);
        }
    }

    #[test]
    fn abs_transform_mixed_sign_quantile_matches_discrete_oracle() {
        let x = families::bounded_uniform(-1.0, 3.0).unwrap();
        let abs = RandomVariable::Quantile(x)
            .transform(Transform::Abs)
            .unwrap();
        // |U(-1,3)|: quantile at u solves the rearranged law; spot values:
        // G(x) = measure{|X| ≤ x} = (2x)/4 for x ≤ 1, (1+x)/4 for 1 ≤ x ≤ 3
        if let RandomVariable::Quantile(q) = abs {
            assert!((q.quantile(0.25) - 0.5).abs() < 1e-6);
            assert!((q.quantile(0.5) - 1.0).abs() < 1e-6);
            assert!((q.quantile(0.75) - 2.0).abs() < 1e-6);
        } else {
            panic!("expected quantile");
        }
    }

    #[test]
    fn expectation_examples() {
        let u: RandomVariable = DiscreteRV::uniform(&[1.0, 2.0, 3.0, 4.0]).unwrap().into();
        assert!((u.expectation().unwrap() - 2.5).abs() < 1e-15);

        let log: RandomVariable = families::log_singular(1.0).unwrap().into();
        assert!((log.expectation().unwrap() - 1.0).abs() < 1e-9);

        for n in [2_u32, 10, 100] {
            let x: RandomVariable = DiscreteRV::scaled_indicator(n as f64, 1.0 / n as f64)
                .unwrap()
                .into();
            assert!((x.expectation().unwrap() - 1.0).abs() < 1e-12);
        }

        let heavy: RandomVariable = families::power_tail(2.0, 1.0).unwrap().into();
        assert!(heavy.expectation().unwrap().is_infinite());
    }

    #[test]
    fn same_law_examples() {
        let a = DiscreteRV::new(&[(1.0, 0.5), (2.0, 0.5)]).unwrap();
        let b = DiscreteRV::new(&[(1.0, 0.25), (1.0, 0.25), (2.0, 0.5)]).unwrap();
        assert!(a.same_law(&b, 1e-12));
        let c = DiscreteRV::new(&[(1.0, 0.6), (2.0, 0.4)]).unwrap();
        assert!(!a.same_law(&c, 1e-9));
        let shifted = RandomVariable::from(a.clone())
            .transform(Transform::Shift(0.0))
            .unwrap();
        assert!(a.same_law(shifted.as_discrete().unwrap(), 0.0));
    }

    #[test]
    fn coarsen_examples() {
        let x = DiscreteRV::uniform(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let full = x.coarsen(&[vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(full.len(), 1);
        assert!((full.atoms()[0].value - 2.5).abs() < 1e-15);

        let singletons = x.coarsen(&[vec![0], vec![1], vec![2], vec![3]]).unwrap();
        assert!(x.same_law(&singletons, 0.0));

        let halves = x.coarsen(&[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(halves.atoms()[0], Atom { value: 1.5, prob: 0.5 });
        assert_eq!(halves.atoms()[1], Atom { value: 3.5, prob: 0.5 });

        assert!(x.coarsen(&[vec![0, 1], vec![2]]).is_err());
        assert!(x.coarsen(&[vec![0, 1], vec![], vec![2, 3]]).is_err());
        assert!(x.coarsen(&[vec![0, 1, 1], vec![2, 3]]).is_err());
    }

    #[test]
    fn coarsen_preserves_expectation() {
        let x = DiscreteRV::new(&[(-3.0, 0.2), (0.5, 0.3), (2.0, 0.1), (7.0, 0.4)]).unwrap();
        for partition in [
            vec![vec![0, 1, 2, 3]],
            vec![vec![0, 2], vec![1, 3]],
            vec![vec![3], vec![0], vec![1, 2]],
        ] {
            let y = x.coarsen(&partition).unwrap();
            assert!((x.mean() - y.mean()).abs() <= 1e-12);
        }
    }

    #[test]
    fn window_family_matches_hand_integrals() {
        // E[X_n] = (1 + ln n)/n for window 1/n
        let n = 20.0;
        let x: RandomVariable = families::log_singular_window(1.0 / n, 1.0).unwrap().into();
        let expected = (1.0 + n.ln()) / n;
        assert!((x.expectation().unwrap() - expected).abs() < 1e-10);

        // divergence of the scaled modular survives the window restriction
        let exp = OrliczFunction::exponential();
        let rv = x;
        for lambda in [0.5, 0.9, 1.0] {
            assert!(
                rv.gauge_expectation(&exp, lambda).is_divergent(),
                "λ = {lambda} must diverge"
            );
        }
        match rv.gauge_expectation(&exp, 2.0) {
            IntegralValue::Finite(_) => {}
            other => panic!("λ = 2 should be finite, got {other:?}"),
        }
    }

    #[test]
    fn quantile_cdf_and_crossing() {
        let x = families::bounded_uniform(0.0, 2.0).unwrap();
        assert!((x.cdf(1.0) - 0.5).abs() < 1e-9);
        assert_eq!(x.cdf(-0.5), 0.0);
        assert_eq!(x.cdf(2.5), 1.0);
        let cut = x.crossing(1.5).unwrap();
        assert!((cut.t - 0.75).abs() < 1e-9);
    }

    #[test]
    fn monotonicity_spot_check_rejects_decreasing() {
        let bad = QuantileRV::from_views("bad", |t| -t, |s| -(1.0 - s), Vec::new());
        assert!(bad.is_err());
    }
}
