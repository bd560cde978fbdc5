//! Adaptive quadrature over the open unit interval with divergence detection
//! at the endpoints.
//!
//! Integrands come from quantile representations, so singularities live at
//! `t → 0⁺` and `t → 1⁻`. The endpoint regions are summed over geometrically
//! shrinking panels; the interior is handled by recursive Gauss-Legendre with
//! a 7-vs-15 point error estimate. Near `t = 1` the integrand is evaluated in
//! the distance-to-one coordinate `s = 1 − t`, so panels can shrink far below
//! the floating-point spacing around 1.

use std::sync::LazyLock;

/// Value of an improper integral of a nonnegative-or-signed integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralValue {
    Finite(f64),
    Divergent,
    /// Neither a stable finite value nor a confident divergence certificate
    /// within the refinement budget.
    Inconclusive,
    /// Refinement stopped early because the partial sum crossed the caller's
    /// cap (only issued for nonnegative integrands under `bail_above`).
    AboveCap,
}

impl IntegralValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            IntegralValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, IntegralValue::Divergent)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Geometric levels per endpoint; each level halves the remaining gap.
    pub max_levels: u32,
    /// Contribution-ratio threshold: sustained level-to-level ratios at or
    /// above this value certify divergence.
    pub divergence_ratio: f64,
    /// Number of consecutive high-ratio levels required for the certificate.
    pub divergence_consecutive: u32,
    /// Absolute partial-sum blowup guard.
    pub blowup: f64,
    /// Early exit once the partial sum of a nonnegative integrand exceeds
    /// this value.
    pub bail_above: Option<f64>,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-14,
            max_levels: 960,
            divergence_ratio: 0.98,
            divergence_consecutive: 6,
            blowup: 1e100,
            bail_above: None,
        }
    }
}

impl QuadConfig {
    pub fn with_cap(cap: f64) -> Self {
        QuadConfig {
            bail_above: Some(cap),
            ..QuadConfig::default()
        }
    }
}

/// An integrand on `(0, 1)` given in both endpoint parametrizations:
/// `at(t)` for points away from 1 and `at_upper(s)` for `t = 1 − s` with `s`
/// small. Both views must describe the same function.
pub trait UnitIntegrand {
    fn at(&self, t: f64) -> f64;
    fn at_upper(&self, s: f64) -> f64;
}

pub struct ClosureIntegrand<F, G> {
    pub lower: F,
    pub upper: G,
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> UnitIntegrand for ClosureIntegrand<F, G> {
    fn at(&self, t: f64) -> f64 {
        (self.lower)(t)
    }
    fn at_upper(&self, s: f64) -> f64 {
        (self.upper)(s)
    }
}

// Gauss-Legendre nodes/weights on [-1, 1], generated once by Newton iteration
// on the Legendre polynomials.
fn legendre_nodes(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_eval(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_eval(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out
}

/// Legendre `P_n(x)` and its derivative via the three-term recurrence.
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0_f64, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

static GL7: LazyLock<Vec<(f64, f64)>> = LazyLock::new(|| legendre_nodes(7));
static GL15: LazyLock<Vec<(f64, f64)>> = LazyLock::new(|| legendre_nodes(15));

fn gl_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in rule {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Recursive GL7/GL15 panel with a depth limit; returns the GL15 estimate.
fn adaptive_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let coarse = gl_panel(f, a, b, &GL7);
    let fine = gl_panel(f, a, b, &GL15);
    if (fine - coarse).abs() <= tol || depth == 0 || !fine.is_finite() {
        fine
    } else {
        let m = 0.5 * (a + b);
        adaptive_panel(f, a, m, 0.5 * tol, depth - 1) + adaptive_panel(f, m, b, 0.5 * tol, depth - 1)
    }
}

struct EndpointSeries {
    total: f64,
    high_ratio_streak: u32,
    prev: Option<f64>,
    converged: bool,
    divergent: bool,
}

impl EndpointSeries {
    fn new() -> Self {
        EndpointSeries {
            total: 0.0,
            high_ratio_streak: 0,
            prev: None,
            converged: false,
            divergent: false,
        }
    }

    /// Forget ratio/tail state (but keep the running total); used when a
    /// pending cut invalidates the geometric tail extrapolation.
    fn reset_tail_state(&mut self) {
        self.converged = false;
        self.prev = None;
        self.high_ratio_streak = 0;
    }

    /// Feed the next (closer-to-the-endpoint) panel contribution.
    fn push(&mut self, c: f64, cfg: &QuadConfig, scale_hint: f64) {
        self.total += c;
        if !c.is_finite() {
            self.divergent = true;
            return;
        }
        let tol = cfg.abs_tol.max(cfg.rel_tol * self.total.abs().max(scale_hint));
        if let Some(prev) = self.prev {
            if prev.abs() > 0.0 {
                let ratio = c / prev;
                if ratio >= cfg.divergence_ratio {
                    self.high_ratio_streak += 1;
                    if self.high_ratio_streak >= cfg.divergence_consecutive {
                        self.divergent = true;
                        return;
                    }
                } else {
                    self.high_ratio_streak = 0;
                    // geometric tail estimate once contributions decay
                    if ratio > 0.0 && ratio < 0.95 {
                        let tail = c * ratio / (1.0 - ratio);
                        if tail.abs() <= tol && c.abs() <= tol {
                            self.total += tail;
                            self.converged = true;
                            return;
                        }
                    } else if c.abs() <= tol * 1e-2 {
                        self.converged = true;
                        return;
                    }
                }
            } else if c.abs() <= tol {
                self.converged = true;
                return;
            }
        }
        self.prev = Some(c);
    }
}

/// Interior non-smoothness point in both endpoint coordinates (`s = 1 − t`).
#[derive(Debug, Clone, Copy)]
pub struct CutPoint {
    pub t: f64,
    pub s: f64,
}

/// Integrate over `[a, b]`, splitting at the sorted cut abscissae inside.
fn panel_with_cuts(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    cuts: &[f64],
    tol: f64,
) -> f64 {
    let mut acc = 0.0;
    let mut left = a;
    for &c in cuts.iter().filter(|&&c| c > a && c < b) {
        acc += adaptive_panel(f, left, c, tol, 10);
        left = c;
    }
    acc + adaptive_panel(f, left, b, tol, 10)
}

/// Integrate `f` over `(lo, hi) ⊆ (0, 1)`. `cuts` lists interior points where
/// the integrand may jump or kink; they become panel boundaries wherever they
/// fall, including inside the geometric endpoint series. Endpoints at exactly
/// 0 or 1 are treated as (possibly) singular and summed geometrically.
pub fn integrate_unit(
    f: &dyn UnitIntegrand,
    lo: f64,
    hi: f64,
    cuts: &[CutPoint],
    cfg: &QuadConfig,
) -> IntegralValue {
    assert!((0.0..=1.0).contains(&lo) && lo < hi && hi <= 1.0);

    let mut inner: Vec<CutPoint> = cuts
        .iter()
        .copied()
        .filter(|c| c.t > lo && c.t < hi)
        .collect();
    inner.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    inner.dedup_by(|a, b| (a.t - b.t).abs() < 1e-15);

    let singular_lo = lo == 0.0;
    let singular_hi = hi == 1.0;
    let span = hi - lo;

    // Region boundaries: geometric series occupy [lo, t_a] and [t_b, hi].
    let upper_width = if singular_hi {
        let head = if singular_lo { 0.5 * span } else { span };
        0.25_f64.min(head).max(1e-300)
    } else {
        0.0
    };
    let t_b = if singular_hi { 1.0 - upper_width } else { hi };
    let t_a = if singular_lo {
        0.25_f64.min(t_b).max(1e-300)
    } else {
        lo
    };

    let lower_view = |t: f64| f.at(t);
    let upper_view = |s: f64| f.at_upper(s);
    let t_cuts: Vec<f64> = inner.iter().map(|c| c.t).collect();
    // s-abscissae from the raw list: a cut can sit closer to 1 than the
    // floating-point spacing of t and still matter in upper coordinates
    let mut s_cuts: Vec<f64> = cuts
        .iter()
        .map(|c| c.s)
        .filter(|&sv| sv > 0.0 && sv < hi - lo)
        .collect();
    s_cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s_cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-300);

    // Coarse sweep for the tolerance scale.
    let mut scale = 0.0;
    {
        let mut pts = vec![t_a];
        pts.extend(t_cuts.iter().copied().filter(|&c| c > t_a && c < t_b));
        pts.push(t_b);
        for w in pts.windows(2) {
            if w[1] > w[0] {
                let v = gl_panel(&lower_view, w[0], w[1], &GL7);
                if v.is_finite() {
                    scale += v.abs();
                }
            }
        }
    }
    let scale = scale.max(1.0);
    let level_tol = cfg.abs_tol.max(cfg.rel_tol * scale) * 0.25;

    let mut total = 0.0;
    let bail = |partial: f64| -> bool {
        cfg.bail_above.map(|cap| partial > cap).unwrap_or(false)
    };

    // Lower endpoint series: panels [t_a 2^{-k-1}, t_a 2^{-k}].
    if singular_lo {
        let mut series = EndpointSeries::new();
        let mut top = t_a;
        for _ in 0..cfg.max_levels {
            let bottom = 0.5 * top;
            let c = panel_with_cuts(&lower_view, bottom, top, &t_cuts, level_tol);
            series.push(c, cfg, scale);
            if series.divergent || series.total.abs() > cfg.blowup {
                return IntegralValue::Divergent;
            }
            if bail(total + series.total) {
                return IntegralValue::AboveCap;
            }
            if series.converged {
                // a cut at or below the current level floor can still change
                // the picture; walk past it before trusting the tail estimate
                if t_cuts.iter().any(|&c| c <= bottom) {
                    series.reset_tail_state();
                } else {
                    break;
                }
            }
            top = bottom;
        }
        if !series.converged {
            return IntegralValue::Inconclusive;
        }
        total += series.total;
    }

    // Interior panels.
    {
        let mut pts = vec![t_a];
        pts.extend(t_cuts.iter().copied().filter(|&c| c > t_a && c < t_b));
        pts.push(t_b);
        for w in pts.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let share = ((w[1] - w[0]) / (t_b - t_a).max(1e-300)).max(1e-3);
            let tol = cfg.abs_tol.max(cfg.rel_tol * scale) * share;
            let v = adaptive_panel(&lower_view, w[0], w[1], tol, 40);
            if !v.is_finite() {
                return IntegralValue::Divergent;
            }
            total += v;
            if total.abs() > cfg.blowup {
                return IntegralValue::Divergent;
            }
            if bail(total) {
                return IntegralValue::AboveCap;
            }
        }
    }

    // Upper endpoint series in s = 1 − t coordinates.
    if singular_hi {
        let mut series = EndpointSeries::new();
        let mut top = upper_width;
        for _ in 0..cfg.max_levels {
            let bottom = 0.5 * top;
            let c = panel_with_cuts(&upper_view, bottom, top, &s_cuts, level_tol);
            series.push(c, cfg, scale);
            if series.divergent || series.total.abs() > cfg.blowup {
                return IntegralValue::Divergent;
            }
            if bail(total + series.total) {
                return IntegralValue::AboveCap;
            }
            if series.converged {
                if s_cuts.iter().any(|&c| c <= bottom) {
                    series.reset_tail_state();
                } else {
                    break;
                }
            }
            top = bottom;
        }
        if !series.converged {
            return IntegralValue::Inconclusive;
        }
        total += series.total;
    }

    IntegralValue::Finite(total)
}
