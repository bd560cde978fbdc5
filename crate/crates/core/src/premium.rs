//! The premium functional `π_α(X) = inf_m { m + N_α((X − m)⁺) }`, its
//! half-line evaluations, lower quantiles, and Expected Shortfall.
//!
//! The map `m ↦ π_α(X, m)` is convex and coercive, so the minimizer is found
//! by certifying a three-point bracket (doubling outward from the support
//! range) and golden-sectioning it. Any minimizer is accepted; callers must
//! compare values, never locations.

use std::cell::RefCell;

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::norms;
use crate::orlicz::OrliczFunction;
use crate::quadrature::{self, ClosureIntegrand, CutPoint, IntegralValue, QuadConfig};
use crate::randvar::{DiscreteRV, RandomVariable, Transform};
use crate::solve;

const MINIMIZER_ABS_TOL: f64 = 1e-9;

/// Minimized premium with an attaining shift and the inner norm at it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PremiumResult {
    pub value: f64,
    pub m_star: f64,
    pub inner_norm: f64,
    pub iterations: u32,
}

/// One evaluation of the half-line map `π_α(X, m) = m + N_α((X − m)⁺)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HalfLineEval {
    pub m: f64,
    pub value: f64,
}

/// `π_α(X, m) = m + N_α((X − m)⁺)`.
pub fn premium_at(
    x: &RandomVariable,
    f: &OrliczFunction,
    alpha: f64,
    m: f64,
) -> Result<HalfLineEval> {
    premium_at_with(x, f, alpha, m, Tolerances::default())
}

/// [`premium_at`] under caller-chosen engine tolerances.
pub fn premium_at_with(
    x: &RandomVariable,
    f: &OrliczFunction,
    alpha: f64,
    m: f64,
    tol: Tolerances,
) -> Result<HalfLineEval> {
    let pos = x.transform(Transform::PosPartShift(m))?;
    let norm = norms::n_alpha_with(&pos, f, alpha, tol.bisection_rel)?;
    Ok(HalfLineEval {
        m,
        value: m + norm.value,
    })
}

/// Engine tolerances: the norm bisection's relative tolerance on λ and the
/// minimizer's absolute tolerance on the shift.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub bisection_rel: f64,
    pub minimizer_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            bisection_rel: 1e-10,
            minimizer_abs: MINIMIZER_ABS_TOL,
        }
    }
}

/// The premium `π_α(X) = inf_m π_α(X, m)`. Requires `X ∈ L^Φ`; membership is
/// checked for quantile representations and a failed or inconclusive check is
/// a rejection, never a best-effort value.
pub fn premium(x: &RandomVariable, f: &OrliczFunction, alpha: f64) -> Result<PremiumResult> {
    premium_with(x, f, alpha, Tolerances::default())
}

/// [`premium`] under caller-chosen engine tolerances.
pub fn premium_with(
    x: &RandomVariable,
    f: &OrliczFunction,
    alpha: f64,
    tol: Tolerances,
) -> Result<PremiumResult> {
    if let RandomVariable::Quantile(_) = x {
        let m = x.membership(f);
        if m.inconclusive {
            return Err(CoreError::Inconclusive {
                context: "Orlicz-space membership scan".into(),
            });
        }
        if !m.in_l_phi {
            return Err(CoreError::NotInLPhi);
        }
    }

    let (support_lo, support_hi) = x.support_hint();
    let failure: RefCell<Option<CoreError>> = RefCell::new(None);
    let evals = RefCell::new(0u32);
    let g = |m: f64| -> f64 {
        *evals.borrow_mut() += 1;
        match premium_at_with(x, f, alpha, m, tol) {
            Ok(h) => h.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::INFINITY
            }
        }
    };

    let (lo, hi) = solve::certify_convex_bracket(g, support_lo - 1.0, support_hi + 1.0, 64);
    let res = solve::golden_min(g, lo, hi, tol.minimizer_abs, 220);

    // 5-point stencil polish around the reported minimizer
    let mut m_star = res.x;
    let mut best = res.value;
    for delta in [-1e-6, -1e-8, 1e-8, 1e-6] {
        let m = res.x + delta;
        let v = g(m);
        if v < best {
            best = v;
            m_star = m;
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let evals = evals.into_inner();

    let inner = {
        let pos = x.transform(Transform::PosPartShift(m_star))?;
        norms::n_alpha_with(&pos, f, alpha, tol.bisection_rel)?.value
    };
    Ok(PremiumResult {
        value: m_star + inner,
        m_star,
        inner_norm: inner,
        iterations: evals,
    })
}

/// `p`-lower quantile `inf { x : P(X ≤ x) ≥ p }`.
pub fn var(x: &RandomVariable, p: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(CoreError::InvalidParameter(format!(
            "quantile level must lie in (0, 1), got {p}"
        )));
    }
    match x {
        RandomVariable::Discrete(d) => {
            let mut acc = 0.0;
            for a in d.atoms() {
                acc += a.prob;
                if acc >= p - 1e-15 {
                    return Ok(a.value);
                }
            }
            Ok(d.max_value())
        }
        RandomVariable::Quantile(q) => Ok(q.quantile(p)),
    }
}

/// `ES_λ(X) = (1 − λ)⁻¹ ∫_λ¹ VaR_p(X) dp`: exact piecewise sums for discrete
/// laws, tail quadrature for quantile laws (a divergent tail is an error).
pub fn expected_shortfall(x: &RandomVariable, level: f64) -> Result<f64> {
    if !(0.0 < level && level < 1.0) {
        return Err(CoreError::InvalidParameter(format!(
            "shortfall level must lie in (0, 1), got {level}"
        )));
    }
    match x {
        RandomVariable::Discrete(d) => {
            let mut acc = 0.0; // CDF before the current atom
            let mut integral = 0.0;
            for a in d.atoms() {
                let f_next = acc + a.prob;
                let width = (f_next.min(1.0) - acc.max(level)).max(0.0);
                integral += a.value * width;
                acc = f_next;
            }
            Ok(integral / (1.0 - level))
        }
        RandomVariable::Quantile(q) => {
            let cuts: Vec<CutPoint> = q.cuts().iter().map(|c| c.as_cut_point()).collect();
            let ql = q.clone();
            let qu = q.clone();
            let f = ClosureIntegrand {
                lower: move |t: f64| ql.quantile(t),
                upper: move |s: f64| qu.quantile_upper(s),
            };
            match quadrature::integrate_unit(&f, level, 1.0, &cuts, &QuadConfig::default()) {
                IntegralValue::Finite(v) => Ok(v / (1.0 - level)),
                IntegralValue::Divergent => Err(CoreError::DivergentTail),
                _ => Err(CoreError::Inconclusive {
                    context: "shortfall tail integral".into(),
                }),
            }
        }
    }
}

/// Comparison of the premium before and after conditional-expectation style
/// coarsening; averaging can only lower the premium.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoarseningBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn coarsening_bound_check(
    x: &DiscreteRV,
    partition: &[Vec<usize>],
    f: &OrliczFunction,
    alpha: f64,
) -> Result<CoarseningBound> {
    let coarse = x.coarsen(partition)?;
    let lhs = premium(&coarse.into(), f, alpha)?.value;
    let rhs = premium(&x.clone().into(), f, alpha)?.value;
    Ok(CoarseningBound {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randvar::families;

    fn uniform4() -> RandomVariable {
        DiscreteRV::uniform(&[1.0, 2.0, 3.0, 4.0]).unwrap().into()
    }

    fn identity() -> OrliczFunction {
        OrliczFunction::identity()
    }

    #[test]
    fn half_line_examples() {
        // m past the support: the positive part vanishes
        let x = uniform4();
        let h = premium_at(&x, &identity(), 0.5, 7.0).unwrap();
        assert!((h.value - 7.0).abs() < 1e-12);

        // X ≡ 0, m < 0: m + (−m)/Φ⁻¹(1−α) = −m for the identity at α = 1/2
        let z = RandomVariable::constant(0.0);
        let h = premium_at(&z, &identity(), 0.5, -2.0).unwrap();
        assert!((h.value - 2.0).abs() < 1e-9);

        // Rockafellar-Uryasev form at m = 3: 3 + 2 E[(X−3)⁺] = 3.5
        let h = premium_at(&x, &identity(), 0.5, 3.0).unwrap();
        assert!((h.value - 3.5).abs() < 1e-9);
    }

    #[test]
    fn constants_are_fixed_points() {
        for f in OrliczFunction::catalog() {
            for &alpha in &[0.1, 0.5, 0.9] {
                let c = -1.7;
                let r = premium(&RandomVariable::constant(c), &f, alpha).unwrap();
                assert!(
                    (r.value - c).abs() < 1e-8,
                    "{} α={alpha}: {}",
                    f.name(),
                    r.value
                );
            }
        }
    }

    #[test]
    fn uniform_identity_premium_is_expected_shortfall() {
        let x = uniform4();
        let r = premium(&x, &identity(), 0.5).unwrap();
        assert!((r.value - 3.5).abs() < 1e-9, "got {}", r.value);
        assert!((r.value - (r.m_star + r.inner_norm)).abs() < 1e-9);
        assert!(r.value >= x.expectation().unwrap() - 1e-9);
    }

    #[test]
    fn uniform_power_premium_closed_form() {
        // minimize m + √(Σ (x_i − m)² / 2): calculus gives 3 + 1/√3
        let x = uniform4();
        let f = OrliczFunction::power(2.0).unwrap();
        let r = premium(&x, &f, 0.5).unwrap();
        let expected = 3.0 + 1.0 / 3f64.sqrt();
        assert!((r.value - expected).abs() < 1e-8, "got {}", r.value);
    }

    #[test]
    fn spiked_indicators_dominate_their_mean() {
        for f in OrliczFunction::catalog() {
            for n in [1_u32, 3, 10, 100] {
                let x: RandomVariable = if n == 1 {
                    RandomVariable::constant(1.0)
                } else {
                    DiscreteRV::scaled_indicator(n as f64, 1.0 / n as f64)
                        .unwrap()
                        .into()
                };
                let r = premium(&x, &f, 0.5).unwrap();
                assert!(r.value >= 1.0 - 1e-9, "{} n={n}: {}", f.name(), r.value);
            }
        }
    }

    #[test]
    fn optimality_certificate_around_m_star() {
        let x: RandomVariable =
            DiscreteRV::new(&[(-2.0, 0.3), (0.5, 0.4), (4.0, 0.3)]).unwrap().into();
        for f in OrliczFunction::catalog() {
            let r = premium(&x, &f, 0.5).unwrap();
            for delta in [1e-3, 1e-2, 0.1] {
                for sign in [-1.0, 1.0] {
                    let h = premium_at(&x, &f, 0.5, r.m_star + sign * delta).unwrap();
                    assert!(
                        h.value >= r.value - 1e-9,
                        "{}: value {} below premium {} at offset {}",
                        f.name(),
                        h.value,
                        r.value,
                        sign * delta
                    );
                }
            }
        }
    }

    #[test]
    fn var_examples() {
        let x = uniform4();
        assert_eq!(var(&x, 0.5).unwrap(), 2.0);
        assert_eq!(var(&x, 0.95).unwrap(), 4.0);
        assert_eq!(var(&RandomVariable::constant(3.0), 0.25).unwrap(), 3.0);
        assert!(var(&x, 1.5).is_err());
    }

    #[test]
    fn shortfall_examples() {
        let x = uniform4();
        assert!((expected_shortfall(&x, 0.5).unwrap() - 3.5).abs() < 1e-12);
        let c = RandomVariable::constant(2.0);
        assert!((expected_shortfall(&c, 0.9).unwrap() - 2.0).abs() < 1e-12);

        // log-singular: ES_{1/2} = 1 + ln 2
        let log: RandomVariable = families::log_singular(1.0).unwrap().into();
        let es = expected_shortfall(&log, 0.5).unwrap();
        assert!((es - (1.0 + 2f64.ln())).abs() < 1e-9, "got {es}");

        // Pareto tail with γ = 2 is not integrable
        let heavy: RandomVariable = families::power_tail(2.0, 1.0).unwrap().into();
        assert!(matches!(
            expected_shortfall(&heavy, 0.5),
            Err(CoreError::DivergentTail)
        ));
    }

    #[test]
    fn premium_matches_shortfall_for_identity_gauge() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let n = rng.gen_range(2..=8);
            let mut probs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= total);
            let pairs: Vec<(f64, f64)> = probs
                .iter()
                .map(|&p| (rng.gen_range(-10.0..10.0), p))
                .collect();
            let x: RandomVariable = DiscreteRV::new(&pairs).unwrap().into();
            for &alpha in &[0.1, 0.5, 0.9] {
                let p = premium(&x, &identity(), alpha).unwrap().value;
                let es = expected_shortfall(&x, alpha).unwrap();
                assert!((p - es).abs() <= 1e-7, "α={alpha}: {p} vs {es}");
            }
        }
    }

    #[test]
    fn quantile_premium_identity_matches_shortfall() {
        let log: RandomVariable = families::log_singular(1.0).unwrap().into();
        let r = premium(&log, &identity(), 0.5).unwrap();
        assert!(
            (r.value - (1.0 + 2f64.ln())).abs() < 1e-6,
            "got {}",
            r.value
        );
    }

    #[test]
    fn premium_rejects_non_members() {
        let heavy: RandomVariable = families::power_tail(2.0, 1.0).unwrap().into();
        assert!(matches!(
            premium(&heavy, &identity(), 0.5),
            Err(CoreError::NotInLPhi)
        ));
    }

    #[test]
    fn coarsening_examples() {
        let x = DiscreteRV::uniform(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let f = identity();

        let one_block = coarsening_bound_check(&x, &[vec![0, 1, 2, 3]], &f, 0.5).unwrap();
        assert!((one_block.lhs - 2.5).abs() < 1e-8, "π(E[X]) = E[X]");
        assert!(one_block.holds);

        let singletons =
            coarsening_bound_check(&x, &[vec![0], vec![1], vec![2], vec![3]], &f, 0.5).unwrap();
        assert!((singletons.lhs - singletons.rhs).abs() < 1e-9);

        let halves = coarsening_bound_check(&x, &[vec![0, 1], vec![2, 3]], &f, 0.5).unwrap();
        assert!((halves.lhs - 3.5).abs() < 1e-8);
        assert!(halves.holds);
    }

    #[test]
    fn translation_and_homogeneity_spot_checks() {
        let x: RandomVariable =
            DiscreteRV::new(&[(-1.0, 0.5), (2.0, 0.25), (5.0, 0.25)]).unwrap().into();
        for f in OrliczFunction::catalog() {
            let base = premium(&x, &f, 0.5).unwrap().value;
            let shifted = premium(
                &x.transform(Transform::Shift(3.25)).unwrap(),
                &f,
                0.5,
            )
            .unwrap()
            .value;
            assert!((shifted - base - 3.25).abs() < 1e-7, "{}", f.name());
            for t in [0.0, 0.5, 2.0, 7.0] {
                let scaled = premium(&x.transform(Transform::Scale(t)).unwrap(), &f, 0.5)
                    .unwrap()
                    .value;
                assert!(
                    (scaled - t * base).abs() <= 1e-7 * t.max(1.0),
                    "{} t={t}: {scaled} vs {}",
                    f.name(),
                    t * base
                );
            }
        }
    }
}
