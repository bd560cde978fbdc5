//! One-dimensional search primitives shared by the norm and premium engines:
//! golden-section minimization, monotone-boundary bisection, and a concave
//! maximizer with divergence detection for numeric conjugates.

/// 1/φ, the golden-section interval reduction factor.
const INV_GOLD: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy)]
pub(crate) struct GoldenResult {
    pub x: f64,
    pub value: f64,
    pub iterations: u32,
}

/// Minimize a unimodal function on `[lo, hi]` to absolute tolerance `tol` on
/// the argument. `+inf` plateaus are tolerated; the best sampled point is
/// tracked so a finite minimum on the boundary of the finite region is still
/// reported.
pub(crate) fn golden_min<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: u32,
) -> GoldenResult {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x1 = b - INV_GOLD * (b - a);
    let mut x2 = a + INV_GOLD * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let mut iterations = 0;

    while (b - a) > tol && iterations < max_iter {
        iterations += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLD * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLD * (b - a);
            f2 = f(x2);
        }
        let (xc, fc) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        if fc < best.1 {
            best = (xc, fc);
        }
    }
    GoldenResult {
        x: best.0,
        value: best.1,
        iterations,
    }
}

/// Bisect the boundary of a monotone predicate on `[lo, hi]`, where
/// `pred(lo) = false` and `pred(hi) = true`. Returns `(last_false, first_true)`
/// with `first_true - last_false` below `rel_tol * max(1, first_true)`.
pub(crate) fn bisect_boundary<P: FnMut(f64) -> bool>(
    mut pred: P,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    max_iter: u32,
) -> (f64, f64) {
    for _ in 0..max_iter {
        if hi - lo <= rel_tol * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval exhausted at floating-point resolution
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum ConcaveMax {
    Attained { value: f64 },
    Diverges,
}

/// Maximize a concave function of one variable over `[0, ∞)`. The bracket is
/// grown by doubling; if the objective is still climbing at `radius_cap` the
/// supremum is declared `+∞`. `-inf` values (outside the concave domain) are
/// tolerated.
pub(crate) fn maximize_concave<F: FnMut(f64) -> f64>(
    mut f: F,
    radius_cap: f64,
    tol: f64,
) -> ConcaveMax {
    let f0 = f(0.0);
    let mut radius = 1.0;
    let mut f_half = f0;
    let mut f_r = f(radius);
    while f_r > f_half && radius < radius_cap {
        radius *= 2.0;
        f_half = f_r;
        f_r = f(radius);
    }
    if f_r > f_half {
        return ConcaveMax::Diverges;
    }
    let res = golden_min(|x| -f(x), 0.0, radius, tol * radius.max(1.0), 400);
    ConcaveMax::Attained {
        value: (-res.value).max(f0),
    }
}

/// Expand `[lo, hi]` outward (doubling the width each round) until the convex
/// function `f` is certified to have an interior minimum: both endpoint values
/// exceed the midpoint value. Returns the certified bracket.
pub(crate) fn certify_convex_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    max_rounds: u32,
) -> (f64, f64) {
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    let mut mid = 0.5 * (lo + hi);
    let mut f_mid = f(mid);
    for _ in 0..max_rounds {
        if f_lo >= f_mid && f_hi >= f_mid {
            return (lo, hi);
        }
        let width = hi - lo;
        if f_lo < f_mid {
            lo -= width;
            f_lo = f(lo);
        }
        if f_hi < f_mid {
            hi += width;
            f_hi = f(hi);
        }
        mid = 0.5 * (lo + hi);
        f_mid = f(mid);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let res = golden_min(|x| (x - 0.3).powi(2), -2.0, 5.0, 1e-10, 300);
        assert!((res.x - 0.3).abs() < 1e-8);
        assert!(res.value < 1e-15);
    }

    #[test]
    fn golden_handles_infinite_plateau() {
        // finite only on [1, inf), minimum at the boundary
        let res = golden_min(
            |x| if x < 1.0 { f64::INFINITY } else { x },
            0.0,
            8.0,
            1e-12,
            500,
        );
        assert!((res.x - 1.0).abs() < 1e-9);
        assert!((res.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_boundary_converges() {
        let (lo, hi) = bisect_boundary(|x| x * x >= 2.0, 0.0, 2.0, 1e-12, 200);
        assert!(lo <= 2f64.sqrt() && 2f64.sqrt() <= hi);
        assert!(hi - lo < 1e-11);
    }

    #[test]
    fn concave_max_detects_divergence() {
        match maximize_concave(|x| x, 1e8, 1e-10) {
            ConcaveMax::Diverges => {}
            _ => panic!("linear growth must diverge"),
        }
        match maximize_concave(|x| x - x * x, 1e8, 1e-10) {
            ConcaveMax::Attained { value } => assert!((value - 0.25).abs() < 1e-8),
            _ => panic!("bounded maximum expected"),
        }
    }

    #[test]
    fn bracket_certifies_interior_minimum() {
        let (lo, hi) = certify_convex_bracket(|x| (x - 40.0).powi(2), 0.0, 1.0, 60);
        assert!(lo <= 40.0 && 40.0 <= hi);
    }
}
