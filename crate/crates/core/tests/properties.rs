//! Cross-module property suites on randomized discrete laws.

mod common;

use common::{law_of, random_probs};
use haezendonck::{
    expected_shortfall, luxemburg_norm, n_alpha, premium, premium_at, DiscreteRV, Gauge,
    OrliczFunction, RandomVariable, Transform,
};
use proptest::prelude::*;

fn atoms_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0..10.0f64, 0.05..1.0f64), 1..8).prop_map(|raw| {
        let total: f64 = raw.iter().map(|(_, w)| w).sum();
        raw.into_iter().map(|(v, w)| (v, w / total)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn luxemburg_norm_is_absolutely_homogeneous(atoms in atoms_strategy(), t in 0.1..8.0f64) {
        let x = DiscreteRV::new(&atoms).unwrap();
        let f = OrliczFunction::power(2.0).unwrap();
        let base = luxemburg_norm(&x.clone().into(), &f).unwrap().value;
        let scaled_law = RandomVariable::from(x).transform(Transform::Scale(t)).unwrap();
        let scaled = luxemburg_norm(&scaled_law, &f).unwrap().value;
        prop_assert!((scaled - t * base).abs() <= 1e-8 * (t * base).abs().max(1.0));
    }

    #[test]
    fn luxemburg_norm_satisfies_triangle_inequality(
        atoms in prop::collection::vec(((-10.0..10.0f64, -10.0..10.0f64), 0.05..1.0f64), 2..8)
    ) {
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        let probs: Vec<f64> = atoms.iter().map(|(_, w)| w / total).collect();
        let xv: Vec<f64> = atoms.iter().map(|((a, _), _)| *a).collect();
        let yv: Vec<f64> = atoms.iter().map(|((_, b), _)| *b).collect();
        let sums: Vec<f64> = xv.iter().zip(&yv).map(|(a, b)| a + b).collect();
        let f = OrliczFunction::exponential();
        let nx = luxemburg_norm(&law_of(&probs, &xv).into(), &f).unwrap().value;
        let ny = luxemburg_norm(&law_of(&probs, &yv).into(), &f).unwrap().value;
        let ns = luxemburg_norm(&law_of(&probs, &sums).into(), &f).unwrap().value;
        prop_assert!(ns <= nx + ny + 1e-8);
    }

    #[test]
    fn luxemburg_norm_vanishes_only_at_zero(atoms in atoms_strategy()) {
        let x = DiscreteRV::new(&atoms).unwrap();
        let f = OrliczFunction::kinked_linear(0.5).unwrap();
        let norm = luxemburg_norm(&x.clone().into(), &f).unwrap().value;
        let is_zero = x.atoms().iter().all(|a| a.value == 0.0);
        if is_zero {
            prop_assert_eq!(norm, 0.0);
        } else {
            prop_assert!(norm > 0.0);
        }
    }

    #[test]
    fn norm_is_monotone_in_absolute_value(
        atoms in prop::collection::vec(((-6.0..6.0f64, 0.0..4.0f64), 0.05..1.0f64), 1..8)
    ) {
        // |X| ≤ |Y| atom-wise on a shared space forces ‖X‖ ≤ ‖Y‖
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        let probs: Vec<f64> = atoms.iter().map(|(_, w)| w / total).collect();
        let xv: Vec<f64> = atoms.iter().map(|((a, _), _)| *a).collect();
        let yv: Vec<f64> = atoms
            .iter()
            .map(|((a, pad), _)| (a.abs() + pad) * a.signum())
            .collect();
        let f = OrliczFunction::power(2.0).unwrap();
        let nx = luxemburg_norm(&law_of(&probs, &xv).into(), &f).unwrap().value;
        let ny = luxemburg_norm(&law_of(&probs, &yv).into(), &f).unwrap().value;
        prop_assert!(nx <= ny + 1e-9);
    }

    #[test]
    fn premium_dominates_mean_and_half_line_dominates_premium(
        atoms in atoms_strategy(),
        m in -12.0..12.0f64,
        alpha in 0.05..0.95f64,
    ) {
        let x: RandomVariable = DiscreteRV::new(&atoms).unwrap().into();
        let f = OrliczFunction::exponential();
        let p = premium(&x, &f, alpha).unwrap();
        prop_assert!(p.value >= x.expectation().unwrap() - 1e-9);
        prop_assert!((p.value - (p.m_star + p.inner_norm)).abs() <= 1e-9);
        let h = premium_at(&x, &f, alpha, m).unwrap();
        prop_assert!(h.value >= p.value - 1e-9);
    }

    #[test]
    fn es_matches_identity_premium(atoms in atoms_strategy(), alpha in 0.05..0.95f64) {
        let x: RandomVariable = DiscreteRV::new(&atoms).unwrap().into();
        let p = premium(&x, &OrliczFunction::identity(), alpha).unwrap().value;
        let es = expected_shortfall(&x, alpha).unwrap();
        prop_assert!((p - es).abs() <= 1e-7);
    }

    #[test]
    fn fenchel_young_holds_for_random_points(x in 0.0..4.0f64, y in 0.0..4.0f64) {
        for f in OrliczFunction::catalog() {
            let phi = f.eval(x);
            let psi = f.conjugate(y);
            if phi.is_finite() && psi.is_finite() {
                prop_assert!(x * y <= phi + psi + 1e-9);
            }
        }
    }

    #[test]
    fn coarsening_never_raises_the_premium(atoms in atoms_strategy(), alpha in 0.1..0.9f64) {
        let x = DiscreteRV::new(&atoms).unwrap();
        let n = x.atoms().len();
        // pair up neighbours, leave a tail singleton when n is odd
        let mut partition: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i + 1 < n {
            partition.push(vec![i, i + 1]);
            i += 2;
        }
        if i < n {
            partition.push(vec![i]);
        }
        let f = OrliczFunction::power(2.0).unwrap();
        let check = haezendonck::coarsening_bound_check(&x, &partition, &f, alpha).unwrap();
        prop_assert!(check.holds, "lhs {} rhs {}", check.lhs, check.rhs);
    }
}

#[test]
fn scaled_norm_interpolates_alpha_monotonically() {
    // N_α is nondecreasing in α: the gauge grows as 1/(1−α)
    let mut r = common::rng(5);
    for _ in 0..10 {
        let probs = random_probs(&mut r, 5);
        let values: Vec<f64> = (0..5).map(|i| i as f64 - 1.5).collect();
        let x: RandomVariable = law_of(&probs, &values).into();
        for f in OrliczFunction::catalog() {
            let mut prev = 0.0;
            for &alpha in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                let v = n_alpha(&x, &f, alpha).unwrap().value;
                assert!(v + 1e-9 >= prev, "{} α={alpha}", f.name());
                prev = v;
            }
        }
    }
}

#[test]
fn generalized_inverse_brackets_the_gauge() {
    for f in OrliczFunction::catalog() {
        for i in 0..40 {
            let y = i as f64 * 0.25;
            let x = f.generalized_inverse(y);
            if x.is_finite() && x > 0.0 {
                assert!(f.eval(x * (1.0 - 1e-9)) <= y + 1e-7 * y.max(1.0));
            }
            assert!(f.eval(x * (1.0 + 1e-6)) + 1e-12 >= y * (1.0 - 1e-6));
        }
    }
}
