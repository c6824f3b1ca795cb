use jacobi_trace::asymptotics::{
    free_jacobi_moment_ref, lemma_diagnostics, scaling_equivalences_report, u_ones_limit, AsymptoticRegime, RegimeRule,
};
use jacobi_trace::{Partition, Rational};
use proptest::prelude::*;

#[test]
fn two_rules_reach_the_same_limits() {
    let tau = Partition::hook(2, 1);
    for rule in [RegimeRule::Rounded, RegimeRule::FloorCeil] {
        let regime = AsymptoticRegime::with_rule(0.4, 0.8, rule).unwrap();
        let report = lemma_diagnostics::<Rational>(&regime, &tau, &[100, 400]).unwrap();
        for q in report.quantities() {
            let s = report.series(&q);
            assert!(s[1].gap <= s[0].gap, "{rule:?} {q}");
            assert!(s[1].gap < 0.02, "{rule:?} {q}: {}", s[1].gap);
        }
        let u = &report.series("u_ones")[1];
        assert!((u.limit_value - u_ones_limit(&tau, 0.4)).abs() < 1e-12);
    }
}

#[test]
fn naive_cross_product_diverges_corrected_limit_holds() {
    let regime = AsymptoticRegime::zero_s(0.5).unwrap();
    let tau = Partition::hook(2, 0);
    let alpha = Partition::hook(3, 0);
    let mu = Partition::empty();
    let report = scaling_equivalences_report(&regime, &tau, &mu, &alpha, &[100, 400, 1600]).unwrap();
    let claimed = report.series("cross_product_claimed");
    let corrected = report.series("cross_product");
    assert!(claimed[2].finite_value < claimed[0].finite_value);
    assert!(claimed[2].gap > 0.9);
    assert!(corrected[2].gap < corrected[1].gap && corrected[1].gap < corrected[0].gap);
    assert!(corrected[2].gap < 0.01);
    assert_eq!(corrected[0].limit_value, 2.0);
    for q in ["gamma_ratio", "bracket_ratio", "pair_ratio", "s_alpha_growth"] {
        let s = report.series(q);
        assert!(s[2].gap <= s[0].gap && s[2].gap < 0.01, "{q}");
    }
}

#[test]
fn scaling_report_requires_zero_s() {
    let regime = AsymptoticRegime::new(0.3, 1.0).unwrap();
    let one = Partition::hook(1, 0);
    assert!(scaling_equivalences_report(&regime, &one, &one, &one, &[100]).is_err());
}

proptest! {
    /// Free Jacobi moments are moments of a law on `[0, 1]`: decreasing in `n`.
    #[test]
    fn free_moments_decrease(n in 1u32..8, t in 0.0f64..3.0) {
        let a = free_jacobi_moment_ref(n, t).unwrap();
        let b = free_jacobi_moment_ref(n + 1, t).unwrap();
        prop_assert!(b <= a + 1e-12 && b >= -1e-12 && a <= 1.0 + 1e-12);
    }
}
