use jacobi_trace::moments::{density_eval, DensitySeries};
use jacobi_trace::oracle::{alternant_integral, gauss_jacobi_rule};
use jacobi_trace::FloatParams;
use proptest::prelude::*;

#[test]
fn integrates_to_one() {
    for (r, s, t) in [(1.0, 1.0, 0.5), (0.0, 2.0, 0.3), (2.0, 0.0, 1.5)] {
        let params = FloatParams::new(r, s, 2).unwrap();
        let series = DensitySeries::adaptive(&params, t, 1e-14).unwrap();
        let rule = gauss_jacobi_rule(r, s, 64).unwrap();
        let total = alternant_integral(|x| series.alternant(x), 2, &rule);
        assert!((total - 1.0).abs() < 1e-6, "r={r} s={s} t={t}: {total}");
    }
}

#[test]
fn three_eigenvalues() {
    let params = FloatParams::new(1.0, 0.0, 3).unwrap();
    let series = DensitySeries::adaptive(&params, 1.0, 1e-12).unwrap();
    let rule = gauss_jacobi_rule(1.0, 0.0, 40).unwrap();
    let total = alternant_integral(|x| series.alternant(x), 3, &rule);
    assert!((total - 1.0).abs() < 1e-6, "{total}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// A probability density, up to the reported truncation tail.
    #[test]
    fn nonnegative(a in 0.05f64..0.95, b in 0.05f64..0.95, t in 0.2f64..2.0) {
        prop_assume!((a - b).abs() > 1e-3);
        let point = [a.max(b), a.min(b)];
        let params = FloatParams::new(1.0, 1.0, 2).unwrap();
        let g = density_eval(&params, &point, t, 1e-12).unwrap();
        prop_assert!(g.value >= -10.0 * g.tail_estimate - 1e-12, "{:?}", g);
    }
}
