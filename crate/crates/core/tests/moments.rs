use jacobi_trace::moments::{expected_trace, moment_expansion, stationary_moment, DensitySeries};
use jacobi_trace::oracle::{alternant_integral, gauss_jacobi_rule};
use jacobi_trace::{ExactParams, FloatParams, Rational, Scalar};
use num_traits::Zero;
use proptest::prelude::*;

fn exact(r: i64, s: i64, m: usize) -> ExactParams {
    ExactParams::new(Rational::from_int(r), Rational::from_int(s), m).unwrap()
}

#[test]
fn truncated_density_reproduces_first_moment() {
    for (r, s) in [(1, 1), (0, 2), (2, 0)] {
        let pf = FloatParams::new(r as f64, s as f64, 2).unwrap();
        let series = DensitySeries::new(&pf, 1.0, 8).unwrap();
        let rule = gauss_jacobi_rule(r as f64, s as f64, 24).unwrap();
        let quad = alternant_integral(|x| (x[0] + x[1]) * series.alternant(x), 2, &rule);
        let formula = expected_trace(&exact(r, s, 2), 1, 1.0).unwrap().value;
        assert!((quad - formula).abs() < 1e-6, "r={r} s={s}: {quad} vs {formula}");
    }
}

#[test]
fn relaxation_rate_is_slowest_mode() {
    for (d, p, m, n) in [(5, 2, 2, 2), (7, 3, 3, 2), (6, 3, 2, 1)] {
        let params = ExactParams::from_dimensions(d, p, m).unwrap();
        let expansion = moment_expansion(&params, n).unwrap();
        let stationary = expansion.stationary_part().as_f64();
        let k_min = expansion
            .grouped()
            .into_iter()
            .filter(|(tau, _, c)| !tau.is_empty() && !c.is_zero())
            .map(|(_, rate, _)| rate.as_f64())
            .fold(f64::INFINITY, f64::min);
        let ts: Vec<f64> = (5..=20).map(f64::from).collect();
        let ys: Vec<f64> = ts
            .iter()
            .map(|&t| (expansion.evaluate(t).unwrap().value - stationary).abs().ln())
            .collect();
        let n_pts = ts.len() as f64;
        let (mt, my) = (ts.iter().sum::<f64>() / n_pts, ys.iter().sum::<f64>() / n_pts);
        let cov: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - mt) * (y - my)).sum();
        let var: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
        let slope = cov / var;
        assert!((slope / -k_min - 1.0).abs() < 0.05, "({d},{p},{m}) n={n}: slope {slope} vs {}", -k_min);
    }
}

#[test]
fn ledger_sums_to_value() {
    let params = ExactParams::from_dimensions(7, 3, 3).unwrap();
    let expansion = moment_expansion(&params, 3).unwrap();
    let at_zero = expansion.terms.iter().fold(Rational::zero(), |acc, t| acc + t.coefficient.clone());
    assert_eq!(at_zero, Rational::from_int(3));
    let res = expansion.evaluate(0.8).unwrap();
    let sum: f64 = res.terms.iter().map(|t| t.contribution).sum();
    assert!((sum - res.value).abs() < 1e-12);
}

#[test]
fn float_path_tracks_exact_path() {
    let e = exact(1, 2, 3);
    let f = FloatParams::new(1.0, 2.0, 3).unwrap();
    for n in 1..=3 {
        for t in [0.05, 0.5, 3.0] {
            let a = expected_trace(&e, n, t).unwrap().value;
            let b = expected_trace(&f, n, t).unwrap().value;
            assert!((a - b).abs() < 1e-9 * a.abs(), "n={n} t={t}: {a} vs {b}");
        }
    }
}

#[test]
fn non_integer_parameters_interpolate() {
    let lo = expected_trace(&FloatParams::new(1.0, 1.0, 2).unwrap(), 2, 1.0).unwrap().value;
    let mid = expected_trace(&FloatParams::new(1.5, 1.0, 2).unwrap(), 2, 1.0).unwrap().value;
    let hi = expected_trace(&FloatParams::new(2.0, 1.0, 2).unwrap(), 2, 1.0).unwrap().value;
    assert!(lo.min(hi) < mid && mid < lo.max(hi));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// `0 ≤ E tr J^{n+1} ≤ E tr J^n ≤ m` since the spectrum lies in `[0, 1]`.
    #[test]
    fn moments_are_ordered(r in 0i64..4, s in 0i64..4, m in 2usize..4, t in 0.0f64..6.0) {
        let params = exact(r, s, m);
        let mut prev = m as f64;
        for n in 1..=m as u32 {
            let v = expected_trace(&params, n, t).unwrap().value;
            prop_assert!(v >= -1e-12 && v <= prev + 1e-12, "n={} v={} prev={}", n, v, prev);
            prev = v;
        }
    }

    /// The large-time value is the stationary moment.
    #[test]
    fn long_time_is_stationary(r in 0i64..4, s in 0i64..4, m in 2usize..4, n in 1u32..3) {
        let params = exact(r, s, m);
        let v = expected_trace(&params, n, 200.0).unwrap().value;
        let st = stationary_moment(&params, n).unwrap().as_f64();
        prop_assert!((v - st).abs() < 1e-12 * st);
    }
}
