use jacobi_trace::moments::expected_trace;
use jacobi_trace::simulate::{
    corner_process, eigen_sde_euler, normalized_trace_mc, sample_unitary_bm, scheme_trace_mean, trace_moment_mc,
    unitarity_defect, SimConfig,
};
use jacobi_trace::ExactParams;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn weak_error_is_first_order() {
    for (d, t) in [(5u32, 2.0), (7, 4.0), (3, 1.0)] {
        let steps = [250u32, 500, 1000, 2000, 4000];
        let means: Vec<f64> = steps.iter().map(|&k| scheme_trace_mean(d, t, k)).collect();
        let diffs: Vec<f64> = means.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
        for w in diffs.windows(2) {
            let slope = (w[1] / w[0]).log2();
            assert!((slope + 1.0).abs() < 0.05, "d={d}: log-log slope {slope}");
        }
        let exact = (-t / 2.0).exp();
        let richardson = 2.0 * means[4] - means[3];
        assert!((richardson - exact).abs() < 0.01 * (means[4] - exact).abs(), "d={d}");
    }
}

#[test]
fn scheme_mean_matches_simulation() {
    // Two coarse steps: the scheme mean is far from the continuum value e^{−t/2}.
    let scheme = scheme_trace_mean(2, 4.0, 2);
    let mc = normalized_trace_mc(2, 4.0, 2, 40_000, 5).unwrap();
    assert!((mc.mean - scheme).abs() < 4.0 * mc.stderr, "{} ± {} vs {scheme}", mc.mean, mc.stderr);
    assert!(((-2.0f64).exp() - scheme).abs() > 10.0 * mc.stderr);
}

#[test]
fn eigenvalue_sde_agrees_with_formula() {
    let config = SimConfig { d: 5, p: 2, m: 2, t: 1.0, steps: 200, paths: 400, seed: 3 };
    let exact = ExactParams::from_dimensions(5, 2, 2).unwrap();
    for n in [1, 2] {
        let est = eigen_sde_euler(&config, n).unwrap();
        let formula = expected_trace(&exact, n, 1.0).unwrap().value;
        assert!((est.mean - formula).abs() < 4.0 * est.stderr + 5e-3, "n={n}: {} ± {} vs {formula}", est.mean, est.stderr);
    }
}

#[test]
fn reproducible_under_any_thread_count() {
    let config = SimConfig { d: 6, p: 3, m: 2, t: 0.5, steps: 40, paths: 333, seed: 77 };
    let a = trace_moment_mc(&config, 2).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| trace_moment_mc(&config, 2).unwrap());
    assert_eq!(a, b);
    let other = trace_moment_mc(&SimConfig { seed: 78, ..config.clone() }, 2).unwrap();
    assert_ne!(a.mean, other.mean);
}

#[test]
fn corner_spectrum_stays_in_unit_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let y = sample_unitary_bm(7, 3.0, 300, &mut rng).unwrap();
        assert!(unitarity_defect(&y) < 1e-10);
        let j = corner_process(&y, 3, 3).unwrap();
        let herm: DMatrix<nalgebra::Complex<f64>> = (&j + j.adjoint()) * nalgebra::Complex::new(0.5, 0.0);
        let eig = herm.symmetric_eigenvalues();
        for v in eig.iter() {
            assert!((-1e-12..=1.0 + 1e-12).contains(v), "{v}");
        }
    }
}
