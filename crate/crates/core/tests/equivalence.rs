//! Predictor-corrector steps against the explicit composed tableau.

use pcrk::integrator::{linear_problem, pc_step, rk_step, Executor, IVProblem, StepOptions};
use pcrk::region::real_axis_limit;
use pcrk::stability::pc_stability_polynomial;
use pcrk::tableau::{compose_pc_tableau_with, PCScheme, PredictorAbscissae, BUILTIN_NAMES};
use proptest::prelude::*;

/// `f_i(t, y) = a_i + b_i t + Σ_j (c_ij y_j + d_ij y_j²)`.
fn polynomial_rhs(dim: usize, coeffs: Vec<f64>) -> IVProblem<f64> {
    let y0: Vec<f64> = coeffs[..dim].to_vec();
    let c = coeffs[dim..].to_vec();
    IVProblem::new(
        move |t, y: &[f64]| {
            (0..dim)
                .map(|i| {
                    let base = i * (2 + 2 * dim);
                    let mut v = c[base] + c[base + 1] * t;
                    for j in 0..dim {
                        v += c[base + 2 + j] * y[j] + c[base + 2 + dim + j] * y[j] * y[j];
                    }
                    v
                })
                .collect()
        },
        y0,
        0.0,
        1.0,
    )
    .unwrap()
}

fn problem_strategy() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|dim| {
        let len = dim + dim * (2 + 2 * dim);
        (Just(dim), prop::collection::vec(-1.0f64..1.0, len))
    })
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = b
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pc_step_equals_rk_step_on_composed_tableau(
        (dim, coeffs) in problem_strategy(),
        idx in 0usize..4,
        m in 0usize..=4,
        h in 0.01f64..0.3,
        t in 0.0f64..1.0,
        literal in any::<bool>(),
    ) {
        let prob = polynomial_rhs(dim, coeffs);
        let scheme = PCScheme::builtin(BUILTIN_NAMES[idx], m).unwrap();
        let predictor = if literal { PredictorAbscissae::Literal } else { PredictorAbscissae::Stage };
        let options = StepOptions { predictor, executor: Executor::Sequential };
        let (y, trace) = pc_step(&prob, t, &prob.y0, h, &scheme, options).unwrap();
        let big = compose_pc_tableau_with(&scheme, predictor);
        let reference = rk_step(&prob, t, &prob.y0, h, &big).unwrap();
        prop_assert!(rel_close(&y, &reference, 1e-13), "{:?} vs {:?}", y, reference);

        let s = scheme.corrector.stages();
        let expected_fluxes = if literal { 1 + s * m } else { s * (m + 1) };
        prop_assert_eq!(trace.flux_evaluations, expected_fluxes);
        prop_assert_eq!(trace.sweeps.len(), m + 1);

        let parallel = StepOptions { predictor, executor: Executor::Parallel };
        let (y_par, trace_par) = pc_step(&prob, t, &prob.y0, h, &scheme, parallel).unwrap();
        prop_assert_eq!(&y_par, &y);
        prop_assert_eq!(trace_par, trace);
    }

    #[test]
    fn linear_exactness(
        idx in 0usize..4,
        m in 0usize..=5,
        re in -2.0f64..0.0,
        im in -2.0f64..2.0,
        h in 0.01f64..1.0,
    ) {
        let lambda = num_complex::Complex64::new(re, im);
        let prob = linear_problem(lambda, num_complex::Complex64::new(1.0, 0.0), 1.0);
        let scheme = PCScheme::builtin(BUILTIN_NAMES[idx], m).unwrap();
        let (y, _) = pc_step(&prob, 0.0, &prob.y0, h, &scheme, StepOptions::default()).unwrap();
        let want = pc_stability_polynomial(&scheme).eval(lambda * h);
        prop_assert!((y[0] - want).norm() <= 1e-14 * want.norm().max(1.0));
    }
}

#[test]
fn per_step_growth_straddles_the_real_axis_limit() {
    for m in [2, 3] {
        let scheme = PCScheme::builtin("radau-iia-2", m).unwrap();
        let limit = real_axis_limit(&pc_stability_polynomial(&scheme));
        let prob = linear_problem(-1.0, 1.0, 1.0);
        let (inside, _) = pc_step(
            &prob,
            0.0,
            &[1.0],
            0.99 * limit,
            &scheme,
            StepOptions::default(),
        )
        .unwrap();
        let (outside, _) = pc_step(
            &prob,
            0.0,
            &[1.0],
            1.01 * limit,
            &scheme,
            StepOptions::default(),
        )
        .unwrap();
        assert!(inside[0].abs() <= 1.0 + 1e-9, "m={m}: {}", inside[0]);
        assert!(outside[0].abs() > 1.0, "m={m}: {}", outside[0]);
    }
}
