// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pauli_forge::linalg::{random_unit_vector, CVector};
use pauli_forge::onepr::{
    check_conditions, fit_onepr, gram_circle_test, random_onepr_decomposition,
    synthesize_onepr_circuit, FitOptions, OneprDecomposition, StateCurve, RESIDUAL_TOL,
};
use pauli_forge::{Error, C64};

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn max_curve_error(d: &OneprDecomposition, curve: &StateCurve) -> f64 {
    curve
        .samples()
        .iter()
        .map(|(p, v)| (d.evaluate(*p).unwrap() - v).norm())
        .fold(0.0, f64::max)
}

#[test]
fn generated_curves_pass_the_gram_test() {
    for seed in 0..100 {
        let d = random_onepr_decomposition(seed);
        let curve = StateCurve::from_decomposition(&d, &grid(41)).unwrap();
        assert!(gram_circle_test(&curve), "seed {seed}");
    }
}

#[test]
fn fits_recover_generated_curves() {
    let opts = FitOptions::default();
    for seed in 0..12 {
        let d = random_onepr_decomposition(seed);
        let curve = StateCurve::from_decomposition(&d, &grid(21)).unwrap();
        let fit = fit_onepr(&curve, &opts).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let got = &fit.decomposition;
        assert!(fit.residual <= RESIDUAL_TOL);
        assert!(check_conditions(&got.a, &got.b, &got.c));
        assert!(max_curve_error(got, &curve) <= RESIDUAL_TOL);
        // the fitted schedule is increasing and starts at zero
        let s: Vec<f64> = got.s_samples().iter().map(|x| x.1).collect();
        assert_eq!(s[0], 0.0);
        assert!(s.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn synthesised_circuits_reproduce_the_curve() {
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let d = random_onepr_decomposition(seed);
        let m = 2 + (seed as usize % 2);
        let circuit = synthesize_onepr_circuit(&d, m, seed).unwrap();
        for p in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let want = d.evaluate(p).unwrap();
            let got = circuit.simulate(p).unwrap();
            for (i, g) in got.iter().enumerate() {
                let w = want.get(i).copied().unwrap_or_default();
                worst = worst.max((g - w).norm());
            }
        }
    }
    assert!(worst <= 1e-10, "worst amplitude error {worst:e}");
}

fn cubic_curve(seed: u64, dim: usize) -> StateCurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<CVector> = (0..4).map(|_| random_unit_vector(dim, &mut rng)).collect();
    let samples = grid(15)
        .into_iter()
        .map(|p| {
            let v = &u[0]
                + &u[1] * C64::from(p)
                + &u[2] * C64::from(p * p)
                + &u[3] * C64::from(p * p * p);
            (p, v.normalize())
        })
        .collect();
    StateCurve::new(samples).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fits_are_sound(seed in any::<u64>(), dim in 3usize..=4) {
        let curve = cubic_curve(seed, dim);
        let opts = FitOptions { restarts: 8, seed, ..FitOptions::default() };
        match fit_onepr(&curve, &opts) {
            Ok(fit) => {
                let d = &fit.decomposition;
                prop_assert!(check_conditions(&d.a, &d.b, &d.c));
                prop_assert!(max_curve_error(d, &curve) <= RESIDUAL_TOL);
                prop_assert!(gram_circle_test(&curve));
            }
            Err(Error::Infeasible { .. }) => prop_assert_eq!(dim, 4),
            Err(Error::NotFound { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }
}
