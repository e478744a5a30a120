// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pauli_forge::channels::{
    choi_matrix, is_completely_positive, is_trace_preserving, ChoiMatrix, PauliChannel,
};
use pauli_forge::circuits::NoiseModel;
use pauli_forge::distance::{diamond_fidelity, write_records, FidelityRecord};
use pauli_forge::linalg::{max_abs_diff, random_complex, CMatrix};
use pauli_forge::par::Execution;
use pauli_forge::pauli::{tau_to_k, tetrahedron_vertex, PauliProbVector, TauVector};
use pauli_forge::tomography::{
    project_cptp, tetrahedron_scan, tomograph_channel, ScanGrid, Shots, TomographyConfig,
};

#[test]
fn noiseless_reconstruction_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = TomographyConfig::default();
    for _ in 0..100 {
        let k = PauliProbVector::random(1, &mut rng);
        let est = tomograph_channel(&k, &NoiseModel::ideal(), &cfg).unwrap();
        let want = choi_matrix(&PauliChannel::new(k));
        assert!(max_abs_diff(est.choi().matrix(), want.matrix()) <= 1e-10);
    }
}

fn csv_of(records: &[FidelityRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    write_records(&mut out, records).unwrap();
    out
}

#[test]
fn scans_are_deterministic() {
    let grid = ScanGrid {
        tau3_slices: vec![-0.5, 0.3],
        spacing: 0.25,
    };
    let nm = NoiseModel::new(0.01, 0.03, 0.02).unwrap();
    let cfg = TomographyConfig {
        shots: Shots::Count(500),
        seed: 77,
        ..TomographyConfig::default()
    };
    let a = tetrahedron_scan(&grid, &nm, &cfg, Execution::Parallel).unwrap();
    let b = tetrahedron_scan(&grid, &nm, &cfg, Execution::Parallel).unwrap();
    let c = tetrahedron_scan(&grid, &nm, &cfg, Execution::Sequential).unwrap();
    assert!(!a.is_empty());
    assert_eq!(csv_of(&a), csv_of(&b));
    assert_eq!(csv_of(&a), csv_of(&c));

    let other = TomographyConfig { seed: 78, ..cfg };
    let d = tetrahedron_scan(&grid, &nm, &other, Execution::Sequential).unwrap();
    assert_ne!(csv_of(&a), csv_of(&d));
}

#[test]
fn perfect_device_scores_one_everywhere() {
    let grid = ScanGrid {
        tau3_slices: vec![0.0, 0.9],
        spacing: 0.2,
    };
    let recs = tetrahedron_scan(
        &grid,
        &NoiseModel::ideal(),
        &TomographyConfig::default(),
        Execution::Parallel,
    )
    .unwrap();
    assert!(recs.iter().all(|r| (r.f - 1.0).abs() <= 1e-8));
}

fn fidelity_at(tau: [f64; 3], nm: &NoiseModel) -> f64 {
    let k = tau_to_k(&TauVector::one_qubit(tau[0], tau[1], tau[2]).unwrap()).unwrap();
    let est = tomograph_channel(&k, nm, &TomographyConfig::default()).unwrap();
    diamond_fidelity(&est, &PauliChannel::new(k)).unwrap()
}

#[test]
fn center_is_at_least_as_good_as_any_vertex() {
    for lambda in [0.0, 0.005, 0.02, 0.05, 0.1] {
        let nm = NoiseModel::new(lambda / 10.0, lambda, 0.0).unwrap();
        let center = fidelity_at([0.0; 3], &nm);
        for g in 0..4 {
            let vertex = fidelity_at(tetrahedron_vertex(g), &nm);
            assert!(
                center >= vertex - 1e-12,
                "lambda {lambda}, vertex {g}: {center} < {vertex}"
            );
        }
    }
}

#[test]
fn center_beats_vertex_neighbourhoods() {
    let grid = ScanGrid {
        tau3_slices: vec![-0.9, 0.0, 0.9],
        spacing: 0.1,
    };
    let nm = NoiseModel::new(0.002, 0.02, 0.01).unwrap();
    let recs = tetrahedron_scan(
        &grid,
        &nm,
        &TomographyConfig::default(),
        Execution::Parallel,
    )
    .unwrap();
    let mean = |pick: &dyn Fn(&FidelityRecord) -> bool| {
        let fs: Vec<f64> = recs.iter().filter(|r| pick(r)).map(|r| r.f).collect();
        assert!(!fs.is_empty());
        fs.iter().sum::<f64>() / fs.len() as f64
    };
    let center = mean(&|r| r.tau_norm() <= 0.2 + 1e-12);
    let vertices = mean(&|r| r.vertex_distance() <= 0.2 + 1e-12);
    assert!(center > vertices, "{center} <= {vertices}");
}

fn hermitian(seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(4, 4, |_, _| random_complex(&mut rng));
    (&g + g.adjoint()).unscale(2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_yields_channels(seed in any::<u64>(), shift in -1.0f64..1.0) {
        let m = hermitian(seed) + CMatrix::identity(4, 4).scale(shift);
        let j = ChoiMatrix::from_matrix(m).unwrap();
        let p = project_cptp(&j);
        prop_assert!(is_completely_positive(&p));
        prop_assert!(is_trace_preserving(&p));
    }

    #[test]
    fn projection_keeps_channels(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = PauliProbVector::random(1, &mut rng);
        let j = choi_matrix(&PauliChannel::new(k));
        let p = project_cptp(&j);
        prop_assert!(max_abs_diff(p.matrix(), j.matrix()) <= 1e-12);
    }
}
