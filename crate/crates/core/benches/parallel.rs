// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Sequential versus rayon execution of the data-parallel loops.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pauli_forge::channels::{NamedMap, PauliChannel};
use pauli_forge::circuits::NoiseModel;
use pauli_forge::distance::{diamond_distance_bruteforce, BruteForceOptions};
use pauli_forge::onepr::{fit_onepr, FitOptions, StateCurve};
use pauli_forge::par::Execution;
use pauli_forge::pauli::PauliProbVector;
use pauli_forge::tomography::{tetrahedron_scan, ScanGrid, Shots, TomographyConfig};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn scan(c: &mut Criterion) {
    let grid = ScanGrid {
        tau3_slices: vec![0.0, 0.5],
        spacing: 0.25,
    };
    let nm = NoiseModel::new(0.002, 0.02, 0.01).unwrap();
    let cfg = TomographyConfig {
        shots: Shots::Count(1024),
        seed: 1,
        ..Default::default()
    };
    let mut group = c.benchmark_group("tetrahedron_scan");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| tetrahedron_scan(&grid, &nm, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn brute_force(c: &mut Criterion) {
    let e1 = PauliChannel::new(PauliProbVector::new(vec![0.7, 0.1, 0.1, 0.1]).unwrap());
    let e2 = PauliChannel::new(PauliProbVector::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap());
    let mut group = c.benchmark_group("diamond_bruteforce");
    for (name, exec) in MODES {
        let opts = BruteForceOptions {
            execution: exec,
            ..Default::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| diamond_distance_bruteforce(&e1, &e2, &opts).unwrap())
        });
    }
    group.finish();
}

fn fitting(c: &mut Criterion) {
    let curve = StateCurve::from_pauli_map(&NamedMap::Parabolic.dynamical_map(), 41).unwrap();
    let mut group = c.benchmark_group("fit_onepr");
    group.sample_size(20);
    for (name, exec) in MODES {
        let opts = FitOptions {
            execution: exec,
            ..Default::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| fit_onepr(&curve, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, scan, brute_force, fitting);
criterion_main!(benches);
