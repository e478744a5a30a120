// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Random one-qubit Pauli dynamical maps realisable by a 1PR circuit.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::OneprDecomposition;
use crate::channels::{DynamicalMap, DEFAULT_MAP_SAMPLES};
use crate::linalg::{c, orthonormal_complement, random_unit_vector, CMatrix, CVector, C64};
use crate::pauli::PauliProbVector;

/// Parameter range of generated maps; `s(p) = πp`.
pub const RANDOM_MAP_DOMAIN: (f64, f64) = (0.0, 1.0);

/// Unitary whose first row is `first` (a unit vector in `C⁴`); each later
/// row is a random unit combination of an orthonormal basis of what the
/// previous rows leave free.
fn unitary_with_first_row(first: CVector, rng: &mut ChaCha8Rng) -> CMatrix {
    let dim = first.len();
    let mut rows = vec![first];
    while rows.len() < dim {
        let free = orthonormal_complement(&rows, dim);
        let coef = random_unit_vector(free.len(), rng);
        let row = free
            .iter()
            .zip(coef.iter())
            .fold(CVector::zeros(dim), |acc, (w, r)| acc + w * *r);
        rows.push(row);
    }
    // rows are stored as vectors; the matrix whose i-th row is rows[i]
    CMatrix::from_columns(&rows).transpose()
}

/// Draws `|a|, |b|, |c|` from two uniform angles and rotates
/// `(|a||0⟩, |b||1⟩, |c||2⟩)` by a random unitary `V` whose first row is
/// `e^{iθ}(|a|, |b|, |c|, 0)`, so that `|a⟩ + |b⟩ + |c⟩ = e^{iθ}|0⟩`.
pub fn random_onepr_decomposition(seed: u64) -> OneprDecomposition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = rng.random_range(0.0..=FRAC_PI_2);
    let nu = rng.random_range(0.0..=FRAC_PI_2);
    let theta = rng.random_range(0.0..2.0 * PI);
    let norms = [nu.sin() * mu.cos(), nu.sin() * mu.sin(), nu.cos()];
    let phase = C64::from_polar(1.0, theta);
    let first = CVector::from_vec(vec![
        phase * norms[0],
        phase * norms[1],
        phase * norms[2],
        c(0.0, 0.0),
    ]);
    let v = unitary_with_first_row(first, &mut rng);
    let col = |j: usize| v.column(j) * c(norms[j], 0.0);
    let (lo, hi) = RANDOM_MAP_DOMAIN;
    OneprDecomposition::with_schedule(col(0), col(1), col(2), (lo, hi), DEFAULT_MAP_SAMPLES, |p| {
        PI * p
    })
    .expect("columns of a unitary scaled by norms whose squares sum to one")
}

/// A random decomposition and the one-qubit map `k_γ(p) = |β_γ(p)|²` it
/// induces.
pub fn random_onepr_map(seed: u64) -> (OneprDecomposition, DynamicalMap) {
    let d = random_onepr_decomposition(seed);
    let inner = d.clone();
    let (lo, hi) = RANDOM_MAP_DOMAIN;
    let map = DynamicalMap::from_fn(1, lo, hi, move |p| {
        let beta = inner.evaluate(p).expect("p inside the sampled domain");
        PauliProbVector::normalized(beta.iter().map(|z| z.norm_sqr()).collect())
            .expect("squared amplitudes of a unit vector")
    });
    (d, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_error;
    use crate::onepr::check_conditions;
    use crate::pauli::{k_to_tau, tetrahedron_contains};

    #[test]
    fn first_row_is_kept() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let first = random_unit_vector(4, &mut rng);
        let v = unitary_with_first_row(first.clone(), &mut rng);
        assert!(unitarity_error(&v) < 1e-12);
        assert!((v.row(0).transpose() - first).norm() < 1e-12);
    }

    #[test]
    fn maps_start_at_identity_and_stay_inside() {
        for seed in 0..40 {
            let (d, map) = random_onepr_map(seed);
            assert!(check_conditions(&d.a, &d.b, &d.c));
            let s0 = d.state_at_s(0.0);
            assert!((s0[0].norm() - 1.0).abs() < 1e-12, "seed {seed}");
            map.validate(DEFAULT_MAP_SAMPLES).unwrap();
            for (_, k) in map.sample(DEFAULT_MAP_SAMPLES) {
                assert!((k.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(tetrahedron_contains(&k_to_tau(&k)));
            }
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(random_onepr_decomposition(9), random_onepr_decomposition(9));
        assert_ne!(
            random_onepr_decomposition(9),
            random_onepr_decomposition(10)
        );
    }
}
