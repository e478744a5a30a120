// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Circuits that implement a Pauli channel with controlled Paulis driven by
//! an ancilla register prepared in `Σ_γ √k_γ |γ⟩`.

use serde::{Deserialize, Serialize};

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::PauliProbVector;

/// Rotation angles of the one-qubit ancilla preparation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleTriple {
    pub theta0: f64,
    pub theta1: f64,
    pub theta2: f64,
}

/// Angles with `cos(θ₀/2) = √(k₀+k₁)`, `tan((θ₁+θ₂)/2) = √(k₁/k₀)` and
/// `tan((θ₂−θ₁)/2) = √(k₃/k₂)`, each half-angle in `[0, π/2]`.
///
/// A `0/0` ratio is read as zero: that branch carries no amplitude.
/// `θ₀` and `θ₂` lie in `[0, π]`; `θ₁` lies in `[−π/2, π/2]`. Shifting a
/// negative `θ₁` by `2π` would flip the sign of the prepared state.
pub fn one_qubit_angles(k: &PauliProbVector) -> Result<AngleTriple> {
    if k.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            what: "one-qubit probability vector",
            expected: 4,
            got: k.len(),
        });
    }
    let s: Vec<f64> = k.as_slice().iter().map(|v| v.max(0.0).sqrt()).collect();
    let theta0 = 2.0
        * (k[2] + k[3])
            .max(0.0)
            .sqrt()
            .atan2((k[0] + k[1]).max(0.0).sqrt());
    let sum = 2.0 * s[1].atan2(s[0]);
    let diff = 2.0 * s[3].atan2(s[2]);
    Ok(AngleTriple {
        theta0,
        theta1: (sum - diff) / 2.0,
        theta2: (sum + diff) / 2.0,
    })
}

/// Three-rotation preparation on two qubits (0 = high bit, 1 = low bit):
/// `RY(θ₀)` on the high bit, then `CX`, `RY(θ₁)`, `CX`, `RY(θ₂)` on the low
/// bit. The low bit sees `RY(θ₁+θ₂)` when the high bit is 0 and
/// `RY(θ₂−θ₁)` when it is 1.
pub fn three_rotation_preparation(angles: &AngleTriple) -> Circuit {
    let mut c = Circuit::new(2);
    c.extend([
        Gate::ry(0, angles.theta0),
        Gate::cx(0, 1),
        Gate::ry(1, angles.theta1),
        Gate::cx(0, 1),
        Gate::ry(1, angles.theta2),
    ])
    .expect("gates fit two qubits");
    c
}

/// Uniformly controlled `RY`: applies `RY(alphas[j])` to `target` when the
/// controls (first listed = most significant) read `j`. Uses `2^m` `RY`
/// rotations interleaved with `2^m` `CX` gates along a Gray code.
pub fn uniformly_controlled_ry(controls: &[usize], target: usize, alphas: &[f64]) -> Vec<Gate> {
    let m = controls.len();
    let n = 1usize << m;
    assert_eq!(alphas.len(), n, "one angle per control pattern");
    if m == 0 {
        return vec![Gate::ry(target, alphas[0])];
    }
    let gray = |i: usize| i ^ (i >> 1);
    let mut gates = Vec::with_capacity(2 * n);
    for i in 0..n {
        let g = gray(i);
        let theta: f64 = alphas
            .iter()
            .enumerate()
            .map(|(j, a)| {
                if (j & g).count_ones() % 2 == 0 {
                    *a
                } else {
                    -*a
                }
            })
            .sum::<f64>()
            / n as f64;
        if theta != 0.0 {
            gates.push(Gate::ry(target, theta));
        }
        let flip = g ^ gray((i + 1) % n);
        let bit = flip.trailing_zeros() as usize;
        gates.push(Gate::cx(controls[m - 1 - bit], target));
    }
    gates
}

/// Binary-tree preparation of `Σ_γ √k_γ |γ⟩` on `2N` qubits from `|0…0⟩`,
/// using only `RY` and `CX`.
pub fn prepare_ancilla_state(k: &PauliProbVector) -> Circuit {
    prepare_real_amplitudes(k.as_slice(), 2 * k.n_qubits())
}

/// Prepares `Σ_j √w_j |j⟩` on `n` qubits for nonnegative weights summing
/// to one, one uniformly controlled `RY` per tree level.
pub fn prepare_real_amplitudes(weights: &[f64], n: usize) -> Circuit {
    assert_eq!(weights.len(), 1 << n, "one weight per basis state");
    let mut c = Circuit::new(n);
    let mut prefix = vec![0.0; weights.len() + 1];
    for (i, v) in weights.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v.max(0.0);
    }
    let weight = |lo: usize, hi: usize| (prefix[hi] - prefix[lo]).max(0.0);
    for level in 0..n {
        let block = 1usize << (n - level);
        let alphas: Vec<f64> = (0..1usize << level)
            .map(|j| {
                let lo = j * block;
                let mid = lo + block / 2;
                2.0 * weight(mid, lo + block).sqrt().atan2(weight(lo, mid).sqrt())
            })
            .collect();
        if alphas.iter().all(|a| *a == 0.0) {
            continue;
        }
        let controls: Vec<usize> = (0..level).collect();
        c.extend(uniformly_controlled_ry(&controls, level, &alphas))
            .expect("indices below n");
    }
    c
}

/// `N` main qubits followed by `2N` ancillas. The ancilla pair of main
/// qubit `i` is `(N+2i, N+2i+1)`, high bit first; `CX` from the low bit and
/// `CY` from the high bit then apply `σ_γ` (with `γ = 3` realised as
/// `YX = −iZ`, a phase that the ancilla trace removes).
pub fn synthesize_channel_circuit(k: &PauliProbVector, n: usize) -> Result<Circuit> {
    if k.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            what: "probability vector",
            expected: 1 << (2 * n),
            got: k.len(),
        });
    }
    let mut c = Circuit::with_ancillas(3 * n, (n, 3 * n))?;
    let prep = if n == 1 {
        three_rotation_preparation(&one_qubit_angles(k)?)
    } else {
        prepare_ancilla_state(k)
    };
    c.append_shifted(&prep, n)?;
    for i in 0..n {
        let high = n + 2 * i;
        c.push(Gate::cx(high + 1, i))?;
        c.push(Gate::cy(high, i))?;
    }
    Ok(c)
}
